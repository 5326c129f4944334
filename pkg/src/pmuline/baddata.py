"""Residual-based bad-data screening around the full-matrix estimator.

A corrupted PMU sample (a spike at one time instant) inflates the fitted
residuals of its 12 design-system rows.  The screen computes a robust
per-sample statistic from those residuals, removes the worst offender
above a threshold, re-estimates, and repeats.

Scaling detail: the 12 row types of one sample mix equations of very
different natural size (series-current rows versus summed-current rows),
so a single global scale would either mask spikes or flag everything.
Each of the 12 row types is therefore scaled by its own robust spread
(median absolute deviation x 1.4826) taken across all samples, and the
per-sample statistic is the RMS of its 12 scaled rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LineParameters, SampleRecord, SequenceParameters
from .estimators import (
    DesignSystem,
    InsufficientExcitationError,
    build_design_system,
    estimate_optimal,
)

__all__ = ["ScreeningReport", "ExcessiveRejectionError", "scaled_residuals", "screen_and_estimate"]


class ExcessiveRejectionError(RuntimeError):
    """Screening would leave fewer than 2 samples."""


@dataclass(frozen=True)
class ScreeningReport:
    """Outcome of :func:`screen_and_estimate`.

    ``per_sample_scaled_residual`` is evaluated for every input sample
    (flagged ones included) against the final estimate, so flagged samples
    show their actual outlier magnitude.
    """

    flagged_sample_indices: list
    per_sample_scaled_residual: np.ndarray
    iterations: int
    final_estimate: LineParameters
    final_sequence: SequenceParameters


def scaled_residuals(system: DesignSystem, theta: np.ndarray) -> np.ndarray:
    """Per-sample robust residual statistic for a fitted theta.

    Returns one nonnegative value per sample: the RMS of the sample's 12
    residual rows, each divided by that row type's robust scale (MAD x
    1.4826 across samples).  All-zero residuals (an exact fit) yield all
    zeros.
    """
    residual = (system.h @ np.asarray(theta, dtype=float) - system.z).reshape(-1, 12)
    z_norm = np.linalg.norm(system.z)
    if np.linalg.norm(residual) <= 1e-9 * max(z_norm, 1.0):
        return np.zeros(residual.shape[0])
    scales = 1.4826 * np.median(
        np.abs(residual - np.median(residual, axis=0)), axis=0
    )
    # Degenerate row types (identically repeated residuals give MAD 0)
    # fall back to the row type's RMS so division stays meaningful.
    fallback = np.sqrt(np.mean(residual**2, axis=0))
    scales = np.where(scales > 0.0, scales, np.where(fallback > 0.0, fallback, 1.0))
    return np.sqrt(np.mean((residual / scales) ** 2, axis=1))


def screen_and_estimate(
    records: list[SampleRecord],
    threshold: float = 3.0,
    max_iterations: int = 5,
) -> ScreeningReport:
    """Iteratively estimate, flag the worst sample above ``threshold``,
    remove it and re-estimate.

    Stops when no survivor exceeds the threshold or ``max_iterations``
    estimates have been made.  Raises :class:`ExcessiveRejectionError` if
    a removal would leave fewer than 2 samples.  Ties on the statistic
    break toward the lowest original sample index.
    """
    if len(records) < 3:
        raise ValueError("screening needs at least 3 records")
    if threshold <= 0.0:
        raise ValueError("threshold must be positive")
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")

    surviving = list(range(len(records)))
    flagged: list[int] = []
    iterations = 0
    while True:
        subset = [records[i] for i in surviving]
        try:
            params, sequence, diagnostics = estimate_optimal(subset)
        except InsufficientExcitationError as exc:
            if flagged:
                raise ExcessiveRejectionError(
                    f"removals left {len(surviving)} samples that no longer excite the estimator"
                ) from exc
            raise
        iterations += 1
        statistics = diagnostics["per_sample_scaled_residual"]
        worst_local = int(np.argmax(statistics))  # first max = lowest original index
        if statistics[worst_local] <= threshold or iterations >= max_iterations:
            break
        if len(surviving) - 1 < 2:
            raise ExcessiveRejectionError("screening would leave fewer than 2 samples")
        flagged.append(surviving.pop(worst_local))

    # Final statistics for every input sample against the final fit.
    full_system = build_design_system(records)
    final_statistics = scaled_residuals(full_system, diagnostics["theta"])
    return ScreeningReport(
        flagged_sample_indices=sorted(flagged),
        per_sample_scaled_residual=final_statistics,
        iterations=iterations,
        final_estimate=params,
        final_sequence=sequence,
    )
