"""The three line-parameter estimators.

* :func:`estimate_single` -- closed-form positive-sequence estimate from a
  single sample (exact only for a fully transposed line).
* :func:`estimate_double` -- positive-sequence estimate via two-port chain
  (ABCD) parameters identified from two samples at distinct operating
  points.
* :func:`estimate_optimal` -- the full-matrix linear least-squares
  estimator: 18 real unknowns (6 complex distinct series-admittance
  entries + 6 distinct shunt-susceptance entries) solved from the stacked
  12N x 18 design system built from N samples.

Plus :func:`compensate_mutual`, which removes a known externally induced
series voltage from the records before estimation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    THETA_SIZE,
    LineParameters,
    SampleRecord,
    SequenceParameters,
    PAIR_INDEX,
    phase_to_sequence,
    phasors_to_sequence,
    recover_line_parameters,
)

__all__ = [
    "EstimationError",
    "DegenerateSampleError",
    "InsufficientExcitationError",
    "PositiveSequenceEstimate",
    "DesignSystem",
    "estimate_single",
    "estimate_double",
    "build_design_system",
    "estimate_optimal",
    "compensate_mutual",
]


class EstimationError(RuntimeError):
    """Base class for estimator failures."""


class DegenerateSampleError(EstimationError):
    """A sample (or sample pair) is numerically degenerate for the
    requested closed-form method (e.g. open line, identical terminal
    conditions)."""


class InsufficientExcitationError(EstimationError):
    """The measurement set does not excite all 18 unknowns: the design
    system is (numerically) rank deficient."""


@dataclass(frozen=True)
class PositiveSequenceEstimate:
    """Positive-sequence parameter estimate: series impedance ``z1``
    (ohm) and total shunt admittance ``y1`` (siemens).  ``diagnostics``
    carries method-specific consistency information."""

    z1: complex
    y1: complex
    diagnostics: dict


def _positive_sequence(record: SampleRecord) -> tuple[complex, complex, complex, complex]:
    return (
        phasors_to_sequence(record.u_s)[1],
        phasors_to_sequence(record.u_r)[1],
        phasors_to_sequence(record.i_s)[1],
        phasors_to_sequence(record.i_r)[1],
    )


def estimate_single(record: SampleRecord) -> PositiveSequenceEstimate:
    """Closed-form positive-sequence estimate from one sample:
    ``z1 = (u1s^2 - u1r^2) / (i1s u1r - i1r u1s)`` and
    ``y1 = 2 (i1s + i1r) / (u1s + u1r)``."""
    u1s, u1r, i1s, i1r = _positive_sequence(record)
    z_den = i1s * u1r - i1r * u1s
    y_den = u1s + u1r
    v_scale = max(abs(u1s), abs(u1r))
    i_scale = max(abs(i1s), abs(i1r), 1.0)
    if abs(z_den) <= 1e-12 * v_scale * i_scale:
        raise DegenerateSampleError("impedance denominator vanishes (open or unloaded line)")
    if abs(y_den) <= 1e-12 * v_scale:
        raise DegenerateSampleError("admittance denominator vanishes (opposing terminal voltages)")
    z1 = (u1s**2 - u1r**2) / z_den
    y1 = 2.0 * (i1s + i1r) / y_den
    return PositiveSequenceEstimate(z1=complex(z1), y1=complex(y1), diagnostics={})


def estimate_double(r1: SampleRecord, r2: SampleRecord) -> PositiveSequenceEstimate:
    """Positive-sequence estimate from two samples via chain parameters.

    With load current ``-i1r`` flowing out of the receiving end, the
    two-port relations ``u1s = a u1r - b i1r`` and ``i1s = c u1r - d i1r``
    are solved from the two samples; then ``z1 = b`` and
    ``y1 = 2 (a - 1) / b``.  The deviations of the current-side
    parameters from their pi-model values are reported as diagnostics.
    """
    u1s_1, u1r_1, i1s_1, i1r_1 = _positive_sequence(r1)
    u1s_2, u1r_2, i1s_2, i1r_2 = _positive_sequence(r2)
    m = np.array([[u1r_1, -i1r_1], [u1r_2, -i1r_2]])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    scale = max(abs(u1r_1), abs(u1r_2)) * max(abs(i1r_1), abs(i1r_2), 1.0)
    if abs(det) <= 1e-9 * scale:
        raise InsufficientExcitationError(
            "the two samples are from indistinguishable operating points"
        )
    a, b = np.linalg.solve(m, np.array([u1s_1, u1s_2]))
    if abs(b) <= 1e-12 * max(abs(u1s_1), abs(u1s_2)) / max(abs(i1r_1), abs(i1r_2), 1.0):
        raise DegenerateSampleError("chain parameter b vanishes; series impedance unresolvable")
    c, d = np.linalg.solve(m, np.array([i1s_1, i1s_2]))
    z1 = complex(b)
    y1 = complex(2.0 * (a - 1.0) / b)
    diagnostics = {
        "a": complex(a),
        "b": complex(b),
        "c": complex(c),
        "d": complex(d),
        # For a reciprocal symmetric pi section, d == a and
        # c == y1 (1 + z1 y1 / 4); nonzero mismatch indicates noise or
        # model error.
        "d_minus_a": abs(d - a),
        "c_mismatch": abs(c - y1 * (1.0 + z1 * y1 / 4.0)),
    }
    return PositiveSequenceEstimate(z1=z1, y1=y1, diagnostics=diagnostics)


@dataclass(frozen=True)
class DesignSystem:
    """Stacked linear system ``h @ theta = z``: ``h`` is 12N x 18, ``z``
    is 12N, and ``sample_index_map[n]`` gives the source record index of
    row block ``n`` (rows ``12n .. 12n+11``)."""

    h: np.ndarray
    z: np.ndarray
    sample_index_map: np.ndarray

    def __post_init__(self):
        if self.h.ndim != 2 or self.h.shape[1] != THETA_SIZE or self.h.shape[0] % 12 != 0:
            raise ValueError("h must be 12N x 18")
        if self.z.shape != (self.h.shape[0],):
            raise ValueError("z length must match h row count")

    @property
    def n_samples(self) -> int:
        return self.h.shape[0] // 12


def build_design_system(records: list[SampleRecord]) -> DesignSystem:
    """Build the 12N x 18 design system from N samples.

    Per sample, the two complex 3-vector nodal equations are rearranged so
    that every term containing an unknown sits on the left:

    * rows 0-2 / 6-8 (real/imag parts of the sending-end equation):
      the series columns carry Re/Im combinations of
      ``delta_u = u_s - u_r``, the shunt columns carry
      ``-Im(u_s)/2`` / ``+Re(u_s)/2``, and the right side is
      ``Re(i_s)`` / ``Im(i_s)``;
    * rows 3-5 / 9-11 (real/imag parts of the summed two-terminal
      equation): only the shunt columns are nonzero, carrying
      ``Im(u_s + u_r)/2`` / ``Re(u_s + u_r)/2``, with right side
      ``-Re(i_s + i_r)`` / ``Im(i_s + i_r)``.

    These signs are pinned by the ground-truth substitution oracle in the
    test suite: for the true theta of a simulated line, ``h @ theta``
    reproduces ``z`` to machine precision on noiseless records.
    """
    if not records:
        raise ValueError("records must be nonempty")
    n = len(records)
    u_s = np.empty((n, 3), dtype=complex)
    u_r = np.empty((n, 3), dtype=complex)
    i_s = np.empty((n, 3), dtype=complex)
    i_r = np.empty((n, 3), dtype=complex)
    for idx, record in enumerate(records):
        for source, target in (
            (record.u_s, u_s),
            (record.u_r, u_r),
            (record.i_s, i_s),
            (record.i_r, i_r),
        ):
            if not np.all(np.isfinite(source)):
                raise ValueError(f"record {idx} contains non-finite measurements")
            target[idx] = source
    delta_u = u_s - u_r
    delta_i = i_s + i_r
    sum_u = u_s + u_r

    h = np.zeros((n, 12, THETA_SIZE))
    z = np.empty((n, 12))
    for x in range(3):
        for y in range(3):
            k = PAIR_INDEX[(x, y)]
            h[:, x, 2 * k] += delta_u[:, y].real
            h[:, x, 2 * k + 1] += -delta_u[:, y].imag
            h[:, x, 12 + k] += -0.5 * u_s[:, y].imag
            h[:, 6 + x, 2 * k] += delta_u[:, y].imag
            h[:, 6 + x, 2 * k + 1] += delta_u[:, y].real
            h[:, 6 + x, 12 + k] += 0.5 * u_s[:, y].real
            h[:, 3 + x, 12 + k] += 0.5 * sum_u[:, y].imag
            h[:, 9 + x, 12 + k] += 0.5 * sum_u[:, y].real
        z[:, x] = i_s[:, x].real
        z[:, 6 + x] = i_s[:, x].imag
        z[:, 3 + x] = -delta_i[:, x].real
        z[:, 9 + x] = delta_i[:, x].imag
    return DesignSystem(
        h=h.reshape(12 * n, THETA_SIZE),
        z=z.reshape(12 * n),
        sample_index_map=np.arange(n),
    )


def solve_design_system(
    system: DesignSystem, excitation_tol: float = 1e-8
) -> tuple[np.ndarray, dict]:
    """Least-squares solve of a design system with column equilibration.

    The series and shunt columns differ by orders of magnitude, so each
    column is scaled to unit norm before the orthogonal-factorization
    solve and unscaled afterwards.  Raises
    :class:`InsufficientExcitationError` when the smallest singular value
    of the equilibrated matrix falls below ``excitation_tol`` times the
    largest.
    """
    column_norms = np.linalg.norm(system.h, axis=0)
    if np.any(column_norms == 0.0):
        raise InsufficientExcitationError("an unknown is entirely unexcited (zero column)")
    h_scaled = system.h / column_norms
    singular_values = np.linalg.svd(h_scaled, compute_uv=False)
    if singular_values.size < THETA_SIZE or singular_values[-1] < excitation_tol * singular_values[0]:
        raise InsufficientExcitationError(
            "insufficient excitation: design system is numerically rank deficient "
            f"(sigma_min/sigma_max = {singular_values[-1] / singular_values[0]:.3e})"
        )
    theta_scaled, *_ = np.linalg.lstsq(h_scaled, system.z, rcond=None)
    theta = theta_scaled / column_norms
    residual = system.h @ theta - system.z
    diagnostics = {
        "residual_norm": float(np.linalg.norm(residual)),
        "condition": float(singular_values[0] / singular_values[-1]),
    }
    return theta, diagnostics


def estimate_optimal(
    records: list[SampleRecord],
    excitation_tol: float = 1e-8,
    condition_cap: float = 1e12,
) -> tuple[LineParameters, SequenceParameters, dict]:
    """Full-matrix linear least-squares estimate from N >= 2 samples.

    Returns phase-domain parameters, their sequence transform, and a
    diagnostics dict with the residual norm, the equilibrated condition
    estimate and the per-sample scaled residuals.
    """
    if len(records) < 2:
        raise ValueError("estimate_optimal needs at least 2 records")
    system = build_design_system(records)
    theta, diagnostics = solve_design_system(system, excitation_tol=excitation_tol)
    params = recover_line_parameters(theta, condition_cap=condition_cap)
    sequence = SequenceParameters(
        z_012=phase_to_sequence(params.z_abc),
        b_012=phase_to_sequence(params.b_abc.astype(complex)),
    )
    from .baddata import scaled_residuals  # deferred: baddata wraps this module

    diagnostics["per_sample_scaled_residual"] = scaled_residuals(system, theta)
    diagnostics["theta"] = theta
    return params, sequence, diagnostics


def compensate_mutual(
    records: list[SampleRecord], induced: list[np.ndarray]
) -> list[SampleRecord]:
    """Remove a known externally induced series voltage from each record.

    ``induced[k]`` holds the 3 induced voltage phasors of record ``k``;
    they are subtracted from the sending-end voltages so that the
    voltage-drop terms seen by the estimators become
    ``u_s - u_r - u_induced``.  Currents are unchanged.
    """
    if len(induced) != len(records):
        raise ValueError(
            f"induced list length {len(induced)} does not match record count {len(records)}"
        )
    compensated = []
    for record, v in zip(records, induced):
        v = np.asarray(v, dtype=complex)
        if v.shape != (3,):
            raise ValueError("each induced entry must hold 3 phasors")
        compensated.append(
            SampleRecord(
                timestamp_us=record.timestamp_us,
                u_s=record.u_s - v,
                u_r=record.u_r,
                i_s=record.i_s,
                i_r=record.i_r,
            )
        )
    return compensated
