"""Monte Carlo experiment drivers.

Two studies:

* :func:`run_method_comparison` -- noiseless comparison of the three
  estimators on one line at a target load unbalance.  On an untransposed
  line the positive-sequence closed-form methods carry a model error that
  grows with unbalance, while the full-matrix estimator stays exact.
* :func:`run_length_sweep` -- standard-deviation-of-error versus line
  length under Gaussian measurement noise, with normal-theory 95%
  confidence intervals.

Aggregation over one noisy measurement set (N samples):

* ``optimal`` consumes all N samples and yields one estimate per set;
* ``single`` yields one estimate per sample; the per-sample errors are
  pooled across sets (its spread is a per-sample property, and averaging
  within a set first would report the spread of the mean instead);
* ``double`` yields one estimate per sample pair; pairs are built by
  sorting the set by scheduled load and pairing sample i with sample
  i + N/2, which keeps every pair's two operating points well separated
  (adjacent-in-time pairs sit at nearly the same load and make the 2x2
  solve explode under noise).  The pair estimates of a set are averaged
  into one estimate per set before the spread is computed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .core import LineParameters, phase_to_sequence, phasors_to_sequence
from .estimators import EstimationError, estimate_optimal
from .fixtures import REFERENCE_LENGTH_KM, untransposed_reference_line
from .simulator import (
    LoadProfile,
    NoiseSpec,
    UNBALANCE_PATTERN,
    add_noise,
    calibrate_unbalance,
    generate_series,
    scale_length,
)

__all__ = [
    "DEFAULT_LENGTH_GRID_KM",
    "default_sweep_profile",
    "SweepConfig",
    "SweepResult",
    "run_method_comparison",
    "run_length_sweep",
    "export_sweep",
    "load_sweep",
]

#: Default line-length grid for the sweep, kilometres.
DEFAULT_LENGTH_GRID_KM = (10.0, 14.5, 25.0, 50.0, 75.0, 100.0, 150.0, 200.0, 250.0)

#: Amplitude of the default sweep unbalance pattern.  Chosen large enough
#: that the daily record exercises directionally diverse operating points
#: (the full-matrix estimator needs them for a well-conditioned solve).
DEFAULT_SWEEP_UNBALANCE_AMPLITUDE = 1.8

PARAMETERS = ("R1", "X1", "B1")
METHODS = ("single", "double", "optimal")


def default_sweep_profile() -> LoadProfile:
    """Load profile used by the default sweep: diurnal 20-80% loading
    with a strongly diverse per-phase unbalance modulation."""
    return LoadProfile(
        unbalance=tuple(1.0 + DEFAULT_SWEEP_UNBALANCE_AMPLITUDE * UNBALANCE_PATTERN)
    )


@dataclass(frozen=True)
class SweepConfig:
    """Configuration of the length sweep."""

    lengths_km: tuple = DEFAULT_LENGTH_GRID_KM
    n_samples_per_set: int = 200
    m_sets: int = 100
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec(sigma_fraction=0.01, seed=7))
    base_line: LineParameters | None = None
    base_length_km: float = REFERENCE_LENGTH_KM
    methods: tuple = METHODS
    profile: LoadProfile | None = None

    def __post_init__(self):
        if any(length <= 0 for length in self.lengths_km):
            raise ValueError("all lengths must be positive")
        if self.m_sets < 2:
            raise ValueError("m_sets must be >= 2")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")


@dataclass(frozen=True)
class SweepRow:
    length_km: float
    method: str
    parameter: str
    mean_err_pct: float
    sd_err_pct: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class SweepResult:
    """Per (length, method, parameter) error statistics, percent of the
    true value, plus a count of estimator failures per (length, method)."""

    rows: list
    failures: dict

    def row(self, length_km: float, method: str, parameter: str) -> SweepRow:
        for r in self.rows:
            if (
                r.length_km == length_km
                and r.method == method
                and r.parameter == parameter
            ):
                return r
        raise KeyError((length_km, method, parameter))


def _sequence_truth(line: LineParameters) -> tuple[float, float, float]:
    z1 = phase_to_sequence(line.z_abc)[1, 1]
    b1 = phase_to_sequence(line.b_abc.astype(complex))[1, 1].real
    return z1.real, z1.imag, b1


def _stack_records(records) -> tuple[np.ndarray, ...]:
    """Positive-sequence components of a series as four (N,) arrays."""
    u_s = np.array([r.u_s for r in records])
    u_r = np.array([r.u_r for r in records])
    i_s = np.array([r.i_s for r in records])
    i_r = np.array([r.i_r for r in records])
    return tuple(np.stack([phasors_to_sequence(v) for v in m])[:, 1] for m in (u_s, u_r, i_s, i_r))


def _single_estimates(records) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized per-sample single-method (z1, y1) estimates."""
    u1s, u1r, i1s, i1r = _stack_records(records)
    z1 = (u1s**2 - u1r**2) / (i1s * u1r - i1r * u1s)
    y1 = 2.0 * (i1s + i1r) / (u1s + u1r)
    return z1, y1


def _spread_pairs(profile: LoadProfile, n: int) -> list:
    """Load-sorted disjoint pairs (i-th lightest with i-th heaviest-half)."""
    interval_hours = profile.sample_interval_minutes / 60.0
    fractions = [profile.load_fraction(k * interval_hours) for k in range(n)]
    order = np.argsort(fractions)
    half = n // 2
    return [(int(order[i]), int(order[i + half])) for i in range(half)]


def _double_estimates(records, pairs) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized per-pair double-method (z1, y1) estimates."""
    u1s, u1r, i1s, i1r = _stack_records(records)
    first = np.array([p[0] for p in pairs])
    second = np.array([p[1] for p in pairs])
    m = np.empty((len(pairs), 2, 2), dtype=complex)
    m[:, 0, 0] = u1r[first]
    m[:, 0, 1] = -i1r[first]
    m[:, 1, 0] = u1r[second]
    m[:, 1, 1] = -i1r[second]
    rhs = np.stack([u1s[first], u1s[second]], axis=1)
    ab = np.linalg.solve(m, rhs[..., None])[..., 0]
    z1 = ab[:, 1]
    y1 = 2.0 * (ab[:, 0] - 1.0) / ab[:, 1]
    return z1, y1


def run_method_comparison(
    line: LineParameters,
    unbalance_target: float = 14.0,
    n: int = 200,
    profile: LoadProfile | None = None,
) -> dict:
    """Noiseless comparison of the three methods on one line.

    Simulates ``n`` samples with the load unbalance calibrated to
    ``unbalance_target`` percent, runs every method, and reports R1/X1/B1
    percentage errors against the generating parameters.  For the
    ``optimal`` method the full estimated sequence matrices are included.
    Per-sample (single) and per-pair (double) estimates are averaged over
    the series.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if profile is None:
        profile = LoadProfile()
    multipliers = calibrate_unbalance(line, profile, unbalance_target, n_samples=n)
    profile = replace(profile, unbalance=multipliers)
    records = generate_series(line, profile, n)
    r1_true, x1_true, b1_true = _sequence_truth(line)

    def errors(z1: complex, y1: complex) -> dict:
        return {
            "R1": abs(z1.real - r1_true) / abs(r1_true) * 100.0,
            "X1": abs(z1.imag - x1_true) / abs(x1_true) * 100.0,
            "B1": abs(y1.imag - b1_true) / abs(b1_true) * 100.0,
        }

    z1_s, y1_s = _single_estimates(records)
    z1_d, y1_d = _double_estimates(records, _spread_pairs(profile, n))
    params, sequence, _ = estimate_optimal(records)
    z1_o = phase_to_sequence(params.z_abc)[1, 1]
    b1_o = phase_to_sequence(params.b_abc.astype(complex))[1, 1].real
    return {
        "unbalance_percent": unbalance_target,
        "single": errors(np.mean(z1_s), np.mean(y1_s)),
        "double": errors(np.mean(z1_d), np.mean(y1_d)),
        "optimal": errors(complex(z1_o.real, z1_o.imag), complex(0.0, b1_o)),
        "optimal_sequence": sequence,
    }


def run_length_sweep(config: SweepConfig) -> SweepResult:
    """Error-spread versus line length under measurement noise.

    For each length the base line is scaled, one noiseless series is
    generated, and ``m_sets`` independently noisy copies are estimated
    with every configured method.  Statistics are percent errors of
    R1/X1/B1; the 95% confidence interval is mean +/- 1.96 sd/sqrt(count).
    Estimator failures are counted per (length, method), never silently
    dropped.
    """
    base_line = config.base_line if config.base_line is not None else untransposed_reference_line()
    profile = config.profile if config.profile is not None else default_sweep_profile()
    rows: list[SweepRow] = []
    failures: dict = {}
    pairs = _spread_pairs(profile, config.n_samples_per_set)
    for length in config.lengths_km:
        line = scale_length(base_line, length / config.base_length_km)
        noiseless = generate_series(line, profile, config.n_samples_per_set)
        r1_true, x1_true, b1_true = _sequence_truth(line)
        truth = {"R1": r1_true, "X1": x1_true, "B1": b1_true}
        rng = np.random.default_rng(config.noise.seed)
        errors = {m: {p: [] for p in PARAMETERS} for m in config.methods}
        for method in config.methods:
            failures[(length, method)] = 0
        for _ in range(config.m_sets):
            noisy = [add_noise(r, config.noise, rng) for r in noiseless]
            if "optimal" in config.methods:
                try:
                    params, _, _ = estimate_optimal(noisy)
                    z1 = phase_to_sequence(params.z_abc)[1, 1]
                    b1 = phase_to_sequence(params.b_abc.astype(complex))[1, 1].real
                    estimates = {"R1": z1.real, "X1": z1.imag, "B1": b1}
                    for p in PARAMETERS:
                        errors["optimal"][p].append(
                            (estimates[p] - truth[p]) / truth[p] * 100.0
                        )
                except EstimationError:
                    failures[(length, "optimal")] += 1
            if "single" in config.methods:
                z1_s, y1_s = _single_estimates(noisy)
                estimates = {"R1": z1_s.real, "X1": z1_s.imag, "B1": y1_s.imag}
                for p in PARAMETERS:
                    errors["single"][p].extend(
                        ((estimates[p] - truth[p]) / truth[p] * 100.0).tolist()
                    )
            if "double" in config.methods:
                try:
                    z1_d, y1_d = _double_estimates(noisy, pairs)
                    estimates = {
                        "R1": np.mean(z1_d).real,
                        "X1": np.mean(z1_d).imag,
                        "B1": np.mean(y1_d).imag,
                    }
                    for p in PARAMETERS:
                        errors["double"][p].append(
                            (estimates[p] - truth[p]) / truth[p] * 100.0
                        )
                except np.linalg.LinAlgError:
                    failures[(length, "double")] += 1
        for method in config.methods:
            for p in PARAMETERS:
                values = np.asarray(errors[method][p])
                mean = float(np.mean(values))
                sd = float(np.std(values))
                half_width = float(1.96 * sd / np.sqrt(values.size))
                rows.append(
                    SweepRow(
                        length_km=float(length),
                        method=method,
                        parameter=p,
                        mean_err_pct=mean,
                        sd_err_pct=sd,
                        ci_lo=mean - half_width,
                        ci_hi=mean + half_width,
                    )
                )
    return SweepResult(rows=rows, failures=failures)


_SWEEP_HEADER = ["length_km", "method", "parameter", "mean_err_pct", "sd_err_pct", "ci_lo", "ci_hi"]


def export_sweep(result: SweepResult, path) -> None:
    """Write a sweep result as a plot-ready CSV (one row per
    length/method/parameter)."""
    if not result.rows:
        raise ValueError("sweep result is empty")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_SWEEP_HEADER)
        for r in result.rows:
            writer.writerow(
                [
                    repr(float(r.length_km)),
                    r.method,
                    r.parameter,
                    repr(float(r.mean_err_pct)),
                    repr(float(r.sd_err_pct)),
                    repr(float(r.ci_lo)),
                    repr(float(r.ci_hi)),
                ]
            )


def load_sweep(path) -> SweepResult:
    """Read back a CSV written by :func:`export_sweep` (failure counts are
    not serialized and come back empty)."""
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != _SWEEP_HEADER:
            raise ValueError(f"unexpected sweep header: {header}")
        for record in reader:
            rows.append(
                SweepRow(
                    length_km=float(record[0]),
                    method=record[1],
                    parameter=record[2],
                    mean_err_pct=float(record[3]),
                    sd_err_pct=float(record[4]),
                    ci_lo=float(record[5]),
                    ci_hi=float(record[6]),
                )
            )
    return SweepResult(rows=rows, failures={})
