"""Forward pi-model simulator.

Generates noiseless :class:`~pmuline.core.SampleRecord` series from known
line parameters under a configurable diurnal load, and injects Gaussian
measurement noise.

Model choices (see the repository notes for rationale):

* stiff balanced sending source at nominal 230 kV line-to-line unless a
  different sending voltage is passed explicitly;
* constant-admittance per-phase wye load, recomputed each time step from a
  sinusoidal daily load fraction between ``min_fraction`` and
  ``max_fraction`` of the line capacity;
* optional per-phase load unbalance via complex multipliers, modulated
  over time by per-phase sinusoids (staggered in time) so that a long
  record contains directionally diverse operating points -- a static
  multiplier pattern would make every sample's voltage-drop direction
  nearly identical and leave the full-matrix estimator poorly excited;
* noise: independent additive Gaussian on the real and imaginary part of
  every phasor with standard deviation ``sigma_fraction`` times that
  phasor's magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ALPHA, LineParameters, SampleRecord, degree_of_unbalance

__all__ = [
    "NOMINAL_PHASE_VOLTAGE",
    "BALANCED_SENDING_VOLTAGE",
    "UNBALANCE_PATTERN",
    "LoadProfile",
    "NoiseSpec",
    "solve_terminal_currents",
    "generate_series",
    "add_noise",
    "add_noise_series",
    "scale_length",
    "calibrate_unbalance",
]

#: Nominal phase-to-ground voltage magnitude, volts (230 kV line-to-line).
NOMINAL_PHASE_VOLTAGE = 230e3 / np.sqrt(3)

#: Default stiff balanced sending-end voltage (a-b-c rotation).
BALANCED_SENDING_VOLTAGE = NOMINAL_PHASE_VOLTAGE * np.array(
    [1.0, np.exp(-2j * np.pi / 3), np.exp(2j * np.pi / 3)]
)

#: Unit-amplitude per-phase pattern used to build unbalanced load
#: multipliers: a rotated negative-sequence injection, so scaling its
#: amplitude moves the negative- over positive-sequence current ratio
#: smoothly without collapsing any single phase.
UNBALANCE_PATTERN = np.exp(1j * 5 * np.pi / 6) * np.array([1.0, ALPHA, ALPHA**2])


@dataclass(frozen=True)
class LoadProfile:
    """Receiving-end load schedule.

    The scheduled load fraction follows a sinusoid with ``period_hours``
    between ``min_fraction`` and ``max_fraction`` of ``capacity_va``.
    ``unbalance`` holds three complex per-phase load multipliers (all 1 =
    balanced); their deviation from 1 is modulated per phase by
    ``0.5 + 0.5 sin(2 pi (t + stagger_p) / period_p)`` using
    ``modulation_period_hours`` and ``modulation_stagger_hours``.
    """

    period_hours: float = 24.0
    min_fraction: float = 0.2
    max_fraction: float = 0.8
    sample_interval_minutes: float = 5.0
    unbalance: tuple = (1.0, 1.0, 1.0)
    power_factor: float = 0.95
    capacity_va: float = 300e6
    modulation_period_hours: tuple = (24.0, 24.0, 24.0)
    modulation_stagger_hours: tuple = (0.0, 4.0, 8.0)

    def __post_init__(self):
        if not (0.0 < self.min_fraction < self.max_fraction <= 1.0):
            raise ValueError("need 0 < min_fraction < max_fraction <= 1")
        if self.sample_interval_minutes <= 0.0:
            raise ValueError("sample_interval_minutes must be positive")
        if not (0.0 < self.power_factor <= 1.0):
            raise ValueError("power_factor must be in (0, 1]")
        if self.capacity_va <= 0.0:
            raise ValueError("capacity_va must be positive")
        for name in ("unbalance", "modulation_period_hours", "modulation_stagger_hours"):
            value = tuple(getattr(self, name))
            if len(value) != 3:
                raise ValueError(f"{name} must hold exactly 3 values")
            object.__setattr__(self, name, value)

    def load_fraction(self, t_hours: float) -> float:
        """Scheduled load fraction at time ``t_hours``."""
        mid = 0.5 * (self.min_fraction + self.max_fraction)
        half = 0.5 * (self.max_fraction - self.min_fraction)
        return mid + half * np.sin(2.0 * np.pi * t_hours / self.period_hours)

    def phase_multipliers(self, t_hours: float) -> np.ndarray:
        """Per-phase complex load multipliers at time ``t_hours``."""
        stagger = np.asarray(self.modulation_stagger_hours, dtype=float)
        periods = np.asarray(self.modulation_period_hours, dtype=float)
        weight = 0.5 + 0.5 * np.sin(2.0 * np.pi * (t_hours + stagger) / periods)
        return 1.0 + (np.asarray(self.unbalance, dtype=complex) - 1.0) * weight


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian measurement noise: per-component standard deviation equal
    to ``sigma_fraction`` of the parent phasor magnitude, seeded RNG."""

    sigma_fraction: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.sigma_fraction < 0.0:
            raise ValueError("sigma_fraction must be >= 0")


def solve_terminal_currents(
    params: LineParameters, u_s: np.ndarray, u_r: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Terminal currents of the pi model for given terminal voltages.

    Both returned currents flow INTO the line:
    ``i_s = z_abc^-1 (u_s - u_r) + (j/2) b_abc u_s`` and
    ``i_r = (j/2) b_abc u_r - z_abc^-1 (u_s - u_r)``.
    """
    u_s = np.asarray(u_s, dtype=complex)
    u_r = np.asarray(u_r, dtype=complex)
    y_p = np.linalg.inv(params.z_abc)
    shunt = 0.5j * params.b_abc
    series_current = y_p @ (u_s - u_r)
    i_s = series_current + shunt @ u_s
    i_r = shunt @ u_r - series_current
    return i_s, i_r


def generate_series(
    params: LineParameters,
    profile: LoadProfile,
    n_samples: int,
    sending_voltage: np.ndarray | None = None,
) -> list[SampleRecord]:
    """Simulate ``n_samples`` noiseless records under the load profile.

    Each sample forms the per-phase constant-admittance load from the
    scheduled fraction and phase multipliers, solves the receiving-end
    voltage from the nodal equations, and records all 12 phasors.
    Timestamps advance by ``sample_interval_minutes`` starting at 0.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    u_s = (
        BALANCED_SENDING_VOLTAGE.copy()
        if sending_voltage is None
        else np.asarray(sending_voltage, dtype=complex)
    )
    y_p = np.linalg.inv(params.z_abc)
    shunt = 0.5j * params.b_abc
    phase_voltage = np.abs(u_s).mean()
    phi = np.arccos(profile.power_factor)
    load_scale = profile.capacity_va / (3.0 * phase_voltage**2)
    load_angle = profile.power_factor - 1j * np.sin(phi)
    interval_us = int(round(profile.sample_interval_minutes * 60e6))
    records = []
    for k in range(n_samples):
        t_hours = k * profile.sample_interval_minutes / 60.0
        fraction = profile.load_fraction(t_hours)
        multipliers = profile.phase_multipliers(t_hours)
        y_load = np.diag(fraction * load_scale * load_angle * multipliers)
        lhs = y_p + shunt + y_load
        try:
            u_r = np.linalg.solve(lhs, y_p @ u_s)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(f"network solve failed at sample {k}") from exc
        i_s, i_r = solve_terminal_currents(params, u_s, u_r)
        records.append(
            SampleRecord(timestamp_us=k * interval_us, u_s=u_s, u_r=u_r, i_s=i_s, i_r=i_r)
        )
    return records


def _noisy_triplet(v: np.ndarray, sigma_fraction: float, rng: np.random.Generator) -> np.ndarray:
    sigma = sigma_fraction * np.abs(v)
    return v + sigma * (rng.normal(size=3) + 1j * rng.normal(size=3))


def add_noise(
    record: SampleRecord, spec: NoiseSpec, rng: np.random.Generator | None = None
) -> SampleRecord:
    """Return a copy of the record with Gaussian noise on all 24 real
    components.  Deterministic for a fixed ``spec.seed`` (pass ``rng`` to
    share one stream over many records)."""
    if spec.sigma_fraction == 0.0:
        return record
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    return SampleRecord(
        timestamp_us=record.timestamp_us,
        u_s=_noisy_triplet(record.u_s, spec.sigma_fraction, rng),
        u_r=_noisy_triplet(record.u_r, spec.sigma_fraction, rng),
        i_s=_noisy_triplet(record.i_s, spec.sigma_fraction, rng),
        i_r=_noisy_triplet(record.i_r, spec.sigma_fraction, rng),
    )


def add_noise_series(
    records: list[SampleRecord], spec: NoiseSpec, rng: np.random.Generator | None = None
) -> list[SampleRecord]:
    """Noisy copy of a whole series using a single RNG stream."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    return [add_noise(r, spec, rng) for r in records]


def scale_length(params: LineParameters, factor: float) -> LineParameters:
    """Nominal-pi linear length scaling: both matrices times ``factor``."""
    if factor <= 0.0:
        raise ValueError("factor must be positive")
    return LineParameters(z_abc=params.z_abc * factor, b_abc=params.b_abc * factor)


def mean_degree_of_unbalance(records: list[SampleRecord]) -> float:
    """Mean sending-current unbalance over a series, percent."""
    return float(np.mean([degree_of_unbalance(r.i_s) for r in records]))


def calibrate_unbalance(
    params: LineParameters,
    profile: LoadProfile,
    target_percent: float,
    n_samples: int = 200,
    max_amplitude: float = 4.0,
) -> tuple:
    """Bisect the amplitude of :data:`UNBALANCE_PATTERN` so that the mean
    degree of unbalance of a simulated series hits ``target_percent``.

    Returns the calibrated 3-tuple of complex load multipliers, suitable
    for ``dataclasses.replace(profile, unbalance=...)``.
    """
    if target_percent < 0.0:
        raise ValueError("target_percent must be >= 0")
    if target_percent == 0.0:
        return (1.0, 1.0, 1.0)
    from dataclasses import replace

    def mean_unbalance(amplitude: float) -> float:
        candidate = replace(profile, unbalance=tuple(1.0 + amplitude * UNBALANCE_PATTERN))
        return mean_degree_of_unbalance(generate_series(params, candidate, n_samples))

    lo, hi = 0.0, max_amplitude
    if mean_unbalance(hi) < target_percent:
        raise ValueError(
            f"target unbalance {target_percent}% unreachable with amplitude <= {max_amplitude}"
        )
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mean_unbalance(mid) < target_percent:
            lo = mid
        else:
            hi = mid
    amplitude = 0.5 * (lo + hi)
    return tuple(1.0 + amplitude * UNBALANCE_PATTERN)
