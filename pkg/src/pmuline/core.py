"""Phasor and symmetrical-components algebra.

Domain types and pure helper operations shared by the simulator, the
estimators and the experiment drivers:

* :class:`SampleRecord` -- one synchronized set of 12 terminal phasors.
* :class:`LineParameters` -- series impedance ``z_abc`` (ohm, line total)
  and shunt susceptance ``b_abc`` (siemens, line total), both 3x3 symmetric.
* :class:`SequenceParameters` -- the same quantities in the symmetrical
  component (0, 1, 2) = (zero, positive, negative) domain.
* the 18-entry real parameter vector ("theta") used by the full-matrix
  least-squares estimator, together with its pack/unpack bijection.

Phasors are stored rectangular (complex numbers); polar form appears only
at I/O boundaries.  All matrices here are line totals, never
per-unit-length; length scaling lives in the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ALPHA",
    "THETA_SIZE",
    "SampleRecord",
    "LineParameters",
    "SequenceParameters",
    "ParameterRecoveryError",
    "sequence_transform",
    "phase_to_sequence",
    "sequence_to_phase",
    "pack_theta",
    "unpack_theta",
    "recover_line_parameters",
    "degree_of_unbalance",
]

#: Rotation operator a = exp(j 120 deg).
ALPHA = np.exp(2j * np.pi / 3)

#: Number of real unknowns in the full-matrix parameter vector.
THETA_SIZE = 18

_A = np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, ALPHA**2, ALPHA],
        [1.0, ALPHA, ALPHA**2],
    ],
    dtype=complex,
)
_A_INV = (1.0 / 3.0) * np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, ALPHA, ALPHA**2],
        [1.0, ALPHA**2, ALPHA],
    ],
    dtype=complex,
)

# The six distinct entries of a symmetric 3x3 matrix, in the canonical
# order used by the theta vector: aa, bb, cc, ab, bc, ac.
_SYM_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2))

#: Map (row, col) -> index of the distinct entry, both orientations.
PAIR_INDEX = {
    (0, 0): 0, (1, 1): 1, (2, 2): 2,
    (0, 1): 3, (1, 0): 3,
    (1, 2): 4, (2, 1): 4,
    (0, 2): 5, (2, 0): 5,
}


class ParameterRecoveryError(ValueError):
    """Raised when a theta vector cannot be converted back to line
    parameters because the assembled admittance matrix is singular or
    ill-conditioned.  Carries the condition estimate in ``condition``."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


def _as_phasor_triplet(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=complex)
    if arr.shape != (3,):
        raise ValueError(f"{name} must hold exactly 3 phasors, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite phasors")
    return arr


@dataclass(frozen=True)
class SampleRecord:
    """One time-stamped set of 12 terminal phasors.

    Voltages in volts, currents in amperes.  Both current triplets are
    directed INTO the line, so the two nodal equations of the pi model
    hold with plus signs on both terminal currents.
    """

    timestamp_us: int
    u_s: np.ndarray
    u_r: np.ndarray
    i_s: np.ndarray
    i_r: np.ndarray

    def __post_init__(self):
        for name in ("u_s", "u_r", "i_s", "i_r"):
            arr = _as_phasor_triplet(getattr(self, name), name)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "timestamp_us", int(self.timestamp_us))


def _check_symmetric(m: np.ndarray, name: str, rtol: float = 1e-9) -> None:
    scale = np.abs(m).max()
    if scale == 0:
        return
    if np.abs(m - m.T).max() > rtol * scale:
        raise ValueError(f"{name} must be symmetric")


@dataclass(frozen=True)
class LineParameters:
    """Phase-domain line constants: 3x3 complex symmetric series impedance
    ``z_abc`` (ohm, line total) and 3x3 real symmetric shunt susceptance
    ``b_abc`` (siemens, line total; shunt conductance is neglected)."""

    z_abc: np.ndarray
    b_abc: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z_abc, dtype=complex)
        b = np.asarray(self.b_abc, dtype=float)
        for name, m in (("z_abc", z), ("b_abc", b)):
            if m.shape != (3, 3):
                raise ValueError(f"{name} must be 3x3, got {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ValueError(f"{name} contains non-finite entries")
            _check_symmetric(m, name)
        # Store exactly symmetric copies so downstream packing never sees
        # representation noise on the off-diagonals.
        z = (z + z.T) / 2.0
        b = (b + b.T) / 2.0
        z.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "z_abc", z)
        object.__setattr__(self, "b_abc", b)


@dataclass(frozen=True)
class SequenceParameters:
    """Sequence-domain line constants with ordering (0, 1, 2) =
    (zero, positive, negative) on both axes.  For a fully transposed line
    both matrices are diagonal; off-diagonal entries are the inter-sequence
    mutual terms of an untransposed line."""

    z_012: np.ndarray
    b_012: np.ndarray

    def __post_init__(self):
        for name in ("z_012", "b_012"):
            m = np.asarray(getattr(self, name), dtype=complex)
            if m.shape != (3, 3):
                raise ValueError(f"{name} must be 3x3, got {m.shape}")
            m.flags.writeable = False
            object.__setattr__(self, name, m)


def sequence_transform() -> tuple[np.ndarray, np.ndarray]:
    """Return the phase-to-sequence transformation matrix ``A`` and its
    exact inverse, with a = exp(j 120 deg) and sequence order (0, 1, 2)."""
    return _A.copy(), _A_INV.copy()


def phase_to_sequence(m: np.ndarray) -> np.ndarray:
    """Similarity-transform a 3x3 phase-domain matrix into the sequence
    domain: ``A^-1 @ m @ A``."""
    return _A_INV @ np.asarray(m, dtype=complex) @ _A


def sequence_to_phase(m: np.ndarray) -> np.ndarray:
    """Inverse of :func:`phase_to_sequence`: ``A @ m @ A^-1``."""
    return _A @ np.asarray(m, dtype=complex) @ _A_INV


def phasors_to_sequence(v: np.ndarray) -> np.ndarray:
    """Transform a length-3 phase phasor set into its (0, 1, 2) sequence
    components: ``A^-1 @ v``."""
    return _A_INV @ np.asarray(v, dtype=complex)


def pack_theta(y_p: np.ndarray, b_abc: np.ndarray) -> np.ndarray:
    """Pack the series admittance matrix ``y_p = z_abc^-1`` and the shunt
    susceptance matrix into the 18-entry real parameter vector.

    Ordering: [G_a, T_a, G_b, T_b, G_c, T_c, G_ab, T_ab, G_bc, T_bc,
    G_ac, T_ac, B_a, B_b, B_c, B_ab, B_bc, B_ac], where G/T are the real
    and imaginary parts of the six distinct y_p entries.
    """
    y = np.asarray(y_p, dtype=complex)
    b = np.asarray(b_abc)
    if y.shape != (3, 3) or b.shape != (3, 3):
        raise ValueError("pack_theta expects two 3x3 matrices")
    _check_symmetric(y, "y_p")
    _check_symmetric(b, "b_abc")
    if np.abs(np.asarray(b, dtype=complex).imag).max() > 0:
        raise ValueError("b_abc must be real")
    theta = np.zeros(THETA_SIZE)
    for k, (i, j) in enumerate(_SYM_PAIRS):
        theta[2 * k] = y[i, j].real
        theta[2 * k + 1] = y[i, j].imag
        theta[12 + k] = float(np.real(b[i, j]))
    return theta


def unpack_theta(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`pack_theta`: rebuild the symmetric ``y_p`` and
    ``b_abc`` matrices from the 18-entry vector."""
    t = np.asarray(theta, dtype=float)
    if t.shape != (THETA_SIZE,):
        raise ValueError(f"theta must have {THETA_SIZE} entries, got {t.shape}")
    y_p = np.zeros((3, 3), dtype=complex)
    b = np.zeros((3, 3))
    for k, (i, j) in enumerate(_SYM_PAIRS):
        y_p[i, j] = y_p[j, i] = t[2 * k] + 1j * t[2 * k + 1]
        b[i, j] = b[j, i] = t[12 + k]
    return y_p, b


def recover_line_parameters(theta: np.ndarray, condition_cap: float = 1e12) -> LineParameters:
    """Convert a theta vector into :class:`LineParameters` by inverting the
    assembled series admittance matrix.

    Raises :class:`ParameterRecoveryError` when the admittance matrix is
    singular or its condition number exceeds ``condition_cap``.
    """
    y_p, b = unpack_theta(theta)
    singular_values = np.linalg.svd(y_p, compute_uv=False)
    if singular_values[-1] == 0.0:
        raise ParameterRecoveryError("series admittance matrix is singular", np.inf)
    condition = float(singular_values[0] / singular_values[-1])
    if condition > condition_cap:
        raise ParameterRecoveryError(
            f"series admittance matrix is ill-conditioned (cond={condition:.3e})",
            condition,
        )
    z_abc = np.linalg.inv(y_p)
    # y_p is symmetric, so its inverse is too; symmetrize away roundoff.
    z_abc = (z_abc + z_abc.T) / 2.0
    return LineParameters(z_abc=z_abc, b_abc=b)


def degree_of_unbalance(i: np.ndarray) -> float:
    """Negative- over positive-sequence current magnitude ratio, percent.

    Raises ``ValueError`` when the positive-sequence component is zero
    (the ratio is undefined there).
    """
    i = np.asarray(i, dtype=complex)
    seq = phasors_to_sequence(i)
    i1 = np.abs(seq[1])
    if i1 <= 1e-12 * max(float(np.abs(i).max()), 1e-300):
        raise ValueError("degree of unbalance undefined: positive-sequence current is zero")
    return float(np.abs(seq[2]) / i1 * 100.0)
