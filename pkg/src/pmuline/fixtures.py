"""Bundled reference line fixtures.

Both fixtures describe the same physical 230 kV, 14.5 km line; they differ
in whether the line is fully transposed.  The transposed variant is
published as diagonal sequence constants; the untransposed variant as a
full sequence matrix including the inter-sequence mutual terms.  Each
fixture carries the reference values exactly as published for that
variant (the two sources round the positive-sequence susceptance slightly
differently, so the fixtures intentionally do not share it).
"""

from __future__ import annotations

import numpy as np

from .core import LineParameters, sequence_to_phase

__all__ = [
    "REFERENCE_LENGTH_KM",
    "TRANSPOSED_SEQUENCE_REFERENCE",
    "UNTRANSPOSED_SEQUENCE_REFERENCE",
    "transposed_reference_line",
    "untransposed_reference_line",
]

#: Physical length of the reference line in kilometres.
REFERENCE_LENGTH_KM = 14.5

#: Reference sequence constants of the fully transposed variant
#: (line totals: ohm for impedances, siemens for susceptances).
TRANSPOSED_SEQUENCE_REFERENCE = {
    "z0": 3.3455 + 22.8057j,
    "z1": 0.8839 + 6.9188j,
    "b0": 2.7633e-05,
    "b1": 5.0198e-05,
}

#: Reference sequence matrices of the untransposed variant, ordering
#: (0, 1, 2) on both axes.
UNTRANSPOSED_SEQUENCE_REFERENCE = {
    "z_012": np.array(
        [
            [3.3455 + 22.8057j, 0.2213 - 0.1396j, -0.2054 - 0.1305j],
            [-0.2054 - 0.1305j, 0.8839 + 6.9188j, -0.4369 + 0.2524j],
            [0.2213 - 0.1396j, 0.4371 + 0.2522j, 0.8839 + 6.9188j],
        ]
    ),
    "b_012": np.array(
        [
            [2.7630e-05, 1.5805e-06, 1.5805e-06],
            [1.5805e-06, 5.0188e-05, -1.6869e-06],
            [1.5805e-06, -1.6869e-06, 5.0188e-05],
        ],
        dtype=complex,
    ),
}


def transposed_reference_line() -> LineParameters:
    """Phase-domain parameters of the fully transposed reference line.

    Built from the diagonal sequence constants: self = (z0 + 2 z1)/3 and
    mutual = (z0 - z1)/3, so the round trip back to the sequence domain
    reproduces the reference values exactly.
    """
    ref = TRANSPOSED_SEQUENCE_REFERENCE
    z_self = (ref["z0"] + 2.0 * ref["z1"]) / 3.0
    z_mutual = (ref["z0"] - ref["z1"]) / 3.0
    z = np.full((3, 3), z_mutual, dtype=complex)
    np.fill_diagonal(z, z_self)
    b_self = (ref["b0"] + 2.0 * ref["b1"]) / 3.0
    b_mutual = (ref["b0"] - ref["b1"]) / 3.0
    b = np.full((3, 3), b_mutual)
    np.fill_diagonal(b, b_self)
    return LineParameters(z_abc=z, b_abc=b)


def untransposed_reference_line() -> LineParameters:
    """Phase-domain parameters of the untransposed reference line,
    reconstructed from the full published sequence matrices.

    The published values are rounded to 4-5 digits, so the reconstructed
    phase matrices are symmetric only to that rounding level; symmetry is
    restored structurally (the physical matrices are exactly symmetric).
    """
    z = sequence_to_phase(UNTRANSPOSED_SEQUENCE_REFERENCE["z_012"])
    b = sequence_to_phase(UNTRANSPOSED_SEQUENCE_REFERENCE["b_012"]).real
    z = (z + z.T) / 2.0
    b = (b + b.T) / 2.0
    return LineParameters(z_abc=z, b_abc=b)
