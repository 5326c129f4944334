"""File formats: sample CSV and line-parameters JSON.

Sample CSV: a header row, then one row per sample with 49 columns --
``timestamp_us`` followed by four columns per phasor (magnitude in
volts/amperes, angle in degrees in (-180, 180], then the real and
imaginary rectangular components) for each of the 12 phasors in the
fixed order Ua_S, Ub_S, Uc_S, Ua_R, Ub_R, Uc_R, Ia_S, Ib_S, Ic_S, Ia_R,
Ib_R, Ic_R.  PMUs natively report polar quantities, which keeps the file
human-checkable; the rectangular columns are what the reader consumes,
so the write/read round trip is exactly lossless (a polar-only file
would lose the last bits in the trigonometric conversion).  Numbers are
written with the shortest round-trip decimal representation.

Line-parameters JSON: either the phase-domain matrices (``z_abc`` complex
as [re, im] pairs plus ``b_abc`` real) or, for a fully transposed line,
the six sequence constants ``z0, z1`` (complex) and ``b0, b1`` (real);
the loader converts to phase domain.
"""

from __future__ import annotations

import json

import numpy as np

from .core import LineParameters, SampleRecord

__all__ = [
    "PHASOR_NAMES",
    "CSV_COLUMNS",
    "write_samples_csv",
    "read_samples_csv",
    "write_line_parameters",
    "read_line_parameters",
]

PHASOR_NAMES = (
    "Ua_S", "Ub_S", "Uc_S",
    "Ua_R", "Ub_R", "Uc_R",
    "Ia_S", "Ib_S", "Ic_S",
    "Ia_R", "Ib_R", "Ic_R",
)

CSV_COLUMNS = ("timestamp_us",) + tuple(
    f"{name}_{part}" for name in PHASOR_NAMES for part in ("mag", "deg", "re", "im")
)


def _record_phasors(record: SampleRecord) -> np.ndarray:
    return np.concatenate([record.u_s, record.u_r, record.i_s, record.i_r])


def write_samples_csv(path, records: list[SampleRecord]) -> None:
    """Write a sample series in the 49-column polar CSV format."""
    lines = [",".join(CSV_COLUMNS)]
    for record in records:
        phasors = _record_phasors(record)
        fields = [str(record.timestamp_us)]
        for value in phasors:
            magnitude = abs(value)
            angle = np.degrees(np.angle(value)) if magnitude > 0.0 else 0.0
            fields.append(repr(float(magnitude)))
            fields.append(repr(float(angle)))
            fields.append(repr(float(value.real)))
            fields.append(repr(float(value.imag)))
        lines.append(",".join(fields))
    with open(path, "w", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


def read_samples_csv(path) -> list[SampleRecord]:
    """Read a sample series written by :func:`write_samples_csv`."""
    with open(path, newline="") as handle:
        rows = [line.rstrip("\n") for line in handle if line.strip()]
    if not rows:
        raise ValueError(f"{path}: empty sample file")
    header = tuple(rows[0].split(","))
    if header != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected header (need the 49-column sample layout)")
    records = []
    for line_no, row in enumerate(rows[1:], start=2):
        fields = row.split(",")
        if len(fields) != len(CSV_COLUMNS):
            raise ValueError(f"{path}:{line_no}: expected {len(CSV_COLUMNS)} fields, got {len(fields)}")
        try:
            timestamp = int(fields[0])
            values = np.array([float(f) for f in fields[1:]])
        except ValueError as exc:
            raise ValueError(f"{path}:{line_no}: {exc}") from exc
        # The rectangular columns are authoritative; the polar columns are
        # a redundant human-facing view of the same phasor.
        phasors = values[2::4] + 1j * values[3::4]
        records.append(
            SampleRecord(
                timestamp_us=timestamp,
                u_s=phasors[0:3],
                u_r=phasors[3:6],
                i_s=phasors[6:9],
                i_r=phasors[9:12],
            )
        )
    return records


def write_line_parameters(path, params: LineParameters) -> None:
    """Write phase-domain line parameters as JSON."""
    payload = {
        "z_abc": [[[z.real, z.imag] for z in row] for row in params.z_abc],
        "b_abc": [[float(b) for b in row] for row in params.b_abc],
    }
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def read_line_parameters(path) -> LineParameters:
    """Read line parameters from JSON.

    Accepts either ``{"z_abc": 3x3 of [re, im], "b_abc": 3x3 real}`` or a
    transposed-line shorthand
    ``{"sequence": {"z0": [re, im], "z1": [re, im], "b0": b, "b1": b}}``.
    """
    with open(path) as handle:
        payload = json.load(handle)
    if "sequence" in payload:
        seq = payload["sequence"]
        missing = {"z0", "z1", "b0", "b1"} - set(seq)
        if missing:
            raise ValueError(f"{path}: sequence block missing {sorted(missing)}")
        z0 = complex(*seq["z0"])
        z1 = complex(*seq["z1"])
        z_self = (z0 + 2.0 * z1) / 3.0
        z_mutual = (z0 - z1) / 3.0
        z = np.full((3, 3), z_mutual, dtype=complex)
        np.fill_diagonal(z, z_self)
        b0 = float(seq["b0"])
        b1 = float(seq["b1"])
        b_self = (b0 + 2.0 * b1) / 3.0
        b_mutual = (b0 - b1) / 3.0
        b = np.full((3, 3), b_mutual)
        np.fill_diagonal(b, b_self)
        return LineParameters(z_abc=z, b_abc=b)
    if "z_abc" in payload and "b_abc" in payload:
        z = np.array(
            [[complex(entry[0], entry[1]) for entry in row] for row in payload["z_abc"]]
        )
        b = np.array(payload["b_abc"], dtype=float)
        return LineParameters(z_abc=z, b_abc=b)
    raise ValueError(f"{path}: need either phase matrices or a transposed sequence block")
