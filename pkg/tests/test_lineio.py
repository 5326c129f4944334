import numpy as np
import pytest

from pmuline import transposed_reference_line, untransposed_reference_line
from pmuline.lineio import (
    CSV_COLUMNS,
    read_line_parameters,
    read_samples_csv,
    write_line_parameters,
    write_samples_csv,
)


def test_csv_round_trip(tmp_path, untransposed_records):
    path = tmp_path / "samples.csv"
    write_samples_csv(path, untransposed_records[:20])
    restored = read_samples_csv(path)
    assert len(restored) == 20
    for original, back in zip(untransposed_records, restored):
        assert back.timestamp_us == original.timestamp_us
        for name in ("u_s", "u_r", "i_s", "i_r"):
            np.testing.assert_allclose(
                getattr(back, name), getattr(original, name), rtol=1e-12, atol=1e-12
            )


def test_csv_layout(tmp_path, untransposed_records):
    path = tmp_path / "samples.csv"
    write_samples_csv(path, untransposed_records[:3])
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(CSV_COLUMNS) == 49
    assert all(len(line.split(",")) == 49 for line in lines)
    # Angles stay inside (-180, 180] and polar/rect columns agree.
    for line in lines[1:]:
        values = [float(v) for v in line.split(",")[1:]]
        for mag, deg, re, im in zip(values[0::4], values[1::4], values[2::4], values[3::4]):
            assert -180.0 < deg <= 180.0
            assert mag == pytest.approx(abs(complex(re, im)), rel=1e-15)


def test_csv_write_is_deterministic(tmp_path, untransposed_records):
    path_a = tmp_path / "a.csv"
    path_b = tmp_path / "b.csv"
    write_samples_csv(path_a, untransposed_records[:10])
    write_samples_csv(path_b, untransposed_records[:10])
    assert path_a.read_bytes() == path_b.read_bytes()


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,stuff\n1,2\n")
    with pytest.raises(ValueError):
        read_samples_csv(path)


def test_csv_reports_bad_field_location(tmp_path, untransposed_records):
    path = tmp_path / "samples.csv"
    write_samples_csv(path, untransposed_records[:2])
    corrupted = path.read_text().splitlines()
    corrupted[2] = corrupted[2].replace(corrupted[2].split(",")[1], "not-a-number", 1)
    path.write_text("\n".join(corrupted) + "\n")
    with pytest.raises(ValueError, match=":3"):
        read_samples_csv(path)


def test_line_parameters_json_round_trip(tmp_path, untransposed_line):
    path = tmp_path / "line.json"
    write_line_parameters(path, untransposed_line)
    restored = read_line_parameters(path)
    np.testing.assert_allclose(restored.z_abc, untransposed_line.z_abc, rtol=1e-15)
    np.testing.assert_allclose(restored.b_abc, untransposed_line.b_abc, rtol=1e-15)


def test_line_parameters_sequence_shorthand(tmp_path, transposed_line):
    path = tmp_path / "line.json"
    path.write_text(
        '{"sequence": {"z0": [3.3455, 22.8057], "z1": [0.8839, 6.9188],'
        ' "b0": 2.7633e-05, "b1": 5.0198e-05}}\n'
    )
    restored = read_line_parameters(path)
    np.testing.assert_allclose(restored.z_abc, transposed_line.z_abc, rtol=1e-12)
    np.testing.assert_allclose(restored.b_abc, transposed_line.b_abc, rtol=1e-12)


def test_line_parameters_rejects_unknown_shape(tmp_path):
    path = tmp_path / "line.json"
    path.write_text('{"impedance": 1}\n')
    with pytest.raises(ValueError):
        read_line_parameters(path)
