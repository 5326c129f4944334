import dataclasses

import numpy as np
import pytest

from pmuline import (
    LineParameters,
    LoadProfile,
    NoiseSpec,
    add_noise,
    add_noise_series,
    calibrate_unbalance,
    degree_of_unbalance,
    generate_series,
    phase_to_sequence,
    scale_length,
    solve_terminal_currents,
)
from pmuline.simulator import (
    BALANCED_SENDING_VOLTAGE,
    mean_degree_of_unbalance,
)

from conftest import random_symmetric_line


def test_no_drop_no_shunt_means_no_current():
    params = LineParameters(z_abc=np.eye(3, dtype=complex), b_abc=np.zeros((3, 3)))
    u = np.array([1.0, 2.0, 3.0], dtype=complex)
    i_s, i_r = solve_terminal_currents(params, u, u)
    np.testing.assert_allclose(i_s, 0.0, atol=1e-15)
    np.testing.assert_allclose(i_r, 0.0, atol=1e-15)


def test_single_phase_ohms_law():
    params = LineParameters(z_abc=1j * np.eye(3), b_abc=np.zeros((3, 3)))
    u_s = np.array([1.1, 1.1, 1.1], dtype=complex)
    u_r = np.array([1.0, 1.0, 1.0], dtype=complex)
    i_s, i_r = solve_terminal_currents(params, u_s, u_r)
    np.testing.assert_allclose(i_s, -0.1j * np.ones(3), atol=1e-15)
    np.testing.assert_allclose(i_r, 0.1j * np.ones(3), atol=1e-15)


def test_nodal_equation_self_consistency():
    rng = np.random.default_rng(4)
    for _ in range(100):
        z, b = random_symmetric_line(rng)
        params = LineParameters(z_abc=z, b_abc=b)
        u_s = rng.normal(size=3) + 1j * rng.normal(size=3)
        u_r = rng.normal(size=3) + 1j * rng.normal(size=3)
        i_s, i_r = solve_terminal_currents(params, u_s, u_r)
        y_p = np.linalg.inv(z)
        # Sending-end nodal equation.
        lhs = y_p @ (u_s - u_r) + 0.5j * b @ u_s
        np.testing.assert_allclose(lhs, i_s, rtol=1e-10, atol=1e-12)
        # Summed two-terminal equation: total shunt current.
        total = 0.5j * b @ (u_s + u_r)
        np.testing.assert_allclose(i_s + i_r, total, rtol=1e-10, atol=1e-12)


def test_generate_series_basics(untransposed_line):
    profile = LoadProfile()
    records = generate_series(untransposed_line, profile, 200)
    assert len(records) == 200
    # Timestamps spaced at the sample interval.
    assert records[1].timestamp_us - records[0].timestamp_us == 5 * 60 * 10**6
    # Distinct load levels give distinct receiving voltages (the daily
    # sinusoid revisits each level once on the way down, so roughly half
    # the values are unique).
    magnitudes = {round(float(np.abs(r.u_r[0])), 6) for r in records}
    assert len(magnitudes) > 100
    # Every record satisfies the nodal equations.
    for record in records[::20]:
        i_s, i_r = solve_terminal_currents(untransposed_line, record.u_s, record.u_r)
        np.testing.assert_allclose(record.i_s, i_s, rtol=1e-10)
        np.testing.assert_allclose(record.i_r, i_r, rtol=1e-10)


def test_generate_series_power_balance(untransposed_records):
    for record in untransposed_records[::10]:
        sent = np.real(np.sum(record.u_s * np.conj(record.i_s)))
        delivered = -np.real(np.sum(record.u_r * np.conj(record.i_r)))
        assert sent >= delivered


def test_generate_series_receiving_current_matches_load(untransposed_line):
    profile = LoadProfile()
    records = generate_series(untransposed_line, profile, 10)
    phase_voltage = np.abs(BALANCED_SENDING_VOLTAGE).mean()
    phi = np.arccos(profile.power_factor)
    for k, record in enumerate(records):
        t_hours = k * profile.sample_interval_minutes / 60.0
        y_load = np.diag(
            profile.load_fraction(t_hours)
            * profile.capacity_va
            / (3.0 * phase_voltage**2)
            * (profile.power_factor - 1j * np.sin(phi))
            * profile.phase_multipliers(t_hours)
        )
        np.testing.assert_allclose(record.i_r, -y_load @ record.u_r, rtol=1e-10)


def test_balanced_profile_gives_zero_unbalance_on_transposed(transposed_line):
    records = generate_series(transposed_line, LoadProfile(), 50)
    for record in records[::10]:
        assert degree_of_unbalance(record.i_s) < 1e-7


def test_calibrated_unbalance_hits_target(untransposed_line, unbalanced_profile):
    records = generate_series(untransposed_line, unbalanced_profile, 200)
    assert mean_degree_of_unbalance(records) == pytest.approx(14.0, abs=0.5)


def test_add_noise_sigma_zero_is_identity(untransposed_records):
    record = untransposed_records[0]
    assert add_noise(record, NoiseSpec(sigma_fraction=0.0, seed=5)) is record


def test_add_noise_deterministic(untransposed_records):
    record = untransposed_records[0]
    spec = NoiseSpec(sigma_fraction=0.01, seed=99)
    first = add_noise(record, spec)
    second = add_noise(record, spec)
    np.testing.assert_array_equal(first.u_s, second.u_s)
    np.testing.assert_array_equal(first.i_r, second.i_r)
    series_a = add_noise_series(untransposed_records[:5], spec)
    series_b = add_noise_series(untransposed_records[:5], spec)
    for a, b in zip(series_a, series_b):
        np.testing.assert_array_equal(a.u_r, b.u_r)


def test_add_noise_statistics(untransposed_records):
    record = untransposed_records[0]
    spec = NoiseSpec(sigma_fraction=0.01, seed=11)
    rng = np.random.default_rng(spec.seed)
    copies = np.array([add_noise(record, spec, rng).u_s[0].real for _ in range(10000)])
    expected_sd = 0.01 * np.abs(record.u_s[0])
    assert np.std(copies) == pytest.approx(expected_sd, rel=0.03)


def test_scale_length(transposed_line):
    unchanged = scale_length(transposed_line, 1.0)
    np.testing.assert_array_equal(unchanged.z_abc, transposed_line.z_abc)
    doubled = scale_length(transposed_line, 2.0)
    z1 = phase_to_sequence(doubled.z_abc)[1, 1]
    assert z1 == pytest.approx(2 * (0.8839 + 6.9188j), rel=1e-12)
    with pytest.raises(ValueError):
        scale_length(transposed_line, 0.0)


def test_load_profile_validation():
    with pytest.raises(ValueError):
        LoadProfile(min_fraction=0.8, max_fraction=0.2)
    with pytest.raises(ValueError):
        LoadProfile(sample_interval_minutes=0.0)
    with pytest.raises(ValueError):
        LoadProfile(unbalance=(1.0, 1.0))
    with pytest.raises(ValueError):
        NoiseSpec(sigma_fraction=-0.1)


def test_calibrate_unbalance_balanced_target(untransposed_line):
    assert calibrate_unbalance(untransposed_line, LoadProfile(), 0.0) == (1.0, 1.0, 1.0)
