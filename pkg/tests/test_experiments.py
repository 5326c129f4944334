import numpy as np
import pytest

from pmuline import (
    NoiseSpec,
    SweepConfig,
    export_sweep,
    run_length_sweep,
    run_method_comparison,
)
from pmuline.experiments import DEFAULT_LENGTH_GRID_KM, load_sweep
from pmuline.fixtures import UNTRANSPOSED_SEQUENCE_REFERENCE


@pytest.fixture(scope="module")
def small_sweep_config():
    return SweepConfig(
        lengths_km=(14.5, 150.0),
        n_samples_per_set=60,
        m_sets=8,
        noise=NoiseSpec(sigma_fraction=0.01, seed=7),
    )


def test_method_comparison_transposed_all_methods_agree(transposed_line):
    # A transposed line decouples the sequence networks, so the
    # positive-sequence methods stay exact even under unbalanced load.
    table = run_method_comparison(transposed_line, unbalance_target=14.0, n=200)
    for method in ("single", "double", "optimal"):
        for parameter in ("R1", "X1", "B1"):
            assert table[method][parameter] <= 0.1, (method, parameter)


def test_method_comparison_untransposed_model_failure(untransposed_line):
    table = run_method_comparison(untransposed_line, unbalance_target=14.0, n=200)
    optimal_r1 = table["optimal"]["R1"]
    assert optimal_r1 <= 0.1
    for method in ("single", "double"):
        assert table[method]["R1"] > 5.0
        assert table[method]["R1"] > 10.0 * max(optimal_r1, 1e-12)
    # The full-matrix method also recovers the inter-sequence mutuals.
    sequence = table["optimal_sequence"].z_012
    reference = UNTRANSPOSED_SEQUENCE_REFERENCE["z_012"]
    assert np.abs(sequence - reference).max() / np.abs(reference).max() < 1e-3


def test_sweep_row_cardinality(small_sweep_config):
    result = run_length_sweep(small_sweep_config)
    assert len(result.rows) == 2 * 3 * 3  # lengths x methods x parameters
    assert all(count == 0 for count in result.failures.values())


def test_sweep_determinism(small_sweep_config):
    first = run_length_sweep(small_sweep_config)
    second = run_length_sweep(small_sweep_config)
    assert first.rows == second.rows


def test_sweep_ci_brackets_mean(small_sweep_config):
    result = run_length_sweep(small_sweep_config)
    for row in result.rows:
        assert row.ci_lo <= row.mean_err_pct <= row.ci_hi
        assert row.sd_err_pct >= 0.0


def test_sweep_export_round_trip(tmp_path, small_sweep_config):
    result = run_length_sweep(small_sweep_config)
    path = tmp_path / "sweep.csv"
    export_sweep(result, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + len(result.rows)
    restored = load_sweep(path)
    assert restored.rows == result.rows


def test_sweep_single_length_single_method(tmp_path):
    config = SweepConfig(
        lengths_km=(150.0,),
        n_samples_per_set=40,
        m_sets=4,
        methods=("optimal",),
        noise=NoiseSpec(sigma_fraction=0.01, seed=1),
    )
    result = run_length_sweep(config)
    assert len(result.rows) == 3
    path = tmp_path / "one.csv"
    export_sweep(result, path)
    assert len(path.read_text().splitlines()) == 4


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(lengths_km=(0.0,))
    with pytest.raises(ValueError):
        SweepConfig(m_sets=1)
    with pytest.raises(ValueError):
        SweepConfig(methods=("optimal", "bogus"))


def test_default_grid_contains_reference_lengths():
    assert 14.5 in DEFAULT_LENGTH_GRID_KM
    assert 150.0 in DEFAULT_LENGTH_GRID_KM
