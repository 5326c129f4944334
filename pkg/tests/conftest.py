import dataclasses

import numpy as np
import pytest

from pmuline import (
    LoadProfile,
    calibrate_unbalance,
    generate_series,
    transposed_reference_line,
    untransposed_reference_line,
)


@pytest.fixture(scope="session")
def transposed_line():
    return transposed_reference_line()


@pytest.fixture(scope="session")
def untransposed_line():
    return untransposed_reference_line()


@pytest.fixture(scope="session")
def unbalanced_profile(untransposed_line):
    """Default load profile with the unbalance calibrated to 14% mean
    negative- over positive-sequence current ratio."""
    profile = LoadProfile()
    multipliers = calibrate_unbalance(untransposed_line, profile, 14.0)
    return dataclasses.replace(profile, unbalance=multipliers)


@pytest.fixture(scope="session")
def untransposed_records(untransposed_line, unbalanced_profile):
    """200 noiseless samples of the untransposed line at 14% unbalance."""
    return generate_series(untransposed_line, unbalanced_profile, 200)


@pytest.fixture(scope="session")
def transposed_records(transposed_line, unbalanced_profile):
    """200 noiseless samples of the transposed line under the same
    unbalanced profile (zero-sequence excitation keeps the full-matrix
    estimator observable)."""
    return generate_series(transposed_line, unbalanced_profile, 200)


def random_symmetric_line(rng: np.random.Generator):
    """A random physically plausible symmetric line for property tests."""
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    z = (m + m.T) / 2.0 + np.eye(3) * (3.0 + 1j * 10.0)
    b = rng.normal(size=(3, 3)) * 1e-5
    b = (b + b.T) / 2.0
    return z, b
