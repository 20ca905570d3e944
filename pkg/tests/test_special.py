"""The error-function trio against the C library and round trips."""

from __future__ import annotations

import math

import numpy as np
import pytest

from spinsqueeze.exceptions import DomainError
from spinsqueeze.special import erf, erf_inverse, erfc


def test_erf_matches_libm_on_grid():
    for x in np.linspace(-6.0, 6.0, 2401):
        assert erf(float(x)) == pytest.approx(math.erf(x), abs=1e-14)


def test_erf_matches_libm_on_random_points():
    rng = np.random.default_rng(0)
    for x in rng.uniform(-10.0, 10.0, size=2000):
        assert erf(float(x)) == pytest.approx(math.erf(x), rel=1e-12, abs=1e-15)


def test_erfc_matches_libm_including_far_tail():
    rng = np.random.default_rng(1)
    xs = np.concatenate([rng.uniform(-6.0, 6.0, 1000), rng.uniform(6.0, 25.0, 200)])
    for x in xs:
        assert erfc(float(x)) == pytest.approx(math.erfc(x), rel=1e-12)


def test_erf_erfc_complementarity():
    for x in np.linspace(-5.0, 5.0, 501):
        assert erf(float(x)) + erfc(float(x)) == pytest.approx(1.0, abs=1e-14)


def test_erf_is_odd_and_bounded():
    for x in (0.3, 1.7, 4.2):
        assert erf(-x) == -erf(x)
        assert abs(erf(x)) < 1.0
    assert erf(0.0) == 0.0


def test_erf_inverse_round_trip():
    rng = np.random.default_rng(2)
    for y in rng.uniform(-0.999999, 0.999999, size=500):
        assert erf(erf_inverse(float(y))) == pytest.approx(y, rel=1e-12, abs=1e-15)
    for x in rng.uniform(-2.0, 2.0, size=500):
        assert erf_inverse(erf(float(x))) == pytest.approx(x, rel=1e-12, abs=1e-14)


def test_erf_inverse_reference_point():
    # The waist solver leans on this value at the eta = 0.99 preset.
    assert erf_inverse(math.sqrt(0.99)) == pytest.approx(
        1.9843009495532287, rel=1e-12
    )


@pytest.mark.parametrize("bad", [-1.0, 1.0, 1.5, -2.0])
def test_erf_inverse_rejects_out_of_range(bad):
    with pytest.raises(DomainError):
        erf_inverse(bad)
