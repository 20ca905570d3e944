"""Inter-layer coupling kernel, drift assembly, and the collective shift."""

from __future__ import annotations

import math

import numpy as np
import pytest

from spinsqueeze import (
    ArrayGeometry,
    BeamProfile,
    DetuningSpec,
    compute_rates,
    delta_prime,
    drift_matrix,
    evanescent_eps,
    evanescent_range,
    interaction_kernel,
    single_layer_rate,
    waist_for_overlap,
)
from spinsqueeze.exceptions import ConvergenceError, DomainError, StabilityError


def stack(lattice_const=0.68, n_layers=10, layer_spacing=1.0, dipole=(1.0, 0.0),
          eta=0.99, gamma_s_frac=0.1):
    geom = ArrayGeometry(
        n_side=200,
        lattice_const=lattice_const,
        n_layers=n_layers,
        layer_spacing=layer_spacing,
        dipole_orientation=dipole,
    )
    beam = BeamProfile(waist=waist_for_overlap(geom, eta))
    gamma_s = gamma_s_frac * single_layer_rate(lattice_const)
    return geom, compute_rates(geom, beam, gamma_s=gamma_s)


def brute_force_eps(geom, sep, half_width=60):
    """Direct lattice sum over transverse diffraction orders.

    Every nonzero order of a subwavelength lattice is evanescent, so the
    sum runs over all integer pairs in a window wide enough that the
    exponential has long since cut it off.
    """
    a = geom.lattice_const
    gamma0 = 3.0 / (4.0 * math.pi * a * a)
    dx, dy = geom.dipole_orientation
    kaz_sep = geom.axial_phase * sep
    total = 0.0
    for mx in range(-half_width, half_width + 1):
        for my in range(-half_width, half_width + 1):
            if mx == 0 and my == 0:
                continue
            s = mx * mx + my * my
            kappa = math.sqrt(s / (a * a) - 1.0)
            dot = mx * dx + my * dy
            total += (dot * dot / (a * a) - 1.0) / kappa * math.exp(-kaz_sep * kappa)
    return 0.25 * gamma0 * total


@pytest.mark.parametrize("lattice_const", [0.68, 0.95])
@pytest.mark.parametrize("sep", [1, 2, 3])
def test_evanescent_eps_against_brute_force(lattice_const, sep):
    geom, _ = stack(lattice_const=lattice_const)
    expected = brute_force_eps(geom, sep)
    assert evanescent_eps(geom, 0, sep) == pytest.approx(
        expected, rel=1e-12
    )


def test_evanescent_eps_frozen_values():
    geom, _ = stack(lattice_const=0.68)
    assert evanescent_eps(geom, 0, 1) == pytest.approx(
        4.7969711046673066e-05, rel=1e-11
    )
    assert evanescent_eps(geom, 0, 2) == pytest.approx(
        5.0825893601939931e-08, rel=1e-11
    )
    geom, _ = stack(lattice_const=0.95)
    assert evanescent_eps(geom, 0, 1) == pytest.approx(
        -4.548237718991e-02, rel=1e-10
    )
    assert evanescent_eps(geom, 0, 2) == pytest.approx(
        -5.770414316458e-03, rel=1e-10
    )


def test_evanescent_eps_dipole_orientation_drops_out():
    # Square-lattice shells are 4-fold symmetric, so the projected sum
    # cannot depend on where the in-plane dipole points.
    reference = None
    for dipole in [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)]:
        geom, _ = stack(lattice_const=0.8, dipole=dipole)
        value = evanescent_eps(geom, 0, 1)
        if reference is None:
            reference = value
        else:
            assert value == pytest.approx(reference, rel=1e-12)


def test_evanescent_eps_decay_rate():
    # Magnitudes fall monotonically and the separation ratio settles on
    # the decay factor of the slowest shell once the faster ones die out.
    geom, _ = stack(lattice_const=0.9)
    values = [evanescent_eps(geom, 0, sep) for sep in (1, 2, 3, 4)]
    magnitudes = [abs(v) for v in values]
    assert magnitudes == sorted(magnitudes, reverse=True)
    kappa_min = math.sqrt(1.0 / 0.81 - 1.0)
    settled = math.exp(-geom.axial_phase * kappa_min)
    assert values[3] / values[2] == pytest.approx(settled, rel=1e-4)


def test_evanescent_eps_error_paths():
    geom, _ = stack()
    with pytest.raises(ConvergenceError):
        evanescent_eps(geom, 0, 0)
    with pytest.raises(ConvergenceError):
        evanescent_eps(geom, 0, 1, max_order=2)


def test_evanescent_range_formula():
    geom, _ = stack(lattice_const=0.68)
    assert evanescent_range(geom, 1) == pytest.approx(
        0.68 / (2.0 * math.pi * math.sqrt(1.0 - 0.68**2)), rel=1e-14
    )
    assert evanescent_range(geom, 1) == pytest.approx(0.14760443758410707, rel=1e-12)
    geom, _ = stack(lattice_const=0.95)
    assert evanescent_range(geom, 1) == pytest.approx(0.48421855691891913, rel=1e-12)
    assert evanescent_range(geom, 2) < evanescent_range(geom, 1)


def test_interaction_kernel_structure():
    geom, rates = stack(n_layers=6)
    kernel = interaction_kernel(geom, rates)
    d = kernel.d_matrix
    assert d.shape == (6, 6)
    assert np.allclose(np.diag(d), 0.0)
    # Complex symmetric Toeplitz: equal entries along every diagonal.
    assert np.allclose(d, d.T)
    for sep in range(1, 6):
        diag = np.diagonal(d, offset=sep)
        assert np.allclose(diag, diag[0])
        expected = 0.5 * rates.gamma0 * np.exp(
            1j * geom.axial_phase * sep
        ) + 1j * evanescent_eps(geom, 0, sep)
        assert diag[0] == pytest.approx(expected, rel=1e-12)
    assert kernel.truncation.max_order >= 1


def test_interaction_kernel_without_evanescent_part():
    geom, rates = stack(n_layers=4)
    kernel = interaction_kernel(geom, rates, include_evanescent=False)
    assert np.allclose(kernel.eps_matrix, 0.0)
    assert kernel.d_matrix[0, 1] == pytest.approx(
        0.5 * rates.gamma0 * np.exp(1j * geom.axial_phase), rel=1e-14
    )


def test_truncation_tolerance_is_honored():
    geom, _ = stack()
    loose = evanescent_eps(geom, 0, 1, tol=1e-6)
    tight = evanescent_eps(geom, 0, 1, tol=1e-14)
    assert loose == pytest.approx(tight, rel=1e-5)


def test_drift_matrix_entries_and_stability():
    geom, rates = stack(n_layers=5)
    det = DetuningSpec(eff_detuning=0.4)
    kernel = interaction_kernel(geom, rates)
    drift = drift_matrix(kernel, rates, det)
    a = drift.matrix
    expected_diag = 1j * 0.4 - 0.5 * (rates.gamma_s + rates.gamma0)
    assert np.allclose(np.diag(a), expected_diag)
    off = a - np.diag(np.diag(a))
    assert np.allclose(off, -(kernel.d_matrix))
    assert drift.eigenvalues.real.max() < 0.0


def test_drift_matrix_flags_marginal_modes():
    # With no free-space leak and perfect phase matching the dark modes
    # sit exactly on the imaginary axis; that configuration cannot be
    # integrated to a steady state and must be refused.
    geom, rates = stack(n_layers=3, gamma_s_frac=0.0)
    kernel = interaction_kernel(geom, rates, include_evanescent=False)
    with pytest.raises(StabilityError):
        drift_matrix(kernel, rates, DetuningSpec())


def test_delta_prime_frozen_values():
    geom, rates = stack(lattice_const=0.68)
    shift = delta_prime(geom, rates)
    assert shift / rates.gamma0 == pytest.approx(1.6739993426e-4, rel=1e-9)
    assert shift > 0.0

    geom, rates = stack(lattice_const=0.95)
    shift = delta_prime(geom, rates)
    assert shift / rates.gamma0 == pytest.approx(-0.34873912038744403, rel=1e-10)
    assert shift == pytest.approx(-0.0922496756662409, rel=1e-10)


def test_delta_prime_single_layer_is_zero():
    geom, rates = stack(n_layers=1)
    assert delta_prime(geom, rates) == 0.0


def test_delta_prime_matches_direct_projection():
    geom, rates = stack(lattice_const=0.9, n_layers=7)
    kernel = interaction_kernel(geom, rates)
    n_z = geom.n_layers
    phase = geom.axial_phase
    total = 0.0j
    for n in range(n_z):
        for m in range(n_z):
            if n == m:
                continue
            total += kernel.eps_matrix[n, m] * np.exp(1j * phase * (n - m))
    expected = total.real / n_z
    assert delta_prime(geom, rates) == pytest.approx(expected, rel=1e-12)


def test_lattice_const_domain():
    wide = ArrayGeometry(n_side=10, lattice_const=1.2, n_layers=2)
    with pytest.raises(DomainError):
        evanescent_eps(wide, 0, 1)
