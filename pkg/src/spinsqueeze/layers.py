"""Inter-layer couplings of the stack beyond the ideal mirror picture.

Each layer scatters the paraxial mode coherently, which gives the
familiar retarded coupling (gamma0/2) e^{i k a_z |n-m|} between layer
modes.  On top of that, the near field of a subwavelength lattice has
evanescent diffraction orders that tunnel between adjacent layers and
detune the collective mode.  This module builds both pieces, assembles
the drift matrix of the layer modes, and evaluates the collective
frequency shift that the evanescent couplings produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .analytic import DetuningSpec
from .exceptions import ConvergenceError, DomainError, StabilityError
from .geometry import ArrayGeometry
from .rates import RateSet

DEFAULT_EPS_TOL = 1e-14
DEFAULT_MAX_ORDER = 200


@dataclass(frozen=True)
class TruncationInfo:
    """How far the evanescent order sum was carried.

    ``max_order`` is the largest squared order index |m_perp|^2 that
    contributed anywhere in the kernel and ``terms_summed`` counts the
    individual lattice orders added up across all separations.
    """

    tol: float
    max_order: int
    terms_summed: int


@dataclass(frozen=True)
class LayerKernel:
    """Complete inter-layer coupling matrix of the stack.

    ``d_matrix`` combines the radiative coupling and ``iary`` times the
    evanescent shift; ``eps_matrix`` keeps the evanescent part separate
    for diagnostics.  Both have zero diagonal: single-layer physics
    lives in the drift matrix, not in the kernel.
    """

    d_matrix: np.ndarray
    eps_matrix: np.ndarray
    truncation: TruncationInfo


@dataclass(frozen=True)
class DriftMatrix:
    """Drift generator of the coupled layer modes."""

    matrix: np.ndarray
    eigenvalues: np.ndarray


@lru_cache(maxsize=64)
def _order_shells(
    lattice_const: float,
    dipole: tuple[float, float],
    cap: int,
) -> tuple[tuple[int, float], ...]:
    """Reciprocal-lattice shells of one layer, grouped by |m_perp|^2.

    For each non-zero integer order vector m_perp the transverse decay
    constant and the polarisation weight depend only on |m_perp|^2 and
    on (m_perp . d)^2, so the whole shell collapses to one coefficient:

        c(s) = sum_{|m|^2 = s} ((m . d)^2 / a^2 - 1) / sqrt(s / a^2 - 1)

    Shells with s <= a^2 would be propagating orders rather than
    evanescent ones; the subwavelength condition a < 1 guarantees every
    non-zero order is evanescent, and the square root stays real.
    """
    if not 0.0 < lattice_const < 1.0:
        raise DomainError(
            "evanescent orders require a subwavelength lattice constant, "
            f"got {lattice_const}"
        )
    a2 = lattice_const * lattice_const
    reach = int(math.isqrt(cap)) + 1
    buckets: dict[int, float] = {}
    dx, dy = dipole
    for mx in range(-reach, reach + 1):
        for my in range(-reach, reach + 1):
            s = mx * mx + my * my
            if s == 0 or s > cap:
                continue
            dot = mx * dx + my * dy
            weight = (dot * dot / a2 - 1.0) / math.sqrt(s / a2 - 1.0)
            buckets[s] = buckets.get(s, 0.0) + weight
    return tuple(sorted(buckets.items()))


def _eps_sum(
    geom: ArrayGeometry,
    separation: int,
    tol: float,
    cap: int,
) -> tuple[float, int, int]:
    """Evanescent coupling sum for one layer separation.

    Returns (value, last shell |m_perp|^2 used, terms summed).  The sum
    runs over shells of increasing order until the largest remaining
    exponential is negligible against the partial sum.
    """
    if separation < 0:
        raise DomainError(f"separation must be non-negative, got {separation}")
    a = geom.lattice_const
    gamma0 = 3.0 / (4.0 * math.pi) / (a * a)
    kaz_sep = geom.axial_phase * separation
    shells = _order_shells(a, geom.dipole_orientation, cap)

    total = 0.0
    terms = 0
    last_shell = 0
    for s, coeff in shells:
        decay = math.sqrt(s / (a * a) - 1.0)
        tail = math.exp(-kaz_sep * decay)
        if tail < tol * (abs(total) + 1e-300) and last_shell > 0:
            return 0.25 * gamma0 * total, last_shell, terms
        total += coeff * tail
        terms += _shell_multiplicity(s)
        last_shell = s
    raise ConvergenceError(
        f"evanescent sum for separation {separation} still above tol "
        f"{tol} after shells up to |m|^2 = {cap}"
    )


@lru_cache(maxsize=1024)
def _shell_multiplicity(s: int) -> int:
    reach = int(math.isqrt(s))
    count = 0
    for mx in range(-reach, reach + 1):
        for my in range(-reach, reach + 1):
            if mx * mx + my * my == s:
                count += 1
    return count


def evanescent_eps(
    geom: ArrayGeometry,
    n: int,
    m: int,
    tol: float = DEFAULT_EPS_TOL,
    max_order: int = DEFAULT_MAX_ORDER,
) -> float:
    """Evanescent coupling between layers n and m, in single-atom units.

    Purely real; decays exponentially with separation on the scale set
    by :func:`evanescent_range`.  Diagonal entries are not part of the
    inter-layer kernel and requesting one raises, because the defining
    sum does not converge at zero separation.
    """
    value, _, _ = _eps_sum(geom, abs(n - m), tol, max_order)
    return value


def evanescent_range(geom: ArrayGeometry, order: int = 1) -> float:
    """1/e range of an evanescent diffraction order, in wavelengths.

    zeta = a / (2 pi sqrt(|m_perp|^2 - a^2)) for the shell with
    |m_perp|^2 = order.
    """
    if order < 1:
        raise DomainError(f"order must be at least 1, got {order}")
    a = geom.lattice_const
    return a / (2.0 * math.pi * math.sqrt(order - a * a))


def interaction_kernel(
    geom: ArrayGeometry,
    rates: RateSet,
    tol: float = DEFAULT_EPS_TOL,
    include_evanescent: bool = True,
    max_order: int = DEFAULT_MAX_ORDER,
) -> LayerKernel:
    """Assemble the full inter-layer coupling matrix.

    D[n, m] = (gamma0/2) e^{i k a_z |n-m|} + i eps[n, m] off the
    diagonal and zero on it.  The kernel only depends on |n - m|, so the
    evanescent sums are evaluated once per separation and spread along
    the Toeplitz diagonals.
    """
    n_z = geom.n_layers
    gamma0 = rates.gamma0
    kaz = geom.axial_phase

    eps_by_sep = np.zeros(n_z)
    max_shell = 0
    terms_total = 0
    if include_evanescent:
        for sep in range(1, n_z):
            value, shell, terms = _eps_sum(geom, sep, tol, max_order)
            eps_by_sep[sep] = value
            max_shell = max(max_shell, shell)
            terms_total += terms

    idx = np.arange(n_z)
    sep_matrix = np.abs(idx[:, None] - idx[None, :])
    eps_matrix = eps_by_sep[sep_matrix]
    np.fill_diagonal(eps_matrix, 0.0)

    d_matrix = 0.5 * gamma0 * np.exp(1j * kaz * sep_matrix) + 1j * eps_matrix
    np.fill_diagonal(d_matrix, 0.0)

    return LayerKernel(
        d_matrix=d_matrix,
        eps_matrix=eps_matrix,
        truncation=TruncationInfo(
            tol=tol, max_order=max_shell, terms_summed=terms_total
        ),
    )


def drift_matrix(
    kernel: LayerKernel,
    rates: RateSet,
    det: DetuningSpec,
) -> DriftMatrix:
    """Linearised drift generator of the layer modes.

    A[n, n] = i (delta - Delta) - (gamma_s + gamma0)/2 and
    A[n, m] = -D[n, m] off the diagonal.  The generator must be strictly
    stable for a steady state to exist; at exact phase matching the
    dark layer modes are damped only by gamma_s, so gamma_s = 0 leaves
    marginal modes and is rejected here.
    """
    n_z = kernel.d_matrix.shape[0]
    diag = 1j * det.eff_detuning - 0.5 * (rates.gamma_s + rates.gamma0)
    a = -kernel.d_matrix.astype(complex)
    a[np.arange(n_z), np.arange(n_z)] = diag
    eigenvalues = np.linalg.eigvals(a)
    threshold = -1e-12 * rates.gamma0
    worst = float(np.max(eigenvalues.real))
    if worst >= threshold:
        raise StabilityError(
            f"drift matrix not strictly stable: max Re(eig) = {worst:.3e} "
            f"(threshold {threshold:.3e}); add non-collective loss"
        )
    return DriftMatrix(matrix=a, eigenvalues=eigenvalues)


def delta_prime(
    geom: ArrayGeometry,
    rates: RateSet,
    tol: float = DEFAULT_EPS_TOL,
    max_order: int = DEFAULT_MAX_ORDER,
) -> float:
    """Frequency shift of the phase-matched collective mode.

    Projecting the evanescent part of the kernel onto the travelling
    collective mode gives

        delta' = (1/N_z) sum_{n != m} eps[n, m] e^{i k a_z (n - m)},

    which is real by symmetry of eps; the residual imaginary part is
    asserted below.  Driving the stack at this shifted frequency
    restores the ideal mirror response to first order.
    """
    n_z = geom.n_layers
    if n_z == 1:
        return 0.0
    kaz = geom.axial_phase
    total = 0.0 + 0.0j
    eps_by_sep = {
        sep: _eps_sum(geom, sep, tol, max_order)[0] for sep in range(1, n_z)
    }
    for n in range(n_z):
        for m in range(n_z):
            if n == m:
                continue
            total += eps_by_sep[abs(n - m)] * np.exp(1j * kaz * (n - m))
    total /= n_z
    if abs(total.imag) > 1e-10 * rates.gamma0:
        raise DomainError(
            f"collective shift acquired an imaginary part {total.imag:.3e}"
        )
    return float(total.real)
