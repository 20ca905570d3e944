"""Steady-state second moments of the driven layer modes.

The linear drive-dissipation dynamics close on the pair correlation
matrices n[i, j] = <p_i^dag p_j> and m[i, j] = <p_i p_j>, whose steady
states solve two Sylvester equations

    conj(A) n + n A^T + s_n = 0,      A m + m A^T + s_m = 0.

Everything observable is then a quadratic form of these matrices; the
collective squeezing parameter projects them onto the phase-matched
travelling mode.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_sylvester

from .analytic import SqueezingResult
from .exceptions import PhysicalityError, ResidualError
from .geometry import ArrayGeometry
from .layers import DriftMatrix
from .squeezed_input import DiffusionSet

RESIDUAL_HARD_LIMIT = 1e-8
RESIDUAL_TARGET = 1e-10


@dataclass(frozen=True)
class SteadyStateMoments:
    """Solved pair-correlation matrices with their solve residuals.

    ``n_matrix`` is Hermitian positive semidefinite, ``m_matrix``
    symmetric.  Residuals are Frobenius norms of the defining equations
    relative to the scale of their terms.
    """

    n_matrix: np.ndarray
    m_matrix: np.ndarray
    residual_n: float
    residual_m: float


def _residual(
    a_left: np.ndarray,
    a_right: np.ndarray,
    x: np.ndarray,
    source: np.ndarray,
) -> float:
    res = a_left @ x + x @ a_right + source
    scale = (
        np.linalg.norm(a_left) * np.linalg.norm(x)
        + np.linalg.norm(x) * np.linalg.norm(a_right)
        + np.linalg.norm(source)
    )
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(res) / scale)


def _solve_eigenbasis(a_left: np.ndarray, a_right: np.ndarray, source: np.ndarray) -> np.ndarray:
    """Sylvester solve by double diagonalisation.

    Slower and less accurate than the Schur method for large systems
    but completely independent of it, which makes it a useful
    cross-check path.
    """
    wl, vl = np.linalg.eig(a_left)
    wr, vr = np.linalg.eig(a_right.T)
    rhs = np.linalg.solve(vl, -source @ np.linalg.inv(vr).T)
    denom = wl[:, None] + wr[None, :]
    return vl @ (rhs / denom) @ vr.T


def solve_moments(
    drift: DriftMatrix,
    diff: DiffusionSet,
    method: str = "schur",
) -> SteadyStateMoments:
    """Solve the two steady-state Sylvester equations.

    ``method`` selects the linear algebra route: "schur" uses the
    standard Bartels-Stewart algorithm, "eig" an independent eigenbasis
    solve kept for cross-validation.  Results are symmetrised to remove
    roundoff asymmetry before the residual check.
    """
    a = drift.matrix
    if method == "schur":
        n_mat = solve_sylvester(a.conj(), a.T, -diff.s_n.astype(complex))
        m_mat = solve_sylvester(a, a.T, -diff.s_m.astype(complex))
    elif method == "eig":
        n_mat = _solve_eigenbasis(a.conj(), a.T, diff.s_n.astype(complex))
        m_mat = _solve_eigenbasis(a, a.T, diff.s_m.astype(complex))
    else:
        raise ValueError(f"unknown solve method {method!r}")

    n_mat = 0.5 * (n_mat + n_mat.conj().T)
    m_mat = 0.5 * (m_mat + m_mat.T)

    res_n = _residual(a.conj(), a.T, n_mat, diff.s_n)
    res_m = _residual(a, a.T, m_mat, diff.s_m)
    worst = max(res_n, res_m)
    if worst > RESIDUAL_HARD_LIMIT:
        raise ResidualError(
            f"steady-state solve residual {worst:.3e} exceeds "
            f"{RESIDUAL_HARD_LIMIT:.1e}; the drift matrix is likely near "
            "singular"
        )
    return SteadyStateMoments(
        n_matrix=n_mat,
        m_matrix=m_mat,
        residual_n=res_n,
        residual_m=res_m,
    )


def collective_moments(
    moments: SteadyStateMoments,
    geom: ArrayGeometry,
) -> tuple[float, complex]:
    """Project the pair correlations onto the phase-matched mode.

    Returns (<P^dag P>, <P P>) for the collective mode
    P = (1/sqrt(N_z)) sum_n e^{i k a_z n} p_n.
    """
    n_z = geom.n_layers
    phases = np.exp(1j * geom.axial_phase * np.arange(n_z))
    pdp = phases.conj() @ moments.n_matrix @ phases / n_z
    pp = phases @ moments.m_matrix @ phases / n_z
    return float(pdp.real), complex(pp)


def xi2_numeric(
    moments: SteadyStateMoments,
    geom: ArrayGeometry,
) -> SqueezingResult:
    """Squeezing parameter of the collective mode from solved moments.

    xi2 = 1 + 2 <P^dag P> - 2 |<P P>| at the optimal quadrature angle
    2 theta = pi - arg <P P>.
    """
    pdp, pp = collective_moments(moments, geom)
    if pdp < -1e-10:
        raise PhysicalityError(
            f"collective occupation <P^dag P> = {pdp:.3e} is negative"
        )
    mag = abs(pp)
    xi2 = 1.0 + 2.0 * pdp - 2.0 * mag
    xi2_anti = 1.0 + 2.0 * pdp + 2.0 * mag
    theta = 0.0 if mag == 0.0 else 0.5 * ((math.pi - cmath.phase(pp)) % (2.0 * math.pi))
    return SqueezingResult(
        xi2=xi2,
        theta_opt=theta,
        xi2_anti=xi2_anti,
        aux={"p_dag_p": pdp, "pp": pp},
    )
