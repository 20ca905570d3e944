"""Stochastic-trajectory cross-check of the steady-state solver.

The linear layer dynamics with Gaussian noise is simulated as a
c-number Ornstein-Uhlenbeck process whose stationary covariance equals
the symmetrically ordered quantum moments.  That correspondence is
exact, not approximate: the commutator kernel that fixes operator
ordering is precisely twice the dissipative part of the drift, so the
half-quantum of vacuum noise reproduces itself.  Squeezing estimates
from trajectory time averages therefore converge to the same number as
the Sylvester solve, through entirely different code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .exceptions import DomainError, PhysicalityError, StabilityError
from .geometry import ArrayGeometry
from .layers import DriftMatrix
from .squeezed_input import DiffusionSet

_DIVERGENCE_BOUND = 1e12
_BLOCK_STEPS = 512


@dataclass(frozen=True)
class McParams:
    """Trajectory simulation controls.

    Times are in inverse single-atom decay units.  ``t_burn`` is
    discarded before averaging starts and ``t_avg`` is the averaging
    window per trajectory.  Each trajectory runs on its own
    counter-based random stream derived from (seed, trajectory index),
    so results do not depend on scheduling or batching.
    """

    dt: float
    t_burn: float
    t_avg: float
    n_traj: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.t_burn < 0.0:
            raise DomainError(f"t_burn must be non-negative, got {self.t_burn}")
        if self.t_avg <= 0.0:
            raise DomainError(f"t_avg must be positive, got {self.t_avg}")
        if self.n_traj < 2:
            raise DomainError(
                f"n_traj must be at least 2 for a standard error, got {self.n_traj}"
            )
        if not 0 <= self.seed < 2**63:
            raise DomainError(f"seed must fit in a 63-bit integer, got {self.seed}")


def stacked_drift(drift: DriftMatrix) -> np.ndarray:
    """Real 2N x 2N generator acting on stacked quadratures (x, y)."""
    a = drift.matrix
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


def stacked_covariance(diff: DiffusionSet) -> np.ndarray:
    """Noise covariance of the stacked real increments, per unit time.

    With Sigma = s_n + comm/2 (normal plus ordering part) and R = s_m,
    the quadrature blocks are

        xx = Re(Sigma + R)/2        xy = (Im R + Im Sigma)/2
        yx = (Im R - Im Sigma)/2    yy = Re(Sigma - R)/2.

    For the phase convention used here both kernels are real, so the
    cross blocks vanish; they are kept in full generality anyway.  The
    result must be positive semidefinite for a physical drive.
    """
    sigma = diff.s_n + 0.5 * diff.comm
    r = diff.s_m
    xx = 0.5 * (sigma + r).real
    yy = 0.5 * (sigma - r).real
    xy = 0.5 * (np.imag(r) + np.imag(sigma))
    yx = 0.5 * (np.imag(r) - np.imag(sigma))
    cov = np.block([[xx, xy], [yx, yy]])
    cov = 0.5 * (cov + cov.T)
    min_eig = float(np.linalg.eigvalsh(cov).min())
    if min_eig < -1e-8:
        raise PhysicalityError(
            f"stacked noise covariance has eigenvalue {min_eig:.3e}; "
            "the requested drive is unphysical"
        )
    return cov


def _psd_sqrt(cov: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(cov)
    vals = np.clip(vals, 0.0, None)
    return vecs @ np.diag(np.sqrt(vals)) @ vecs.T


def _step_operators(
    gen: np.ndarray,
    cov: np.ndarray,
    dt: float,
    method: str,
) -> tuple[np.ndarray, np.ndarray]:
    """One-step propagator and noise factor for the chosen integrator.

    "euler" is the plain Euler-Maruyama step.  "exact" integrates the
    OU process in closed form over dt: the propagator is the matrix
    exponential and the increment covariance comes from the Van Loan
    block-exponential identity, so the discretisation has no step-size
    bias at all.
    """
    n2 = gen.shape[0]
    if method == "euler":
        phi = np.eye(n2) + gen * dt
        noise = _psd_sqrt(cov * dt)
        return phi, noise
    if method == "exact":
        block = np.zeros((2 * n2, 2 * n2))
        block[:n2, :n2] = -gen
        block[:n2, n2:] = cov
        block[n2:, n2:] = gen.T
        e = expm(block * dt)
        phi = e[n2:, n2:].T
        q = phi @ e[:n2, n2:]
        q = 0.5 * (q + q.T)
        return phi, _psd_sqrt(q)
    raise ValueError(f"unknown integrator {method!r}")


def simulate_xi2(
    drift: DriftMatrix,
    diff: DiffusionSet,
    geom: ArrayGeometry,
    params: McParams,
    method: str = "euler",
) -> tuple[float, float]:
    """Estimate the collective squeezing parameter from trajectories.

    Returns ``(xi2_estimate, stderr)``.  The estimator time-averages
    |P|^2 and P^2 of the collective c-number amplitude per trajectory,
    picks the optimal quadrature from the pooled anomalous average, and
    takes the spread of the per-trajectory values as the error bar.
    """
    gen = stacked_drift(drift)
    cov = stacked_covariance(diff)
    if method == "euler":
        budget = params.dt * float(np.linalg.norm(gen, 2))
        if budget >= 0.1:
            raise DomainError(
                f"dt * ||A|| = {budget:.3f} is too coarse for Euler stepping; "
                "reduce dt or use the exact integrator"
            )
    phi, noise = _step_operators(gen, cov, params.dt, method)

    n_z = geom.n_layers
    n2 = 2 * n_z
    n_burn = int(round(params.t_burn / params.dt))
    n_avg = max(1, int(round(params.t_avg / params.dt)))
    n_steps = n_burn + n_avg

    phases = np.exp(1j * geom.axial_phase * np.arange(n_z)) / math.sqrt(n_z)
    proj = np.concatenate([phases, 1j * phases])

    gens = [
        np.random.Generator(np.random.Philox(key=[params.seed, j]))
        for j in range(params.n_traj)
    ]
    state = np.zeros((params.n_traj, n2))
    acc_abs2 = np.zeros(params.n_traj)
    acc_sq = np.zeros(params.n_traj, dtype=complex)

    phi_t = phi.T
    noise_t = noise.T
    done = 0
    while done < n_steps:
        blen = min(_BLOCK_STEPS, n_steps - done)
        draws = np.stack([g.standard_normal((blen, n2)) for g in gens])
        incr = draws @ noise_t
        for t in range(blen):
            state = state @ phi_t + incr[:, t, :]
            done_now = done + t + 1
            if done_now > n_burn:
                pc = state @ proj
                acc_abs2 += pc.real**2 + pc.imag**2
                acc_sq += pc * pc
        done += blen
        if float(np.max(np.abs(state))) > _DIVERGENCE_BOUND:
            raise StabilityError(
                "trajectory divergence; the drift matrix is unstable or dt "
                "is far too large"
            )

    a2 = acc_abs2 / n_avg
    b = acc_sq / n_avg
    b_mean = complex(np.mean(b))
    if b_mean == 0:
        rotation = 1.0 + 0.0j
    else:
        rotation = b_mean.conjugate() / abs(b_mean)
    q = 2.0 * a2 - 2.0 * (rotation * b).real
    estimate = float(np.mean(q))
    stderr = float(np.std(q, ddof=1) / math.sqrt(params.n_traj))
    return estimate, stderr
