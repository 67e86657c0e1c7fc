"""
Ramaswami's recursion for the stationary distribution of an LI-truncated
chain,

    pi_k = pi_0 R_0(k) + sum_{l=1}^{k-1} pi_l R(k-l),   k >= 1,

with R(k), R_0(k) built from G and Phi_0, and the boundary vector pi_0 from
the stationary vector of K
"""
from collections import deque
from dataclasses import dataclass, field, replace
import logging

import numpy as np

from mg1li._utils import (G_MAX_ITER, G_TOL, MASS_TOL, ConfigError,
                          NumericalError, to_builtin)
from mg1li.gmatrix import phi0, solve_g
from mg1li.model import truncate
from mg1li.numerics import (fundamental_solve, spectral_radius,
                            stationary_vector)

logger = logging.getLogger(__name__)

__all__ = ['RamaswamiKernels', 'LevelDistribution', 'kernels',
           'boundary_vector', 'level_distribution', 'reference_solution',
           'approximate_distribution', 'check_balance', 'default_k_cap']


def default_k_cap(n):
    """ Recursion cap used when none is given """
    return 10 * int(n) + 1000


##### data #####################################################################
@dataclass(frozen=True)
class RamaswamiKernels:
    """
    R(1..N) stacked as r_seq[k-1] (M_1 x M_1), R_0(1..N) as r0_seq[k-1]
    (M_0 x M_1), their sums, K and its stationary vector kappa
    """
    r_seq: np.ndarray
    r0_seq: np.ndarray
    r_sum: np.ndarray
    r0_sum: np.ndarray
    k_matrix: np.ndarray
    kappa: np.ndarray


@dataclass(frozen=True)
class LevelDistribution:
    """
    Level-partitioned stationary vector: pi0 (length M_0), pis[k-1] for
    levels k = 1..k_max (length M_1 each) and the mass not computed
    """
    pi0: np.ndarray
    pis: np.ndarray
    tail_mass: float
    n_trunc: int
    reference: bool = False
    complete: bool = True
    label: str = 'approximate'
    extras: dict = field(default_factory=dict)

    @property
    def k_max(self):
        return self.pis.shape[0]

    def level(self, k):
        """ pi_k, zero beyond k_max """
        if k == 0:
            return self.pi0
        if k <= self.k_max:
            return self.pis[k - 1]
        return np.zeros(self.pis.shape[1])

    def level_masses(self):
        """ pi_k e for k = 0..k_max """
        return np.concatenate([[self.pi0.sum()], self.pis.sum(axis=1)])

    def mass(self):
        return float(self.pi0.sum() + self.pis.sum())

    def upper_mass(self):
        """ bar pi_0 = sum_{l >= 1} pi_l over the computed range """
        return self.pis.sum(axis=0)

    def to_dict(self):
        out = {'label': self.label, 'n_trunc': self.n_trunc,
               'reference': self.reference, 'k_max': self.k_max,
               'tail_mass': self.tail_mass, 'complete': self.complete,
               'pi0': to_builtin(self.pi0), 'pis': to_builtin(self.pis)}
        out.update(to_builtin(self.extras))
        return out


##### kernels ##################################################################
def _suffix_kernels(blocks, g, inv_solve):
    """
    S(N) = X_N, S(k) = X_k + S(k+1) G, returns S(k) (I - Phi_0)^{-1}
    for k = 1..N, with blocks = [X_1, ..., X_N]
    """
    n = len(blocks)
    out = np.empty((n,) + blocks[0].shape)
    s = np.array(blocks[-1], dtype=float)
    out[-1] = s
    for k in range(n - 2, -1, -1):
        s = blocks[k] + s @ g
        out[k] = s
    out = inv_solve(out.reshape(-1, g.shape[0])).reshape(out.shape)
    #rounding can leave -1e-17 where the exact value is 0
    np.clip(out, 0.0, None, out=out)
    return out


def kernels(tm, gsol):
    """
    R^(N)(k) = sum_{m=0}^{N-k} A^(N)_{k+m} G^m (I - Phi_0)^{-1} and the
    boundary analogue R_0^(N)(k) for k = 1..N, evaluated by suffix
    recursion. K^(N) = B_0 + R_0^(N)(1) B_-1, which equals
    B_0 + sum_m B_m G^m when B_-1 = A_-1.

    Parameters
    ----------
    tm: TruncatedModel
        LI-truncated model
    gsol: GSolution
        Its converged G

    Returns
    -------
    kern: RamaswamiKernels
    """
    g = gsol.g_matrix
    phi = phi0(tm, gsol)

    def inv_solve(rows):
        return fundamental_solve(phi, rows, left=True)

    r_seq = _suffix_kernels(list(tm.a_trunc[2:]), g, inv_solve)
    r0_seq = _suffix_kernels(list(tm.b_up), g, inv_solve)
    r_sum = r_seq.sum(axis=0)
    r0_sum = r0_seq.sum(axis=0)
    k_matrix = tm.b0 + r0_seq[0] @ tm.b_minus1
    try:
        kappa = stationary_vector(k_matrix)
    except ValueError as err:
        #K loses mass when G is not stochastic, i.e. sigma >= 0
        raise NumericalError("K^({0}) is not stochastic: {1}".format(
            tm.n, err)) from err
    rho = spectral_radius(r_sum)
    if rho >= 1.0:
        logger.warning("spectral radius of R^(%d) is %.6g", tm.n, rho)
    return RamaswamiKernels(r_seq, r0_seq, r_sum, r0_sum, k_matrix, kappa)


def boundary_vector(kern):
    """
    pi_0 = kappa / (kappa e + kappa R_0 (I - R)^{-1} e), the scaling of kappa
    that makes the levels sum to one

    Parameters
    ----------
    kern: RamaswamiKernels
        Kernels of the truncated chain

    Returns
    -------
    pi0: array
    """
    ones = np.ones(kern.r_sum.shape[0])
    upper = fundamental_solve(kern.r_sum, ones)
    denom = kern.kappa.sum() + kern.kappa @ kern.r0_sum @ upper
    return kern.kappa / denom


##### recursion ################################################################
def level_distribution(tm, gsol, kern, mass_tol=MASS_TOL, k_cap=None,
                       pi0=None):
    """
    Runs the recursion level by level, keeping only the last N vectors
    (R^(N)(j) = 0 for j > N), until the accumulated mass reaches
    1 - mass_tol or k_cap levels are done.

    Parameters
    ----------
    tm: TruncatedModel
        LI-truncated model
    gsol: GSolution
        Its converged G
    kern: RamaswamiKernels
        Its kernels
    mass_tol: float
        Accepted uncomputed mass
    k_cap: int
        Last level computed at most, 10 N + 1000 when None
    pi0: array
        Boundary vector, boundary_vector(kern) when None

    Returns
    -------
    dist: LevelDistribution
    """
    if not mass_tol > 0:
        raise ConfigError("mass_tol must be positive")
    n = tm.n
    k_cap = default_k_cap(n) if k_cap is None else int(k_cap)
    if k_cap < 1:
        raise ConfigError("k_cap must be at least 1")
    pi0 = boundary_vector(kern) if pi0 is None else np.asarray(pi0)
    recent = deque(maxlen=n)
    pis = []
    mass = float(pi0.sum())
    k = 0
    while mass < 1.0 - mass_tol and k < k_cap:
        k += 1
        pik = pi0 @ kern.r0_seq[k - 1] if k <= n else np.zeros(tm.m1)
        if recent:
            #recent[-j] is pi_{k-j}, paired with R(j)
            past = np.array(recent)[::-1]
            pik = pik + np.einsum('jm,jmn->n', past,
                                  kern.r_seq[:past.shape[0]])
        recent.append(pik)
        pis.append(pik)
        mass += float(pik.sum())
    tail_mass = max(1.0 - mass, 0.0)
    complete = tail_mass <= mass_tol
    if not complete:
        logger.warning("level recursion for N=%d stopped at k_cap=%d with "
                       "tail mass %.3e", n, k_cap, tail_mass)
    pis = np.array(pis) if pis else np.zeros((0, tm.m1))
    return LevelDistribution(pi0, pis, tail_mass, n, complete=complete)


def approximate_distribution(model, n, tol_g=G_TOL, max_iter=G_MAX_ITER,
                             mass_tol=MASS_TOL, k_cap=None):
    """
    The whole LI pipeline at level N: truncate, solve G, build the kernels
    and run the recursion

    Returns
    -------
    dist: LevelDistribution
    gsol: GSolution
    kern: RamaswamiKernels
    """
    tm = truncate(model, n)
    gsol = solve_g(tm, tol=tol_g, max_iter=max_iter)
    kern = kernels(tm, gsol)
    dist = level_distribution(tm, gsol, kern, mass_tol=mass_tol, k_cap=k_cap)
    logger.info("pi^(%d): %d levels, tail mass %.3e", n, dist.k_max,
                dist.tail_mass)
    return dist, gsol, kern


def reference_solution(model, n_ref, mass_tol=MASS_TOL, sweep_max=None,
                       profile=None, tol_g=G_TOL, k_cap=None):
    """
    pi^(N_ref), the stand-in for the untruncated pi

    Parameters
    ----------
    model: MG1Model
        Model
    n_ref: int
        Reference truncation level
    mass_tol: float
        Accepted uncomputed mass
    sweep_max: int
        Largest N compared against the reference; n_ref >= 4 sweep_max
    profile: AsymptoticProfile
        When given, the residual bound c* r^(-N_ref+1) f(N_ref) / (-sigma)
        is recorded
    tol_g: float
        G tolerance

    Returns
    -------
    ref: LevelDistribution
    """
    if sweep_max is not None and n_ref < 4 * sweep_max:
        raise ConfigError("n_ref={0} must be at least 4 x {1} (largest N "
                          "compared)".format(n_ref, sweep_max))
    dist, _, _ = approximate_distribution(model, n_ref, tol_g=tol_g,
                                          mass_tol=mass_tol, k_cap=k_cap)
    extras = {}
    if profile is not None:
        extras['residual_bound'] = float(profile.bound(n_ref))
    return replace(dist, reference=True, label='reference', extras=extras)


##### verification #############################################################
def check_balance(tm, dist, k_from=1, k_to=None):
    """
    Largest defect of pi_k = pi_0 B_k + sum_j pi_j A_{k-j} at levels
    k_from..k_to (and of the level 0 equation when k_from is 0)

    Parameters
    ----------
    tm: TruncatedModel
        The chain dist was computed for
    dist: LevelDistribution
        Computed distribution
    k_from, k_to: int
        Level range; k_to defaults to k_max - N

    Returns
    -------
    defect: float
    """
    n = tm.n
    if k_to is None:
        k_to = dist.k_max - n
    k_to = min(k_to, dist.k_max - 1)
    worst = 0.0
    if k_from <= 0:
        lhs = dist.pi0 @ tm.b0 + dist.level(1) @ tm.b_minus1
        worst = float(np.abs(lhs - dist.pi0).max())
        k_from = 1
    for k in range(k_from, k_to + 1):
        lhs = dist.pi0 @ tm.b(k) if k <= n else np.zeros(tm.m1)
        for j in range(max(1, k - n), k + 2):
            lhs = lhs + dist.level(j) @ tm.a(k - j)
        worst = max(worst, float(np.abs(lhs - dist.level(k)).max()))
    return worst


### END
