"""
Convergence of the LI-truncated stationary distribution: the stationary
nonnegative level-increment (SNL) distribution D and its integrated tail,
the decay profile (r, f, c_A, c_B) with the prefactors theta and theta_DI,
the truncation level rule N* and ratio diagnostics over a range of N
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
import logging
import math

import numpy as np

from mg1li._utils import (G_TOL, MASS_TOL, ConfigError, ConvergenceError,
                          ModelError, to_builtin)
from mg1li.model import drift, tail_shape
from mg1li.ramaswami import approximate_distribution

logger = logging.getLogger(__name__)

__all__ = ['SNLDistribution', 'AsymptoticProfile', 'SweepRecord',
           'LevelDifferences', 'snl', 'integrated_tail', 'decay_profile',
           'select_n', 'sweep_diagnostics', 'level_differences',
           'positivity_thresholds', 'predicted_relative_error',
           'corrected_distribution']

#tail mass a reference may leave uncomputed before snl refuses it
REF_TAIL_MAX = 1e-10


##### SNL distribution #########################################################
@dataclass(frozen=True)
class SNLDistribution:
    """
    D(0..k_max), its mean and, once integrated_tail has run, the
    integrated-tail complement. tail_closed holds the same complement from
    the second-order tail sums when the blocks are known.
    """
    d: np.ndarray
    mean_d: float
    d_bar_i: np.ndarray = None
    tail_closed: np.ndarray = None

    @property
    def k_max(self):
        return self.d.shape[0] - 1

    def d_bar_i_at(self, k):
        """ bar D_I(k), closed form first """
        if self.tail_closed is not None and k < self.tail_closed.shape[0]:
            return float(self.tail_closed[k])
        if self.d_bar_i is None:
            raise ConfigError("integrated tail not computed")
        if k >= self.d_bar_i.shape[0]:
            raise ConfigError("bar D_I({0}) is beyond k_max={1}".format(
                k, self.k_max))
        return float(self.d_bar_i[k])

    def to_dict(self):
        return {'k_max': self.k_max, 'mean_d': self.mean_d,
                'd': to_builtin(self.d), 'd_bar_i': to_builtin(self.d_bar_i),
                'd_bar_i_closed': to_builtin(self.tail_closed)}


def snl(model, ref, k_max):
    """
    SNL distribution of a reference solution,

        1 - D(k) = pi_0 bar B_k e + bar pi_0 bar A_k e,

    where bar pi_0 is the mass above level 0.

    Parameters
    ----------
    model: MG1Model
        Model
    ref: LevelDistribution
        Reference solution with negligible tail mass
    k_max: int
        Last k evaluated

    Returns
    -------
    snl: SNLDistribution
    """
    if ref.tail_mass >= REF_TAIL_MAX:
        raise ConfigError("reference tail mass {0:.3e} is not negligible"
                          .format(ref.tail_mass))
    if k_max < 0:
        raise ConfigError("k_max must be nonnegative")
    pi0, pibar = ref.pi0, ref.upper_mass()
    ks = range(0, k_max + 1)
    upper = np.array([pi0 @ model.b_bar(k).sum(axis=1)
                      + pibar @ model.a_bar(k).sum(axis=1) for k in ks])
    d = 1.0 - upper
    mean = float(pi0 @ model.b_bbar(-1).sum(axis=1)
                 + pibar @ model.a_bbar(-1).sum(axis=1))
    closed = None
    if mean > 0:
        closed = np.array([pi0 @ model.b_bbar(k).sum(axis=1)
                           + pibar @ model.a_bbar(k).sum(axis=1)
                           for k in ks]) / mean
    if upper[-1] > 1e-10:
        logger.warning("D(%d) = 1 - %.3e, range too short", k_max, upper[-1])
    return SNLDistribution(d, mean, tail_closed=closed)


def integrated_tail(s):
    """
    D_I(k) = sum_{l=0}^{k} (1 - D(l)) / mean and bar D_I = 1 - D_I,
    compared with the closed form when one is stored

    Parameters
    ----------
    s: SNLDistribution
        SNL distribution

    Returns
    -------
    s: SNLDistribution
        Copy with d_bar_i filled in
    """
    if not s.mean_d > 0:
        raise ModelError("zero mean: the chain has no positive level "
                         "increments")
    d_i = np.cumsum(1.0 - s.d) / s.mean_d
    d_bar_i = 1.0 - d_i
    if s.tail_closed is not None:
        gap = float(np.abs(d_bar_i - s.tail_closed).max())
        if gap > 1e-10:
            logger.warning("integrated tail differs from the closed form by "
                           "%.3e", gap)
    return replace(s, d_bar_i=d_bar_i)


##### decay profile ############################################################
@dataclass(frozen=True)
class AsymptoticProfile:
    """
    Decay radii, tail factor and coefficients with the drift quantities
    and the two prefactors, theta for r^-N f(N) and theta_di for bar D_I(N)
    """
    r_a: float
    r_b: float
    r: float
    factor: object
    c_a: np.ndarray
    c_b: np.ndarray
    sigma: float
    varpi: np.ndarray
    m_bar_a: np.ndarray
    m_bar_a_plus: np.ndarray
    m_bar_b: np.ndarray
    theta: float
    theta_di: float
    c_star: float
    method: str = 'closed_form'
    heuristic_f: bool = False
    ref_tail_mass: float = 0.0

    def scale(self, n):
        """ r^-N f(N) """
        n = np.asarray(n, dtype=float)
        out = np.exp(-n * math.log(self.r)) * self.factor(n)
        return float(out[0]) if out.size == 1 else out

    def bound(self, n):
        """ c* / (-sigma) r^(-N+1) f(N) """
        return self.c_star / -self.sigma * self.r * self.scale(n)

    def to_dict(self):
        return {'r_a': self.r_a, 'r_b': self.r_b, 'r': self.r,
                'f': self.factor.describe(), 'heuristic_f': self.heuristic_f,
                'method': self.method, 'c_a': to_builtin(self.c_a),
                'c_b': to_builtin(self.c_b), 'c_star': self.c_star,
                'sigma': self.sigma, 'varpi': to_builtin(self.varpi),
                'm_bar_a': to_builtin(self.m_bar_a),
                'm_bar_a_plus': to_builtin(self.m_bar_a_plus),
                'm_bar_b': to_builtin(self.m_bar_b),
                'theta': self.theta, 'theta_di': self.theta_di,
                'ref_tail_mass': self.ref_tail_mass}


def decay_profile(model, ref):
    """
    Decay profile of a model: closed form for geometric_power tails, a
    log-linear fit of the explicit blocks otherwise. The prefactors are

        theta    = r (pi_0 c_B + bar pi_0 c_A) / (-sigma),
        theta_DI = r (pi_0 m_B + bar pi_0 m_A^+) / (-sigma).

    Parameters
    ----------
    model: MG1Model
        Model
    ref: LevelDistribution
        Reference solution supplying pi_0 and bar pi_0

    Returns
    -------
    profile: AsymptoticProfile
    """
    report = drift(model)
    if not report.stable:
        raise ModelError("sigma = {0:.6g} >= 0, no stationary distribution"
                         .format(report.sigma))
    shape = tail_shape(model)
    if not shape.r > 1.0:
        raise ModelError("decay radius r = {0:.6g} <= 1".format(shape.r))
    pi0, pibar = ref.pi0, ref.upper_mass()
    minus_sigma = -report.sigma
    theta = shape.r * float(pi0 @ shape.c_b + pibar @ shape.c_a) / minus_sigma
    theta_di = shape.r * float(pi0 @ report.m_bar_b
                               + pibar @ report.m_bar_a_plus) / minus_sigma
    c_star = float(max(shape.c_a.max(), shape.c_b.max()))
    logger.info("r=%.6g theta=%.6g theta_DI=%.6g c*=%.6g", shape.r, theta,
                theta_di, c_star)
    return AsymptoticProfile(
        shape.r_a, shape.r_b, shape.r, shape.factor, shape.c_a, shape.c_b,
        report.sigma, report.varpi, report.m_bar_a, report.m_bar_a_plus,
        report.m_bar_b, theta, theta_di, c_star, shape.method,
        shape.heuristic_f, ref.tail_mass)


def select_n(profile, epsilon, n_max=10**6):
    """
    N* = min{N >= 1 : c*/(-sigma) r^(-N+1) f(N) < epsilon}, by forward scan

    Parameters
    ----------
    profile: AsymptoticProfile
        Decay profile
    epsilon: float
        Target bound
    n_max: int
        Scan limit

    Returns
    -------
    n_star: int
    """
    if not epsilon > 0:
        raise ConfigError("epsilon must be positive, got {0}".format(epsilon))
    if not profile.r > 1.0:
        raise ConfigError("select_n needs r > 1")
    for n in range(1, n_max + 1):
        if profile.bound(n) < epsilon:
            return n
    raise ConvergenceError("bound stays above {0:g} up to N={1}".format(
        epsilon, n_max))


def predicted_relative_error(profile, n):
    """
    (pi_0 c_B + bar pi_0 c_A)/(-sigma) r^(-N+1) f(N), the level-free
    relative error of pi^(N)
    """
    return profile.theta * profile.scale(n)


def corrected_distribution(approx, profile):
    """
    First-order correction pi_k = pi^(N)_k / (1 + theta r^-N f(N)). The
    correction holds for fixed k, so the result is not renormalized and its
    mass deficit is kept as tail_mass.

    Parameters
    ----------
    approx: LevelDistribution
        pi^(N)
    profile: AsymptoticProfile
        Decay profile of the same model

    Returns
    -------
    corrected: LevelDistribution
    """
    factor = 1.0 + predicted_relative_error(profile, approx.n_trunc)
    pi0, pis = approx.pi0 / factor, approx.pis / factor
    mass = float(pi0.sum() + pis.sum())
    return replace(approx, pi0=pi0, pis=pis, tail_mass=max(1.0 - mass, 0.0),
                   label='corrected', reference=False)


##### differences against a reference ##########################################
@dataclass(frozen=True)
class LevelDifferences:
    """ pi^(N)_k - pi_k for k = 0..k_report with their norms """
    diff_by_level: tuple
    l1_by_level: np.ndarray
    rel_by_level: np.ndarray
    ref_mass_by_level: np.ndarray
    tv_total: float


def level_differences(approx, ref, k_report):
    """
    Per-level differences of approx against ref. tv_total is the l1 sum
    over every level either distribution holds.

    Parameters
    ----------
    approx, ref: LevelDistribution
        Distributions to compare
    k_report: int
        Last level reported individually

    Returns
    -------
    diffs: LevelDifferences
    """
    diffs = tuple(approx.level(k) - ref.level(k)
                  for k in range(0, k_report + 1))
    l1 = np.array([np.abs(d).sum() for d in diffs])
    masses = np.array([ref.level(k).sum() for k in range(0, k_report + 1)])
    with np.errstate(divide='ignore', invalid='ignore'):
        rel = np.where(masses > 0, l1 / masses, np.nan)
    top = max(approx.k_max, ref.k_max)
    tv = sum(float(np.abs(approx.level(k) - ref.level(k)).sum())
             for k in range(0, top + 1))
    return LevelDifferences(diffs, l1, rel, masses, tv)


@dataclass(frozen=True)
class SweepRecord:
    """
    One truncation level of a sweep: differences against the reference
    and their ratios to r^-N f(N) and to bar D_I(N). tv_ratio is the
    conjectural total-variation ratio.
    """
    n: int
    diff_by_level: tuple
    l1_by_level: np.ndarray
    rel_by_level: np.ndarray
    tv_total: float
    scale: float
    d_bar_i: float
    diff_ratio: tuple
    rel_ratio: np.ndarray
    di_ratio: tuple
    tv_ratio: float
    expected_theta_pik: tuple
    expected_thetadi_pik: tuple
    expected_theta: float

    @property
    def positive(self):
        """ Levels whose difference is elementwise positive """
        return np.array([bool((d > 0).all()) for d in self.diff_by_level])


def _sweep_one(args):
    """ Worker for one N; module level so process pools can pickle it """
    model, n, ref, profile, s, k_report, tol_g, mass_tol = args
    approx, _, _ = approximate_distribution(model, n, tol_g=tol_g,
                                            mass_tol=mass_tol)
    diffs = level_differences(approx, ref, k_report)
    scale = profile.scale(n)
    d_bar_i = s.d_bar_i_at(n)
    refs = tuple(ref.level(k) for k in range(0, k_report + 1))
    return SweepRecord(
        n=n, diff_by_level=diffs.diff_by_level,
        l1_by_level=diffs.l1_by_level, rel_by_level=diffs.rel_by_level,
        tv_total=diffs.tv_total, scale=scale, d_bar_i=d_bar_i,
        diff_ratio=tuple(d / scale for d in diffs.diff_by_level),
        rel_ratio=diffs.rel_by_level / scale,
        di_ratio=tuple(d / d_bar_i for d in diffs.diff_by_level),
        tv_ratio=diffs.tv_total / scale,
        expected_theta_pik=tuple(profile.theta * p for p in refs),
        expected_thetadi_pik=tuple(profile.theta_di * p for p in refs),
        expected_theta=profile.theta)


def sweep_diagnostics(model, ns, ref, profile, s, k_report, jobs=1,
                      tol_g=G_TOL, mass_tol=MASS_TOL):
    """
    Ratio diagnostics of pi^(N) against the reference for every N in ns.
    Expected limits: diff_ratio -> theta pi_k, rel_ratio -> theta,
    di_ratio -> theta_DI pi_k.

    Parameters
    ----------
    model: MG1Model
        Model
    ns: list of int
        Truncation levels, each at most a quarter of ref.n_trunc
    ref: LevelDistribution
        Reference solution
    profile: AsymptoticProfile
        Decay profile
    s: SNLDistribution
        SNL distribution with the integrated tail up to max(ns)
    k_report: int
        Last level reported
    jobs: int
        Worker processes; 1 runs in-process
    tol_g, mass_tol: float
        Solver tolerances

    Returns
    -------
    records: list of SweepRecord
        Ordered as ns
    """
    ns = [int(n) for n in ns]
    if not ns:
        raise ConfigError("empty list of truncation levels")
    too_big = [n for n in ns if 4 * n > ref.n_trunc]
    if too_big:
        raise ConfigError("N={0} exceeds n_ref/4 = {1}".format(
            too_big, ref.n_trunc / 4.0))
    if jobs < 1:
        raise ConfigError("jobs must be at least 1")
    tasks = [(model, n, ref, profile, s, k_report, tol_g, mass_tol)
             for n in ns]
    if jobs == 1:
        records = [_sweep_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_sweep_one, tasks))
    logger.info("sweep over %d truncation levels done", len(records))
    return records


def positivity_thresholds(records):
    """
    Smallest N_k per level such that pi^(N)_k - pi_k > 0 elementwise for
    every recorded N >= N_k; None when the last record is not positive

    Parameters
    ----------
    records: list of SweepRecord
        Sweep output

    Returns
    -------
    thresholds: dict
        Level k to N_k
    """
    ordered = sorted(records, key=lambda rec: rec.n)
    if not ordered:
        return {}
    levels = len(ordered[0].diff_by_level)
    thresholds = {}
    for k in range(levels):
        n_k = None
        for rec in reversed(ordered):
            if not (rec.diff_by_level[k] > 0).all():
                break
            n_k = rec.n
        thresholds[k] = n_k
    return thresholds


### END
