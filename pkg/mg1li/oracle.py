"""
Brute-force cross-check: the LI-truncated chain restricted to levels 0..L
as one dense stochastic matrix, solved directly by GTH
"""
from dataclasses import dataclass
import logging

import numpy as np

from mg1li._utils import ConfigError
from mg1li.numerics import stationary_vector
from mg1li.ramaswami import LevelDistribution

logger = logging.getLogger(__name__)

__all__ = ['OracleSolution', 'brute_force_stationary', 'default_levels',
           'l1_distance', 'STATE_CAP']

STATE_CAP = 2 * 10**5
METHODS = ('lump_last', 'renormalize')


@dataclass(frozen=True)
class OracleSolution:
    levels: int
    pi_hat: LevelDistribution
    method: str

    def to_dict(self):
        return {'levels': self.levels, 'method': self.method,
                'pi_hat': self.pi_hat.to_dict()}


def _assemble(tm, levels, method):
    """ Dense P^(N) on levels 0..L with the overflow handled by method """
    m0, m1, n = tm.m0, tm.m1, tm.n
    size = m0 + levels * m1
    p = np.zeros((size, size))

    def span(level):
        if level == 0:
            return slice(0, m0)
        start = m0 + (level - 1) * m1
        return slice(start, start + m1)

    p[span(0), span(0)] = tm.b0
    for j in range(1, n + 1):
        if j > levels and method != 'lump_last':
            break
        p[span(0), span(min(j, levels))] += tm.b(j)
    for i in range(1, levels + 1):
        if i == 1:
            p[span(1), span(0)] = tm.b_minus1
        else:
            p[span(i), span(i - 1)] = tm.a(-1)
        for m in range(0, n + 1):
            j = i + m
            if j > levels:
                if method != 'lump_last':
                    break
                j = levels
            p[span(i), span(j)] += tm.a(m)
    if method == 'renormalize':
        #deficit of the dropped overflow goes back on the diagonal
        p[np.diag_indices(size)] += 1.0 - p.sum(axis=1)
    return p


def brute_force_stationary(tm, levels, method='lump_last'):
    """
    Stationary vector of the truncated chain censored at level L.

    Parameters
    ----------
    tm: TruncatedModel
        LI-truncated model
    levels: int
        Top level L
    method: str
        'lump_last' folds jumps above L into level L; 'renormalize' drops
        them and returns the row deficit to the diagonal

    Returns
    -------
    sol: OracleSolution

    Notes
    -----
    'renormalize' does not solve the raw substochastic censored matrix and
    rescale its left vector to mass one. It solves the stochastic matrix
    obtained by adding each row deficit to the diagonal as a self-loop, so
    the GTH elimination applies unchanged. Both variants approach the same
    limit as L grows and differ at finite L.
    """
    if method not in METHODS:
        raise ConfigError("method must be one of {0}, got {1!r}".format(
            METHODS, method))
    levels = int(levels)
    if levels < 1:
        raise ConfigError("levels must be at least 1")
    if tm.m0 + levels * tm.m1 > STATE_CAP:
        raise ConfigError("{0} states exceed the cap of {1}".format(
            tm.m0 + levels * tm.m1, STATE_CAP))
    p = _assemble(tm, levels, method)
    v = stationary_vector(p)
    pi0 = v[:tm.m0]
    pis = v[tm.m0:].reshape(levels, tm.m1)
    logger.info("oracle on %d states (%s), top-level mass %.3e", v.size,
                method, pis[-1].sum())
    dist = LevelDistribution(pi0, pis, 0.0, tm.n, label='oracle')
    return OracleSolution(levels, dist, method)


def default_levels(dist, tail_tol=1e-10, step=50):
    """ Smallest multiple of step whose mass above it is below tail_tol """
    masses = dist.level_masses()
    above = dist.tail_mass + (masses.sum() - np.cumsum(masses))
    for level in range(step, dist.k_max + step + 1, step):
        if level >= len(above) or above[level] < tail_tol:
            return level
    return dist.k_max + step


def l1_distance(a, b, k_max):
    """ sum_{k=0}^{k_max} |a_k - b_k| e """
    return float(sum(np.abs(a.level(k) - b.level(k)).sum()
                     for k in range(0, k_max + 1)))


### END
