"""
The G-matrix of an LI-truncated chain: minimal nonnegative solution of
G = sum_{m=-1}^{N} A^(N)_m G^(m+1), its stationary vector g, the matrix
Phi_0 and the second-largest eigenvalue modulus used to check aperiodicity
"""
from dataclasses import dataclass, replace
import logging
import math

import numpy as np

from mg1li._utils import (G_MAX_ITER, G_TOL, STOCHASTIC_TOL, ConfigError,
                          ConvergenceError, to_builtin)
from mg1li.numerics import matrix_polynomial, stationary_vector

logger = logging.getLogger(__name__)

__all__ = ['GSolution', 'solve_g', 'phi0', 'g_stationary', 'spectral_gap',
           'ergodicity_margin']

#decreases smaller than this are rounding, not a broken iteration
_MONOTONE_SLACK = 1e-14


@dataclass(frozen=True)
class GSolution:
    """
    Converged G^(N) with its by-products; slem is None until spectral_gap
    fills it in
    """
    g_matrix: np.ndarray
    phi0: np.ndarray
    iterations: int
    residual: float
    tol: float
    monotone: bool
    g_vec: np.ndarray = None
    slem: float = None

    def to_dict(self):
        return {'g_matrix': to_builtin(self.g_matrix),
                'g_vec': to_builtin(self.g_vec),
                'phi0': to_builtin(self.phi0),
                'iterations': self.iterations,
                'residual': self.residual,
                'monotone': self.monotone,
                'slem': 'not computed' if self.slem is None else self.slem}


def solve_g(tm, tol=G_TOL, max_iter=G_MAX_ITER):
    """
    Natural fixed-point iteration G_0 = O, G_n = sum_m A^(N)_m G_{n-1}^(m+1),
    with the polynomial evaluated by Horner's scheme. The iterates are
    nondecreasing, so the limit is the minimal nonnegative solution.

    Parameters
    ----------
    tm: TruncatedModel
        LI-truncated model
    tol: float
        Stop at the first iterate with max|G_n - G_{n-1}| <= tol
    max_iter: int
        Iteration cap

    Returns
    -------
    gsol: GSolution
    """
    if not tol > 0:
        raise ConfigError("tol must be positive, got {0}".format(tol))
    if max_iter < 1:
        raise ConfigError("max_iter must be at least 1")
    #a_trunc[j] multiplies G^j
    coeffs = list(tm.a_trunc)
    g = np.zeros((tm.m1, tm.m1))
    lowest = 0.0
    for it in range(1, max_iter + 1):
        g_new = matrix_polynomial(coeffs, g)
        step = g_new - g
        lowest = min(lowest, float(step.min()))
        diff = float(np.abs(step).max())
        g = g_new
        if diff <= tol:
            break
        if it % 10000 == 0:
            logger.debug("G^(%d) iteration %d, increment %.3e", tm.n, it, diff)
    else:
        raise ConvergenceError(
            "G iteration for N={0} did not reach tol={1:.1e} in {2} steps "
            "(last increment {3:.3e})".format(tm.n, tol, max_iter, diff))
    residual = float(np.abs(matrix_polynomial(coeffs, g) - g).max())
    monotone = lowest >= -_MONOTONE_SLACK
    if not monotone:
        logger.warning("G iterates decreased by %.3e for N=%d", -lowest, tm.n)
    logger.debug("G^(%d): %d iterations, residual %.3e", tm.n, it, residual)
    phi = matrix_polynomial(list(tm.a_trunc[1:]), g)
    g_vec = None
    defect = float(np.abs(g.sum(axis=1) - 1.0).max())
    if defect <= STOCHASTIC_TOL:
        try:
            g_vec = stationary_vector(g / g.sum(axis=1)[:, None])
        except (ValueError, ArithmeticError) as err:
            logger.warning("no unique stationary vector of G^(%d): %s",
                           tm.n, err)
    else:
        logger.warning("G^(%d) is not stochastic (defect %.3e)", tm.n, defect)
    return GSolution(g, phi, it, residual, tol, monotone, g_vec)


def phi0(tm, gsol):
    """
    Phi_0^(N) = sum_{m=0}^{N} A^(N)_m G^m, as stored by solve_g. Singular
    I - Phi_0^(N) surfaces in the solves that use it.

    Parameters
    ----------
    tm: TruncatedModel
        The model gsol was solved for
    gsol: GSolution
        Converged G

    Returns
    -------
    phi: array
        M_1 x M_1 substochastic matrix
    """
    if gsol.phi0 is not None:
        return gsol.phi0
    return matrix_polynomial(list(tm.a_trunc[1:]), gsol.g_matrix)


def g_stationary(gsol):
    """ Stationary vector g of G^(N), gG = g """
    if gsol.g_vec is not None:
        return gsol.g_vec
    return stationary_vector(gsol.g_matrix)


def spectral_gap(gsol):
    """
    Second-largest eigenvalue modulus of G^(N); below 1 when the single
    communication class of G is aperiodic.

    Parameters
    ----------
    gsol: GSolution
        Converged G

    Returns
    -------
    gsol: GSolution
        Copy with slem filled in
    """
    try:
        eig = np.linalg.eigvals(gsol.g_matrix)
    except np.linalg.LinAlgError as err:
        raise ConvergenceError("eigenvalues of G failed: {0}".format(err)) \
            from err
    #drop the Perron root
    rest = np.delete(eig, np.argmin(np.abs(eig - 1.0)))
    slem = float(np.abs(rest).max()) if rest.size else 0.0
    logger.info("slem(G) = %.6g, margin %.6g", slem, ergodicity_margin(slem))
    return replace(gsol, slem=slem)


def ergodicity_margin(slem):
    """ 1/slem - 1, the empirical geometric-ergodicity margin """
    if slem <= 0:
        return math.inf
    return 1.0 / slem - 1.0


### END
