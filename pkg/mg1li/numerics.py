"""
Dense kernels for stochastic matrices: stationary vectors by the
Grassmann-Taksar-Heyman (GTH) elimination and linear solves with I - M
"""
import logging
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, eigvals, lu_factor, lu_solve
from scipy.sparse.csgraph import connected_components

from mg1li._utils import (RCOND_MIN, STOCHASTIC_TOL, ReducibleChainError,
                          SingularMatrixError)

logger = logging.getLogger(__name__)

__all__ = ['stationary_vector', 'fundamental_solve', 'matrix_polynomial',
           'spectral_radius', 'closed_classes', 'is_irreducible']


##### communication classes ####################################################
def closed_classes(p):
    """
    Closed communication classes of a nonnegative square matrix, read off
    the strongly connected components of its nonzero pattern.

    Parameters
    ----------
    p: array
        Square nonnegative matrix

    Returns
    -------
    classes: list
        Sorted index arrays, one per closed class
    """
    pattern = np.asarray(p) > 0
    ncomp, labels = connected_components(pattern, directed=True,
                                         connection='strong')
    closed = []
    for c in range(ncomp):
        members = np.flatnonzero(labels == c)
        leaves = pattern[np.ix_(members, np.flatnonzero(labels != c))]
        if not leaves.any():
            closed.append(members)
    return closed


def is_irreducible(p):
    """ True when the nonzero pattern of p is strongly connected """
    ncomp, _ = connected_components(np.asarray(p) > 0, directed=True,
                                    connection='strong')
    return ncomp == 1


##### stationary vectors #######################################################
def _gth(p):
    """ GTH on an irreducible row-stochastic block, no checks """
    a = np.array(p, dtype=float)
    n = a.shape[0]
    for k in range(n - 1, 0, -1):
        s = a[k, :k].sum()
        if s <= 0.0:
            raise ReducibleChainError(
                "zero pivot while eliminating state {0}".format(k))
        a[:k, k] /= s
        a[:k, :k] += np.outer(a[:k, k], a[k, :k])
    x = np.zeros(n)
    x[0] = 1.0
    for k in range(1, n):
        x[k] = x[:k] @ a[:k, k]
    return x / x.sum()


def stationary_vector(p, tol=STOCHASTIC_TOL):
    """
    Stationary distribution v of a row-stochastic matrix, vP = v and
    v.1 = 1, by GTH elimination. The diagonal is never read and there are
    no subtractions, so the result stays accurate for nearly
    decomposable matrices. Transient states get probability zero.

    Parameters
    ----------
    p: array
        Square row-stochastic matrix
    tol: float
        Accepted row-sum defect

    Returns
    -------
    v: array
        Probability vector
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError("expected a square matrix, got shape {0}".format(
            p.shape))
    if (p < 0).any():
        raise ValueError("negative entries in a stochastic matrix")
    defect = np.abs(p.sum(axis=1) - 1.0).max()
    if defect > tol:
        raise ValueError("row sums differ from 1 by {0:.3e}".format(defect))
    classes = closed_classes(p)
    if len(classes) != 1:
        raise ReducibleChainError(
            "{0} closed classes, the stationary vector is not unique".format(
                len(classes)))
    members = classes[0]
    v = np.zeros(p.shape[0])
    if members.size == p.shape[0]:
        v[:] = _gth(p)
    else:
        #the closed class is stochastic on its own
        logger.debug("%d transient states get zero mass",
                     p.shape[0] - members.size)
        v[members] = _gth(p[np.ix_(members, members)])
    return v


##### linear solves with I - M #################################################
def fundamental_solve(m, rhs, left=False):
    """
    Solves (I - m) x = rhs, or x (I - m) = rhs when left is True, by LU
    factorization with partial pivoting.

    Parameters
    ----------
    m: array
        Square substochastic matrix with spectral radius below 1
    rhs: array
        Vector or matrix; rows of rhs are the row vectors when left is True
    left: bool
        Solve from the left, i.e. x = rhs (I - m)^{-1}

    Returns
    -------
    x: array
        Solution with the shape of rhs
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    a = np.identity(m.shape[0]) - m
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or 1.0 / cond < RCOND_MIN:
        raise SingularMatrixError(
            "I - M is singular (condition number {0:.3e})".format(cond))
    rhs = np.asarray(rhs, dtype=float)
    b = rhs.T if left else rhs
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", LinAlgWarning)
            lu = lu_factor(a, check_finite=True)
            x = lu_solve(lu, b, trans=1 if left else 0)
    except (LinAlgWarning, ValueError) as err:
        raise SingularMatrixError(str(err)) from err
    return x.T if left else x


##### matrix polynomials #######################################################
def matrix_polynomial(coeffs, x):
    """
    Horner evaluation of sum_j coeffs[j] x^j with x acting on the right,
    ((C_d x + C_{d-1}) x + ...) x + C_0, without storing powers of x.

    Parameters
    ----------
    coeffs: sequence of arrays
        Coefficient matrices C_0, ..., C_d, all with x.shape[0] columns
    x: array
        Square matrix

    Returns
    -------
    value: array
    """
    value = np.array(coeffs[-1], dtype=float)
    for c in coeffs[-2::-1]:
        value = value @ x + c
    return value


def spectral_radius(m):
    """ Largest eigenvalue modulus """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    return float(np.abs(eigvals(m)).max())


### END
