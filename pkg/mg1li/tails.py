"""
Tail factors f(N) and the power-geometric series behind the analytic tails
A_k = C_A k^(alpha-1) gamma_A^k, B_k = C_B k^(beta-1) gamma_B^k
"""
from functools import wraps
import math

import numpy as np

from mg1li._utils import SERIES_REL_TOL, ModelError

__all__ = ['Constant', 'Power', 'Logarithmic', 'from_descriptor',
           'power_geometric_term', 'power_geometric_sums']


def array_input(f):
    """ Decorator to provide the __call__ methods with an array """
    @wraps(f)
    def wrapped(self, n):
        n = np.atleast_1d(np.asarray(n, dtype=float))
        r = f(self, n)
        return r
    return wrapped


class TailFactor():
    """
    Class for the slowly-ratio-varying factors f, i.e. f(N)/f(N-1) -> 1,
    that correct the geometric decay of the tail sums
    """
    kind = None
    def __init__(self, *pars):
        self.pars = list(pars)

    def __repr__(self):
        """ Representation of each instance """
        return "{0}({1})".format(self.__class__.__name__,
                                 ", ".join(map(str, self.pars)))

    def __call__(self, n):
        raise NotImplementedError

    def ratio(self, n):
        """ f(n) / f(n-1), tends to 1 """
        return self(n) / self(np.asarray(n) - 1)

    def describe(self):
        """ Descriptor used in the machine-readable outputs """
        return {'kind': self.kind, 'pars': [float(p) for p in self.pars]}


##### f(N) = c #################################################################
class Constant(TailFactor):
    """ A constant factor, the purely geometric case """
    kind = 'constant'
    def __init__(self, c=1.0):
        if c <= 0:
            raise ModelError("a constant tail factor must be positive")
        super(Constant, self).__init__(c)
        self.c = c

    @array_input
    def __call__(self, n):
        return np.full(n.shape, float(self.c))


##### f(N) = N**a ##############################################################
class Power(TailFactor):
    """
    A power factor, f(N) = N**exponent, exponent > -1. Geometric-power
    tails with shape parameter alpha give exponent = alpha - 1.
    """
    kind = 'power'
    def __init__(self, exponent):
        if exponent <= -1:
            raise ModelError("power tail factor needs exponent > -1")
        super(Power, self).__init__(exponent)
        self.exponent = exponent

    @array_input
    def __call__(self, n):
        return np.power(n, float(self.exponent))


##### f(N) = log(N + 1) ########################################################
class Logarithmic(TailFactor):
    """ A logarithmic factor, f(N) = log(N + 1) """
    kind = 'logarithmic'

    @array_input
    def __call__(self, n):
        return np.log1p(n)


def from_descriptor(desc):
    """ Inverse of TailFactor.describe() """
    kind = desc.get('kind')
    pars = desc.get('pars', [])
    if kind == 'constant':
        return Constant(*pars)
    if kind == 'power':
        return Power(*pars)
    if kind == 'logarithmic':
        return Logarithmic()
    raise ModelError("unknown tail factor {0!r}".format(kind))


##### power-geometric series ###################################################
def power_geometric_term(alpha, gamma, k):
    """ k**(alpha - 1) * gamma**k, evaluated in log space """
    k = np.asarray(k, dtype=float)
    return np.exp((alpha - 1.0) * np.log(k) + k * math.log(gamma))


def power_geometric_sums(alpha, gamma, start, chunk=512, max_terms=10**7):
    """
    First and second order tails of w(l) = l**(alpha-1) gamma**l,

        s1 = sum_{l >= start} w(l),
        s2 = sum_{l >= start} (l - start + 1) w(l).

    For alpha = 1 both have closed forms; otherwise terms are added in
    chunks until the last one drops below SERIES_REL_TOL times the sum.

    Parameters
    ----------
    alpha: float
        Power shape parameter, alpha > 0
    gamma: float
        Decay rate in (0, 1)
    start: int
        First index, start >= 1
    chunk: int
        Terms evaluated per numpy call
    max_terms: int
        Safety cap on the number of terms

    Returns
    -------
    s1, s2: float
    """
    if not 0.0 < gamma < 1.0:
        raise ModelError("decay rate must lie in (0, 1), got {0}".format(
            gamma))
    if alpha <= 0:
        raise ModelError("power parameter must be positive, got {0}".format(
            alpha))
    start = int(start)
    if start < 1:
        raise ValueError("power-geometric tails start at index 1")
    if alpha == 1.0:
        head = gamma**start
        return head / (1.0 - gamma), head / (1.0 - gamma)**2
    s1, s2 = 0.0, 0.0
    first = start
    while first - start < max_terms:
        idx = np.arange(first, first + chunk, dtype=float)
        w = power_geometric_term(alpha, gamma, idx)
        s1 += w.sum()
        s2 += ((idx - start + 1.0) * w).sum()
        #w is eventually decreasing; only stop once past the peak
        last = w[-1] * (idx[-1] - start + 1.0)
        if w[-1] <= w[0] and last <= SERIES_REL_TOL * s2:
            return s1, s2
        first += chunk
    raise ModelError("power-geometric series did not converge")


### END
