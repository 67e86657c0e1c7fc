"""
M/G/1-type Markov chains: block sequences {A_k}, {B_k} with an analytic tail,
their level-increment (LI) truncation and the drift quantities
"""
from dataclasses import dataclass, field
import json
import logging
import math

import numpy as np
from scipy.stats import linregress

from mg1li import tails
from mg1li._utils import STOCHASTIC_TOL, ModelError, to_builtin
from mg1li.numerics import is_irreducible, stationary_vector

logger = logging.getLogger(__name__)

__all__ = ['TailSpec', 'MG1Model', 'TruncatedModel', 'DriftReport',
           'AssumptionCheck', 'AssumptionReport', 'TailShape', 'load_model',
           'dump_model', 'model_from_dict', 'materialize_blocks', 'truncate',
           'drift', 'validate_assumptions', 'tail_shape', 'fit_tail_decay']


def _matrix(x, shape, name):
    """ Read-only float matrix of the given shape """
    try:
        arr = np.array(x, dtype=float)
    except (TypeError, ValueError) as err:
        raise ModelError("{0} is not a numeric matrix".format(name)) from err
    if arr.ndim < 2:
        arr = arr.reshape(1, -1) if arr.size > 1 else arr.reshape(1, 1)
    if arr.shape != tuple(shape):
        raise ModelError("{0} has shape {1}, expected {2}".format(
            name, arr.shape, tuple(shape)))
    if not np.isfinite(arr).all():
        raise ModelError("{0} has non-finite entries".format(name))
    arr.setflags(write=False)
    return arr


def _scalar(x, name, cast=float):
    """ Number read from a model file, None passes through """
    if x is None:
        return None
    if isinstance(x, (str, bool)):
        raise ModelError("{0} must be a number, got {1!r}".format(name, x))
    try:
        return cast(x)
    except (TypeError, ValueError) as err:
        raise ModelError("{0} must be a number, got {1!r}".format(
            name, x)) from err


##### tail description #########################################################
class TailSpec(object):
    """
    Analytic description of the blocks beyond the explicit lists.

    Parameters
    ----------
    kind: str
        'finite' (blocks vanish beyond the lists) or 'geometric_power'
        (A_k = C_A k^(alpha-1) gamma_A^k, B_k = C_B k^(beta-1) gamma_B^k for
        k > k_explicit)
    gamma_a, gamma_b: float
        Decay rates in (0, 1)
    alpha, beta: float
        Positive power parameters
    c_mat_a: array
        M_1 x M_1 nonnegative coefficient matrix C_A
    c_mat_b: array
        M_0 x M_1 nonnegative coefficient matrix C_B
    k_explicit: int
        Last index not given by the formulas; defaults to the longest list
    declared: bool
        False when the model file carried no tail description at all
    """
    KINDS = ('finite', 'geometric_power')

    def __init__(self, kind='finite', gamma_a=None, gamma_b=None, alpha=1.0,
                 beta=1.0, c_mat_a=None, c_mat_b=None, k_explicit=None,
                 declared=True):
        if kind not in self.KINDS:
            raise ModelError("tail kind must be one of {0}, got {1!r}".format(
                self.KINDS, kind))
        self.kind = kind
        self.gamma_a = _scalar(gamma_a, 'tail.gamma_a')
        self.gamma_b = _scalar(gamma_b, 'tail.gamma_b')
        self.alpha = 1.0 if alpha is None else _scalar(alpha, 'tail.alpha')
        self.beta = 1.0 if beta is None else _scalar(beta, 'tail.beta')
        self.c_mat_a, self.c_mat_b = c_mat_a, c_mat_b
        self.k_explicit = _scalar(k_explicit, 'tail.k_explicit', int)
        self.declared = declared

    def __repr__(self):
        if self.kind == 'finite':
            return "TailSpec(finite)"
        return ("TailSpec(geometric_power, gamma_a={0}, gamma_b={1}, "
                "alpha={2}, beta={3}, k_explicit={4})").format(
                    self.gamma_a, self.gamma_b, self.alpha, self.beta,
                    self.k_explicit)

    def bind(self, m0, m1, k_lists):
        """
        Checks the parameters against the model dimensions and returns the
        bound copy used by MG1Model
        """
        if self.kind == 'finite':
            return TailSpec('finite', k_explicit=k_lists,
                            declared=self.declared)
        c_a = np.zeros((m1, m1)) if self.c_mat_a is None else self.c_mat_a
        c_b = np.zeros((m0, m1)) if self.c_mat_b is None else self.c_mat_b
        c_a = _matrix(c_a, (m1, m1), 'tail.c_mat_a')
        c_b = _matrix(c_b, (m0, m1), 'tail.c_mat_b')
        if (c_a < 0).any() or (c_b < 0).any():
            raise ModelError("tail coefficient matrices must be nonnegative")
        for name, gamma, c in (('gamma_a', self.gamma_a, c_a),
                               ('gamma_b', self.gamma_b, c_b)):
            if c.any() and (gamma is None or not 0.0 < gamma < 1.0):
                raise ModelError("tail.{0} must lie in (0, 1), got {1}".format(
                    name, gamma))
        if self.alpha <= 0 or self.beta <= 0:
            raise ModelError("tail.alpha and tail.beta must be positive")
        k_explicit = (k_lists if self.k_explicit is None
                      else int(self.k_explicit))
        if k_explicit < k_lists:
            raise ModelError(
                "tail.k_explicit={0} is below the explicit lists (up to {1})"
                .format(k_explicit, k_lists))
        return TailSpec('geometric_power', self.gamma_a, self.gamma_b,
                        self.alpha, self.beta, c_a, c_b, k_explicit,
                        self.declared)

    @property
    def a_active(self):
        return self.kind == 'geometric_power' and bool(self.c_mat_a.any())

    @property
    def b_active(self):
        return self.kind == 'geometric_power' and bool(self.c_mat_b.any())

    def to_dict(self):
        if self.kind == 'finite':
            return {'kind': 'finite'}
        return {'kind': self.kind, 'gamma_a': self.gamma_a,
                'gamma_b': self.gamma_b, 'alpha': self.alpha,
                'beta': self.beta, 'c_mat_a': to_builtin(self.c_mat_a),
                'c_mat_b': to_builtin(self.c_mat_b),
                'k_explicit': self.k_explicit}


##### the chain ################################################################
class MG1Model(object):
    """
    An M/G/1-type transition structure

        level 0 : B_0  B_1  B_2 ...
        level 1 : B_-1 A_0  A_1 ...
        level k : A_-1 A_0  A_1 ...   (shifted)

    Parameters
    ----------
    m0: int
        Number of boundary phases M_0
    m1: int
        Number of repeating phases M_1
    a_blocks: list of arrays
        A_-1, A_0, ..., A_{K_A}, each M_1 x M_1
    b_minus1: array
        B_-1, M_1 x M_0
    b_blocks: list of arrays
        B_0 (M_0 x M_0) followed by B_1, ..., B_{K_B} (each M_0 x M_1)
    tail: TailSpec
        Blocks beyond the lists; finite when None
    tol: float
        Accepted row-sum defect; rows are never renormalized
    """
    def __init__(self, m0, m1, a_blocks, b_minus1, b_blocks, tail=None,
                 tol=STOCHASTIC_TOL):
        dims = (_scalar(m0, 'm0'), _scalar(m1, 'm1'))
        if None in dims or any(not np.isfinite(d) or d != int(d) or d < 1
                                   for d in dims):
            raise ModelError("m0 and m1 must be positive integers")
        self.m0, self.m1 = int(dims[0]), int(dims[1])
        if not all(isinstance(x, (list, tuple, np.ndarray))
                   for x in (a_blocks, b_blocks)):
            raise ModelError("a_blocks and b_blocks must be lists of "
                             "matrices")
        if len(a_blocks) < 2:
            raise ModelError("a_blocks must hold at least A_-1 and A_0")
        if len(b_blocks) < 1:
            raise ModelError("b_blocks must hold at least B_0")
        self._a = np.array([_matrix(a, (self.m1, self.m1),
                                    'a_blocks[k={0}]'.format(k - 1))
                            for k, a in enumerate(a_blocks)])
        self._a.setflags(write=False)
        self.b_minus1 = _matrix(b_minus1, (self.m1, self.m0), 'b_minus1')
        self.b0 = _matrix(b_blocks[0], (self.m0, self.m0), 'b_blocks[k=0]')
        up = [_matrix(b, (self.m0, self.m1), 'b_blocks[k={0}]'.format(k))
              for k, b in enumerate(b_blocks[1:], start=1)]
        self._b = (np.array(up) if up
                   else np.zeros((0, self.m0, self.m1)))
        self._b.setflags(write=False)
        tail = TailSpec('finite') if tail is None else tail
        self.tail = tail.bind(self.m0, self.m1, max(self.k_a, self.k_b))
        self._validate(tol)

    def __repr__(self):
        return "MG1Model(m0={0}, m1={1}, K_A={2}, K_B={3}, {4})".format(
            self.m0, self.m1, self.k_a, self.k_b, self.tail)

    @property
    def k_a(self):
        """ Index of the last explicit A block """
        return self._a.shape[0] - 2

    @property
    def k_b(self):
        """ Index of the last explicit B block """
        return self._b.shape[0]

    @property
    def k_explicit(self):
        return self.tail.k_explicit

    def _validate(self, tol):
        for name, arr in (('A', self._a), ('B_-1', self.b_minus1),
                          ('B_0', self.b0), ('B_k', self._b)):
            if arr.size and (arr.min() < -tol or arr.max() > 1 + tol):
                raise ModelError("{0} blocks have entries outside [0, 1]"
                                 .format(name))
        ones = np.ones(self.m1)
        rows = {
            'repeating levels [A_-1 | A_0 A_1 ...]':
                self.a_matrix() @ ones,
            'level 1 [B_-1 | A_0 A_1 ...]':
                self.b_minus1.sum(axis=1) + (self.a(0) + self.a_bar(0)) @ ones,
            'level 0 [B_0 B_1 ...]':
                self.b0.sum(axis=1) + self.b_bar(0) @ ones,
        }
        for name, sums in rows.items():
            if not np.isfinite(sums).all():
                raise ModelError("tail sum diverges for {0}".format(name))
            defect = np.abs(sums - 1.0).max()
            if defect > tol:
                raise ModelError(
                    "row sums of {0} differ from 1 by {1:.3e}".format(
                        name, defect))
        logger.info("validated %r", self)

    ##### blocks ###############################################################
    def a(self, k):
        """ A_k for k >= -1 """
        k = int(k)
        if k < -1:
            raise IndexError("A_k is defined for k >= -1")
        if k <= self.k_a:
            return self._a[k + 1]
        if self.tail.a_active and k > self.k_explicit:
            return self.tail.c_mat_a * tails.power_geometric_term(
                self.tail.alpha, self.tail.gamma_a, k)
        return np.zeros((self.m1, self.m1))

    def b(self, k):
        """ B_k for k >= -1 """
        k = int(k)
        if k < -1:
            raise IndexError("B_k is defined for k >= -1")
        if k == -1:
            return self.b_minus1
        if k == 0:
            return self.b0
        if k <= self.k_b:
            return self._b[k - 1]
        if self.tail.b_active and k > self.k_explicit:
            return self.tail.c_mat_b * tails.power_geometric_term(
                self.tail.beta, self.tail.gamma_b, k)
        return np.zeros((self.m0, self.m1))

    def _tail_sums(self, which, start, order):
        """ Formula part of the first or second order tail from start on """
        if which == 'a':
            active, c = self.tail.a_active, getattr(self.tail, 'c_mat_a', None)
            pars = (self.tail.alpha, self.tail.gamma_a)
        else:
            active, c = self.tail.b_active, getattr(self.tail, 'c_mat_b', None)
            pars = (self.tail.beta, self.tail.gamma_b)
        if not active:
            return None
        s1, s2 = tails.power_geometric_sums(pars[0], pars[1], start)
        return c * (s1 if order == 1 else s2), c * s1

    def a_bar(self, k):
        """ sum_{l > k} A_l """
        k = int(k)
        total = self._a[max(k + 2, 0):].sum(axis=0) if k + 1 <= self.k_a \
            else np.zeros((self.m1, self.m1))
        part = self._tail_sums('a', max(k + 1, self.k_explicit + 1), 1)
        return total if part is None else total + part[0]

    def a_bbar(self, k):
        """ sum_{l > k} a_bar(l) = sum_{l >= k+2} (l - k - 1) A_l """
        k = int(k)
        total = np.zeros((self.m1, self.m1))
        for l in range(k + 2, self.k_a + 1):
            total = total + (l - k - 1) * self._a[l + 1]
        start = max(k + 2, self.k_explicit + 1)
        part = self._tail_sums('a', start, 2)
        if part is not None:
            total = total + part[0] + (start - k - 2) * part[1]
        return total

    def b_bar(self, k):
        """ sum_{l > k} B_l for k >= 0 """
        k = int(k)
        if k < 0:
            raise IndexError("b_bar is defined for k >= 0")
        total = self._b[k:].sum(axis=0) if k < self.k_b \
            else np.zeros((self.m0, self.m1))
        part = self._tail_sums('b', max(k + 1, self.k_explicit + 1), 1)
        return total if part is None else total + part[0]

    def b_bbar(self, k):
        """ sum_{l > k} b_bar(l) = sum_{l >= k+2, l >= 1} (l - k - 1) B_l """
        k = int(k)
        if k < -1:
            raise IndexError("b_bbar is defined for k >= -1")
        total = np.zeros((self.m0, self.m1))
        for l in range(max(k + 2, 1), self.k_b + 1):
            total = total + (l - k - 1) * self._b[l - 1]
        start = max(k + 2, self.k_explicit + 1, 1)
        part = self._tail_sums('b', start, 2)
        if part is not None:
            total = total + part[0] + (start - k - 2) * part[1]
        return total

    def a_matrix(self):
        """ A = sum_{k >= -1} A_k """
        return self._a[0] + self._a[1] + self.a_bar(0)

    ##### serialization ########################################################
    def to_dict(self):
        """ The JSON layout read by load_model """
        return {'m0': self.m0, 'm1': self.m1,
                'a_blocks': to_builtin(self._a),
                'b_minus1': to_builtin(self.b_minus1),
                'b_blocks': [to_builtin(self.b0)] + to_builtin(self._b),
                'tail': self.tail.to_dict()}


class TruncatedModel(object):
    """
    The LI truncation at level N: A^(N)_k = A_k for -1 <= k <= N-1,
    A^(N)_N = sum_{l >= N} A_l and zero beyond; likewise for B.

    Parameters
    ----------
    source: MG1Model
        Model being truncated
    n: int
        Truncation level N
    a_trunc: array
        A^(N)_-1, ..., A^(N)_N stacked, shape (N + 2, M_1, M_1)
    b_up: array
        B^(N)_1, ..., B^(N)_N stacked, shape (N, M_0, M_1)
    """
    def __init__(self, source, n, a_trunc, b_up):
        self.source = source
        self.n = int(n)
        self.m0, self.m1 = source.m0, source.m1
        self.a_trunc = a_trunc
        self.b_up = b_up
        self.b_minus1 = source.b_minus1
        self.b0 = source.b0
        self.a_trunc.setflags(write=False)
        self.b_up.setflags(write=False)

    def __repr__(self):
        return "TruncatedModel(N={0}, m0={1}, m1={2})".format(
            self.n, self.m0, self.m1)

    @property
    def b_trunc(self):
        """ B^(N)_-1, ..., B^(N)_N as a list (the shapes differ) """
        return [self.b_minus1, self.b0] + list(self.b_up)

    def a(self, k):
        if k < -1:
            raise IndexError("A_k is defined for k >= -1")
        if k > self.n:
            return np.zeros((self.m1, self.m1))
        return self.a_trunc[k + 1]

    def b(self, k):
        if k < -1:
            raise IndexError("B_k is defined for k >= -1")
        if k > self.n:
            return np.zeros((self.m0, self.m1))
        return self.b_trunc[k + 1]

    def as_model(self):
        """ P^(N) as a finite-tail MG1Model """
        return MG1Model(self.m0, self.m1, list(self.a_trunc), self.b_minus1,
                        [self.b0] + list(self.b_up), TailSpec('finite'))


##### reports ##################################################################
@dataclass(frozen=True)
class DriftReport:
    """ Stationary phase law of A and the level-increment moments """
    varpi: np.ndarray
    m_bar_a: np.ndarray
    m_bar_a_plus: np.ndarray
    m_bar_b: np.ndarray
    sigma: float
    stable: bool

    def to_dict(self):
        return {'varpi': to_builtin(self.varpi),
                'm_bar_a': to_builtin(self.m_bar_a),
                'm_bar_a_plus': to_builtin(self.m_bar_a_plus),
                'm_bar_b': to_builtin(self.m_bar_b),
                'sigma': float(self.sigma), 'stable': bool(self.stable)}


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    status: str         #pass, fail, unknown or deferred
    detail: str = ''


@dataclass(frozen=True)
class AssumptionReport:
    """ Outcome of the checks of the four standing assumptions """
    checks: tuple
    values: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.status != 'fail' for c in self.checks)

    def status(self, name):
        for c in self.checks:
            if c.name == name:
                return c.status
        raise KeyError(name)

    def to_dict(self):
        return {'passed': self.passed,
                'checks': [{'name': c.name, 'status': c.status,
                            'detail': c.detail} for c in self.checks],
                'values': to_builtin(self.values)}


@dataclass(frozen=True)
class TailShape:
    """ Decay radii, tail factor f and tail coefficients c_A, c_B """
    r_a: float
    r_b: float
    r: float
    factor: tails.TailFactor
    c_a: np.ndarray
    c_b: np.ndarray
    method: str             #closed_form or fitted
    heuristic_f: bool = False


##### input and output #########################################################
def model_from_dict(data):
    """
    Builds a validated MG1Model from the JSON layout

    Parameters
    ----------
    data: dict
        Keys m0, m1, a_blocks (from k=-1), b_minus1, b_blocks (from k=0)
        and tail {kind, gamma_a, gamma_b, alpha, beta, c_mat_a, c_mat_b,
        k_explicit}

    Returns
    -------
    model: MG1Model
    """
    if not isinstance(data, dict):
        raise ModelError("model file must hold a JSON object")
    missing = [k for k in ('m0', 'm1', 'a_blocks', 'b_minus1', 'b_blocks')
               if k not in data]
    if missing:
        raise ModelError("model file lacks {0}".format(", ".join(missing)))
    tail_data = data.get('tail')
    if not tail_data or 'kind' not in tail_data:
        tail = TailSpec('finite', declared=False)
    else:
        unknown = set(tail_data) - {'kind', 'gamma_a', 'gamma_b', 'alpha',
                                    'beta', 'c_mat_a', 'c_mat_b', 'k_explicit'}
        if unknown:
            raise ModelError("unknown tail keys {0}".format(sorted(unknown)))
        tail = TailSpec(**tail_data)
    try:
        return MG1Model(data['m0'], data['m1'], data['a_blocks'],
                        data['b_minus1'], data['b_blocks'], tail)
    except ModelError:
        raise
    except (TypeError, ValueError, IndexError) as err:
        raise ModelError("malformed model: {0}".format(err)) from err


def load_model(path):
    """
    Reads and validates a model file

    Parameters
    ----------
    path: str
        JSON model file

    Returns
    -------
    model: MG1Model
    """
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ModelError("cannot read model {0}: {1}".format(path, err)) \
            from err
    return model_from_dict(data)


def dump_model(model, path):
    """ Writes model in the layout load_model reads """
    with open(path, 'w') as fh:
        json.dump(model.to_dict(), fh, indent=1)


##### block operations #########################################################
def materialize_blocks(model, k_max):
    """
    Explicit blocks up to index k_max, the tail filled in from the formulas

    Parameters
    ----------
    model: MG1Model
        Model
    k_max: int
        Last index, at least the longest explicit list

    Returns
    -------
    a_list: list
        A_-1, ..., A_{k_max}
    b_list: list
        B_-1, ..., B_{k_max}
    """
    if k_max < max(model.k_a, model.k_b):
        raise ModelError("k_max={0} is below the explicit range {1}".format(
            k_max, max(model.k_a, model.k_b)))
    a_list = [model.a(k) for k in range(-1, k_max + 1)]
    b_list = [model.b(k) for k in range(-1, k_max + 1)]
    return a_list, b_list


def truncate(model, n, tol=STOCHASTIC_TOL):
    """
    LI truncation: increments above N are lumped into a jump of exactly N

    Parameters
    ----------
    model: MG1Model
        Model to truncate
    n: int
        Truncation level N >= 1
    tol: float
        Accepted row-sum defect of the truncated families

    Returns
    -------
    tm: TruncatedModel
    """
    n = int(n)
    if n < 1:
        raise ModelError("truncation level must be at least 1, got {0}".format(
            n))
    a_trunc = np.array([model.a(k) for k in range(-1, n)]
                       + [model.a_bar(n - 1)])
    b_up = np.array([model.b(k) for k in range(1, n)] + [model.b_bar(n - 1)])
    defect = max(np.abs(a_trunc.sum(axis=(0, 2)) - 1.0).max(),
                 np.abs(model.b0.sum(axis=1) + b_up.sum(axis=(0, 2))
                        - 1.0).max())
    if not np.isfinite(defect) or defect > tol:
        raise ModelError("truncated rows are not stochastic (defect {0:.3e})"
                         .format(defect))
    return TruncatedModel(model, n, a_trunc, b_up)


##### drift ####################################################################
def drift(model):
    """
    Stationary vector varpi of A and the mean level increments

    Parameters
    ----------
    model: MG1Model
        Model

    Returns
    -------
    report: DriftReport
        varpi, m_bar_A = sum k A_k e, m_bar_A^+ = sum_{k>=1} k A_k e,
        m_bar_B = sum k B_k e and sigma = varpi m_bar_A
    """
    a = model.a_matrix()
    if not is_irreducible(a):
        raise ModelError("A = sum_k A_k is reducible")
    varpi = stationary_vector(a)
    m_bar_a_plus = model.a_bbar(-1).sum(axis=1)
    m_bar_a = m_bar_a_plus - model.a(-1).sum(axis=1)
    m_bar_b = model.b_bbar(-1).sum(axis=1)
    if not (np.isfinite(m_bar_a_plus).all() and np.isfinite(m_bar_b).all()):
        raise ModelError("mean level increment diverges")
    sigma = float(varpi @ m_bar_a)
    if sigma >= 0:
        logger.warning("drift sigma = %.6g >= 0, the chain is not stable",
                       sigma)
    return DriftReport(varpi, m_bar_a, m_bar_a_plus, m_bar_b, sigma,
                       sigma < 0)


##### tail shape ###############################################################
def tail_shape(model):
    """
    Decay radii, tail factor and coefficients read off a geometric_power
    tail, c = lim a_bbar(N) e / (r^-N f(N)); other tails go through
    fit_tail_decay.

    Parameters
    ----------
    model: MG1Model
        Model

    Returns
    -------
    shape: TailShape
    """
    t = model.tail
    if not (t.a_active or t.b_active):
        return fit_tail_decay(model)
    r_a = 1.0 / t.gamma_a if t.a_active else math.inf
    r_b = 1.0 / t.gamma_b if t.b_active else math.inf
    r = min(r_a, r_b)
    #sum_{j>=1} j gamma^(N+1+j) = gamma^N gamma^2 / (1 - gamma)^2
    c_a = (t.c_mat_a.sum(axis=1) * t.gamma_a**2 / (1 - t.gamma_a)**2
           if r_a == r else np.zeros(model.m1))
    c_b = (t.c_mat_b.sum(axis=1) * t.gamma_b**2 / (1 - t.gamma_b)**2
           if r_b == r else np.zeros(model.m0))
    heuristic = False
    if r_a == r_b:
        exponent = max(t.alpha, t.beta) - 1.0
        if t.alpha != t.beta:
            heuristic = True
            logger.warning("alpha != beta with equal radii: heuristic f(N) = "
                           "N^%g, the faster tail coefficient is zeroed",
                           exponent)
            if t.alpha < t.beta:
                c_a = np.zeros(model.m1)
            else:
                c_b = np.zeros(model.m0)
    else:
        exponent = (t.alpha if r_a < r_b else t.beta) - 1.0
    factor = tails.Constant(1.0) if exponent == 0 else tails.Power(exponent)
    return TailShape(r_a, r_b, r, factor, c_a, c_b, 'closed_form', heuristic)


def _fit_family(bbar, dim, last, min_points, rate_tol, label):
    """ Log-linear fit of one tail family, returns (rate, coefficients) """
    ns = np.arange(0, max(last, 0))
    values = np.array([bbar(n).sum(axis=1) for n in ns]).reshape(-1, dim)
    active = np.flatnonzero((values > 0).any(axis=0))
    if active.size == 0:
        return math.inf, np.zeros(dim)
    usable = ns[(values[:, active] > 0).all(axis=1)]
    if usable.size < min_points:
        raise ModelError("{0} tail has {1} usable points, {2} needed".format(
            label, usable.size, min_points))
    window = usable[-int(math.ceil(2.0 * usable.size / 3.0)):]
    rates, coeffs = [], np.zeros(dim)
    for i in active:
        fit = linregress(window, np.log(values[window, i]))
        rates.append(math.exp(-fit.slope))
        coeffs[i] = math.exp(fit.intercept)
    rates = np.array(rates)
    rate = float(rates.mean())
    spread = np.abs(rates - rate).max() / rate
    if spread > rate_tol:
        raise ModelError("{0} tail rates disagree across phases by {1:.1%}"
                         .format(label, spread))
    return rate, coeffs


def fit_tail_decay(model, min_points=12, rate_tol=0.05):
    """
    Numeric fit of a_bbar(N) e ~ c_A r^-N (and likewise for B) by least
    squares on the last two thirds of the explicit range, f = 1.

    Parameters
    ----------
    model: MG1Model
        Model whose explicit lists carry the tail
    min_points: int
        Minimum number of usable tail points per family
    rate_tol: float
        Largest relative disagreement of the per-phase rates

    Returns
    -------
    shape: TailShape
    """
    r_a, c_a = _fit_family(model.a_bbar, model.m1, model.k_a - 1,
                           min_points, rate_tol, 'A')
    r_b, c_b = _fit_family(model.b_bbar, model.m0, model.k_b - 1,
                           min_points, rate_tol, 'B')
    r = min(r_a, r_b)
    if not math.isfinite(r):
        raise ModelError("no level increments above 0, no tail to fit")
    if r <= 1.0:
        raise ModelError("fitted decay radius {0:.6g} <= 1, tail is not "
                         "light".format(r))
    #a family more than rate_tol slower than the other drops out
    if r_a > r * (1 + rate_tol):
        c_a = np.zeros(model.m1)
    if r_b > r * (1 + rate_tol):
        c_b = np.zeros(model.m0)
    logger.info("fitted decay radii r_A=%.6g r_B=%.6g", r_a, r_b)
    return TailShape(r_a, r_b, r, tails.Constant(1.0), c_a, c_b, 'fitted')


##### assumptions ##############################################################
def validate_assumptions(model):
    """
    Pass/fail/unknown report on the standing assumptions: (1) stability,
    (2) aperiodic G (deferred until G is solved), (3) light tails r > 1,
    (4) tail coefficients and the factor f. Never raises.

    Parameters
    ----------
    model: MG1Model
        Model

    Returns
    -------
    report: AssumptionReport
    """
    checks, values = [], {}
    notes, ok = [], True
    try:
        report = drift(model)
        values['sigma'] = report.sigma
        values['varpi'] = report.varpi
        if not report.stable:
            ok = False
            notes.append("sigma = {0:.6g} >= 0".format(report.sigma))
        notes.append("m_bar_B finite")
    except ModelError as err:
        ok = False
        notes.append(str(err))
    if not model.b_minus1.any():
        ok = False
        notes.append("level 0 is never entered from level 1")
    if not model.b_bar(0).any():
        ok = False
        notes.append("level 0 is closed")
    notes.append("irreducibility of P: surrogate check (A irreducible, "
                 "level 0 reachable both ways)")
    checks.append(AssumptionCheck('1', 'pass' if ok else 'fail',
                                  '; '.join(notes)))
    checks.append(AssumptionCheck('2', 'deferred',
                                  'decided by the spectral gap of G'))
    t = model.tail
    if not t.declared:
        try:
            shape = fit_tail_decay(model)
            detail = "tail undeclared; fitted r = {0:.6g}".format(shape.r)
            values['r_fitted'] = shape.r
        except ModelError as err:
            detail = "tail undeclared; {0}".format(err)
        checks.append(AssumptionCheck('3', 'unknown', detail))
        checks.append(AssumptionCheck('4', 'unknown', 'tail undeclared'))
    elif not (t.a_active or t.b_active):
        values['r'] = math.inf
        checks.append(AssumptionCheck('3', 'pass',
                                      'finite increments, r = inf'))
        checks.append(AssumptionCheck(
            '4', 'unknown', 'c_A = c_B = 0: truncation is exact for N >= {0}'
            .format(max(model.k_a, model.k_b, 1))))
    else:
        shape = tail_shape(model)
        values.update(r=shape.r, r_a=shape.r_a, r_b=shape.r_b,
                      f=shape.factor.describe())
        checks.append(AssumptionCheck(
            '3', 'pass' if shape.r > 1 else 'fail',
            'r = min(r_A, r_B) = {0:.6g}'.format(shape.r)))
        detail = 'f = {0!r}'.format(shape.factor)
        if shape.heuristic_f:
            detail += ' (heuristic f)'
        checks.append(AssumptionCheck('4', 'pass', detail))
    report = AssumptionReport(tuple(checks), values)
    logger.info("assumptions: %s", ", ".join(
        "{0}={1}".format(c.name, c.status) for c in checks))
    return report


### END
