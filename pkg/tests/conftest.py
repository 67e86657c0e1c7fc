import os

import hypothesis
import numpy as np
import pytest

from mg1li.model import MG1Model, TailSpec, load_model
from mg1li.ramaswami import reference_solution

hypothesis.settings.register_profile("default", max_examples=100,
                                     deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False,
                                     deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE",
                                                "default"))

EXAMPLES = os.path.join(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))), 'mg1li', 'examples')

#tight enough that G errors stay far below the differences at N = 40
TIGHT_G = 1e-15


@pytest.fixture(scope='session')
def geo1_path():
    return os.path.join(EXAMPLES, 'geo1.json')


@pytest.fixture(scope='session')
def mp2_path():
    return os.path.join(EXAMPLES, 'mp2.json')


@pytest.fixture(scope='session')
def geo1(geo1_path):
    return load_model(geo1_path)


@pytest.fixture(scope='session')
def mp2(mp2_path):
    return load_model(mp2_path)


@pytest.fixture(scope='session')
def geo1_ref(geo1):
    return reference_solution(geo1, 200, tol_g=TIGHT_G)


@pytest.fixture(scope='session')
def mp2_ref(mp2):
    return reference_solution(mp2, 200, tol_g=TIGHT_G)


def scalar_model(a_minus1, a0, a_up, b_minus1, b0, b_up, tail=None):
    """ M_0 = M_1 = 1 model from plain numbers """
    return MG1Model(1, 1, [[[a_minus1]], [[a0]]] + [[[x]] for x in a_up],
                    [[b_minus1]], [[[b0]]] + [[[x]] for x in b_up], tail)


def _rows(rng, n, m, sums):
    """ n x m positive matrix with the given row sums """
    w = rng.uniform(0.1, 1.0, size=(n, m))
    return w / w.sum(axis=1, keepdims=True) * np.asarray(sums)[:, None]


def random_model(seed, m0, m1, gamma_a, gamma_b):
    """
    Stable model with geometric tails: every phase drifts down, so
    sigma < 0, and all blocks are positive
    """
    rng = np.random.default_rng(seed)
    down = rng.uniform(0.4, 0.6, size=m1)
    up = 0.5 * down * (1.0 - gamma_a)
    a_minus1 = _rows(rng, m1, m1, down)
    a0 = _rows(rng, m1, m1, 1.0 - down - up)
    #sum_{k >= 1} C gamma^k = C gamma / (1 - gamma)
    c_a = _rows(rng, m1, m1, up * (1.0 - gamma_a) / gamma_a)
    b_minus1 = _rows(rng, m1, m0, down)
    stay = rng.uniform(0.5, 0.8, size=m0)
    b0 = _rows(rng, m0, m0, stay)
    c_b = _rows(rng, m0, m1, (1.0 - stay) * (1.0 - gamma_b) / gamma_b)
    tail = TailSpec('geometric_power', gamma_a, gamma_b, 1.0, 1.0, c_a, c_b,
                    k_explicit=0)
    return MG1Model(m0, m1, [a_minus1, a0], b_minus1, [b0], tail)
