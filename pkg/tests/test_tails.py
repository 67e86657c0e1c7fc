import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mg1li._utils import ModelError
from mg1li.tails import (Constant, Logarithmic, Power, from_descriptor,
                         power_geometric_sums, power_geometric_term)


@pytest.mark.parametrize("factor", [Constant(2.0), Power(1.5), Power(-0.5),
                                    Logarithmic()])
def test_ratio_tends_to_one(factor):
    assert factor.ratio(10**6)[0] == pytest.approx(1.0, abs=1e-5)


def test_factor_values_and_descriptors():
    assert_allclose(Power(2)([1, 2, 3]), [1, 4, 9])
    assert_allclose(Constant()(5), [1.0])
    assert_allclose(Logarithmic()(math.e - 1), [1.0])
    desc = Power(0.5).describe()
    assert desc == {'kind': 'power', 'pars': [0.5]}
    assert repr(from_descriptor(desc)) == repr(Power(0.5))
    with pytest.raises(ModelError):
        Power(-1)
    with pytest.raises(ModelError):
        from_descriptor({'kind': 'exponential'})


def test_power_geometric_term():
    assert power_geometric_term(1.0, 0.5, 3) == pytest.approx(0.125)
    assert power_geometric_term(2.0, 0.5, 3) == pytest.approx(0.375)


def _brute(alpha, gamma, start, terms=4000):
    idx = np.arange(start, start + terms, dtype=float)
    w = idx**(alpha - 1) * gamma**idx
    return w.sum(), ((idx - start + 1) * w).sum()


@pytest.mark.parametrize("alpha, gamma, start", [
    (1.0, 0.5, 1), (1.0, 0.8, 7), (2.0, 0.5, 1), (0.5, 0.3, 4),
    (3.5, 0.9, 2),
])
def test_power_geometric_sums(alpha, gamma, start):
    s1, s2 = power_geometric_sums(alpha, gamma, start)
    b1, b2 = _brute(alpha, gamma, start)
    assert s1 == pytest.approx(b1, rel=1e-12)
    assert s2 == pytest.approx(b2, rel=1e-12)


def test_power_geometric_sums_rejects_bad_input():
    with pytest.raises(ModelError):
        power_geometric_sums(1.0, 1.0, 1)
    with pytest.raises(ModelError):
        power_geometric_sums(0.0, 0.5, 1)
    with pytest.raises(ValueError):
        power_geometric_sums(1.0, 0.5, 0)
