import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import scalar_model
from mg1li._utils import ModelError
from mg1li.model import (MG1Model, TailSpec, drift, dump_model,
                         fit_tail_decay, load_model, materialize_blocks,
                         model_from_dict, tail_shape, truncate,
                         validate_assumptions)


##### loading ##################################################################
def test_geo1_loads(geo1):
    assert (geo1.m0, geo1.m1, geo1.k_a, geo1.k_b) == (1, 1, 1, 1)
    assert geo1.tail.kind == 'geometric_power'
    assert geo1.a_matrix()[0, 0] == pytest.approx(1.0, abs=1e-12)
    #the formula continues the explicit blocks
    assert geo1.a(2)[0, 0] == pytest.approx(0.0625)
    assert geo1.b(2)[0, 0] == pytest.approx(0.0625)


def test_blocks_are_read_only(geo1):
    with pytest.raises(ValueError):
        geo1.a(0)[0, 0] = 0.5


def test_row_defect_rejected(geo1):
    data = geo1.to_dict()
    data['a_blocks'][1] = [[0.10]]
    with pytest.raises(ModelError, match="row sums"):
        model_from_dict(data)


def test_dimension_mismatch_rejected():
    with pytest.raises(ModelError, match="shape"):
        MG1Model(1, 2, [np.full((2, 2), 0.25), np.full((2, 2), 0.25)],
                 [[0.5], [0.5]], [[[0.5]], [[0.5]]])


def test_invalid_tail_rejected(geo1):
    data = geo1.to_dict()
    data['tail']['gamma_a'] = 1.5
    with pytest.raises(ModelError, match="gamma_a"):
        model_from_dict(data)
    data = geo1.to_dict()
    data['tail']['kind'] = 'heavy'
    with pytest.raises(ModelError):
        model_from_dict(data)


def test_unreadable_file(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"m0": 1,')
    with pytest.raises(ModelError):
        load_model(str(path))
    with pytest.raises(ModelError):
        load_model(str(tmp_path / 'missing.json'))


@pytest.mark.parametrize('field, value', [
    (('tail', 'gamma_a'), '0.5'),
    (('tail', 'alpha'), [1.0]),
    (('tail', 'k_explicit'), 'one'),
    (('a_blocks',), 3),
    (('b_blocks',), None),
    (('m0',), None),
    (('m1',), 'two'),
    (('m0',), 1.5),
])
def test_malformed_fields_rejected(geo1, field, value):
    data = geo1.to_dict()
    target = data
    for key in field[:-1]:
        target = target[key]
    target[field[-1]] = value
    with pytest.raises(ModelError):
        model_from_dict(data)


def test_malformed_block_entries_rejected(geo1):
    data = geo1.to_dict()
    data['b_blocks'] = [[['x']]]
    with pytest.raises(ModelError):
        model_from_dict(data)
    data = geo1.to_dict()
    data['b_minus1'] = 'half'
    with pytest.raises(ModelError):
        model_from_dict(data)


def test_dump_model(geo1, tmp_path):
    path = str(tmp_path / 'geo1.json')
    dump_model(geo1, path)
    again = load_model(path)
    assert again.to_dict() == geo1.to_dict()
    with open(path) as fh:
        assert json.load(fh)['tail']['k_explicit'] == 1


##### tail sums ################################################################
def test_tail_sums_geo1(geo1):
    #bar A_j = 0.25 * 0.5^j and its second order tail 0.25 * 0.5^j too
    for j in range(0, 8):
        assert geo1.a_bar(j)[0, 0] == pytest.approx(0.25 * 0.5**j, rel=1e-14)
        assert geo1.b_bar(j)[0, 0] == pytest.approx(0.25 * 0.5**j, rel=1e-14)
        assert geo1.a_bbar(j)[0, 0] == pytest.approx(0.25 * 0.5**j,
                                                     rel=1e-14)
    assert geo1.a_bbar(-1)[0, 0] == pytest.approx(0.5)
    assert geo1.b_bbar(-1)[0, 0] == pytest.approx(0.5)


def test_tail_sums_match_explicit_summation():
    tail = TailSpec('geometric_power', 0.5, 0.5, 2.0, 2.0, [[0.125]],
                    [[0.125]], k_explicit=0)
    m = scalar_model(0.6, 0.15, [], 0.6, 0.75, [], tail)
    a = np.array([m.a(k)[0, 0] for k in range(-1, 400)])
    for k in (0, 3, 10):
        direct = sum((l - k - 1) * a[l + 1] for l in range(k + 2, 399))
        assert m.a_bbar(k)[0, 0] == pytest.approx(direct, rel=1e-12)


##### materialize and truncate #################################################
def test_materialize_blocks(geo1):
    a_list, b_list = materialize_blocks(geo1, 3)
    assert len(a_list) == 5 and len(b_list) == 5
    assert a_list[4][0, 0] == pytest.approx(0.03125)
    a_list, _ = materialize_blocks(geo1, 1)
    assert [a[0, 0] for a in a_list] == [0.55, 0.20, 0.125]
    with pytest.raises(ModelError):
        materialize_blocks(geo1, 0)


def test_materialize_finite_tail_appends_zeros():
    m = scalar_model(0.6, 0.2, [0.1, 0.1], 0.6, 0.8, [0.2])
    a_list, b_list = materialize_blocks(m, 5)
    assert all(a[0, 0] == 0.0 for a in a_list[4:])
    assert all(b[0, 0] == 0.0 for b in b_list[3:])


@pytest.mark.parametrize("n, top", [(4, 0.03125), (1, 0.25)])
def test_truncate_geo1(geo1, n, top):
    tm = truncate(geo1, n)
    assert tm.a(n)[0, 0] == pytest.approx(top, rel=1e-14)
    assert tm.a(n + 1)[0, 0] == 0.0
    assert len(tm.b_trunc) == n + 2


def test_truncate_beyond_support_is_lossless():
    m = scalar_model(0.6, 0.2, [0.1, 0.1], 0.6, 0.8, [0.2])
    tm = truncate(m, 5)
    assert tm.a(5)[0, 0] == 0.0
    for k in range(-1, 3):
        assert tm.a(k)[0, 0] == m.a(k)[0, 0]


@pytest.mark.parametrize("n", [1, 2, 7, 30])
def test_truncation_preserves_mass(geo1, mp2, n):
    for model in (geo1, mp2):
        tm = truncate(model, n)
        assert_allclose(tm.a_trunc.sum(axis=0), model.a_matrix(), atol=1e-12)


@pytest.mark.parametrize("n", [1, 5, 12])
def test_truncate_is_idempotent(mp2, n):
    tm = truncate(mp2, n)
    again = truncate(tm.as_model(), n)
    assert np.array_equal(again.a_trunc, tm.a_trunc)
    assert np.array_equal(again.b_up, tm.b_up)


def test_truncate_rejects_level_zero(geo1):
    with pytest.raises(ModelError):
        truncate(geo1, 0)


##### drift ####################################################################
def test_drift_geo1(geo1):
    report = drift(geo1)
    assert report.varpi[0] == pytest.approx(1.0)
    assert report.sigma == pytest.approx(-0.05, abs=1e-12)
    assert report.m_bar_a[0] == pytest.approx(-0.05, abs=1e-12)
    assert report.m_bar_a_plus[0] == pytest.approx(0.5, abs=1e-12)
    assert report.m_bar_b[0] == pytest.approx(0.5, abs=1e-12)
    assert report.stable
    assert_allclose(report.m_bar_a_plus - report.m_bar_a,
                    geo1.a(-1).sum(axis=1), atol=1e-12)


def test_drift_symmetric_walk_is_unstable():
    m = scalar_model(0.5, 0.0, [0.5], 0.5, 0.5, [0.5])
    report = drift(m)
    assert report.sigma == pytest.approx(0.0, abs=1e-15)
    assert not report.stable


def test_drift_two_phase_varpi():
    a_sum = 0.5 * np.identity(2) + 0.25 * np.ones((2, 2))
    m = MG1Model(1, 2, [0.6 * a_sum, 0.4 * a_sum], [[0.6], [0.6]],
                 [[[0.5]], [[0.25, 0.25]]])
    assert_allclose(drift(m).varpi, [0.5, 0.5], atol=1e-15)


def test_drift_mp2(mp2):
    report = drift(mp2)
    assert_allclose(report.varpi, [4 / 7, 3 / 7], atol=1e-12)
    assert report.sigma < 0


def test_drift_rejects_reducible_a():
    m = MG1Model(1, 2, [np.identity(2) * 0.6, np.identity(2) * 0.4],
                 [[0.6], [0.6]], [[[0.5]], [[0.25, 0.25]]])
    with pytest.raises(ModelError, match="reducible"):
        drift(m)


##### tail shape and assumptions ###############################################
def test_tail_shape_geo1(geo1):
    shape = tail_shape(geo1)
    assert shape.r == pytest.approx(2.0)
    assert shape.factor.kind == 'constant'
    assert shape.c_a[0] == pytest.approx(0.25)
    assert shape.c_b[0] == pytest.approx(0.25)
    assert not shape.heuristic_f


def test_tail_shape_zeroes_faster_tail():
    tail = TailSpec('geometric_power', 0.5, 0.25, 1.0, 1.0, [[0.25]],
                    [[0.9]], k_explicit=0)
    m = scalar_model(0.6, 0.15, [], 0.6, 0.7, [], tail)
    shape = tail_shape(m)
    assert (shape.r_a, shape.r_b, shape.r) == (2.0, 4.0, 2.0)
    assert shape.c_b[0] == 0.0
    assert shape.c_a[0] > 0.0


def test_tail_shape_heuristic_factor():
    #sum_{k >= 1} k 0.5^k = 2, so C_A = 0.125 carries mass 0.25
    tail = TailSpec('geometric_power', 0.5, 0.5, 2.0, 1.0, [[0.125]],
                    [[0.25]], k_explicit=0)
    m = scalar_model(0.6, 0.15, [], 0.6, 0.75, [], tail)
    shape = tail_shape(m)
    assert shape.heuristic_f
    assert shape.factor.kind == 'power' and shape.factor.pars == [1.0]
    assert shape.c_b[0] == 0.0


def _explicit_tail_model(rates, k, coef=0.125, b_rate=None):
    """
    M_0 = 1 model whose up-jumps are listed explicitly up to level k, phase
    i of A decaying like rates[i]^l and B like b_rate^l
    """
    rates = np.asarray(rates, dtype=float)
    m = rates.size
    ls = np.arange(1, k + 1)
    up = coef * rates[None, :]**ls[:, None]
    a_up = [np.diag(row) @ np.full((m, m), 1.0 / m) for row in up]
    a0 = np.diag(0.5 - up.sum(axis=0))
    b_rate = rates[0] if b_rate is None else b_rate
    b_up = [np.full((1, m), coef * b_rate**l / m) for l in ls]
    b0 = [[1.0 - sum(b.sum() for b in b_up)]]
    return MG1Model(1, m, [np.full((m, m), 0.5 / m), a0] + a_up,
                    np.full((m, 1), 0.5), [b0] + b_up,
                    TailSpec('finite', declared=False))


def test_fit_recovers_decay_rate():
    #A_l = 0.125 2^-l, so a_bbar(N) = 0.125 2^-N up to the cut at k
    shape = fit_tail_decay(_explicit_tail_model([0.5], 120))
    assert shape.method == 'fitted'
    assert 2.0 < shape.r < 2.02
    assert 2.0 < shape.r_b < 2.02
    assert 0.125 < shape.c_a[0] < 0.175
    assert 0.125 < shape.c_b[0] < 0.175


def test_fit_finite_support_bias():
    #the last explicit points bend down, so the fitted radius and
    #coefficient overshoot and close in as the support grows
    short = fit_tail_decay(_explicit_tail_model([0.5], 40))
    long = fit_tail_decay(_explicit_tail_model([0.5], 120))
    assert 2.01 < short.r < 2.08
    assert 0.15 < short.c_a[0] < 0.3
    assert long.r < short.r
    assert long.c_a[0] < short.c_a[0]


def test_fit_is_used_without_declared_tail():
    m = _explicit_tail_model([0.5], 60)
    assert not m.tail.declared
    shape = tail_shape(m)
    assert shape.method == 'fitted'
    assert shape.r == pytest.approx(2.0, rel=0.05)
    assert shape.factor.kind == 'constant'


def test_fit_rejects_disagreeing_phase_rates():
    #radii 2 and 2.5 differ by about 11% from their mean
    with pytest.raises(ModelError, match="disagree"):
        fit_tail_decay(_explicit_tail_model([0.5, 0.4], 30))


def test_fit_accepts_close_phase_rates():
    shape = fit_tail_decay(_explicit_tail_model([0.5, 0.49], 60))
    assert shape.r == pytest.approx(1.0 / 0.495, rel=0.03)
    assert (shape.c_a > 0).all()


def test_fit_needs_enough_points():
    with pytest.raises(ModelError, match="7 usable points, 12 needed"):
        fit_tail_decay(_explicit_tail_model([0.5], 8))
    #a lower min_points admits the short list
    shape = fit_tail_decay(_explicit_tail_model([0.5], 8), min_points=6)
    assert shape.r > 2.0


def test_fit_drops_slower_family():
    shape = fit_tail_decay(_explicit_tail_model([0.5], 60, b_rate=0.25))
    assert shape.r == pytest.approx(shape.r_a)
    assert shape.r_b > 1.05 * shape.r_a
    assert shape.c_b[0] == 0.0
    assert shape.c_a[0] > 0.0


def test_assumptions_geo1(geo1):
    report = validate_assumptions(geo1)
    assert [report.status(n) for n in '1234'] == ['pass', 'deferred', 'pass',
                                                  'pass']
    assert report.values['r'] == pytest.approx(2.0)
    assert report.values['f'] == {'kind': 'constant', 'pars': [1.0]}
    assert report.passed
    assert 'surrogate check' in report.checks[0].detail


def test_assumptions_unstable():
    m = scalar_model(0.5, 0.0, [0.5], 0.5, 0.5, [0.5])
    report = validate_assumptions(m)
    assert report.status('1') == 'fail'
    assert not report.passed


def test_assumptions_undeclared_heavy_tail():
    w = np.arange(1, 41, dtype=float)**-3
    up = list(0.3 * w / w.sum())
    data = {'m0': 1, 'm1': 1,
            'a_blocks': [[[0.6]], [[0.1]]] + [[[x]] for x in up],
            'b_minus1': [[0.6]], 'b_blocks': [[[0.7]], [[0.3]]]}
    report = validate_assumptions(model_from_dict(data))
    assert report.status('3') == 'unknown'
    assert report.status('4') == 'unknown'
    assert 'undeclared' in report.checks[2].detail


def test_assumptions_declared_finite():
    m = scalar_model(0.6, 0.2, [0.1, 0.1], 0.6, 0.8, [0.2],
                     TailSpec('finite'))
    report = validate_assumptions(m)
    assert report.status('3') == 'pass'
    assert report.values['r'] == math.inf
    assert report.status('4') == 'unknown'
