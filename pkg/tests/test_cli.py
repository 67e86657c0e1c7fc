import json

import pytest

from mg1li import __version__
from mg1li._utils import ConfigError, configure_logging, dump_json, fmt_float
from mg1li.cli import CSV_COLUMNS, RunConfig, config_from_args, main


def _run(capsys, argv):
    status = main(argv)
    out, err = capsys.readouterr()
    return status, out, err


def test_select_n(capsys, geo1_path):
    status, out, _ = _run(capsys, ['select-n', geo1_path, '--epsilon',
                                   '1e-3'])
    assert status == 0
    result = json.loads(out)
    assert result['command'] == 'select-n'
    assert result['version'] == __version__
    assert result['n_star'] == 14
    assert result['bound'] == pytest.approx(10 * 2.0**-14, rel=1e-9)
    assert len(result['trace']) == 14


def test_validate(capsys, geo1_path):
    status, out, _ = _run(capsys, ['validate', geo1_path, '--slem'])
    assert status == 0
    result = json.loads(out)
    statuses = {c['name']: c['status']
                for c in result['assumptions']['checks']}
    assert statuses == {'1': 'pass', '2': 'pass', '3': 'pass', '4': 'pass'}
    assert result['drift']['sigma'] == pytest.approx(-0.05)
    assert result['assumptions']['values']['r'] == pytest.approx(2.0)


def test_validate_failure_exit_status(capsys, tmp_path):
    path = tmp_path / 'walk.json'
    path.write_text(json.dumps({
        'm0': 1, 'm1': 1, 'a_blocks': [[[0.5]], [[0.0]], [[0.5]]],
        'b_minus1': [[0.5]], 'b_blocks': [[[0.5]], [[0.5]]],
        'tail': {'kind': 'finite'}}))
    status, _, _ = _run(capsys, ['validate', str(path)])
    assert status == 1


def test_validate_slem_survives_solver_failure(capsys, tmp_path):
    #sigma > 0, so the truncated solve at N = 1 fails
    path = tmp_path / 'transient.json'
    path.write_text(json.dumps({
        'm0': 1, 'm1': 1, 'a_blocks': [[[0.3]], [[0.2]], [[0.5]]],
        'b_minus1': [[0.3]], 'b_blocks': [[[0.5]], [[0.5]]],
        'tail': {'kind': 'finite'}}))
    status, out, _ = _run(capsys, ['validate', str(path), '--slem', '-N',
                                   '1'])
    assert status == 1
    result = json.loads(out)
    checks = {c['name']: c for c in result['assumptions']['checks']}
    assert checks['1']['status'] == 'fail'
    assert checks['2']['status'] == 'unknown'
    assert 'G^(1) failed' in checks['2']['detail']
    assert result['assumptions']['values']['slem'] is None
    assert result['drift']['sigma'] > 0


def test_malformed_model_is_an_error_record(capsys, tmp_path):
    path = tmp_path / 'malformed.json'
    path.write_text(json.dumps({
        'm0': None, 'm1': 1, 'a_blocks': 3, 'b_minus1': [[0.5]],
        'b_blocks': [[[1.0]]]}))
    status, out, err = _run(capsys, ['validate', str(path)])
    assert status == 1
    assert out == ''
    record = json.loads(err.strip().splitlines()[-1])
    assert record['error'] == 'ModelError'


def test_solve_and_reference(capsys, geo1_path):
    status, out, _ = _run(capsys, ['solve', geo1_path, '-N', '20'])
    assert status == 0
    result = json.loads(out)
    assert result['distribution']['n_trunc'] == 20
    assert result['balance_defect'] <= 1e-9
    status, out, _ = _run(capsys, ['reference', geo1_path, '--n-ref', '200'])
    assert status == 0
    ref = json.loads(out)['reference']
    assert ref['pi0'][0] == pytest.approx(1 / 11, abs=1e-10)
    assert ref['residual_bound'] < 1e-15


def test_sweep_csv(capsys, geo1_path):
    argv = ['sweep', geo1_path, '--n-from', '10', '--n-to', '20', '--step',
            '5', '--n-ref', '200', '--format', 'csv', '--k-report', '3']
    status, out, _ = _run(capsys, argv)
    assert status == 0
    lines = out.splitlines()
    assert lines[0].split(',') == list(CSV_COLUMNS)
    assert len(lines) == 1 + 3 * 4
    #deterministic output
    _, again, _ = _run(capsys, argv)
    assert again == out


def test_sweep_conjectural_column(capsys, geo1_path, tmp_path):
    path = str(tmp_path / 'sweep.csv')
    status, _, _ = _run(capsys, [
        'diagnose', geo1_path, '--n-from', '10', '--n-to', '12',
        '--format', 'csv', '--conjecture-tv', '-o', path])
    assert status == 0
    with open(path) as fh:
        header = fh.readline().strip().split(',')
    assert 'tv_ratio_conjectural' in header
    assert 'tv_ratio' not in header


def test_asymptotics_and_diagnose(capsys, geo1_path):
    status, out, _ = _run(capsys, ['asymptotics', geo1_path])
    assert status == 0
    profile = json.loads(out)['profile']
    assert profile['theta'] == pytest.approx(10.0, rel=1e-9)
    assert profile['theta_di'] == pytest.approx(20.0, rel=1e-9)
    status, out, _ = _run(capsys, ['diagnose', geo1_path, '--n-from', '20',
                                   '--n-to', '30', '--step', '10'])
    assert status == 0
    result = json.loads(out)
    assert [r['N'] for r in result['records']] == [20, 30]
    assert 'tv_ratio_conjectural' not in result['records'][0]


def test_oracle_command(capsys, mp2_path):
    status, out, _ = _run(capsys, ['oracle', mp2_path, '-N', '4',
                                   '--levels', '100'])
    assert status == 0
    assert json.loads(out)['l1_distance'] <= 1e-8


def test_errors_become_records(capsys, tmp_path):
    status, _, err = _run(capsys, ['solve', str(tmp_path / 'none.json'),
                                   '-N', '5'])
    assert status == 1
    record = json.loads(err.strip().splitlines()[-1])
    assert record['error'] == 'ModelError'
    assert record['command'] == 'solve'


def test_numerical_failure_exit_status(capsys, tmp_path):
    #sigma > 0: G is substochastic and K loses mass
    path = tmp_path / 'transient.json'
    path.write_text(json.dumps({
        'm0': 1, 'm1': 1, 'a_blocks': [[[0.3]], [[0.2]], [[0.5]]],
        'b_minus1': [[0.3]], 'b_blocks': [[[0.5]], [[0.5]]],
        'tail': {'kind': 'finite'}}))
    status, _, err = _run(capsys, ['solve', str(path), '-N', '1'])
    assert status == 2
    record = json.loads(err.strip().splitlines()[-1])
    assert record['error'] in ('NumericalError', 'SingularMatrixError')


def test_config_validation(geo1_path):
    with pytest.raises(ConfigError):
        config_from_args(['solve', geo1_path])
    with pytest.raises(ConfigError):
        config_from_args(['sweep', geo1_path, '--n-from', '10', '--n-to',
                          '40', '--n-ref', '100'])
    with pytest.raises(ConfigError):
        config_from_args(['solve', geo1_path, '-N', '5', '--format', 'csv'])
    config = config_from_args(['sweep', geo1_path, '--n-from', '10',
                               '--n-to', '100'])
    assert config.reference_level == 400
    assert RunConfig('validate', geo1_path).validate().reference_level == 200


def test_log_level_from_environment(monkeypatch):
    monkeypatch.setenv('MG1LI_LOG', 'debug')
    assert configure_logging().level == 10
    monkeypatch.setenv('MG1LI_LOG', 'chatty')
    with pytest.raises(ConfigError):
        configure_logging()
    monkeypatch.delenv('MG1LI_LOG')
    configure_logging()


def test_number_formatting():
    assert fmt_float(0.1) == '0.10000000000000001'
    assert fmt_float(float('inf')) == 'null'
    assert dump_json({'a': [1, 2.5], 'b': {'c': None}}) == \
        '{\n  "a": [1, 2.5],\n  "b": {\n    "c": null\n  }\n}'


def test_json_strings_escape_control_characters():
    text = dump_json({'detail\x01': 'a "quoted"\x1b\r\\ path\n'})
    assert json.loads(text) == {'detail\x01': 'a "quoted"\x1b\r\\ path\n'}
