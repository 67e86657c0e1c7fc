"""
Command-line entry point: mg1li <command> model.json [options]

Commands: validate, solve, reference, sweep, asymptotics, select-n, oracle
and diagnose. Results go to standard output (or --output) as JSON, sweep
tables optionally as CSV. Exit status 0 on success, 1 on invalid input or a
failed validation, 2 on a numerical failure.
"""
import argparse
import csv
from dataclasses import dataclass, replace
import io
import json
import logging
import sys

from mg1li import __version__
from mg1li._utils import (G_TOL, MASS_TOL, ConfigError, MG1Error,
                          ModelError, configure_logging,
                          dump_json, fmt_float, to_builtin)
from mg1li.asymptotics import (decay_profile, integrated_tail,
                               positivity_thresholds,
                               predicted_relative_error, select_n, snl,
                               sweep_diagnostics)
from mg1li.gmatrix import ergodicity_margin, spectral_gap
from mg1li.model import (AssumptionCheck, AssumptionReport, drift,
                         load_model, truncate, validate_assumptions)
from mg1li.oracle import brute_force_stationary, default_levels, l1_distance
from mg1li.ramaswami import (approximate_distribution, check_balance,
                             reference_solution)

logger = logging.getLogger(__name__)

COMMANDS = ('validate', 'solve', 'reference', 'sweep', 'asymptotics',
            'select-n', 'oracle', 'diagnose')
DEFAULT_N_REF = 200
DEFAULT_SLEM_N = 50
CSV_COLUMNS = ('N', 'k', 'phase', 'diff', 'diff_ratio', 'rel_ratio',
               'di_ratio', 'expected_theta_pik', 'expected_theta',
               'expected_thetadi_pik')


##### configuration ############################################################
@dataclass(frozen=True)
class RunConfig:
    """ One validated command line """
    command: str
    model_path: str
    n_trunc: int = None
    n_ref: int = None
    n_from: int = None
    n_to: int = None
    n_step: int = 1
    epsilon: float = None
    mass_tol: float = MASS_TOL
    k_report: int = 10
    tol_g: float = G_TOL
    output_format: str = 'json'
    output_path: str = None
    slem: bool = False
    conjecture_tv: bool = False
    jobs: int = 1
    levels: int = None
    method: str = 'lump_last'

    def validate(self):
        """ Raises ConfigError for missing or out-of-range fields """
        if self.command not in COMMANDS:
            raise ConfigError("unknown command {0!r}".format(self.command))
        if not self.model_path:
            raise ConfigError("a model file is required")
        needs = {'solve': ('n_trunc',), 'oracle': ('n_trunc',),
                 'sweep': ('n_from', 'n_to'), 'diagnose': ('n_from', 'n_to'),
                 'select-n': ('epsilon',)}
        for name in needs.get(self.command, ()):
            if getattr(self, name) is None:
                raise ConfigError("{0} needs --{1}".format(
                    self.command, name.replace('_', '-')))
        for name in ('n_trunc', 'n_ref', 'n_from', 'n_to', 'n_step', 'jobs',
                     'levels'):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError("--{0} must be at least 1".format(
                    name.replace('_', '-')))
        if self.k_report < 0:
            raise ConfigError("--k-report must be nonnegative")
        for name in ('mass_tol', 'tol_g', 'epsilon'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigError("--{0} must be positive".format(
                    name.replace('_', '-')))
        if self.n_from is not None and self.n_to is not None:
            if self.n_to < self.n_from:
                raise ConfigError("--n-to is below --n-from")
            if self.n_ref is not None and self.n_ref < 4 * self.n_to:
                raise ConfigError("--n-ref must be at least 4 x --n-to")
        if self.output_format not in ('json', 'csv'):
            raise ConfigError("--format must be json or csv")
        if self.output_format == 'csv' and self.command not in ('sweep',
                                                                'diagnose'):
            raise ConfigError("csv output exists for sweep and diagnose only")
        if self.method not in ('lump_last', 'renormalize'):
            raise ConfigError("--method must be lump_last or renormalize")
        return self

    @property
    def ns(self):
        return list(range(self.n_from, self.n_to + 1, self.n_step))

    @property
    def reference_level(self):
        """ n_ref, or a default that covers the sweep """
        if self.n_ref is not None:
            return self.n_ref
        top = self.n_to or self.n_trunc or 0
        return max(DEFAULT_N_REF, 4 * top)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='mg1li',
        description="Level-increment truncation of M/G/1-type Markov chains",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    mg1li validate geo1.json
    mg1li select-n geo1.json --epsilon 1e-3
    mg1li sweep geo1.json --n-from 10 --n-to 40 --step 5 --n-ref 200 --format csv
        """)
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument('model_path', help="model JSON file")
        p.add_argument('-N', '--n', dest='n_trunc', type=int,
                       help="truncation level N")
        p.add_argument('--n-ref', type=int, help="reference level N_ref")
        p.add_argument('--n-from', type=int)
        p.add_argument('--n-to', type=int)
        p.add_argument('--step', dest='n_step', type=int, default=1)
        p.add_argument('--epsilon', type=float)
        p.add_argument('--mass-tol', type=float, default=MASS_TOL)
        p.add_argument('--k-report', type=int, default=10)
        p.add_argument('--tol-g', type=float, default=G_TOL)
        p.add_argument('--format', dest='output_format', default='json',
                       choices=('json', 'csv'))
        p.add_argument('-o', '--output', dest='output_path')
        p.add_argument('--slem', action='store_true',
                       help="compute the spectral gap of G")
        p.add_argument('--conjecture-tv', action='store_true',
                       help="emit the conjectural total-variation ratio")
        p.add_argument('--jobs', type=int, default=1,
                       help="worker processes for sweeps")
        p.add_argument('--levels', type=int, help="oracle top level L")
        p.add_argument('--method', default='lump_last',
                       choices=('lump_last', 'renormalize'))
    return parser


def config_from_args(argv=None):
    args = vars(build_parser().parse_args(argv))
    return RunConfig(**args).validate()


##### commands #################################################################
def _reference_and_profile(model, config, sweep_max=None):
    ref = reference_solution(model, config.reference_level,
                             mass_tol=config.mass_tol, sweep_max=sweep_max,
                             tol_g=config.tol_g)
    return ref, decay_profile(model, ref)


def _validate(model, config):
    report = validate_assumptions(model)
    out = {}
    if config.slem:
        n = config.n_trunc or DEFAULT_SLEM_N
        try:
            _, gsol, _ = approximate_distribution(
                model, n, tol_g=config.tol_g, mass_tol=config.mass_tol)
            slem = spectral_gap(gsol).slem
            check = AssumptionCheck(
                '2', 'pass' if slem < 1 else 'fail',
                'slem(G^({0})) = {1:.6g}'.format(n, slem))
        except MG1Error as err:
            logger.warning("slem check at N=%d failed: %s", n, err)
            slem = None
            check = AssumptionCheck('2', 'unknown', 'G^({0}) failed: {1}: '
                                    '{2}'.format(n, type(err).__name__, err))
        checks = tuple(check if c.name == '2' else c for c in report.checks)
        report = AssumptionReport(checks, dict(report.values, slem=slem))
    out['assumptions'] = report.to_dict()
    try:
        out['drift'] = drift(model).to_dict()
    except ModelError as err:
        out['drift'] = {'error': str(err)}
    return out, 0 if report.passed else 1


def _solve(model, config):
    dist, gsol, _ = approximate_distribution(
        model, config.n_trunc, tol_g=config.tol_g, mass_tol=config.mass_tol)
    if config.slem:
        gsol = spectral_gap(gsol)
    out = {'distribution': dist.to_dict(), 'g': gsol.to_dict()}
    if gsol.slem is not None:
        out['g']['margin'] = ergodicity_margin(gsol.slem)
    out['balance_defect'] = check_balance(truncate(model, config.n_trunc),
                                          dist)
    return out, 0


def _reference(model, config):
    ref = reference_solution(model, config.reference_level,
                             mass_tol=config.mass_tol, tol_g=config.tol_g)
    try:
        profile = decay_profile(model, ref)
        ref = replace(ref, extras={'residual_bound': float(
            profile.bound(config.reference_level))})
    except ModelError as err:
        logger.info("no residual bound: %s", err)
    return {'reference': ref.to_dict()}, 0


def _asymptotics(model, config):
    ref, profile = _reference_and_profile(model, config)
    s = integrated_tail(snl(model, ref, max(config.k_report, 50)))
    out = {'profile': profile.to_dict(), 'snl': s.to_dict()}
    return out, 0


def _select_n(model, config):
    _, profile = _reference_and_profile(model, config)
    n_star = select_n(profile, config.epsilon)
    trace = [{'N': n, 'bound': profile.bound(n)}
             for n in range(1, n_star + 1)]
    return {'n_star': n_star, 'epsilon': config.epsilon,
            'bound': profile.bound(n_star), 'trace': trace}, 0


def _sweep_records(model, config):
    ref, profile = _reference_and_profile(model, config,
                                          sweep_max=config.n_to)
    k_max = max(config.n_to, config.k_report, 50)
    s = integrated_tail(snl(model, ref, k_max))
    records = sweep_diagnostics(model, config.ns, ref, profile, s,
                                config.k_report, jobs=config.jobs,
                                tol_g=config.tol_g, mass_tol=config.mass_tol)
    return ref, profile, records


def _record_dict(rec, conjecture_tv):
    out = {'N': rec.n, 'scale': rec.scale, 'd_bar_i': rec.d_bar_i,
           'diff': to_builtin(rec.diff_by_level),
           'l1': to_builtin(rec.l1_by_level),
           'rel': to_builtin(rec.rel_by_level),
           'diff_ratio': to_builtin(rec.diff_ratio),
           'rel_ratio': to_builtin(rec.rel_ratio),
           'di_ratio': to_builtin(rec.di_ratio),
           'expected_theta_pik': to_builtin(rec.expected_theta_pik),
           'expected_theta': rec.expected_theta,
           'expected_thetadi_pik': to_builtin(rec.expected_thetadi_pik)}
    if conjecture_tv:
        out['tv_total'] = rec.tv_total
        out['tv_ratio_conjectural'] = rec.tv_ratio
    return out


def _sweep(model, config):
    _, _, records = _sweep_records(model, config)
    return {'records': [_record_dict(r, config.conjecture_tv)
                        for r in records]}, 0, records


def _diagnose(model, config):
    ref, profile, records = _sweep_records(model, config)
    out = {'profile': profile.to_dict(),
           'positivity_thresholds': positivity_thresholds(records),
           'predicted_relative_error': {
               str(n): predicted_relative_error(profile, n)
               for n in config.ns},
           'records': [_record_dict(r, config.conjecture_tv)
                       for r in records]}
    return out, 0, records


def _oracle(model, config):
    tm = truncate(model, config.n_trunc)
    dist, _, _ = approximate_distribution(model, config.n_trunc,
                                          tol_g=config.tol_g,
                                          mass_tol=config.mass_tol)
    levels = config.levels or default_levels(dist)
    sol = brute_force_stationary(tm, levels, method=config.method)
    compared = levels // 4
    out = {'levels': levels, 'method': sol.method,
           'compared_levels': compared,
           'l1_distance': l1_distance(sol.pi_hat, dist, compared),
           'pi0_oracle': to_builtin(sol.pi_hat.pi0),
           'pi0_ramaswami': to_builtin(dist.pi0),
           'oracle_top_mass': float(sol.pi_hat.pis[-1].sum())}
    return out, 0


def sweep_csv(records, conjecture_tv=False):
    """ The fixed CSV schema, one row per N, level and phase """
    columns = list(CSV_COLUMNS)
    if conjecture_tv:
        columns.insert(columns.index('di_ratio') + 1, 'tv_ratio_conjectural')
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(columns)
    for rec in records:
        for k, diff in enumerate(rec.diff_by_level):
            for phase in range(diff.shape[0]):
                row = {'N': rec.n, 'k': k, 'phase': phase,
                       'diff': fmt_float(diff[phase]),
                       'diff_ratio': fmt_float(rec.diff_ratio[k][phase]),
                       'rel_ratio': fmt_float(rec.rel_ratio[k]),
                       'di_ratio': fmt_float(rec.di_ratio[k][phase]),
                       'tv_ratio_conjectural': fmt_float(rec.tv_ratio),
                       'expected_theta_pik':
                           fmt_float(rec.expected_theta_pik[k][phase]),
                       'expected_theta': fmt_float(rec.expected_theta),
                       'expected_thetadi_pik':
                           fmt_float(rec.expected_thetadi_pik[k][phase])}
                writer.writerow([row[c] for c in columns])
    return buf.getvalue()


_HANDLERS = {'validate': _validate, 'solve': _solve,
             'reference': _reference, 'asymptotics': _asymptotics,
             'select-n': _select_n, 'oracle': _oracle}


def run(config, stdout=None):
    """
    Runs one command

    Parameters
    ----------
    config: RunConfig
        Validated configuration
    stdout: file
        Destination when config.output_path is None

    Returns
    -------
    status: int
        0 on success, 1 when validation fails
    """
    model = load_model(config.model_path)
    if config.command in ('sweep', 'diagnose'):
        handler = _sweep if config.command == 'sweep' else _diagnose
        result, status, records = handler(model, config)
    else:
        result, status = _HANDLERS[config.command](model, config)
    if config.output_format == 'csv':
        text = sweep_csv(records, config.conjecture_tv)
    else:
        result = dict({'command': config.command, 'version': __version__},
                      **result)
        text = dump_json(to_builtin(result)) + '\n'
    if config.output_path:
        with open(config.output_path, 'w') as fh:
            fh.write(text)
    else:
        (stdout or sys.stdout).write(text)
    return status


def main(argv=None):
    """ Console entry point, returns the exit status """
    command = None
    try:
        configure_logging()
        config = config_from_args(argv)
        command = config.command
        return run(config)
    except MG1Error as err:
        #ModelError and ConfigError are input problems, the rest numerical
        status = 1 if isinstance(err, (ModelError, ConfigError)) else 2
        record = {'error': type(err).__name__, 'message': str(err),
                  'command': command}
        sys.stderr.write(json.dumps(record) + '\n')
        return status


### END
