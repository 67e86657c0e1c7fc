"""
Collection of shared helpers: exceptions, default tolerances, logging set-up
and deterministic number formatting
"""
import json
import logging
import math
import os
import sys

import numpy as np

##### default tolerances #######################################################
STOCHASTIC_TOL = 1e-9       #row-sum defect accepted on input
MASS_TOL = 1e-12            #level recursion stops below this tail mass
G_TOL = 1e-12               #fixed-point increment for the G iteration
G_MAX_ITER = 10**6
RCOND_MIN = 1e-14           #reciprocal condition number floor for I - M
SERIES_REL_TOL = 1e-16      #relative size of the last added series term
LOG_ENV = 'MG1LI_LOG'


##### exceptions ###############################################################
class MG1Error(Exception):
    """ Root of every error raised by mg1li """


class ModelError(MG1Error, ValueError):
    """ Malformed, inconsistent or unstable model input """


class ConfigError(MG1Error, ValueError):
    """ Invalid run configuration or violated call precondition """


class NumericalError(MG1Error, ArithmeticError):
    """ A numerical kernel could not deliver a trustworthy answer """


class SingularMatrixError(NumericalError, np.linalg.LinAlgError):
    """ I - M is singular or too badly conditioned to solve """


class ConvergenceError(NumericalError):
    """ An iteration hit its cap before meeting the tolerance """


class ReducibleChainError(NumericalError):
    """ A stochastic matrix has more than one closed class """


##### logging ##################################################################
_LEVELS = {'error': logging.ERROR, 'info': logging.INFO,
           'debug': logging.DEBUG}

def configure_logging(level=None, stream=None):
    """
    Routes the package loggers to standard error.

    Parameters
    ----------
    level: str
        One of 'error', 'info' or 'debug'; read from $MG1LI_LOG when None
    stream: file
        Destination, sys.stderr by default

    Returns
    -------
    logger: logging.Logger
        The package root logger
    """
    if level is None:
        level = os.environ.get(LOG_ENV, 'error')
    level = str(level).strip().lower()
    if level not in _LEVELS:
        raise ConfigError("{0} must be one of {1}, got {2!r}".format(
            LOG_ENV, sorted(_LEVELS), level))
    logger = logging.getLogger('mg1li')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
    logger.addHandler(handler)
    logger.setLevel(_LEVELS[level])
    logger.propagate = False
    return logger


##### formatting ###############################################################
def fmt_float(x):
    """ 17 significant digits, the shortest text that pins a double down """
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return 'null'
    return format(x, '.17g')


def to_builtin(obj):
    """ Turns numpy containers and scalars into plain lists and floats """
    if isinstance(obj, dict):
        return {str(k): to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_builtin(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dump_json(obj, indent=0, step=2):
    """
    JSON text with a fixed key order and 17-digit floats

    Parameters
    ----------
    obj: dict, list or scalar
        Object made of builtins (see to_builtin)
    indent: int
        Current indentation
    step: int
        Indentation increment

    Returns
    -------
    text: str
    """
    pad = ' ' * (indent + step)
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = ['{0}{1}: {2}'.format(pad, json.dumps(str(k)),
                                       dump_json(v, indent + step, step))
                 for k, v in obj.items()]
        return '{\n' + ',\n'.join(items) + '\n' + ' ' * indent + '}'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return '[]'
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return '[' + ', '.join(dump_json(v) for v in obj) + ']'
        items = [pad + dump_json(v, indent + step, step) for v in obj]
        return '[\n' + ',\n'.join(items) + '\n' + ' ' * indent + ']'
    if obj is None:
        return 'null'
    if isinstance(obj, bool):
        return 'true' if obj else 'false'
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    return json.dumps(str(obj))


### END
