# coding: utf-8

import configparser
import logging
import os

from bregmoreau.exceptions import InvalidParamError
from bregmoreau.helpers import ReadOnly


LOG = logging.getLogger('bregmoreau')

DEFAULT_CONFIG_FILE = 'bregmoreau.ini'

# name -> (type, default)
DEFAULTS = {
    'tol': (float, 1e-10),
    'max_bisect': (int, 200),
    'bracket_eps': (float, 1e-13),
    'max_expand': (int, 1100),
    'oracle_tol': (float, 1e-11),
    'oracle_scan': (int, 1024),
    'pp_max_iter': (int, 500),
    'pp_tol': (float, 1e-12),
    'jobs': (int, 1),
}

ENV_PREFIX = 'BREGMOREAU_'


def _set_debug_log():
    LOG.setLevel(logging.DEBUG)
    LOG.debug("Debug logging enabled for bregmoreau")


class Settings(ReadOnly):
    """
    Numerical knobs shared by the solvers. Instances are immutable, use
    `get_settings(**overrides)` or `replace()` to derive a new one.
    """
    _IMMUTABLE_ATTRIBUTES = frozenset(DEFAULTS)

    def __init__(self, **values):
        for name, (cast, default) in DEFAULTS.items():
            object.__setattr__(self, name, cast(values.get(name, default)))
        unknown = set(values) - set(DEFAULTS)
        if unknown:
            raise InvalidParamError(
                "Unknown settings: %s" % ', '.join(sorted(unknown)))
        if self.tol <= 0 or self.oracle_tol <= 0 or self.pp_tol <= 0:
            raise InvalidParamError("Tolerances must be positive")
        if self.jobs < 1:
            raise InvalidParamError("jobs must be at least 1")

    def replace(self, **overrides):
        values = self.as_dict()
        values.update(overrides)
        return Settings(**values)

    def as_dict(self):
        return {name: getattr(self, name) for name in DEFAULTS}

    def __repr__(self):
        return 'Settings(%s)' % ', '.join(
            '%s=%r' % item for item in sorted(self.as_dict().items()))


def _cast(name, raw):
    cast = DEFAULTS[name][0]
    try:
        return cast(raw)
    except (TypeError, ValueError):
        raise InvalidParamError(
            "Invalid value %r for setting '%s'" % (raw, name))


def get_settings(file_path=None, **overrides):
    """
    Utilitarian function that reads solver settings from keyword
    overrides, ENV variables or an .ini file, in that order of precedence.

    :param file_path: path of the .ini file, defaults to $BREGMOREAU_CONFIG
        or ./bregmoreau.ini
    :param overrides: explicit values, `None` values are ignored
    :return: Settings
    """
    values = {}

    # .ini file first so that env and overrides can replace its values
    if file_path is None:
        file_path = os.environ.get(ENV_PREFIX + 'CONFIG', DEFAULT_CONFIG_FILE)
    config = configparser.ConfigParser()
    config.read(file_path)
    for name in DEFAULTS:
        try:
            raw = config.get('DEFAULT', name)
        except Exception:
            pass  # Setting not found in .ini file, keep the default
        else:
            values[name] = _cast(name, raw)

    for name in DEFAULTS:
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw:
            values[name] = _cast(name, raw)

    for name, raw in overrides.items():
        if raw is None:
            continue
        if name not in DEFAULTS:
            raise InvalidParamError("Unknown setting '%s'" % name)
        values[name] = _cast(name, raw)

    return Settings(**values)


_DEFAULT_SETTINGS = None


def reset_default_settings():
    global _DEFAULT_SETTINGS
    _DEFAULT_SETTINGS = None


def _default_settings(settings):
    """
    Settings passed explicitly win, otherwise the environment/.ini values
    are read once and reused.
    """
    global _DEFAULT_SETTINGS
    if settings is not None:
        return settings
    if _DEFAULT_SETTINGS is None:
        _DEFAULT_SETTINGS = get_settings()
    return _DEFAULT_SETTINGS
