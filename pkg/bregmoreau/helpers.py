import math

import numpy as np
from scipy.optimize import brentq, newton

from bregmoreau.exceptions import InvalidParamError, ParseError, SolverError


class ReadOnly(object):
    """
    class for protecting undesired writes to attributes
    """
    _IMMUTABLE_ATTRIBUTES = frozenset()

    def __setattr__(self, attr, value):
        if attr in self._IMMUTABLE_ATTRIBUTES:
            raise AttributeError(
                "Can't edit attribute '%s'" % attr)
        object.__setattr__(self, attr, value)


def is_number(value):
    try:
        float(value)
        return True
    except (ValueError, TypeError):
        return False


def as_point(value, name='point'):
    """
    Converts scalars, sequences or arrays into a 1-d float array.

    >>> as_point(2).tolist()
    [2.0]
    >>> as_point([1, 2]).tolist()
    [1.0, 2.0]
    """
    try:
        point = np.atleast_1d(np.asarray(value, dtype=float))
    except (TypeError, ValueError):
        raise InvalidParamError("%s must be numeric, got %r" % (name, value))
    if point.ndim != 1:
        raise InvalidParamError("%s must be one dimensional" % name)
    return point


def check_gamma(gamma, name='gamma'):
    if not is_number(gamma) or not 0 < float(gamma) < math.inf:
        raise InvalidParamError(
            "%s must be a positive finite number, got %r" % (name, gamma))
    return float(gamma)


def check_same_dimension(*points):
    sizes = {len(p) for p in points}
    if len(sizes) > 1:
        raise InvalidParamError(
            "Points must have the same dimension, got sizes %s"
            % sorted(sizes))


def parse_float(text, what='number'):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ParseError("Invalid %s: %r" % (what, text))


def parse_point(text):
    """
    Parses "1,2.5" into a point.

    >>> parse_point('1,2').tolist()
    [1.0, 2.0]
    """
    parts = [p for p in text.split(',') if p.strip()]
    if not parts:
        raise ParseError("Empty point specification")
    return np.array([parse_float(p, 'coordinate') for p in parts])


def parse_grid(text):
    """
    Parses a "lo:hi:step" grid specification into an ascending array. The
    upper end is included when it falls on the grid.

    >>> parse_grid('0:1:0.25').tolist()
    [0.0, 0.25, 0.5, 0.75, 1.0]
    """
    parts = text.split(':')
    if len(parts) != 3:
        raise ParseError("Grid must look like lo:hi:step, got %r" % text)
    lo, hi, step = [parse_float(p, 'grid bound') for p in parts]
    if not step > 0 or hi < lo:
        raise ParseError("Grid %r does not describe an ascending sequence"
                         % text)
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def parse_gammas(text):
    """
    Parses either a comma separated list of positive values or a
    "lo:hi:logsteps=N" log-spaced grid.

    >>> parse_gammas('1e-2:1e2:logsteps=5').tolist()
    [0.01, 0.1, 1.0, 10.0, 100.0]
    >>> parse_gammas('2,1,0.5').tolist()
    [0.5, 1.0, 2.0]
    """
    if 'logsteps' in text:
        try:
            bounds, steps = text.rsplit(':', 1)
            lo, hi = [parse_float(p, 'gamma bound') for p in bounds.split(':')]
            key, count = steps.split('=')
            count = int(count)
        except ValueError:
            raise ParseError(
                "Gamma grid must look like lo:hi:logsteps=N, got %r" % text)
        if key.strip() != 'logsteps' or count < 1 or not 0 < lo <= hi:
            raise ParseError("Invalid gamma grid %r" % text)
        gammas = np.logspace(math.log10(lo), math.log10(hi), count)
    else:
        gammas = np.array(sorted(
            parse_float(p, 'gamma') for p in text.split(',') if p.strip()))
    if gammas.size == 0 or np.any(gammas <= 0):
        raise ParseError("Gammas must be a nonempty list of positive values")
    return gammas


def expand_bracket(func, start, bound, max_expand=1100, eps=1e-13):
    """
    Walks from `start` toward `bound` (finite or infinite) until the sign
    of `func` differs from its sign at `start`.

    Finite bounds are approached geometrically and never reached: the walk
    stops once it is within `eps` (relative) of a nonzero bound, or when it
    lands on a zero bound.

    :return: (inner, outer, value_at_outer); value_at_outer may be 0
    :raises SolverError: when no sign change is found
    """
    sign = np.sign(func(start))
    if sign == 0:
        return start, start, 0.0
    previous = start
    step = 1e-3 * max(1.0, abs(start))
    for k in range(1, max_expand + 1):
        if math.isinf(bound):
            try:
                candidate = start + math.copysign(math.ldexp(step, k), bound)
            except OverflowError:
                break
            if not math.isfinite(candidate):
                break
        else:
            candidate = bound + (start - bound) * 2.0 ** -k
            if candidate == bound or (
                    bound != 0 and abs(candidate - bound) <= eps * abs(bound)):
                break
        value = func(candidate)
        if math.isnan(value):
            break
        if np.sign(value) != sign:
            return previous, candidate, value
        previous = candidate
    raise SolverError(
        "Could not bracket a root walking from %r toward %r" % (start, bound))


def brent_root(func, a, b, max_iter=200):
    """
    Root of `func` on [a, b] where func(a) and func(b) have opposite signs.
    Falls back to a secant iteration when Brent's method runs out of
    iterations.

    :return: (root, iterations, method) with method in
        {'bisection', 'newton_fallback'}
    """
    if a > b:
        a, b = b, a
    xtol = max(4e-16 * max(abs(a), abs(b)), 1e-300)
    root, info = brentq(func, a, b, xtol=xtol, maxiter=max_iter,
                        full_output=True, disp=False)
    if info.converged:
        return root, info.iterations, 'bisection'
    polished, secant_info = newton(func, root, x1=0.5 * (a + b),
                                   maxiter=max_iter, full_output=True,
                                   disp=False)
    if secant_info.converged and a <= polished <= b:
        return polished, info.iterations + secant_info.iterations, \
            'newton_fallback'
    raise SolverError("Root finder did not converge on [%r, %r]" % (a, b))
