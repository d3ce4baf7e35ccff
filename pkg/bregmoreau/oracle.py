"""
Brute force reference computations: golden-section minimization after a
grid pre-scan, numeric Fenchel conjugates and grid argmin scans.

Nothing here calls the prox or envelope solvers; the objectives are built
directly from the kernel and objective evaluators, in extended precision
where the platform provides it.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from bregmoreau.exceptions import (InfeasibleSetError, InvalidParamError,
                                   UnboundedConjugateError)
from bregmoreau.helpers import as_point, check_gamma
from bregmoreau.settings import LOG, _default_settings


INV_PHI = (np.sqrt(np.longdouble(5)) - 1) / 2
INV_PHI_SQUARE = (3 - np.sqrt(np.longdouble(5))) / 2


@dataclass(frozen=True)
class OracleResult:
    argmin: float
    value: float
    bracket: tuple
    depth: int


def _evaluate(objective, t, dtype):
    values = np.asarray(objective(np.asarray(t, dtype=dtype)), dtype=dtype)
    return np.where(np.isnan(values), np.inf, values)


def golden_section(objective, lower, upper, tol, dtype=np.longdouble):
    """
    Golden-section search for a unimodal `objective` on [lower, upper].

    :return: (argmin, value, iterations)
    """
    a = dtype(lower)
    b = dtype(upper)
    h = b - a
    if h <= tol:
        x = (a + b) / 2
        return x, _evaluate(objective, [x], dtype)[0], 0
    steps = int(math.ceil(math.log(tol / float(h)) / math.log(float(INV_PHI))))
    c = a + dtype(INV_PHI_SQUARE) * h
    d = a + dtype(INV_PHI) * h
    fc, fd = _evaluate(objective, [c, d], dtype)
    for _ in range(max(steps - 1, 0)):
        if fc < fd:
            b, d, fd = d, c, fc
            h = dtype(INV_PHI) * h
            c = a + dtype(INV_PHI_SQUARE) * h
            fc = _evaluate(objective, [c], dtype)[0]
        else:
            a, c, fc = c, d, fd
            h = dtype(INV_PHI) * h
            d = a + dtype(INV_PHI) * h
            fd = _evaluate(objective, [d], dtype)[0]
    if fc < fd:
        return c, fc, steps
    return d, fd, steps


def minimize_1d(objective, bracket, tol=None, scan=None, extended=True,
                settings=None):
    """
    Minimizes a vectorized convex `objective` on `bracket` (finite ends).

    A regular pre-scan with `scan` points locates the basin and excludes
    +inf regions, then golden-section search refines it to `tol`.

    >>> result = minimize_1d(lambda t: (t - 3) ** 2, (0, 10))
    >>> round(result.argmin, 9)
    3.0

    :raises InfeasibleSetError: when the objective is +inf on the bracket
    """
    settings = _default_settings(settings)
    tol = settings.oracle_tol if tol is None else float(tol)
    scan = settings.oracle_scan if scan is None else int(scan)
    lower, upper = float(bracket[0]), float(bracket[1])
    if not (np.isfinite(lower) and np.isfinite(upper)) or lower >= upper:
        raise InvalidParamError("Oracle bracket must be finite and "
                                "increasing, got %r" % (bracket,))
    dtype = np.longdouble if extended else np.float64
    grid = np.linspace(dtype(lower), dtype(upper), scan, dtype=dtype)
    values = _evaluate(objective, grid, dtype)
    if not np.any(np.isfinite(values)):
        raise InfeasibleSetError(
            "Objective is +inf on the whole bracket [%g, %g]"
            % (lower, upper))
    i = int(np.argmin(values))
    basin = (grid[max(i - 1, 0)], grid[min(i + 1, scan - 1)])
    x, value, depth = golden_section(objective, basin[0], basin[1], tol,
                                     dtype)
    if not value <= values[i]:
        x, value = grid[i], values[i]
    LOG.debug("Oracle minimum %r at %r after %d golden steps", float(value),
              float(x), depth)
    return OracleResult(argmin=float(x), value=float(value),
                        bracket=(lower, upper), depth=depth)


def numeric_conjugate(g, ystar, bracket, tol=None, limits=None,
                      max_expand=60, full_output=False, settings=None):
    """
    sup_x x * ystar - g(x), computed as a minimization of g(x) - x ystar.

    The bracket is widened while the maximizer sits on one of its edges,
    without leaving `limits` (the natural domain of g).

    >>> round(numeric_conjugate(lambda t: t * t / 2, 2.0, (-10, 10)), 9)
    2.0

    :raises UnboundedConjugateError: when the sup keeps growing at the
        widened edges
    """
    ystar = float(ystar)
    lower, upper = float(bracket[0]), float(bracket[1])
    lim_lower, lim_upper = limits if limits is not None else (-np.inf,
                                                              np.inf)

    def negated(t):
        return g(t) - t * ystar

    for _ in range(max_expand + 1):
        result = minimize_1d(negated, (lower, upper), tol=tol,
                             settings=settings)
        step = (upper - lower) / 1023.0
        at_lower = result.argmin <= lower + step and lower > lim_lower
        at_upper = result.argmin >= upper - step and upper < lim_upper
        if not (at_lower or at_upper):
            break
        width = upper - lower
        if at_lower:
            lower = max(lower - width, lim_lower)
        if at_upper:
            upper = min(upper + width, lim_upper)
        if not (np.isfinite(lower) and np.isfinite(upper)):
            break
    else:
        raise UnboundedConjugateError(
            "Conjugate at %r looks unbounded on [%g, %g]"
            % (ystar, lower, upper))
    value = -result.value
    if not np.isfinite(value):
        raise UnboundedConjugateError(
            "Conjugate at %r is not finite" % ystar)
    if full_output:
        return OracleResult(argmin=result.argmin, value=value,
                            bracket=(lower, upper), depth=result.depth)
    return value


def grid_argmin(evaluator, box, resolution):
    """
    Argmin of `evaluator` over a regular grid on `box`, a list of (lo, hi)
    per coordinate. Ties go to the lowest index.

    >>> grid_argmin(lambda x: abs(x[0] - 0.5), [(-2, 2)], 0.25).tolist()
    [0.5]
    """
    axes = []
    for lo, hi in box:
        count = int(math.floor((hi - lo) / resolution + 1e-9)) + 1
        axes.append(lo + resolution * np.arange(count))
    best, best_value = None, np.inf
    for point in itertools.product(*axes):
        point = np.array(point)
        value = evaluator(point)
        if value < best_value:
            best, best_value = point, value
    if best is None:
        best = np.array([axis[0] for axis in axes])
    return best


def default_bracket(kernel, anchors, lower=-np.inf, upper=np.inf):
    """
    A finite search interval around `anchors`, clipped to dom f and to
    [lower, upper].
    """
    anchors = [float(a) for a in anchors if np.isfinite(a)]
    lo_anchor, hi_anchor = min(anchors), max(anchors)
    margin = 2.0 * max(1.0, hi_anchor - lo_anchor,
                       0.5 * max(abs(lo_anchor), abs(hi_anchor)))
    lo = max(lo_anchor - margin, kernel.dom_lower, lower)
    hi = min(hi_anchor + margin, kernel.dom_upper, upper)
    return lo, hi


def _coordinate_objective(kernel, piece, gamma, base, side, dtype):
    base = dtype(base)
    gamma = dtype(gamma)
    if side == 'left':
        f_base = kernel.value(base)
        g_base = kernel.gradient(base)

        def objective(t):
            t = np.asarray(t, dtype=dtype)
            out = np.full(t.shape, np.inf, dtype=dtype)
            mask = kernel.domain_mask(t)
            s = t[mask]
            div = kernel.value(s) - f_base - g_base * (s - base)
            out[mask] = piece.value(s) + div / gamma
            return out
    else:
        f_base = kernel.value(base)

        def objective(t):
            t = np.asarray(t, dtype=dtype)
            out = np.full(t.shape, np.inf, dtype=dtype)
            mask = kernel.interior_mask(t)
            s = t[mask]
            div = f_base - kernel.value(s) - kernel.gradient(s) * (base - s)
            out[mask] = piece.value(s) + div / gamma
            return out
    return objective


def oracle_prox(k, th, gamma, point, side='left', extended=True,
                settings=None):
    """
    Golden-section reference for the prox point and the envelope value.

    :return: (prox point, envelope value)
    """
    gamma = check_gamma(gamma)
    if side not in ('left', 'right'):
        raise InvalidParamError("side must be 'left' or 'right'")
    point = as_point(point)
    th.check_dimension(len(point))
    dtype = np.longdouble if extended else np.float64
    argmins, total = [], 0.0
    for j, base in enumerate(point):
        piece = th.piece(j)
        anchors = [base] + list(piece.kinks) + list(piece.argmin)
        lo, hi = default_bracket(k, anchors, piece.dom_lower, piece.dom_upper)
        if side == 'right':
            lo, hi = max(lo, k.int_lower), min(hi, k.int_upper)
        objective = _coordinate_objective(k, piece, gamma, base, side, dtype)
        result = minimize_1d(objective, (lo, hi), extended=extended,
                             settings=settings)
        argmins.append(result.argmin)
        total += result.value
    return np.array(argmins), total
