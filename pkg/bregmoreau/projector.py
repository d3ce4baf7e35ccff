"""
Left, right and orthogonal projectors onto boxes and hyperplanes.

Bregman projectors are the proximity operators of indicator functions:
boxes go through the indicator prox, hyperplanes through a scalar dual
search (left) or a line search on the hyperplane (right).

>>> from bregmoreau.legendre import kernel_boltzmann_shannon
>>> plane = parse_set('hyp:1,1=1')
>>> left_project(kernel_boltzmann_shannon(), plane, [1, 2]).round(9).tolist()
[0.333333333, 0.666666667]
"""
import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize

from bregmoreau.exceptions import (InfeasibleSetError, InvalidParamError,
                                   InvalidSetError, ParseError, SolverError)
from bregmoreau.helpers import (ReadOnly, as_point, brent_root,
                                expand_bracket, parse_float)
from bregmoreau.objective import ConvexObjective, ObjectivePiece
from bregmoreau.prox import left_prox, right_prox
from bregmoreau.settings import LOG, _default_settings


BOX = 'interval_box'
HYPERPLANE = 'hyperplane'


class ProjectionSpec(ReadOnly):
    """
    A closed convex set: a box prod_j [lower_j, upper_j] or a hyperplane
    {x : <normal, x> = offset}.
    """
    _IMMUTABLE_ATTRIBUTES = frozenset((
        'kind', 'lower', 'upper', 'normal', 'offset'))

    def __init__(self, kind, lower=None, upper=None, normal=None,
                 offset=None):
        if kind == BOX:
            lower = as_point(lower, 'lower')
            upper = as_point(upper, 'upper')
            if lower.shape != upper.shape:
                raise InvalidSetError("Box bounds differ in dimension")
            if np.any(lower > upper) or np.any(np.isnan(lower)) \
                    or np.any(np.isnan(upper)):
                raise InvalidSetError(
                    "Box needs lower <= upper in every coordinate, got "
                    "%r and %r" % (lower.tolist(), upper.tolist()))
        elif kind == HYPERPLANE:
            normal = as_point(normal, 'normal')
            if not np.any(normal) or not np.all(np.isfinite(normal)):
                raise InvalidSetError("Hyperplane normal must be finite and "
                                      "nonzero, got %r" % normal.tolist())
            offset = float(offset)
        else:
            raise InvalidSetError("Unknown set kind %r" % kind)
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)
        object.__setattr__(self, 'normal', normal)
        object.__setattr__(self, 'offset', offset)

    def __repr__(self):
        if self.kind == BOX:
            return 'ProjectionSpec(box:%s)' % ';'.join(
                '%g,%g' % pair for pair in zip(self.lower, self.upper))
        return 'ProjectionSpec(hyp:%s=%g)' % (
            ','.join('%g' % a for a in self.normal), self.offset)

    @property
    def dimension(self):
        return len(self.lower if self.kind == BOX else self.normal)

    def contains(self, x, tol=1e-12):
        x = as_point(x)
        if self.kind == BOX:
            return bool(np.all(x >= self.lower - tol)
                        and np.all(x <= self.upper + tol))
        return abs(float(np.dot(self.normal, x)) - self.offset) <= tol * max(
            1.0, abs(self.offset))

    def indicator(self):
        """ The box as a separable objective (indicator pieces). """
        if self.kind != BOX:
            raise InvalidSetError("Only boxes are separable")
        return ConvexObjective([ObjectivePiece('ind', (lo, hi))
                                for lo, hi in zip(self.lower, self.upper)])


def box_spec(lower, upper):
    return ProjectionSpec(BOX, lower=lower, upper=upper)


def hyperplane_spec(normal, offset):
    return ProjectionSpec(HYPERPLANE, normal=normal, offset=offset)


def parse_set(text):
    """
    Parses "box:<lo1>,<hi1>;<lo2>,<hi2>" or "hyp:<a1>,<a2>=<b>".

    >>> parse_set('box:0,1;0,1').upper.tolist()
    [1.0, 1.0]
    >>> parse_set('hyp:1,1=1').offset
    1.0
    """
    if isinstance(text, ProjectionSpec):
        return text
    kind, sep, body = str(text).strip().partition(':')
    if not sep:
        raise ParseError("Set %r lacks a 'box:' or 'hyp:' prefix" % text)
    kind = kind.strip().lower()
    if kind == 'box':
        lower, upper = [], []
        for pair in body.split(';'):
            bounds = pair.split(',')
            if len(bounds) != 2:
                raise ParseError("Box coordinate %r must be lo,hi" % pair)
            lower.append(parse_float(bounds[0], 'box bound'))
            upper.append(parse_float(bounds[1], 'box bound'))
        return box_spec(lower, upper)
    if kind == 'hyp':
        normal, sep, offset = body.partition('=')
        if not sep:
            raise ParseError("Hyperplane %r must look like a1,a2=b" % text)
        return hyperplane_spec(
            [parse_float(a, 'normal coordinate') for a in normal.split(',')],
            parse_float(offset, 'hyperplane offset'))
    raise ParseError("Unknown set kind %r" % kind)


def _check_dimension(spec, point):
    if len(point) != spec.dimension:
        raise InvalidParamError(
            "Set %r has dimension %d, point has %d"
            % (spec, spec.dimension, len(point)))


def _check_box_meets_interior(k, spec):
    for lo, hi in zip(spec.lower, spec.upper):
        if hi <= k.int_lower or lo >= k.int_upper:
            raise InfeasibleSetError(
                "%r does not meet the interior of dom %s" % (spec, k.name))


def orthogonal_project(spec, x):
    """
    Euclidean projection.

    >>> orthogonal_project(parse_set('box:0,1;0,1'), [2, -1]).tolist()
    [1.0, 0.0]
    """
    x = as_point(x)
    _check_dimension(spec, x)
    if spec.kind == BOX:
        return np.clip(x, spec.lower, spec.upper)
    a = spec.normal
    return x - (np.dot(a, x) - spec.offset) / np.dot(a, a) * a


def left_project(k, spec, y, tol=None, settings=None):
    """
    Left Bregman projection argmin_{p in C} D_f(p, y) for y in U.
    """
    settings = _default_settings(settings)
    y = k.check_point(as_point(y, 'y'), 'y')
    _check_dimension(spec, y)
    if spec.kind == BOX:
        _check_box_meets_interior(k, spec)
        return left_prox(k, spec.indicator(), 1.0, y, tol=tol,
                         settings=settings).point
    return _left_project_hyperplane(k, spec, y, settings)


def _left_project_hyperplane(k, spec, y, settings):
    a, b = spec.normal, spec.offset
    dual_base = k.gradient(y)

    def primal(lam):
        return k.conjugate_gradient(dual_base - lam * a)

    def gap(lam):
        with np.errstate(over='ignore', invalid='ignore'):
            return float(np.dot(a, primal(lam))) - b

    if gap(0.0) == 0:
        return y
    # gap is nonincreasing in lam
    bound = np.inf if gap(0.0) > 0 else -np.inf
    try:
        inner, outer, value = expand_bracket(
            gap, 0.0, bound, max_expand=settings.max_expand,
            eps=settings.bracket_eps)
    except SolverError:
        raise InfeasibleSetError(
            "%r does not meet the interior of dom %s" % (spec, k.name))
    if value == 0:
        lam = outer
    else:
        lam, iterations, method = brent_root(gap, inner, outer,
                                             max_iter=settings.max_bisect)
        LOG.debug("Left hyperplane projection: lambda=%r (%s, %d steps)",
                  lam, method, iterations)
    point = np.asarray(primal(lam), dtype=float)
    if not k.in_interior(point):
        raise InfeasibleSetError(
            "%r does not meet the interior of dom %s" % (spec, k.name))
    return point


def right_project(k, spec, x, tol=None, settings=None):
    """
    Right Bregman projection argmin_{p in C} D_f(x, p) for x in U.
    """
    settings = _default_settings(settings)
    x = k.check_point(as_point(x, 'x'), 'x')
    _check_dimension(spec, x)
    if spec.kind == BOX:
        _check_box_meets_interior(k, spec)
        return right_prox(k, spec.indicator(), 1.0, x, tol=tol,
                          settings=settings).point
    if spec.dimension == 1:
        point = np.array([spec.offset / spec.normal[0]])
        if not k.in_interior(point):
            raise InfeasibleSetError(
                "%r does not meet the interior of dom %s" % (spec, k.name))
        return point
    if spec.dimension == 2:
        return _right_project_line(k, spec, x, settings)
    return hyperplane_right_project_nd(k, spec, x, settings=settings)


def _line_interval(k, origin, direction):
    """ Parameters t with origin + t direction inside U. """
    t_lo, t_hi = -np.inf, np.inf
    with np.errstate(divide='ignore', invalid='ignore'):
        for p, d in zip(origin, direction):
            if d == 0:
                if not k.int_lower < p < k.int_upper:
                    return None
                continue
            ends = sorted(((k.int_lower - p) / d, (k.int_upper - p) / d))
            t_lo, t_hi = max(t_lo, ends[0]), min(t_hi, ends[1])
    if not t_lo < t_hi:
        return None
    return t_lo, t_hi


def _right_project_line(k, spec, x, settings):
    a, b = spec.normal, spec.offset
    norm = np.linalg.norm(a)
    direction = np.array([-a[1], a[0]]) / norm
    origin = b * a / norm ** 2
    interval = _line_interval(k, origin, direction)
    if interval is None:
        raise InfeasibleSetError(
            "%r does not meet the interior of dom %s" % (spec, k.name))
    t_lo, t_hi = interval

    def slope(t):
        p = origin + t * direction
        return float(np.dot(k.hessian(p) * (p - x), direction))

    start = float(np.dot(x - origin, direction))
    if not t_lo < start < t_hi:
        if np.isfinite(t_lo) and np.isfinite(t_hi):
            start = 0.5 * (t_lo + t_hi)
        elif np.isfinite(t_lo):
            start = t_lo + max(1.0, abs(t_lo))
        else:
            start = t_hi - max(1.0, abs(t_hi))
    value = slope(start)
    if value == 0:
        return origin + start * direction
    bound = t_lo if value > 0 else t_hi
    inner, outer, value = expand_bracket(
        slope, start, bound, max_expand=settings.max_expand,
        eps=settings.bracket_eps)
    if value == 0:
        t = outer
    else:
        t = brent_root(slope, inner, outer, max_iter=settings.max_bisect)[0]
    return origin + t * direction


KKT_TOL = 1e-6


def right_kkt_residual(k, spec, x, p):
    """
    Distance of f''(p) * (p - x) from the span of the hyperplane normal,
    zero exactly at the right projection onto the hyperplane.

    >>> from bregmoreau.legendre import kernel_energy
    >>> plane = parse_set('hyp:1,1=1')
    >>> right_kkt_residual(kernel_energy(), plane, [2, 0], [1.5, -0.5])
    0.0
    """
    a = spec.normal
    x, p = as_point(x, 'x'), as_point(p, 'p')
    grad = k.hessian(p) * (p - x)
    multiplier = float(np.dot(grad, a) / np.dot(a, a))
    return float(np.linalg.norm(grad - multiplier * a))


def hyperplane_right_project_nd(k, spec, x, settings=None,
                                full_output=False):
    """
    Right projection onto a hyperplane in any dimension, minimizing
    D_f(x, .) on the hyperplane with SLSQP from the left projection.

    With `full_output` the KKT residual of the returned point is
    returned as well, as (point, residual).
    """
    settings = _default_settings(settings)
    x = k.check_point(as_point(x, 'x'), 'x')
    a, b = spec.normal, spec.offset
    start = _left_project_hyperplane(k, spec, x, settings)
    margin = 1e-12

    def bound(value, shift):
        return value + shift * margin * max(1.0, abs(value)) \
            if np.isfinite(value) else None

    bounds = [(bound(k.int_lower, 1), bound(k.int_upper, -1))] * len(x)

    def objective(p):
        return float(np.sum(k.divergence(x, p)))

    def jacobian(p):
        return k.hessian(p) * (p - x)

    result = minimize(
        objective, start, jac=jacobian, method='SLSQP', bounds=bounds,
        constraints=[{'type': 'eq',
                      'fun': lambda p: np.dot(a, p) - b,
                      'jac': lambda p: a}],
        options={'ftol': 1e-14, 'maxiter': settings.max_bisect})
    point = result.x
    infeasibility = abs(float(np.dot(a, point)) - b)
    if not result.success:
        if infeasibility > 1e-8 * max(1.0, abs(b)) or not k.in_interior(point):
            raise SolverError("SLSQP right projection failed: %s"
                              % result.message)
        LOG.warning("SLSQP stopped early (%s), keeping the feasible point",
                    result.message)
    residual = right_kkt_residual(k, spec, x, point)
    scale = max(1.0, float(np.linalg.norm(jacobian(point))))
    if residual > KKT_TOL * scale:
        LOG.warning("Right hyperplane projection KKT residual %g above "
                    "tolerance %g", residual, KKT_TOL * scale)
    else:
        LOG.debug("Right hyperplane projection KKT residual %g", residual)
    if full_output:
        return point, residual
    return point


def project(k, spec, point, side='left', **kwargs):
    if side == 'left':
        return left_project(k, spec, point, **kwargs)
    if side == 'right':
        return right_project(k, spec, point, **kwargs)
    if side == 'orthogonal':
        return orthogonal_project(spec, point)
    raise InvalidParamError("side must be left, right or orthogonal")


def _sample_set(spec, center, count, rng):
    if spec.kind == BOX:
        width = np.maximum(1.0, np.abs(center))
        lo = np.maximum(spec.lower, center - width)
        hi = np.minimum(spec.upper, center + width)
        return lo + (hi - lo) * rng.random((count, len(center)))
    basis = null_space(spec.normal[np.newaxis, :])
    scale = max(1.0, float(np.max(np.abs(center))))
    steps = rng.uniform(-scale, scale, (count, basis.shape[1]))
    return center + steps @ basis.T


def projection_certificate(k, spec, base, p, side='left', count=100, seed=0,
                           scale=1e-3):
    """
    Worst value of the variational inequality of the projection over sample
    points z of C near p: <f'(y) - f'(p), z - p> (left) or
    <f''(p) (x - p), z - p> (right). About zero or below at the projection.
    """
    base = as_point(base)
    p = as_point(p)
    rng = np.random.default_rng(seed)
    if side == 'left':
        direction = k.gradient(base) - k.gradient(p)
    else:
        direction = k.hessian(p) * (base - p)
    samples = p + scale * (_sample_set(spec, p, count, rng) - p)
    return max(float(np.dot(direction, z - p)) for z in samples)
