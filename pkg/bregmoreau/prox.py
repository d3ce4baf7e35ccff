"""
Left and right Bregman proximity operators.

For separable kernels and objectives every prox is a family of
one-dimensional monotone inclusions, solved coordinate by coordinate:

    left:   0 in gamma d(theta)(x) + f'(x) - f'(y)
    right:  0 in gamma d(theta)(y) + f''(y) (y - x)

Kinks of theta are tested first, the smooth pieces in between are solved
with a bracketed root finder. Closed forms are used for theta = |. - c|
under the built-in kernels.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logit

from bregmoreau.bregman import coercivity_certificate
from bregmoreau.exceptions import (BregmoreauError, DomainError,
                                   InvalidParamError, SolverError)
from bregmoreau.helpers import (as_point, brent_root, check_gamma,
                                expand_bracket)
from bregmoreau.settings import LOG, _default_settings


BRANCH_PRIORITY = ('closed_form', 'kink', 'boundary', 'bisection',
                   'newton_fallback')

CLOSED_FORM_KERNELS = ('energy', 'bs', 'fd')


@dataclass(frozen=True)
class ProxOutcome:
    point: np.ndarray
    envelope_value: float
    residual: float
    iterations: int
    branch: str
    branches: tuple = ()
    gamma: float = None
    side: str = 'left'
    base: np.ndarray = field(default=None, repr=False)
    certificate: str = None

    def as_dict(self):
        return {
            'point': self.point.tolist(),
            'envelope_value': self.envelope_value,
            'residual': self.residual,
            'iterations': self.iterations,
            'branch': self.branch,
            'gamma': self.gamma,
            'side': self.side,
        }


@dataclass(frozen=True)
class ProximalPointResult:
    point: np.ndarray
    trajectory: tuple
    iterations: int
    converged: bool
    step: float
    stationarity: float
    side: str = 'left'
    certificate: str = None


@dataclass(frozen=True)
class MinimizerReport:
    """ The equivalent characterizations of y in U and argmin theta. """
    in_argmin: bool
    fixed_point: bool
    zero_gradient: bool
    theta_preserved: bool
    envelope_equals_theta: bool

    @property
    def flags(self):
        return (self.in_argmin, self.fixed_point, self.zero_gradient,
                self.theta_preserved, self.envelope_equals_theta)

    @property
    def consistent(self):
        return len(set(self.flags)) == 1


def _combine_branches(branches):
    return max(branches, key=BRANCH_PRIORITY.index)


def _check_side(side):
    if side not in ('left', 'right'):
        raise InvalidParamError("side must be 'left' or 'right', got %r"
                                % side)
    return side


# Closed forms for theta = |. - c|

def _closed_form_applies(kernel_name, c):
    if kernel_name not in CLOSED_FORM_KERNELS:
        return False
    if kernel_name == 'bs':
        return c > 0
    if kernel_name == 'fd':
        return 0 < c < 1
    return True


def _finish(out):
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def left_prox_closed_form_abs(kernel_name, c, gamma, y):
    """
    Left prox of |. - c| for the built-in kernels, or None when the pair
    has no closed form.

    >>> left_prox_closed_form_abs('energy', 0.5, 1, -1)
    0.0
    >>> left_prox_closed_form_abs('fd', 0.5, 1, 0.5)
    0.5
    """
    if not _closed_form_applies(kernel_name, c):
        return None
    y = np.asarray(y, dtype=float)
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        if kernel_name == 'energy':
            out = np.where(y < c - gamma, y + gamma,
                           np.where(y > c + gamma, y - gamma, c))
        elif kernel_name == 'bs':
            s, sc = np.log(y), np.log(c)
            out = np.where(s < sc - gamma, np.exp(s + gamma),
                           np.where(s > sc + gamma, np.exp(s - gamma), c))
        else:
            s, sc = logit(y), logit(c)
            out = np.where(s < sc - gamma, expit(s + gamma),
                           np.where(s > sc + gamma, expit(s - gamma), c))
    return _finish(out)


def right_prox_closed_form_abs(kernel_name, c, gamma, x):
    """
    Right prox of |. - c| for the built-in kernels, or None.

    >>> right_prox_closed_form_abs('bs', 0.5, 1, 3)
    1.5
    """
    if not _closed_form_applies(kernel_name, c):
        return None
    if kernel_name == 'energy':
        return left_prox_closed_form_abs(kernel_name, c, gamma, x)
    x = np.asarray(x, dtype=float)
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        if kernel_name == 'bs':
            out = np.where(x > c * (1 + gamma), x / (1 + gamma), c)
            if gamma < 1:
                out = np.where(x < c * (1 - gamma), x / (1 - gamma), out)
        else:
            width = gamma * c * (1 - c)
            # gamma y**2 - (1 + gamma) y + x = 0 above c
            b_up = 1 + gamma
            above = 2 * x / (b_up + np.sqrt(
                np.maximum(b_up * b_up - 4 * gamma * x, 0.0)))
            # gamma y**2 + (1 - gamma) y - x = 0 below c
            b_lo = 1 - gamma
            disc = np.sqrt(np.maximum(b_lo * b_lo + 4 * gamma * x, 0.0))
            if b_lo > 0:
                below = 2 * x / (b_lo + disc)
            else:
                below = (disc - b_lo) / (2 * gamma)
            out = np.where(x > c + width, above,
                           np.where(x < c - width, below, c))
    return _finish(out)


# Generic coordinate solver

class _Coordinate(object):
    """
    One coordinate of a prox problem. `pull(t)` is f'(t) - f'(y) on the
    left and f''(t) (t - x) on the right; the inclusion reads
    0 in pull(t) + gamma d(theta)(t).
    """

    def __init__(self, kernel, piece, gamma, base, side):
        self.kernel = kernel
        self.piece = piece
        self.gamma = gamma
        self.base = base
        self.side = side
        if side == 'left':
            self.base_gradient = float(kernel.gradient(base))
        self.lower = max(kernel.int_lower, piece.dom_lower)
        self.upper = min(kernel.int_upper, piece.dom_upper)
        self.kinks = sorted(
            k for k in set(piece.kinks)
            if kernel.int_lower < k < kernel.int_upper)

    def pull(self, t):
        if self.side == 'left':
            return float(self.kernel.gradient(t)) - self.base_gradient
        return float(self.kernel.hessian(t)) * (t - self.base)

    def interval(self, t):
        """ [lo, hi] of pull(t) + gamma d(theta)(t). """
        g_lo, g_hi = self.piece.subgradient(t)
        p = self.pull(t)
        return p + self.gamma * g_lo, p + self.gamma * g_hi

    def residual(self, t):
        if not self.kernel.interior_mask(t):
            return 0.0
        lo, hi = self.interval(t)
        return max(lo, 0.0, -hi)

    def scale(self, t):
        if self.side == 'left':
            return max(1.0, abs(self.base_gradient),
                       abs(float(self.kernel.gradient(t))))
        return max(1.0, float(self.kernel.hessian(t))
                   * max(abs(t), abs(self.base)))

    def smooth(self, left_kink):
        """
        Single valued residual on the open piece right of `left_kink`,
        extended continuously to the kinks.
        """
        def func(t):
            g_lo, g_hi = self.piece.subgradient(t)
            g = g_hi if t == left_kink else g_lo
            return self.pull(t) + self.gamma * g
        return func


class _BoundaryReached(SolverError):
    def __init__(self, message, bound):
        super(_BoundaryReached, self).__init__(message)
        self.bound = bound


def _start_point(base, a, b):
    if a < base < b:
        return base
    if np.isfinite(a) and np.isfinite(b):
        return 0.5 * (a + b)
    if np.isfinite(a):
        return a + max(1.0, abs(a))
    if np.isfinite(b):
        return b - max(1.0, abs(b))
    return 0.0


def _solve_coordinate(coord, settings):
    """
    :return: (point, iterations, branch)
    """
    a, a_is_kink = coord.lower, False
    b, b_is_kink = coord.upper, False
    for kink in coord.kinks:
        lo, hi = coord.interval(kink)
        if lo <= 0 <= hi:
            return kink, 0, 'kink'
        if hi < 0:
            a, a_is_kink = kink, True
        else:
            b, b_is_kink = kink, True
            break

    func = coord.smooth(a if a_is_kink else None)
    if a_is_kink and b_is_kink and not a < coord.base < b:
        inner, outer = a, b
    else:
        start = _start_point(coord.base, a, b)
        value = func(start)
        if value == 0:
            return start, 0, 'bisection'
        if value < 0:
            if b_is_kink:
                inner, outer = start, b
            else:
                inner, outer = _expand(func, start, b, settings)
        else:
            if a_is_kink:
                inner, outer = a, start
            else:
                inner, outer = _expand(func, start, a, settings)
    if inner == outer:
        return inner, 0, 'bisection'
    LOG.debug("Bracket [%r, %r] for %s prox coordinate at %r", inner, outer,
              coord.side, coord.base)
    return brent_root(func, inner, outer, max_iter=settings.max_bisect)


def _expand(func, start, bound, settings):
    try:
        inner, outer, value = expand_bracket(
            func, start, bound, max_expand=settings.max_expand,
            eps=settings.bracket_eps)
    except SolverError as exc:
        raise _BoundaryReached(str(exc), bound)
    if value == 0:
        return outer, outer
    return inner, outer


def _prox(k, th, gamma, base, side, tol, closed_form, settings,
          allow_boundary=False):
    settings = _default_settings(settings)
    tol = settings.tol if tol is None else float(tol)
    gamma = check_gamma(gamma)
    base = as_point(base, 'y' if side == 'left' else 'x')
    th.check_dimension(len(base))
    if side == 'left' or not allow_boundary:
        k.check_point(base, 'y' if side == 'left' else 'x')
    elif not k.in_domain(base):
        raise DomainError("x=%r is outside dom f" % (base,))
    certificate = coercivity_certificate(k, th, side, n=len(base))

    points, branches, iterations, residuals = [], [], 0, []
    divergence = 0.0
    for j, base_j in enumerate(base):
        piece = th.piece(j)
        on_boundary = not k.interior_mask(base_j)
        point_j = None
        if closed_form and piece.family == 'abs' and k.assumptions_verified:
            effective = gamma * piece.scale
            c = piece.params[0]
            if side == 'left':
                point_j = left_prox_closed_form_abs(k.name, c, effective,
                                                    base_j)
            else:
                point_j = right_prox_closed_form_abs(k.name, c, effective,
                                                     base_j)
            if point_j is not None and not k.interior_mask(point_j) and \
                    not (on_boundary and point_j == base_j):
                point_j = None
            branch_j, iter_j = 'closed_form', 0
        if point_j is None:
            coord = _Coordinate(k, piece, gamma, base_j, side)
            try:
                point_j, iter_j, branch_j = _solve_coordinate(coord, settings)
            except _BoundaryReached as exc:
                if not (on_boundary and exc.bound == base_j):
                    raise SolverError(
                        "No %s prox of %s found for coordinate %d at %r: %s"
                        % (side, th.name, j, base_j, exc),
                        certificate=certificate.status, gamma=gamma)
                point_j, iter_j, branch_j = base_j, 0, 'boundary'
            except SolverError as exc:
                raise SolverError(str(exc), certificate=certificate.status,
                                  gamma=gamma)
        elif on_boundary and point_j == base_j:
            branch_j = 'boundary'
        point_j = float(point_j)
        coord = _Coordinate(k, piece, gamma, base_j, side) \
            if side == 'right' or not on_boundary else None
        if branch_j == 'boundary':
            residual_j = 0.0
        else:
            residual_j = coord.residual(point_j)
            if residual_j > tol * coord.scale(point_j):
                LOG.warning(
                    "%s prox residual %g above tolerance %g at coordinate "
                    "%d (gamma=%g, base=%r)", side, residual_j, tol, j,
                    gamma, base_j)
            if side == 'left':
                divergence += float(k.divergence(point_j, base_j))
            else:
                divergence += float(k.divergence(base_j, point_j))
        points.append(point_j)
        branches.append(branch_j)
        residuals.append(residual_j)
        iterations += iter_j

    point = np.array(points)
    envelope_value = th.value(point) + max(divergence, 0.0) / gamma
    return ProxOutcome(
        point=point, envelope_value=envelope_value,
        residual=max(residuals), iterations=iterations,
        branch=_combine_branches(branches), branches=tuple(branches),
        gamma=gamma, side=side, base=base,
        certificate=certificate.status)


def left_prox(k, th, gamma, y, tol=None, closed_form=True, settings=None):
    """
    Left Bregman prox: argmin_x theta(x) + (1/gamma) D_f(x, y), y in U.

    >>> from bregmoreau.legendre import kernel_energy
    >>> from bregmoreau.objective import objective_abs_deviation
    >>> left_prox(kernel_energy(), objective_abs_deviation(0.5), 1,
    ...           [2.0]).point.tolist()
    [1.0]
    """
    return _prox(k, th, gamma, y, 'left', tol, closed_form, settings)


def right_prox(k, th, gamma, x, tol=None, closed_form=True, settings=None,
               allow_boundary=False):
    """
    Right Bregman prox: argmin_y theta(y) + (1/gamma) D_f(x, y), x in U.

    :param allow_boundary: accept x on a finite boundary of dom f; the
        coordinates whose prox stays on that boundary get branch 'boundary'
    """
    return _prox(k, th, gamma, x, 'right', tol, closed_form, settings,
                 allow_boundary=allow_boundary)


def solve_prox(k, th, gamma, point, side='left', **kwargs):
    if _check_side(side) == 'left':
        return left_prox(k, th, gamma, point, **kwargs)
    return right_prox(k, th, gamma, point, **kwargs)


def envelope_gradient(k, gamma, base, prox_point, side):
    """
    Gradient of the envelope at `base` given its prox point:
    left f''(y)(y - p)/gamma, right (f'(x) - f'(p))/gamma.
    """
    base = as_point(base)
    prox_point = as_point(prox_point)
    if side == 'left':
        return k.hessian(base) * (base - prox_point) / gamma
    return (k.gradient(base) - k.gradient(prox_point)) / gamma


def branch_points(k, th, gamma, side='left', j=0):
    """
    Base points where the prox enters or leaves a kink of theta_j, sorted.

    >>> from bregmoreau.legendre import kernel_energy
    >>> from bregmoreau.objective import objective_abs_deviation
    >>> branch_points(kernel_energy(), objective_abs_deviation(0.5), 1)
    [-0.5, 1.5]
    """
    gamma = check_gamma(gamma)
    _check_side(side)
    piece = th.piece(j)
    points = set()
    for kink in piece.kinks:
        if not k.interior_mask(kink):
            continue
        for g in piece.subgradient(kink):
            if not np.isfinite(g):
                continue
            if side == 'left':
                points.add(float(k.conjugate_gradient(
                    k.gradient(kink) + gamma * g)))
            else:
                point = kink + gamma * g / float(k.hessian(kink))
                if k.domain_mask(point):
                    points.add(float(point))
    return sorted(points)


def _samples(k, th, center, count, rng):
    center = as_point(center)
    lower, upper = th.domain_bounds(len(center))
    rows = []
    for j, c in enumerate(center):
        width = max(1.0, abs(c))
        lo = max(c - width, lower[j], k.dom_lower)
        hi = min(c + width, upper[j], k.dom_upper)
        rows.append(lo + (hi - lo) * rng.random(count))
    return np.column_stack(rows)


def left_prox_certificate(k, th, gamma, y, x=None, samples=None, count=100,
                          seed=0):
    """
    Worst violation of <f'(y) - f'(x), z - x> + gamma theta(x) <=
    gamma theta(z) over sample points z; about zero when x = bprox(y).
    """
    gamma = check_gamma(gamma)
    y = as_point(y)
    if x is None:
        x = left_prox(k, th, gamma, y).point
    x = k.check_point(as_point(x), 'x')
    if samples is None:
        samples = _samples(k, th, x, count, np.random.default_rng(seed))
    direction = k.gradient(y) - k.gradient(x)
    theta_x = th.value(x)
    return max(float(np.dot(direction, z - x)) + gamma * theta_x
               - gamma * th.value(z) for z in np.atleast_2d(samples))


def right_prox_certificate(k, th, gamma, x, y=None, samples=None, count=100,
                           seed=0):
    """
    Worst violation of <f''(y)(x - y), z - y> + gamma theta(y) <=
    gamma theta(z) over sample points z; about zero when y = fprox(x).
    """
    gamma = check_gamma(gamma)
    x = as_point(x)
    if y is None:
        y = right_prox(k, th, gamma, x).point
    y = k.check_point(as_point(y), 'y')
    if samples is None:
        samples = _samples(k, th, y, count, np.random.default_rng(seed))
    direction = k.hessian(y) * (x - y)
    theta_y = th.value(y)
    return max(float(np.dot(direction, z - y)) + gamma * theta_y
               - gamma * th.value(z) for z in np.atleast_2d(samples))


def proximal_point_solve(k, th, gamma, x0, max_iter=None, tol=None,
                         side='left', settings=None):
    """
    Iterates x <- prox(x) until the step is below `tol`. Fixed points are
    exactly the minimizers of theta in U.

    Does not raise on non-convergence; check `converged`.
    """
    _check_side(side)
    settings = _default_settings(settings)
    max_iter = settings.pp_max_iter if max_iter is None else int(max_iter)
    tol = settings.pp_tol if tol is None else float(tol)
    x = k.check_point(as_point(x0, 'x0'), 'x0')
    certificate = coercivity_certificate(k, th, side, n=len(x))
    if certificate.status == 'unknown':
        LOG.warning("Coercivity of the %s prox objective is not certified "
                    "for %s under kernel '%s'", side, th.name, k.name)
    trajectory = [x]
    step = np.inf
    iterations = 0
    while iterations < max_iter:
        nxt = solve_prox(k, th, gamma, x, side=side, settings=settings).point
        iterations += 1
        if not k.in_interior(nxt):
            raise BregmoreauError(
                "Proximal point iterate %r left the interior of dom %s"
                % (nxt, k.name))
        step = float(np.max(np.abs(nxt - x)))
        trajectory.append(nxt)
        x = nxt
        if step <= tol:
            break
    lo, hi = th.subgradient(x)
    stationarity = max(max(l, 0.0, -h) for l, h in zip(lo, hi))
    converged = step <= tol
    LOG.info("Proximal point %s after %d iterations (step %g)",
             'converged' if converged else 'stopped', iterations, step)
    return ProximalPointResult(
        point=x, trajectory=tuple(trajectory), iterations=iterations,
        converged=converged, step=step, stationarity=stationarity,
        side=side, certificate=certificate.status)


def is_minimizer(k, th, gamma, y, side='left', tol=1e-9, settings=None):
    """
    Evaluates the equivalent characterizations of y in U and argmin theta:
    y minimizes theta, y is a fixed point of the prox, the envelope
    gradient vanishes at y, theta(prox(y)) = theta(y) and env(y) = theta(y).
    """
    y = k.check_point(as_point(y), 'y')
    outcome = solve_prox(k, th, gamma, y, side=side, settings=settings)
    in_argmin = all(lo - tol <= t <= hi + tol for t, (lo, hi) in zip(
        y, th.known_argmin(len(y))))
    theta_y = th.value(y)
    gradient = envelope_gradient(k, outcome.gamma, y, outcome.point, side)
    return MinimizerReport(
        in_argmin=in_argmin,
        fixed_point=bool(np.max(np.abs(outcome.point - y)) <= tol),
        zero_gradient=bool(np.max(np.abs(gradient)) <= tol),
        theta_preserved=abs(th.value(outcome.point) - theta_y) <= tol,
        envelope_equals_theta=abs(outcome.envelope_value - theta_y) <= tol)
