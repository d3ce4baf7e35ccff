"""
Bregman distances, the four-point identity and coercivity certificates.
"""
from dataclasses import dataclass, field

import numpy as np

from bregmoreau.exceptions import DomainError, InvalidParamError, SetupError
from bregmoreau.helpers import as_point, check_same_dimension


CONDITIONS = {
    'a': 'U intersected with dom theta is bounded',
    'b': 'inf theta(U) is finite',
    'c': 'f is supercoercive',
    'd': 'D_f(x, .) is supercoercive for every x in U',
}


@dataclass(frozen=True)
class BregmanEval:
    value: float
    left_point: np.ndarray = field(repr=False)
    right_point: np.ndarray = field(repr=False)
    kernel: str = ''


@dataclass(frozen=True)
class CoercivityCertificate:
    """
    Which sufficient conditions for coercivity of the prox objective hold.
    Any single condition is enough; none at all yields status 'unknown'.
    """
    side: str
    conditions: tuple = ()

    @property
    def status(self):
        return 'coercive' if self.conditions else 'unknown'

    @property
    def holds(self):
        return bool(self.conditions)

    def describe(self):
        if not self.conditions:
            return 'unknown'
        return '; '.join('(%s) %s' % (c, CONDITIONS[c])
                         for c in self.conditions)


def _pair(x, y):
    x = as_point(x, 'x')
    y = as_point(y, 'y')
    if len(x) != len(y):
        raise InvalidParamError(
            "Bregman distance needs points of the same dimension, got %d "
            "and %d" % (len(x), len(y)))
    return x, y


def bregman_distance(k, x, y):
    """
    D_f(x, y) = f(x) - f(y) - <f'(y), x - y>, summed over coordinates.

    Returns +inf when y is not in U or x is not in dom f.

    >>> from bregmoreau.legendre import kernel_energy
    >>> bregman_distance(kernel_energy(), [1.0], [2.0])
    0.5
    """
    x, y = _pair(x, y)
    if not k.in_interior(y) or not k.in_domain(x):
        return np.inf
    value = float(np.sum(k.divergence(x, y)))
    return max(value, 0.0)


def bregman_eval(k, x, y):
    x, y = _pair(x, y)
    return BregmanEval(bregman_distance(k, x, y), x, y, k.name)


def _require_quadruple(k, x1, x2, y1, y2):
    points = [as_point(p) for p in (x1, x2, y1, y2)]
    check_same_dimension(*points)
    for name, point in zip(('x1', 'x2'), points[:2]):
        if not k.in_domain(point):
            raise DomainError("%s=%r is outside dom f" % (name, point))
    for name, point in zip(('y1', 'y2'), points[2:]):
        k.check_point(point, name)
    return points


def four_point_gap(k, x1, x2, y1, y2):
    """
    D(x1, y2) + D(x2, y1) - D(x1, y1) - D(x2, y2), which equals
    <f'(y1) - f'(y2), x1 - x2>.
    """
    x1, x2, y1, y2 = _require_quadruple(k, x1, x2, y1, y2)
    return (bregman_distance(k, x1, y2) + bregman_distance(k, x2, y1)
            - bregman_distance(k, x1, y1) - bregman_distance(k, x2, y2))


def bregman_gradient_pairing(k, x1, x2, y1, y2):
    x1, x2, y1, y2 = _require_quadruple(k, x1, x2, y1, y2)
    return float(np.dot(k.gradient(y1) - k.gradient(y2), x1 - x2))


def domain_intersection(k, th, n=1):
    """
    Per-coordinate bounds of U intersected with dom theta.

    :raises SetupError: when some coordinate has an empty intersection
    """
    th_lower, th_upper = th.domain_bounds(n)
    bounds = []
    for j in range(n):
        lower = max(k.int_lower, th_lower[j])
        upper = min(k.int_upper, th_upper[j])
        # U is open, dom theta closed
        empty = (th_upper[j] <= k.int_lower or th_lower[j] >= k.int_upper
                 or th_lower[j] > th_upper[j])
        if empty:
            raise SetupError(
                "U of kernel '%s' does not meet dom %s in coordinate %d"
                % (k.name, th.piece(j).spec, j))
        bounds.append((lower, upper))
    return bounds


def coercivity_certificate(k, th, side='left', n=None):
    """
    Certifies coercivity of theta + (1/gamma) D_f(., y) (left) or
    theta + (1/gamma) D_f(x, .) (right).

    >>> from bregmoreau.legendre import kernel_energy
    >>> from bregmoreau.objective import objective_abs_deviation
    >>> 'c' in coercivity_certificate(
    ...     kernel_energy(), objective_abs_deviation(0.5)).conditions
    True
    """
    if side not in ('left', 'right'):
        raise InvalidParamError("side must be 'left' or 'right'")
    if n is None:
        n = th.dimension or 1
    bounds = domain_intersection(k, th, n)
    conditions = []
    if all(np.isfinite(lo) and np.isfinite(hi) for lo, hi in bounds):
        conditions.append('a')
    if np.isfinite(th.inf_value(n)):
        conditions.append('b')
    if side == 'left' and k.supercoercive:
        conditions.append('c')
    if side == 'right' and (k.divergence_supercoercive
                            or k.interior_bounded):
        conditions.append('d')
    return CoercivityCertificate(side, tuple(conditions))
