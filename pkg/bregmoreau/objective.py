"""
Separable proper lsc convex objectives.

An objective is a sum of one-dimensional pieces, one per coordinate (a
single piece is shared by every coordinate). Each piece knows its value,
its subgradient interval, its domain, its kinks and its set of minimizers:

>>> th = objective_abs_deviation(0.5)
>>> th.value(2.0)
1.5
>>> th.subgradient(0.5)
([-1.0], [1.0])
>>> parse_objective('abs:0.5,ind:0,1').dimension
2
"""
import re

import numpy as np

from bregmoreau.exceptions import (DomainError, InvalidParamError,
                                   InvalidSetError, ParseError)
from bregmoreau.helpers import ReadOnly, as_point, check_gamma, parse_float


FAMILIES = {
    # family -> number of parameters
    'abs': 1,
    'ind': 2,
    'quad': 2,
    'dz': 2,
}

_PIECE_SPLIT = re.compile(r',(?=\s*(?:%s):)' % '|'.join(FAMILIES))


class ObjectivePiece(ReadOnly):
    """
    One coordinate of a separable objective, multiplied by `scale` > 0.

    :param family: 'abs' (|t - c|), 'ind' (indicator of [a, b]),
        'quad' (a/2 (t - c)**2) or 'dz' (distance to [a, b])
    :param params: tuple of the family parameters
    """
    _IMMUTABLE_ATTRIBUTES = frozenset((
        'family', 'params', 'scale', 'dom_lower', 'dom_upper', 'kinks',
        'argmin', 'inf_value',
    ))

    def __init__(self, family, params, scale=1.0):
        if family not in FAMILIES:
            raise ParseError("Unknown objective family '%s'" % family)
        params = tuple(float(p) for p in params)
        if len(params) != FAMILIES[family]:
            raise ParseError("Objective '%s' takes %d parameter(s), got %d"
                             % (family, FAMILIES[family], len(params)))
        finite = params if family in ('abs', 'quad') else ()
        if np.any(np.isnan(params)) or not np.all(np.isfinite(finite)):
            raise InvalidParamError(
                "Objective parameters must be finite: %r" % (params,))
        dom_lower, dom_upper = -np.inf, np.inf
        if family == 'abs':
            kinks = params
            argmin = (params[0], params[0])
        elif family == 'quad':
            if params[0] < 0:
                raise InvalidParamError(
                    "quad objective needs a >= 0 to be convex, got %g"
                    % params[0])
            kinks = ()
            argmin = ((params[1], params[1]) if params[0] > 0
                      else (-np.inf, np.inf))
        else:
            a, b = params
            if a > b:
                raise InvalidSetError(
                    "Interval [%g, %g] is empty" % (a, b))
            kinks = tuple(sorted({t for t in (a, b) if np.isfinite(t)}))
            argmin = (a, b)
            if family == 'ind':
                dom_lower, dom_upper = a, b
        object.__setattr__(self, 'family', family)
        object.__setattr__(self, 'params', params)
        object.__setattr__(self, 'scale', check_gamma(scale, 'scale'))
        object.__setattr__(self, 'dom_lower', float(dom_lower))
        object.__setattr__(self, 'dom_upper', float(dom_upper))
        object.__setattr__(self, 'kinks', tuple(kinks))
        object.__setattr__(self, 'argmin', argmin)
        object.__setattr__(self, 'inf_value', 0.0)

    @property
    def spec(self):
        text = '%s:%s' % (self.family, ','.join('%r' % p for p in self.params))
        if self.scale != 1.0:
            text = '%r*%s' % (self.scale, text)
        return text

    def __repr__(self):
        return 'ObjectivePiece(%s)' % self.spec

    def scaled(self, gamma):
        return ObjectivePiece(self.family, self.params,
                              self.scale * check_gamma(gamma))

    def in_domain(self, t):
        t = np.asarray(t)
        return (t >= self.dom_lower) & (t <= self.dom_upper)

    def value(self, t):
        """ Vectorized value, +inf outside the domain. Keeps the dtype. """
        t = np.asarray(t)
        zero = np.zeros_like(t)
        if self.family == 'abs':
            out = np.abs(t - self.params[0])
        elif self.family == 'quad':
            a, c = self.params
            out = 0.5 * a * (t - c) ** 2
        elif self.family == 'dz':
            a, b = self.params
            out = np.maximum(np.maximum(a - t, zero), t - b)
        else:
            out = np.where(self.in_domain(t), zero, zero + np.inf)
        out = self.scale * out
        return out[()] if out.ndim == 0 else out

    def subgradient(self, t):
        """
        Subgradient interval (lo, hi) at t, with infinite ends for normal
        cones.

        :raises DomainError: when t is outside the domain
        """
        t = np.asarray(t, dtype=float)
        if not np.all(self.in_domain(t)):
            raise DomainError(
                "Subgradient of %s requested outside its domain: %r"
                % (self.spec, t))
        s = self.scale
        if self.family == 'abs':
            c = self.params[0]
            lo = np.where(t > c, s, -s)
            hi = np.where(t < c, -s, s)
        elif self.family == 'quad':
            a, c = self.params
            lo = hi = s * a * (t - c)
        elif self.family == 'dz':
            a, b = self.params
            lo = np.where(t > b, s, np.where(t > a, 0.0, -s))
            hi = np.where(t < a, -s, np.where(t < b, 0.0, s))
        else:
            a, b = self.params
            lo = np.where(t <= a, -np.inf, 0.0)
            hi = np.where(t >= b, np.inf, 0.0)
        lo = np.asarray(lo, dtype=float) * 1
        hi = np.asarray(hi, dtype=float) * 1
        if lo.ndim == 0:
            return float(lo), float(hi)
        return lo, hi

    def argmin_distance(self, t):
        lo, hi = self.argmin
        return max(lo - t, 0.0, t - hi)


class ConvexObjective(ReadOnly):
    """
    Separable objective theta(x) = sum_j theta_j(x_j).

    :param pieces: list of ObjectivePiece; a single piece applies to every
        coordinate
    """
    _IMMUTABLE_ATTRIBUTES = frozenset(('name', 'pieces'))

    def __init__(self, pieces, name=None):
        pieces = tuple(pieces)
        if not pieces:
            raise InvalidParamError("An objective needs at least one piece")
        object.__setattr__(self, 'pieces', pieces)
        object.__setattr__(self, 'name', name or ','.join(
            p.spec for p in pieces))

    def __repr__(self):
        return 'ConvexObjective(%s)' % self.name

    @property
    def dimension(self):
        """ Number of coordinates, None when the piece is broadcast. """
        return len(self.pieces) if len(self.pieces) > 1 else None

    def piece(self, j):
        if len(self.pieces) == 1:
            return self.pieces[0]
        return self.pieces[j]

    def check_dimension(self, n):
        if self.dimension is not None and self.dimension != n:
            raise InvalidParamError(
                "Objective %s has %d coordinates, point has %d"
                % (self.name, self.dimension, n))

    def coordinate_values(self, x):
        x = as_point(x)
        self.check_dimension(len(x))
        return np.array([self.piece(j).value(x[j]) for j in range(len(x))])

    def value(self, x):
        """ theta(x); +inf when x is outside dom theta. """
        return float(np.sum(self.coordinate_values(x)))

    def subgradient(self, x):
        x = as_point(x)
        self.check_dimension(len(x))
        pairs = [self.piece(j).subgradient(x[j]) for j in range(len(x))]
        return [p[0] for p in pairs], [p[1] for p in pairs]

    def kinks(self, j=0):
        return self.piece(j).kinks

    def known_argmin(self, n=1):
        """ Per-coordinate minimizer intervals (lo, hi). """
        self.check_dimension(n)
        return [self.piece(j).argmin for j in range(n)]

    def inf_value(self, n=1):
        self.check_dimension(n)
        return float(sum(self.piece(j).inf_value for j in range(n)))

    def domain_bounds(self, n=1):
        self.check_dimension(n)
        return ([self.piece(j).dom_lower for j in range(n)],
                [self.piece(j).dom_upper for j in range(n)])

    def scaled(self, gamma):
        """ gamma * theta. """
        gamma = check_gamma(gamma)
        return ConvexObjective([p.scaled(gamma) for p in self.pieces])


def objective_abs_deviation(c):
    return ConvexObjective([ObjectivePiece('abs', (c,))])


def objective_indicator_interval(a, b):
    """
    >>> objective_indicator_interval(0, 1).value(2)
    inf
    """
    return ConvexObjective([ObjectivePiece('ind', (a, b))])


def objective_quadratic(a, c):
    return ConvexObjective([ObjectivePiece('quad', (a, c))])


def objective_dead_zone(a, b):
    """ Distance to the interval [a, b]. """
    return ConvexObjective([ObjectivePiece('dz', (a, b))])


def parse_objective(text):
    """
    Parses the objective grammar: "abs:<c>", "ind:<a>,<b>", "quad:<a>,<c>",
    "dz:<a>,<b>", comma separated per coordinate.

    >>> parse_objective('quad:1,0').value(2)
    2.0
    """
    if isinstance(text, ConvexObjective):
        return text
    pieces = []
    for part in _PIECE_SPLIT.split(str(text).strip()):
        family, sep, args = part.strip().partition(':')
        if not sep:
            raise ParseError("Objective piece %r lacks a family prefix" % part)
        family = family.strip().lower()
        if family not in FAMILIES:
            raise ParseError("Unknown objective family '%s'" % family)
        params = [parse_float(a, 'objective parameter')
                  for a in args.split(',')]
        pieces.append(ObjectivePiece(family, params))
    return ConvexObjective(pieces)
