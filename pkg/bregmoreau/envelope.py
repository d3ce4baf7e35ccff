"""
Left and right Bregman-Moreau envelopes.

    left:   benv(y) = min_x theta(x) + (1/gamma) D_f(x, y)
    right:  fenv(x) = min_y theta(y) + (1/gamma) D_f(x, y)

Values are computed through the prox and the identity
env = theta(prox) + (1/gamma) D_f(prox pair).

>>> from bregmoreau.legendre import kernel_energy
>>> from bregmoreau.objective import objective_abs_deviation
>>> left_envelope(kernel_energy(), objective_abs_deviation(0.5), 1,
...               [0.0]).value
0.125
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.special import kl_div, xlogy

from bregmoreau.exceptions import InvalidParamError
from bregmoreau.helpers import as_point, check_gamma
from bregmoreau.legendre import kernel_energy
from bregmoreau.oracle import default_bracket, numeric_conjugate
from bregmoreau.prox import (_closed_form_applies, envelope_gradient,
                             left_prox, right_prox,
                             right_prox_closed_form_abs)


@dataclass(frozen=True)
class EnvelopeSample:
    point: np.ndarray
    gamma: float
    side: str
    value: float
    gradient: np.ndarray = None
    prox_point: np.ndarray = None
    branch: str = None
    residual: float = None
    iterations: int = 0
    reason: str = field(default=None, compare=False)


def _outside(point, gamma, side, reason):
    return EnvelopeSample(point=point, gamma=gamma, side=side, value=np.inf,
                          reason=reason)


def left_envelope(k, th, gamma, y, want_gradient=False, tol=None,
                  closed_form=True, settings=None):
    """
    Left envelope at y; +inf (without gradient) when y is not in U.
    """
    gamma = check_gamma(gamma)
    y = as_point(y, 'y')
    th.check_dimension(len(y))
    if not k.in_interior(y):
        return _outside(y, gamma, 'left', 'y outside U')
    outcome = left_prox(k, th, gamma, y, tol=tol, closed_form=closed_form,
                        settings=settings)
    gradient = None
    if want_gradient:
        gradient = envelope_gradient(k, gamma, y, outcome.point, 'left')
    return EnvelopeSample(
        point=y, gamma=gamma, side='left', value=outcome.envelope_value,
        gradient=gradient, prox_point=outcome.point, branch=outcome.branch,
        residual=outcome.residual, iterations=outcome.iterations)


def right_envelope(k, th, gamma, x, want_gradient=False, tol=None,
                   closed_form=True, settings=None):
    """
    Right envelope at x; finite on all of dom f, +inf outside. The
    gradient is only available for x in U.
    """
    gamma = check_gamma(gamma)
    x = as_point(x, 'x')
    th.check_dimension(len(x))
    if not k.in_domain(x):
        return _outside(x, gamma, 'right', 'x outside dom f')
    outcome = right_prox(k, th, gamma, x, tol=tol, closed_form=closed_form,
                         settings=settings, allow_boundary=True)
    gradient = None
    reason = None
    if want_gradient:
        if k.in_interior(x) and k.in_interior(outcome.point):
            gradient = envelope_gradient(k, gamma, x, outcome.point, 'right')
        else:
            reason = 'gradient needs x in U'
    return EnvelopeSample(
        point=x, gamma=gamma, side='right', value=outcome.envelope_value,
        gradient=gradient, prox_point=outcome.point, branch=outcome.branch,
        residual=outcome.residual, iterations=outcome.iterations,
        reason=reason)


def envelope(k, th, gamma, point, side='left', **kwargs):
    if side == 'left':
        return left_envelope(k, th, gamma, point, **kwargs)
    if side == 'right':
        return right_envelope(k, th, gamma, point, **kwargs)
    raise InvalidParamError("side must be 'left' or 'right', got %r" % side)


def classical_envelope(th, gamma, y):
    """
    Moreau envelope min_x theta(x) + |x - y|**2 / (2 gamma).

    >>> from bregmoreau.objective import objective_indicator_interval
    >>> classical_envelope(objective_indicator_interval(0, 1), 2, [3.0])
    1.0
    """
    return left_envelope(kernel_energy(), th, gamma, y).value


def scaling_law_check(k, th, gamma, mu, point, side='left', **kwargs):
    """
    (env_mu(gamma theta)(point), gamma env_{gamma mu}(theta)(point)), two
    independent solves of the same quantity.
    """
    gamma = check_gamma(gamma)
    mu = check_gamma(mu, 'mu')
    scaled = envelope(k, th.scaled(gamma), mu, point, side=side, **kwargs)
    plain = envelope(k, th, gamma * mu, point, side=side, **kwargs)
    return scaled.value, gamma * plain.value


def conjugate_identity_gap(k, th, gamma, point, side='left', settings=None):
    """
    Left: |gamma benv(grad f*(y*)) - (f*(y*) - (gamma theta + f)*(y*))|
    at the dual point y* = `point`.

    Right: |gamma fenv(x) - (f(x) - h*(x))| at x = `point` in U, with
    h = gamma theta o grad f* + f*.

    The conjugates are computed numerically by the oracle.
    """
    gamma = check_gamma(gamma)
    point = as_point(point)
    th.check_dimension(len(point))
    rhs = 0.0
    if side == 'left':
        y = as_point(k.conjugate_gradient(point))
        k.check_point(y, 'grad f*(y*)')
        lhs = gamma * left_envelope(k, th, gamma, y, settings=settings).value
        for j, ystar in enumerate(point):
            piece = th.piece(j)

            def g(t, piece=piece):
                t = np.asarray(t)
                out = np.full(t.shape, np.inf, dtype=t.dtype)
                mask = k.domain_mask(t)
                s = t[mask]
                out[mask] = gamma * piece.value(s) + k.value(s)
                return out

            anchors = [y[j]] + list(piece.kinks) + list(piece.argmin)
            bracket = default_bracket(k, anchors, piece.dom_lower,
                                      piece.dom_upper)
            limits = (max(k.dom_lower, piece.dom_lower),
                      min(k.dom_upper, piece.dom_upper))
            rhs += float(k.conjugate(ystar)) - numeric_conjugate(
                g, ystar, bracket, limits=limits, settings=settings)
    elif side == 'right':
        x = k.check_point(point, 'x')
        lhs = gamma * right_envelope(k, th, gamma, x, settings=settings).value
        for j, xj in enumerate(x):
            piece = th.piece(j)

            def h(s, piece=piece):
                s = np.asarray(s)
                out = np.full(s.shape, np.inf, dtype=s.dtype)
                t = k.conjugate_gradient(s)
                mask = k.interior_mask(t)
                out[mask] = (gamma * piece.value(np.asarray(t)[mask])
                             + k.conjugate(s[mask]))
                return out

            anchors = [float(k.gradient(xj))] + [
                float(k.gradient(c)) for c in list(piece.kinks)
                + list(piece.argmin) if k.interior_mask(c)]
            bracket = _dual_bracket(k, anchors)
            rhs += float(k.value(xj)) - numeric_conjugate(
                h, xj, bracket, limits=(k.conj_int_lower, k.conj_int_upper),
                settings=settings)
    else:
        raise InvalidParamError("side must be 'left' or 'right', got %r"
                                % side)
    return abs(lhs - rhs)


def _dual_bracket(k, anchors):
    lo, hi = min(anchors), max(anchors)
    margin = 2.0 * max(1.0, hi - lo)
    return (max(lo - margin, k.conj_int_lower),
            min(hi + margin, k.conj_int_upper))


def left_envelope_closed_form_abs(kernel_name, c, gamma, y):
    """
    Left envelope of |. - c| for the built-in kernels, or None.

    >>> left_envelope_closed_form_abs('energy', 0.5, 1, 0.0)
    0.125
    """
    if not _closed_form_applies(kernel_name, c):
        return None
    y = np.asarray(y, dtype=float)
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        if kernel_name == 'energy':
            out = np.where(
                y < c - gamma, c - y - gamma / 2,
                np.where(y > c + gamma, y - c - gamma / 2,
                         (y - c) ** 2 / (2 * gamma)))
        elif kernel_name == 'bs':
            s, sc = np.log(y), np.log(c)
            out = np.where(
                s < sc - gamma, c - y * np.expm1(gamma) / gamma,
                np.where(s > sc + gamma, -y * np.expm1(-gamma) / gamma - c,
                         kl_div(c, y) / gamma))
        else:
            s, sc = np.log(y) - np.log1p(-y), np.log(c) - np.log1p(-c)
            middle = (kl_div(c, y) + kl_div(1 - c, 1 - y)) / gamma
            out = np.where(
                s < sc - gamma, c - np.log1p(y * np.expm1(gamma)) / gamma,
                np.where(s > sc + gamma,
                         -c - np.log1p(y * np.expm1(-gamma)) / gamma,
                         middle))
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def right_envelope_closed_form_abs(kernel_name, c, gamma, x):
    """
    Right envelope of |. - c| for the built-in kernels, or None.

    >>> round(right_envelope_closed_form_abs('bs', 0.5, 1, 3.0), 6)
    1.579442
    """
    if not _closed_form_applies(kernel_name, c):
        return None
    if kernel_name == 'energy':
        return left_envelope_closed_form_abs(kernel_name, c, gamma, x)
    x = np.asarray(x, dtype=float)
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        if kernel_name == 'bs':
            middle = (xlogy(x, x / c) - x + c) / gamma
            out = np.where(x > c * (1 + gamma),
                           x * np.log1p(gamma) / gamma - c, middle)
            if gamma < 1:
                out = np.where(x < c * (1 - gamma),
                               c + x * np.log1p(-gamma) / gamma, out)
        else:
            p = np.asarray(right_prox_closed_form_abs('fd', c, gamma, x))
            out = np.abs(p - c) + (kl_div(x, p) + kl_div(1 - x, 1 - p)) / gamma
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def finite_difference_gradient(func, point, h=1e-5):
    """
    Central differences (func(x + h e_i) - func(x - h e_i)) / 2h.

    >>> finite_difference_gradient(lambda x: float(x[0] ** 2), [1.0]).round(8)
    array([2.])
    """
    point = as_point(point)
    gradient = np.empty_like(point)
    for i in range(len(point)):
        step = np.zeros_like(point)
        step[i] = h
        gradient[i] = (func(point + step) - func(point - step)) / (2 * h)
    return gradient
