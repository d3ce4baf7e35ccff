"""
Separable Legendre kernels.

A kernel describes one coordinate of a convex function of Legendre type
f: every evaluator acts coordinate-wise on scalars or numpy arrays, and the
multi-dimensional function is the sum over coordinates. The built-in
kernels are the energy, the Boltzmann-Shannon entropy and the Fermi-Dirac
entropy:

>>> float(kernel_energy().gradient(3.0))
3.0
>>> float(kernel_boltzmann_shannon().value(0.0))
0.0
>>> float(kernel_fermi_dirac().hessian(0.5))
4.0

Evaluators only use numpy ufuncs so that they keep the precision of their
input, which lets the oracle evaluate them in extended precision.
"""
import numpy as np
from scipy.special import kl_div

from bregmoreau.exceptions import DomainError, ParseError
from bregmoreau.helpers import ReadOnly
from bregmoreau.settings import LOG


def _finish(out):
    out = np.asarray(out)
    return out[()] if out.ndim == 0 else out


def _xlogx(t):
    # 0 * ln(0) := 0
    t = np.asarray(t)
    positive = t > 0
    with np.errstate(divide='ignore', invalid='ignore'):
        out = t * np.log(np.where(positive, t, np.ones_like(t)))
    return np.where(positive, out, np.zeros_like(t))


def _energy_value(t):
    return 0.5 * t * t


def _energy_gradient(t):
    return np.asarray(t) * 1


def _energy_hessian(t):
    return np.ones_like(np.asarray(t))


def _energy_divergence(x, y):
    return 0.5 * (np.asarray(x) - np.asarray(y)) ** 2


def _bs_value(t):
    return _xlogx(t) - t


def _bs_gradient(t):
    return np.log(t)


def _bs_hessian(t):
    return 1 / np.asarray(t)


def _bs_conjugate(s):
    with np.errstate(over='ignore'):
        return np.exp(s)


def _bs_divergence(x, y):
    return kl_div(x, y)


def _fd_value(t):
    t = np.asarray(t)
    return _xlogx(t) + _xlogx(1 - t)


def _fd_gradient(t):
    t = np.asarray(t)
    return np.log(t) - np.log1p(-t)


def _fd_hessian(t):
    t = np.asarray(t)
    return 1 / (t * (1 - t))


def _fd_conjugate(s):
    s = np.asarray(s)
    return np.logaddexp(np.zeros_like(s), s)


def _fd_conjugate_gradient(s):
    s = np.asarray(s)
    with np.errstate(over='ignore'):
        return 1 / (1 + np.exp(-s))


def _fd_divergence(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return kl_div(x, y) + kl_div(1 - x, 1 - y)


class LegendreKernel(ReadOnly):
    """
    One coordinate of a separable convex function of Legendre type.

    :param name: identifier, e.g. 'energy'
    :param value, gradient, hessian: f, f' and f'' (vectorized)
    :param conjugate, conjugate_gradient: f* and (f*)'
    :param dom_lower, dom_upper: closed domain endpoints of dom f
    :param int_lower, int_upper: open endpoints of U = int dom f, default
        to the domain endpoints
    :param supercoercive: f(x)/|x| -> +inf
    :param divergence_supercoercive: D_f(x, .) supercoercive for all x in U
    :param divergence: optional stable evaluator of the coordinate Bregman
        distance on dom f x U
    :param assumptions_verified: whether Legendre type, joint convexity of
        D_f and the coercivity conditions are known to hold; only the
        built-in kernels set it
    """
    _IMMUTABLE_ATTRIBUTES = frozenset((
        'name', 'dom_lower', 'dom_upper', 'int_lower', 'int_upper',
        'supercoercive', 'divergence_supercoercive', 'assumptions_verified',
        'conj_int_lower', 'conj_int_upper',
    ))

    def __init__(self, name, value, gradient, hessian, conjugate,
                 conjugate_gradient, dom_lower=-np.inf, dom_upper=np.inf,
                 int_lower=None, int_upper=None, supercoercive=False,
                 divergence_supercoercive=False, divergence=None,
                 conj_int_lower=-np.inf, conj_int_upper=np.inf,
                 assumptions_verified=False):
        object.__setattr__(self, 'name', name)
        object.__setattr__(self, 'dom_lower', float(dom_lower))
        object.__setattr__(self, 'dom_upper', float(dom_upper))
        object.__setattr__(self, 'int_lower', float(
            dom_lower if int_lower is None else int_lower))
        object.__setattr__(self, 'int_upper', float(
            dom_upper if int_upper is None else int_upper))
        object.__setattr__(self, 'supercoercive', bool(supercoercive))
        object.__setattr__(self, 'divergence_supercoercive',
                           bool(divergence_supercoercive))
        object.__setattr__(self, 'conj_int_lower', float(conj_int_lower))
        object.__setattr__(self, 'conj_int_upper', float(conj_int_upper))
        object.__setattr__(self, 'assumptions_verified',
                           bool(assumptions_verified))
        object.__setattr__(self, '_value', value)
        object.__setattr__(self, '_gradient', gradient)
        object.__setattr__(self, '_hessian', hessian)
        object.__setattr__(self, '_conjugate', conjugate)
        object.__setattr__(self, '_conjugate_gradient', conjugate_gradient)
        object.__setattr__(self, '_divergence', divergence)
        if self.int_lower >= self.int_upper:
            raise DomainError("Kernel %s has an empty interior" % name)

    def __repr__(self):
        return 'LegendreKernel(%s, U=(%g, %g))' % (
            self.name, self.int_lower, self.int_upper)

    @property
    def interior_bounded(self):
        return np.isfinite(self.int_lower) and np.isfinite(self.int_upper)

    def domain_mask(self, t):
        t = np.asarray(t)
        return (t >= self.dom_lower) & (t <= self.dom_upper)

    def interior_mask(self, t):
        t = np.asarray(t)
        return (t > self.int_lower) & (t < self.int_upper)

    def in_domain(self, x):
        return bool(np.all(self.domain_mask(x)))

    def in_interior(self, x):
        return bool(np.all(self.interior_mask(x)))

    def _require(self, t, interior, what):
        mask = self.interior_mask(t) if interior else self.domain_mask(t)
        if not np.all(mask):
            raise DomainError(
                "%s of kernel '%s' evaluated outside %s: %r" % (
                    what, self.name,
                    'U' if interior else 'dom f', t))

    def check_point(self, x, name='point'):
        """ Raises DomainError unless every coordinate of x lies in U. """
        if not self.in_interior(x):
            raise DomainError("%s %r is not in the interior of dom %s" % (
                name, x, self.name))
        return x

    def value(self, t):
        self._require(t, False, 'value')
        return _finish(self._value(t))

    def gradient(self, t):
        self._require(t, True, 'gradient')
        return _finish(self._gradient(t))

    def hessian(self, t):
        self._require(t, True, 'hessian')
        return _finish(self._hessian(t))

    def conjugate(self, s):
        return _finish(self._conjugate(s))

    def conjugate_gradient(self, s):
        return _finish(self._conjugate_gradient(s))

    def divergence(self, x, y):
        """
        Coordinate-wise Bregman distance on dom f x U (no domain checks).
        """
        if self._divergence is not None:
            return _finish(self._divergence(x, y))
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return _finish(self._value(x) - self._value(y)
                       - self._gradient(y) * (x - y))

    def total(self, x):
        """ f(x) for a multi-dimensional point (sum over coordinates). """
        return float(np.sum(self.value(np.asarray(x, dtype=float))))


def kernel_energy():
    """ f: t -> t**2 / 2, self-conjugate, U = R. """
    return LegendreKernel(
        'energy', _energy_value, _energy_gradient, _energy_hessian,
        _energy_value, _energy_gradient,
        supercoercive=True, divergence_supercoercive=True,
        divergence=_energy_divergence, assumptions_verified=True)


def kernel_boltzmann_shannon():
    """ f: t -> t ln t - t on [0, +inf), f* = exp. """
    return LegendreKernel(
        'bs', _bs_value, _bs_gradient, _bs_hessian,
        _bs_conjugate, _bs_conjugate,
        dom_lower=0.0, supercoercive=True,
        divergence=_bs_divergence, assumptions_verified=True)


def kernel_fermi_dirac():
    """ f: t -> t ln t + (1 - t) ln(1 - t) on [0, 1]. """
    return LegendreKernel(
        'fd', _fd_value, _fd_gradient, _fd_hessian,
        _fd_conjugate, _fd_conjugate_gradient,
        dom_lower=0.0, dom_upper=1.0,
        divergence=_fd_divergence, assumptions_verified=True)


def custom_kernel(name, value, gradient, hessian, conjugate,
                  conjugate_gradient, **kwargs):
    """
    Wraps user supplied evaluators. Legendre type, joint convexity
    of D_f and coercivity are declared, not checked.
    """
    kwargs.pop('assumptions_verified', None)
    LOG.warning("Kernel '%s' is user supplied: Legendre type and "
                "joint convexity are not verified", name)
    return LegendreKernel(name, value, gradient, hessian, conjugate,
                          conjugate_gradient, assumptions_verified=False,
                          **kwargs)


def kernel_in_interior(kernel, x):
    """
    >>> kernel_in_interior(kernel_fermi_dirac(), [0.0])
    False
    """
    return kernel.in_interior(x)


KERNELS = {
    'energy': kernel_energy,
    'bs': kernel_boltzmann_shannon,
    'fd': kernel_fermi_dirac,
}

KERNEL_ALIASES = {
    'boltzmann_shannon': 'bs',
    'boltzmann-shannon': 'bs',
    'kl': 'bs',
    'fermi_dirac': 'fd',
    'fermi-dirac': 'fd',
}


def get_kernel(name):
    """
    Returns a built-in kernel by name ("energy" | "bs" | "fd").
    """
    if isinstance(name, LegendreKernel):
        return name
    key = KERNEL_ALIASES.get(str(name).strip().lower(),
                             str(name).strip().lower())
    try:
        return KERNELS[key]()
    except KeyError:
        raise ParseError("Unknown kernel '%s', expected one of %s" % (
            name, ', '.join(sorted(KERNELS))))
