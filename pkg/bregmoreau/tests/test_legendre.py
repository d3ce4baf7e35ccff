import math
from unittest import TestCase

import mock
import numpy as np
import pytest

from bregmoreau.exceptions import DomainError, ParseError
from bregmoreau.legendre import (LegendreKernel, custom_kernel, get_kernel,
                                 kernel_boltzmann_shannon, kernel_energy,
                                 kernel_fermi_dirac, kernel_in_interior)


def interior_grid(k):
    if k.name == 'energy':
        return np.linspace(-20, 20, 401)
    if k.name == 'bs':
        return np.geomspace(1e-8, 1e3, 401)
    return np.concatenate([np.geomspace(1e-8, 0.5, 200),
                           1 - np.geomspace(1e-8, 0.5, 200)[::-1]])


class TestBuiltinKernels(TestCase):

    def test_energy(self):
        k = kernel_energy()
        self.assertEqual(k.gradient(3.0), 3.0)
        self.assertEqual(k.conjugate(2.0), 2.0)
        self.assertEqual(k.hessian(-5.0), 1.0)
        self.assertTrue(k.supercoercive)
        self.assertTrue(k.divergence_supercoercive)
        self.assertFalse(k.interior_bounded)

    def test_boltzmann_shannon(self):
        k = kernel_boltzmann_shannon()
        self.assertEqual(k.value(1.0), -1.0)
        self.assertEqual(k.value(0.0), 0.0)
        self.assertAlmostEqual(k.conjugate_gradient(k.gradient(0.1)), 0.1,
                               places=14)
        self.assertEqual((k.int_lower, k.int_upper), (0.0, math.inf))
        self.assertTrue(k.supercoercive)

    def test_fermi_dirac(self):
        k = kernel_fermi_dirac()
        self.assertAlmostEqual(k.value(0.5), math.log(0.5), places=15)
        self.assertEqual(k.gradient(0.5), 0.0)
        self.assertEqual(k.hessian(0.5), 4.0)
        self.assertEqual(k.value(0.0), 0.0)
        self.assertEqual(k.value(1.0), 0.0)
        self.assertFalse(k.supercoercive)
        self.assertTrue(k.interior_bounded)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            kernel_boltzmann_shannon().value(-0.1)
        with pytest.raises(DomainError):
            kernel_fermi_dirac().value(1.5)
        # derivatives only exist on U
        with pytest.raises(DomainError):
            kernel_boltzmann_shannon().gradient(0.0)
        with pytest.raises(DomainError):
            kernel_fermi_dirac().hessian(1.0)

    def test_vectorized(self):
        k = kernel_fermi_dirac()
        values = k.gradient(np.array([0.25, 0.5, 0.75]))
        assert values.shape == (3,)
        assert values[0] == pytest.approx(-values[2])

    def test_longdouble_preserved(self):
        k = kernel_boltzmann_shannon()
        t = np.array([0.5, 2.0], dtype=np.longdouble)
        assert k.value(t).dtype == np.longdouble
        assert k.gradient(t).dtype == np.longdouble

    def test_read_only(self):
        k = kernel_energy()
        with pytest.raises(AttributeError) as excinfo:
            k.name = 'other'
        assert str(excinfo.value) == "Can't edit attribute 'name'"


def test_kernel_in_interior():
    assert kernel_in_interior(kernel_energy(), [5, -5])
    assert not kernel_in_interior(kernel_fermi_dirac(), [0.0])
    assert kernel_in_interior(kernel_boltzmann_shannon(), [0.1, 2.0])
    assert not kernel_in_interior(kernel_boltzmann_shannon(), [0.1, -2.0])


def test_round_trip(kernel):
    t = interior_grid(kernel)
    back = kernel.conjugate_gradient(kernel.gradient(t))
    assert np.all(np.abs(back - t) <= 1e-12 * np.maximum(1.0, np.abs(t)))


def test_curvature_positive(kernel):
    assert np.all(kernel.hessian(interior_grid(kernel)) > 0)


def test_fenchel_equality(kernel):
    t = interior_grid(kernel)
    t = t[np.abs(t) < 50]
    lhs = kernel.conjugate(kernel.gradient(t))
    rhs = t * kernel.gradient(t) - kernel.value(t)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_finite_difference_gradient(kernel):
    h = 1e-5
    if kernel.name == 'energy':
        t = np.linspace(-3, 3, 25)
    elif kernel.name == 'bs':
        t = np.linspace(0.05, 3, 25)
    else:
        t = np.linspace(0.05, 0.95, 25)
    fd = (kernel.value(t + h) - kernel.value(t - h)) / (2 * h)
    assert np.max(np.abs(kernel.gradient(t) - fd)) <= 1e-6


def test_divergence_matches_definition(kernel):
    x = interior_grid(kernel)[::7]
    y = x[::-1]
    direct = kernel.value(x) - kernel.value(y) - kernel.gradient(y) * (x - y)
    assert np.allclose(kernel.divergence(x, y), direct, rtol=1e-9,
                       atol=1e-9)


class TestGetKernel(object):

    @pytest.mark.parametrize('name,expected', [
        ('energy', 'energy'), ('bs', 'bs'), ('FD', 'fd'),
        ('boltzmann-shannon', 'bs'), ('fermi_dirac', 'fd'), ('kl', 'bs'),
    ])
    def test_names(self, name, expected):
        assert get_kernel(name).name == expected

    def test_passthrough(self):
        k = kernel_energy()
        assert get_kernel(k) is k

    def test_unknown(self):
        with pytest.raises(ParseError) as err:
            get_kernel('burg')
        assert 'burg' in str(err.value)


class TestCustomKernel(object):

    def test_flagged_and_logged(self):
        with mock.patch('bregmoreau.legendre.LOG') as log:
            k = custom_kernel('quartic', lambda t: t ** 4 / 4,
                              lambda t: t ** 3, lambda t: 3 * t ** 2,
                              lambda s: 0.75 * np.abs(s) ** (4 / 3),
                              lambda s: np.cbrt(s),
                              assumptions_verified=True)
        assert not k.assumptions_verified
        log.warning.assert_called_once()
        # generic divergence from value and gradient
        assert k.divergence(2.0, 1.0) == pytest.approx(4 - 0.25 - 1.0)

    def test_empty_interior(self):
        with pytest.raises(DomainError):
            LegendreKernel('empty', None, None, None, None, None,
                           dom_lower=1.0, dom_upper=1.0)
