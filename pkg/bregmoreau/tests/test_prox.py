import math
from unittest import TestCase

import mock
import numpy as np
import pytest
from scipy.optimize import brentq

from bregmoreau.bregman import CoercivityCertificate
from bregmoreau.exceptions import (BregmoreauError, DomainError,
                                   InvalidParamError, SetupError)
from bregmoreau.legendre import (custom_kernel, kernel_boltzmann_shannon,
                                 kernel_energy, kernel_fermi_dirac)
from bregmoreau.objective import (objective_abs_deviation,
                                  objective_dead_zone,
                                  objective_indicator_interval,
                                  objective_quadratic, parse_objective)
from bregmoreau.oracle import oracle_prox
from bregmoreau.prox import (BRANCH_PRIORITY, _Coordinate, branch_points,
                             envelope_gradient,
                             is_minimizer, left_prox,
                             left_prox_certificate,
                             left_prox_closed_form_abs, proximal_point_solve,
                             right_prox, right_prox_certificate,
                             right_prox_closed_form_abs, solve_prox)

from .conftest import INTERIOR_POINTS


ABS = objective_abs_deviation(0.5)


class TestLeftProxExamples(TestCase):

    def test_energy(self):
        k = kernel_energy()
        self.assertEqual(left_prox(k, ABS, 1, [2.0]).point.tolist(), [1.0])
        self.assertEqual(left_prox(k, ABS, 1, [0.0]).point.tolist(), [0.5])

    def test_boltzmann_shannon(self):
        outcome = left_prox(kernel_boltzmann_shannon(), ABS, 1, [0.1])
        self.assertAlmostEqual(outcome.point[0], 0.1 * math.e, places=12)
        self.assertEqual(outcome.branch, 'closed_form')
        self.assertEqual(outcome.iterations, 0)

    def test_fermi_dirac(self):
        outcome = left_prox(kernel_fermi_dirac(), ABS, 1, [0.1])
        expected = 0.1 * math.e / (0.1 * math.e + 0.9)
        self.assertAlmostEqual(outcome.point[0], expected, places=12)
        self.assertAlmostEqual(outcome.point[0], 0.2319694, places=6)

    def test_envelope_value(self):
        outcome = left_prox(kernel_energy(), ABS, 1, [0.0])
        self.assertEqual(outcome.envelope_value, 0.125)
        self.assertEqual(outcome.side, 'left')
        self.assertEqual(outcome.certificate, 'coercive')
        self.assertEqual(outcome.as_dict()['point'], [0.5])


class TestRightProxExamples(TestCase):

    def test_energy(self):
        self.assertEqual(
            right_prox(kernel_energy(), ABS, 1, [2.0]).point.tolist(), [1.0])

    def test_boltzmann_shannon(self):
        self.assertEqual(
            right_prox(kernel_boltzmann_shannon(), ABS, 1,
                       [3.0]).point.tolist(), [1.5])

    def test_fermi_dirac(self):
        point = right_prox(kernel_fermi_dirac(), ABS, 1, [0.9]).point[0]
        expected = (2 - math.sqrt(4 - 3.6)) / 2
        self.assertAlmostEqual(point, expected, places=12)
        self.assertAlmostEqual(point, 0.6837722, places=7)


class TestClosedForms(object):

    def test_left_examples(self):
        assert left_prox_closed_form_abs('energy', 0.5, 1, -1) == 0.0
        assert left_prox_closed_form_abs('bs', 0.5, 1, 5) == \
            pytest.approx(5 / math.e, abs=1e-12)
        assert left_prox_closed_form_abs('fd', 0.5, 1, 0.5) == 0.5

    def test_no_closed_form(self):
        assert left_prox_closed_form_abs('burg', 0.5, 1, 1) is None
        assert left_prox_closed_form_abs('bs', -1, 1, 1) is None
        assert right_prox_closed_form_abs('fd', 1.5, 1, 0.5) is None

    def test_vectorized(self):
        y = np.array([0.1, 0.5, 3.0])
        out = left_prox_closed_form_abs('bs', 0.5, 1, y)
        assert out.shape == (3,)
        assert out[1] == 0.5

    def test_fermi_dirac_right_at_boundary(self):
        # gamma > 1 moves the prox of x = 0 into U
        assert right_prox_closed_form_abs('fd', 0.5, 1.5, 0.0) == \
            pytest.approx(1 / 3, abs=1e-15)
        assert right_prox_closed_form_abs('fd', 0.5, 0.5, 0.0) == 0.0

    @pytest.mark.parametrize('c', [0.2, 0.5, 0.7])
    @pytest.mark.parametrize('gamma', [0.1, 0.5, 1.0, 3.0])
    def test_general_center_matches_numeric(self, kernel, c, gamma):
        th = objective_abs_deviation(c)
        for side in ('left', 'right'):
            for base in INTERIOR_POINTS[kernel.name]:
                closed = solve_prox(kernel, th, gamma, [base], side=side)
                numeric = solve_prox(kernel, th, gamma, [base], side=side,
                                     closed_form=False)
                assert closed.point[0] == pytest.approx(
                    numeric.point[0], abs=1e-9)
                assert closed.envelope_value == pytest.approx(
                    numeric.envelope_value, abs=1e-9)


class TestNumericBranches(object):

    def test_kink(self):
        outcome = left_prox(kernel_energy(), ABS, 1, [0.2], closed_form=False)
        assert outcome.point.tolist() == [0.5]
        assert outcome.branch == 'kink'
        assert outcome.residual == 0.0

    def test_bisection(self):
        outcome = left_prox(kernel_boltzmann_shannon(), ABS, 1, [5.0],
                            closed_form=False)
        assert outcome.branch == 'bisection'
        assert outcome.point[0] == pytest.approx(5 / math.e, abs=1e-12)
        assert outcome.iterations > 0
        assert outcome.residual <= 1e-10

    def test_branch_priority(self):
        th = parse_objective('abs:0.5,quad:1,0')
        outcome = left_prox(kernel_energy(), th, 1, [0.2, 2.0])
        assert outcome.branches == ('closed_form', 'bisection')
        assert outcome.branch == 'bisection'
        assert BRANCH_PRIORITY.index('kink') < \
            BRANCH_PRIORITY.index('newton_fallback')

    @mock.patch('bregmoreau.prox.brent_root')
    def test_newton_fallback_tag(self, root_mock):
        root_mock.side_effect = lambda func, a, b, max_iter: (
            brentq(func, min(a, b), max(a, b), xtol=1e-15), 4,
            'newton_fallback')
        outcome = left_prox(kernel_energy(), objective_quadratic(1, 0), 1,
                            [2.0])
        assert outcome.branch == 'newton_fallback'
        assert outcome.point[0] == pytest.approx(1.0)

    def test_base_already_solves(self):
        outcome = left_prox(kernel_fermi_dirac(),
                            objective_indicator_interval(0.2, 0.8), 3,
                            [0.4])
        assert outcome.point.tolist() == [0.4]
        assert outcome.envelope_value == 0.0

    def test_residual_warning(self):
        with mock.patch.object(_Coordinate, 'residual', return_value=1.0), \
                mock.patch('bregmoreau.prox.LOG') as log:
            outcome = left_prox(kernel_energy(), objective_quadratic(1, 0), 1,
                                [2.0])
        assert log.warning.called
        assert outcome.residual == 1.0


class TestOtherObjectives(object):

    def test_indicator_is_clamp_for_energy(self):
        th = objective_indicator_interval(0, 1)
        k = kernel_energy()
        for y, expected in ((-2.0, 0.0), (0.3, 0.3), (4.0, 1.0)):
            assert left_prox(k, th, 2.5, [y]).point[0] == expected
            assert right_prox(k, th, 2.5, [y]).point[0] == expected

    def test_indicator_boltzmann_shannon(self):
        th = objective_indicator_interval(1, 2)
        k = kernel_boltzmann_shannon()
        assert left_prox(k, th, 1, [3.0]).point[0] == 2.0
        assert left_prox(k, th, 1, [0.5]).point[0] == 1.0
        assert right_prox(k, th, 1, [0.5]).point[0] == 1.0

    def test_quadratic_energy(self):
        # (y + gamma a c) / (1 + gamma a)
        th = objective_quadratic(2.0, 1.0)
        point = left_prox(kernel_energy(), th, 0.5, [3.0]).point[0]
        assert point == pytest.approx((3.0 + 1.0) / 2.0, abs=1e-12)

    def test_dead_zone(self):
        th = objective_dead_zone(0, 1)
        k = kernel_energy()
        assert left_prox(k, th, 1, [5.0]).point[0] == pytest.approx(4.0)
        assert left_prox(k, th, 1, [1.5]).point[0] == 1.0
        assert left_prox(k, th, 1, [0.5]).point[0] == 0.5

    def test_half_line_indicator(self):
        th = parse_objective('ind:-inf,0.25')
        point = left_prox(kernel_fermi_dirac(), th, 1, [0.9]).point[0]
        assert point == 0.25

    def test_multi_dimensional(self):
        th = parse_objective('abs:0.5,ind:0,1')
        outcome = left_prox(kernel_energy(), th, 1, [2.0, 3.0])
        assert outcome.point.tolist() == [1.0, 1.0]
        assert outcome.envelope_value == pytest.approx(0.5 + 0.5 + 2.0)

    @pytest.mark.parametrize('side', ['left', 'right'])
    @pytest.mark.parametrize('text', ['quad:3,0.4', 'dz:0.3,0.6',
                                      'ind:0.2,0.7', 'abs:0.5'])
    def test_matches_oracle(self, kernel, side, text):
        th = parse_objective(text)
        for gamma in (0.2, 1.0, 4.0):
            for base in INTERIOR_POINTS[kernel.name]:
                outcome = solve_prox(kernel, th, gamma, [base], side=side,
                                     closed_form=False)
                point, value = oracle_prox(kernel, th, gamma, [base],
                                           side=side)
                assert outcome.point[0] == pytest.approx(point[0], abs=1e-8)
                assert outcome.envelope_value == pytest.approx(value,
                                                               abs=1e-8)


class TestErrors(object):

    @pytest.mark.parametrize('gamma', [0, -1, float('inf')])
    def test_bad_gamma(self, gamma):
        with pytest.raises(InvalidParamError):
            left_prox(kernel_energy(), ABS, gamma, [1.0])

    def test_outside_interior(self):
        with pytest.raises(DomainError):
            left_prox(kernel_boltzmann_shannon(), ABS, 1, [0.0])
        with pytest.raises(DomainError):
            right_prox(kernel_fermi_dirac(), ABS, 1, [1.0])

    def test_empty_intersection(self):
        with pytest.raises(SetupError):
            left_prox(kernel_boltzmann_shannon(),
                      objective_indicator_interval(-3, -1), 1, [1.0])

    def test_bad_side(self):
        with pytest.raises(InvalidParamError):
            solve_prox(kernel_energy(), ABS, 1, [1.0], side='middle')

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidParamError):
            left_prox(kernel_energy(), parse_objective('abs:0,abs:1'), 1,
                      [1.0, 2.0, 3.0])


class TestRightBoundary(object):

    def test_boltzmann_shannon_zero(self):
        k = kernel_boltzmann_shannon()
        outcome = right_prox(k, ABS, 0.5, [0.0], allow_boundary=True)
        assert outcome.point.tolist() == [0.0]
        assert outcome.branch == 'boundary'
        assert outcome.envelope_value == 0.5

    def test_boltzmann_shannon_zero_numeric(self):
        k = kernel_boltzmann_shannon()
        outcome = right_prox(k, ABS, 0.5, [0.0], allow_boundary=True,
                             closed_form=False)
        assert outcome.point.tolist() == [0.0]
        assert outcome.branch == 'boundary'

    def test_leaves_boundary(self):
        k = kernel_boltzmann_shannon()
        outcome = right_prox(k, ABS, 2.0, [0.0], allow_boundary=True)
        assert outcome.point.tolist() == [0.5]
        # |0.5 - 0.5| + D(0, 0.5) / 2
        assert outcome.envelope_value == pytest.approx(0.25)

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            right_prox(kernel_boltzmann_shannon(), ABS, 1, [-1.0],
                       allow_boundary=True)


def test_branch_points():
    k = kernel_energy()
    assert branch_points(k, ABS, 1) == [-0.5, 1.5]
    assert branch_points(k, ABS, 1, side='right') == [-0.5, 1.5]
    bs = branch_points(kernel_boltzmann_shannon(), ABS, 1)
    assert bs == pytest.approx([0.5 / math.e, 0.5 * math.e])
    right = branch_points(kernel_boltzmann_shannon(), ABS, 0.5, side='right')
    assert right == pytest.approx([0.25, 0.75])


def test_envelope_gradient():
    k = kernel_energy()
    gradient = envelope_gradient(k, 1.0, [2.0], [1.0], 'left')
    assert gradient.tolist() == [1.0]
    gradient = envelope_gradient(k, 2.0, [2.0], [1.0], 'right')
    assert gradient.tolist() == [0.5]


class TestContinuity(object):
    """ prox(y + s 10^-n) -> prox(y), also across kink branch points. """

    STEPS = [10.0 ** -n for n in range(2, 9)]

    def _distances(self, k, th, gamma, base, side, closed_form):
        limit = solve_prox(k, th, gamma, [base], side=side,
                           closed_form=closed_form).point[0]
        distances = {}
        for sign in (1, -1):
            distances[sign] = [
                abs(solve_prox(k, th, gamma, [base + sign * step], side=side,
                               closed_form=closed_form).point[0] - limit)
                for step in self.STEPS]
        return distances

    def _check(self, distances):
        for sequence in distances.values():
            assert sequence[-1] <= 1e-6
            for nearer, farther in zip(sequence[1:], sequence):
                assert nearer <= farther + 1e-9

    @pytest.mark.parametrize('side', ['left', 'right'])
    @pytest.mark.parametrize('closed_form', [True, False])
    def test_across_branch_points(self, kernel, side, closed_form):
        gamma = 0.5
        bases = branch_points(kernel, ABS, gamma, side=side)
        assert bases
        for base in bases:
            self._check(self._distances(kernel, ABS, gamma, base, side,
                                        closed_form))

    @pytest.mark.parametrize('side', ['left', 'right'])
    def test_dead_zone_edges(self, kernel, side):
        th = objective_dead_zone(0.3, 0.6)
        gamma = 0.25
        for base in branch_points(kernel, th, gamma, side=side) + [0.45]:
            if not kernel.interior_mask(base - 0.01) or \
                    not kernel.interior_mask(base + 0.01):
                continue
            self._check(self._distances(kernel, th, gamma, base, side,
                                        True))


class TestCertificates(object):

    @pytest.mark.parametrize('text', ['abs:0.5', 'quad:2,0.3', 'ind:0.2,0.6'])
    def test_left(self, kernel, text):
        th = parse_objective(text)
        for base in INTERIOR_POINTS[kernel.name][::2]:
            assert left_prox_certificate(kernel, th, 0.7, [base]) <= 1e-9

    @pytest.mark.parametrize('text', ['abs:0.5', 'quad:2,0.3', 'ind:0.2,0.6'])
    def test_right(self, kernel, text):
        th = parse_objective(text)
        for base in INTERIOR_POINTS[kernel.name][::2]:
            assert right_prox_certificate(kernel, th, 0.7, [base]) <= 1e-9

    def test_detects_wrong_point(self):
        k = kernel_energy()
        assert left_prox_certificate(k, ABS, 1, [2.0], x=[1.6]) > 1e-3


class TestProximalPoint(TestCase):

    def test_energy(self):
        result = proximal_point_solve(kernel_energy(), ABS, 1, [10.0])
        self.assertTrue(result.converged)
        self.assertEqual(result.point.tolist(), [0.5])
        self.assertEqual(result.stationarity, 0.0)
        self.assertEqual(result.trajectory[1].tolist(), [9.0])

    def test_boltzmann_shannon(self):
        result = proximal_point_solve(kernel_boltzmann_shannon(), ABS, 1,
                                      [0.01])
        self.assertTrue(result.converged)
        self.assertAlmostEqual(result.point[0], 0.5, places=12)

    def test_right_side(self):
        result = proximal_point_solve(kernel_fermi_dirac(), ABS, 0.5, [0.95],
                                      side='right')
        self.assertTrue(result.converged)
        self.assertAlmostEqual(result.point[0], 0.5, places=12)

    def test_fixed_point(self):
        result = proximal_point_solve(kernel_fermi_dirac(), ABS, 1, [0.5])
        self.assertEqual(result.iterations, 1)
        self.assertEqual(result.point.tolist(), [0.5])

    def test_max_iter(self):
        result = proximal_point_solve(kernel_energy(), ABS, 0.1, [100.0],
                                      max_iter=3)
        self.assertFalse(result.converged)
        self.assertEqual(result.iterations, 3)
        self.assertEqual(len(result.trajectory), 4)

    def test_start_outside(self):
        with pytest.raises(DomainError):
            proximal_point_solve(kernel_boltzmann_shannon(), ABS, 1, [-1.0])

    @mock.patch('bregmoreau.prox.coercivity_certificate')
    def test_unknown_certificate_warns(self, certificate_mock):
        certificate_mock.return_value = CoercivityCertificate('left')
        with mock.patch('bregmoreau.prox.LOG') as log:
            result = proximal_point_solve(kernel_energy(), ABS, 1, [2.0])
        log.warning.assert_called()
        self.assertEqual(result.certificate, 'unknown')

    @mock.patch('bregmoreau.prox.solve_prox')
    def test_iterate_leaves_interior(self, solve_mock):
        solve_mock.return_value = mock.Mock(point=np.array([-1.0]))
        with pytest.raises(BregmoreauError):
            proximal_point_solve(kernel_boltzmann_shannon(), ABS, 1, [2.0])


class TestIsMinimizer(object):

    @pytest.mark.parametrize('side', ['left', 'right'])
    def test_argmin(self, kernel, side):
        report = is_minimizer(kernel, ABS, 0.8, [0.5], side=side)
        assert report.consistent
        assert all(report.flags)

    @pytest.mark.parametrize('side', ['left', 'right'])
    def test_not_argmin(self, kernel, side):
        report = is_minimizer(kernel, ABS, 0.8, [0.3], side=side)
        assert report.consistent
        assert not any(report.flags)


class TestMonotoneStructure(object):

    def test_left_prox_of_conjugate_gradient(self, kernel):
        s = np.linspace(-4, 4, 81)
        points = [left_prox(kernel, ABS, 0.6,
                            [float(kernel.conjugate_gradient(v))]).point[0]
                  for v in s]
        assert np.all(np.diff(points) >= -1e-14)

    def test_gradient_of_right_prox(self, kernel):
        grid = {'energy': np.linspace(-3, 3, 61),
                'bs': np.linspace(0.05, 3, 60),
                'fd': np.linspace(0.02, 0.98, 49)}[kernel.name]
        values = [float(kernel.gradient(
            right_prox(kernel, ABS, 0.6, [x]).point[0])) for x in grid]
        assert np.all(np.diff(values) >= -1e-12)


def test_custom_kernel_uses_numeric_path():
    k = custom_kernel('energy_copy', lambda t: 0.5 * t * t, lambda t: t * 1.0,
                      lambda t: np.ones_like(np.asarray(t, dtype=float)),
                      lambda s: 0.5 * s * s, lambda s: s * 1.0,
                      supercoercive=True)
    outcome = left_prox(k, ABS, 1, [2.0])
    assert outcome.branch == 'bisection'
    assert outcome.point[0] == pytest.approx(1.0, abs=1e-12)
