from dataclasses import replace
from unittest import TestCase

import mock
import numpy as np
import pytest

from bregmoreau.asymptotics import (LimitReport, default_gammas,
                                    gamma_sweep, limit_report,
                                    projection_onto_argmin)
from bregmoreau.exceptions import (DomainError, InvalidParamError,
                                   SolverError)
from bregmoreau.legendre import (kernel_boltzmann_shannon, kernel_energy,
                                 kernel_fermi_dirac)
from bregmoreau.objective import objective_abs_deviation, parse_objective
from bregmoreau.prox import solve_prox
from bregmoreau.settings import get_settings

from .conftest import INTERIOR_POINTS


ABS = objective_abs_deviation(0.5)

CHECKS = (
    'envelope_nonincreasing', 'theta_prox_nonincreasing',
    'divergence_nondecreasing', 'envelope_to_theta', 'envelope_to_inf',
    'prox_to_point', 'prox_to_projection', 'scaled_term_vanishes',
)


class TestGammaSweep(TestCase):

    def test_energy_example(self):
        records = gamma_sweep(kernel_energy(), ABS, [2.0],
                              gammas=[0.1, 1, 10])
        self.assertEqual([r.gamma for r in records], [0.1, 1.0, 10.0])
        self.assertAlmostEqual(records[0].prox[0], 1.9, places=14)
        self.assertEqual(records[1].prox.tolist(), [1.0])
        self.assertEqual(records[2].prox.tolist(), [0.5])
        self.assertEqual(records[2].argmin_projection.tolist(), [0.5])
        self.assertEqual(records[0].theta_at_point, 1.5)
        self.assertEqual(records[0].inf_theta, 0.0)

    def test_envelope_identity(self):
        records = gamma_sweep(kernel_boltzmann_shannon(), ABS, [0.1, 2.0],
                              side='right')
        for r in records:
            self.assertLessEqual(
                abs(r.envelope - r.theta_at_prox - r.scaled_term), 1e-12)
            self.assertAlmostEqual(r.scaled_term, r.bregman_term / r.gamma)

    def test_as_dict(self):
        record = gamma_sweep(kernel_energy(), ABS, [2.0], gammas=[1])[0]
        self.assertEqual(record.as_dict(), {
            'gamma': 1.0, 'side': 'left', 'point': [2.0], 'prox': [1.0],
            'theta_at_prox': 0.5, 'bregman_term': 0.5, 'scaled_term': 0.5,
            'envelope': 1.0, 'branch': 'closed_form'})

    def test_default_gammas(self):
        gammas = default_gammas()
        self.assertEqual(len(gammas), 25)
        self.assertAlmostEqual(gammas[0], 1e-6)
        self.assertAlmostEqual(gammas[-1], 1e6)
        self.assertTrue(np.all(np.diff(gammas) > 0))

    def test_parallel_matches_serial(self):
        k = kernel_fermi_dirac()
        serial = gamma_sweep(k, ABS, [0.9], jobs=1)
        parallel = gamma_sweep(k, ABS, [0.9], jobs=4)
        self.assertEqual([r.prox.tolist() for r in serial],
                         [r.prox.tolist() for r in parallel])
        self.assertEqual([r.gamma for r in serial],
                         [r.gamma for r in parallel])

    def test_jobs_from_settings(self):
        records = gamma_sweep(kernel_energy(), ABS, [2.0],
                              settings=get_settings(jobs=3))
        self.assertEqual(len(records), 25)


class TestSweepValidation(object):

    @pytest.mark.parametrize('gammas', [[], [1, 0.5], [0, 1], [-1, 1],
                                        [1, 1]])
    def test_bad_gammas(self, gammas):
        with pytest.raises(InvalidParamError):
            gamma_sweep(kernel_energy(), ABS, [1.0], gammas=gammas)

    def test_bad_side(self):
        with pytest.raises(InvalidParamError):
            gamma_sweep(kernel_energy(), ABS, [1.0], side='orthogonal')

    def test_point_outside(self):
        with pytest.raises(DomainError):
            gamma_sweep(kernel_fermi_dirac(), ABS, [1.0])


class TestSweepFailures(object):

    @staticmethod
    def failing_at_one(k, th, gamma, point, **kwargs):
        if gamma == 1.0:
            raise SolverError("no bracket", certificate='coercive')
        return solve_prox(k, th, gamma, point, **kwargs)

    def test_raises_with_gamma(self):
        with mock.patch('bregmoreau.asymptotics.solve_prox',
                        side_effect=self.failing_at_one):
            with pytest.raises(SolverError) as err:
                gamma_sweep(kernel_energy(), ABS, [2.0],
                            gammas=[0.5, 1.0, 2.0])
        assert err.value.gamma == 1.0
        assert err.value.certificate == 'coercive'
        assert str(err.value) == 'gamma=1: no bracket'

    def test_collects_failures(self):
        failures = []
        with mock.patch('bregmoreau.asymptotics.solve_prox',
                        side_effect=self.failing_at_one):
            records = gamma_sweep(kernel_energy(), ABS, [2.0],
                                  gammas=[0.5, 1.0, 2.0], failures=failures,
                                  jobs=2)
        assert [r.gamma for r in records] == [0.5, 2.0]
        assert len(failures) == 1
        assert failures[0][0] == 1.0
        assert isinstance(failures[0][1], SolverError)


@pytest.mark.parametrize('side', ['left', 'right'])
def test_small_gamma_prox_near_point(kernel, side):
    for point in INTERIOR_POINTS[kernel.name]:
        record = gamma_sweep(kernel, ABS, [point], side=side,
                             gammas=[1e-6])[0]
        assert abs(record.prox[0] - point) <= 1e-4


@pytest.mark.parametrize('side', ['left', 'right'])
def test_limit_report_passes(kernel, side):
    for point in INTERIOR_POINTS[kernel.name]:
        report = limit_report(gamma_sweep(kernel, ABS, [point], side=side))
        assert report.passed, report.failures()
        assert tuple(c.name for c in report.checks) == CHECKS


def test_constant_objective():
    th = parse_objective('quad:0,0')
    k = kernel_boltzmann_shannon()
    records = gamma_sweep(k, th, [0.7, 2.0])
    for r in records:
        assert r.envelope == 0.0
        assert r.prox.tolist() == [0.7, 2.0]
    assert limit_report(records).passed


def test_boltzmann_shannon_envelope_span():
    gammas = np.logspace(-3, 3, 31)
    records = gamma_sweep(kernel_boltzmann_shannon(), ABS, [0.1],
                          gammas=gammas)
    envelope = [r.envelope for r in records]
    assert envelope[0] == pytest.approx(0.4, abs=1e-3)
    assert envelope[-1] == pytest.approx(0.0, abs=1e-3)
    assert np.all(np.diff(envelope) <= 1e-10)


def test_scaled_term_not_monotone():
    # the divergence term grows while its 1/gamma scaling first rises
    # then falls
    records = gamma_sweep(kernel_energy(), ABS, [2.0],
                          gammas=np.logspace(-2, 1, 61))
    scaled = np.array([r.scaled_term for r in records])
    assert np.any(np.diff(scaled) > 0) and np.any(np.diff(scaled) < 0)
    assert limit_report(records).check(
        'divergence_nondecreasing').passed


@pytest.mark.parametrize('text,point,projection', [
    ('dz:0.2,0.6', 0.9, 0.6),
    ('dz:0.2,0.6', 0.4, 0.4),
    ('ind:0.3,0.7', 0.5, 0.5),
])
def test_non_singleton_argmin(text, point, projection):
    th = parse_objective(text)
    k = kernel_fermi_dirac()
    records = gamma_sweep(k, th, [point])
    assert records[-1].prox[0] == pytest.approx(projection, abs=1e-6)
    assert limit_report(records).passed


class TestProjectionOntoArgmin(object):

    def test_singleton(self):
        assert projection_onto_argmin(kernel_energy(), ABS,
                                      [3.0]).tolist() == [0.5]

    def test_interval(self):
        th = parse_objective('ind:1,2')
        k = kernel_boltzmann_shannon()
        assert projection_onto_argmin(k, th, [3.0]).tolist() == [2.0]
        assert projection_onto_argmin(k, th, [1.5]).tolist() == [1.5]

    def test_clipped_to_domain(self):
        th = parse_objective('dz:-1,0.2')
        k = kernel_fermi_dirac()
        assert projection_onto_argmin(k, th, [0.1]).tolist() == [0.1]
        assert projection_onto_argmin(k, th, [0.9]).tolist() == [0.2]


class TestLimitReport(object):

    def records(self):
        return gamma_sweep(kernel_energy(), ABS, [2.0])

    def test_detects_increase(self):
        records = self.records()
        records[3] = replace(records[3], envelope=records[3].envelope + 1)
        report = limit_report(records)
        assert not report.passed
        names = [check.name for check in report.failures()]
        assert names == ['envelope_nonincreasing']
        assert report.check('envelope_nonincreasing').gap > 0.1

    def test_limits_not_reached(self):
        records = gamma_sweep(kernel_energy(), ABS, [2.0],
                              gammas=[0.5, 1.0, 2.0])
        report = limit_report(records)
        check = report.check('envelope_to_theta')
        assert not check.passed
        assert check.gap == pytest.approx(0.25)
        assert report.check('envelope_nonincreasing').passed

    def test_growing_gap_fails(self):
        records = self.records()
        records[0] = replace(records[0], envelope=records[0].envelope - 1e-5)
        check = limit_report(records).check('envelope_to_theta')
        assert not check.passed
        assert 'not decreasing' in check.detail

    def test_unknown_check(self):
        report = LimitReport(())
        assert report.passed
        with pytest.raises(KeyError):
            report.check('envelope_to_theta')

    def test_empty(self):
        with pytest.raises(InvalidParamError):
            limit_report([])

    def test_mixed_sweeps(self):
        left = gamma_sweep(kernel_energy(), ABS, [2.0], gammas=[1.0])
        right = gamma_sweep(kernel_energy(), ABS, [2.0], side='right',
                            gammas=[2.0])
        with pytest.raises(InvalidParamError):
            limit_report(left + right)

    def test_single_sample(self):
        record = gamma_sweep(kernel_energy(), ABS, [0.5], gammas=[1e-6])
        report = limit_report(record)
        assert report.check('envelope_nonincreasing').detail == \
            'single sample'
