"""
Gamma sweeps and limit diagnostics.

A sweep records, for each gamma, the prox point, theta(prox), the Bregman
term and the envelope. `limit_report` then checks the monotonicity of the
envelope, theta(prox) and D_f in gamma, and the limits for small and large
gamma: the envelope tends to theta(point) and to inf theta, the prox to the
point and to its projection onto argmin theta.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from bregmoreau.exceptions import InvalidParamError, SolverError
from bregmoreau.helpers import as_point
from bregmoreau.prox import solve_prox
from bregmoreau.settings import LOG, _default_settings


MONOTONE_SLACK = 1e-10
LIMIT_TOLERANCE = 1e-4


@dataclass(frozen=True)
class SweepRecord:
    gamma: float
    side: str
    point: np.ndarray
    prox: np.ndarray
    theta_at_prox: float
    bregman_term: float
    scaled_term: float
    envelope: float
    theta_at_point: float = None
    inf_theta: float = None
    argmin_projection: np.ndarray = field(default=None, repr=False)
    branch: str = None

    def as_dict(self):
        return {
            'gamma': self.gamma,
            'side': self.side,
            'point': self.point.tolist(),
            'prox': self.prox.tolist(),
            'theta_at_prox': self.theta_at_prox,
            'bregman_term': self.bregman_term,
            'scaled_term': self.scaled_term,
            'envelope': self.envelope,
            'branch': self.branch,
        }


@dataclass(frozen=True)
class LimitCheck:
    name: str
    passed: bool
    gap: float
    detail: str = ''


@dataclass(frozen=True)
class LimitReport:
    checks: tuple

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def check(self, name):
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def failures(self):
        return [check for check in self.checks if not check.passed]


def default_gammas(count=25, lower=1e-6, upper=1e6):
    """
    >>> default_gammas(count=3).tolist()
    [1e-06, 1.0, 1000000.0]
    """
    return np.logspace(np.log10(lower), np.log10(upper), count)


def projection_onto_argmin(k, th, point):
    """
    Bregman projection of `point` onto argmin theta. Coordinate-wise the
    argmin is an interval, where left, right and orthogonal projections
    all reduce to clamping.
    """
    point = as_point(point)
    intervals = th.known_argmin(len(point))
    lower = np.array([max(lo, k.dom_lower) for lo, hi in intervals])
    upper = np.array([min(hi, k.dom_upper) for lo, hi in intervals])
    return np.clip(point, lower, upper)


def _record(k, th, point, side, gamma, settings, extras):
    try:
        outcome = solve_prox(k, th, gamma, point, side=side,
                             settings=settings)
    except SolverError as exc:
        raise SolverError("gamma=%g: %s" % (gamma, exc),
                          certificate=exc.certificate, gamma=gamma)
    prox = outcome.point
    theta_at_prox = th.value(prox)
    if side == 'left':
        term = float(np.sum(k.divergence(prox, point)))
    else:
        term = float(np.sum(k.divergence(point, prox)))
    term = max(term, 0.0)
    scaled = term / gamma
    return SweepRecord(
        gamma=float(gamma), side=side, point=point, prox=prox,
        theta_at_prox=theta_at_prox, bregman_term=term, scaled_term=scaled,
        envelope=theta_at_prox + scaled, branch=outcome.branch, **extras)


def gamma_sweep(k, th, point, side='left', gammas=None, jobs=None,
                failures=None, settings=None):
    """
    One SweepRecord per gamma, in the order of `gammas` (ascending).

    :param failures: when a list, solver failures are appended to it as
        (gamma, error) pairs and the gamma is skipped instead of raising

    >>> from bregmoreau.legendre import kernel_energy
    >>> from bregmoreau.objective import objective_abs_deviation
    >>> records = gamma_sweep(kernel_energy(), objective_abs_deviation(0.5),
    ...                       [2.0], gammas=[0.1, 1, 10])
    >>> [round(float(r.prox[0]), 12) for r in records]
    [1.9, 1.0, 0.5]
    """
    settings = _default_settings(settings)
    jobs = settings.jobs if jobs is None else int(jobs)
    if side not in ('left', 'right'):
        raise InvalidParamError("side must be 'left' or 'right'")
    gammas = default_gammas() if gammas is None else np.asarray(
        gammas, dtype=float)
    if gammas.size == 0 or np.any(gammas <= 0) \
            or np.any(np.diff(gammas) <= 0):
        raise InvalidParamError(
            "gammas must be a nonempty ascending list of positive values")
    point = k.check_point(as_point(point), 'point')
    extras = {
        'theta_at_point': th.value(point),
        'inf_theta': th.inf_value(len(point)),
        'argmin_projection': projection_onto_argmin(k, th, point),
    }

    def run(gamma):
        try:
            return _record(k, th, point, side, gamma, settings, extras)
        except SolverError as exc:
            if failures is None:
                raise
            return exc

    LOG.info("Sweeping %d gammas on the %s side at %r", gammas.size, side,
             point.tolist())
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(run, gammas))
    else:
        results = [run(gamma) for gamma in gammas]
    records = []
    for gamma, result in zip(gammas, results):
        if isinstance(result, SolverError):
            LOG.warning("Sweep failed at gamma=%g: %s", gamma, result)
            failures.append((float(gamma), result))
        else:
            records.append(result)
    return records


def _monotone_check(name, values, direction, slack):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return LimitCheck(name, True, 0.0, 'single sample')
    steps = np.diff(values) * direction
    scale = np.maximum(1.0, np.abs(values[1:]))
    worst = float(np.max(steps / scale))
    return LimitCheck(name, worst <= slack, max(worst, 0.0),
                      'largest relative %s step %.3g' % (
                          'increase' if direction > 0 else 'decrease', worst))


def _limit_check(name, gaps, tolerance, slack):
    """
    gaps ordered from the extreme gamma inward: the limit holds when the
    extreme gap is below `tolerance` and the gaps do not grow toward it.
    """
    gaps = [float(g) for g in gaps[:3]]
    trend = all(gaps[i] <= gaps[i + 1] + slack * max(1.0, gaps[i + 1])
                for i in range(len(gaps) - 1))
    passed = gaps[0] <= tolerance and trend
    detail = 'gap %.3g%s' % (gaps[0], '' if trend else ', not decreasing')
    return LimitCheck(name, passed, gaps[0], detail)


def limit_report(records, slack=MONOTONE_SLACK, tolerance=LIMIT_TOLERANCE):
    """
    Monotonicity and limit diagnostics of a single sweep. Violations are
    reported, not raised. The scaled term (1/gamma) D_f is only required to
    vanish for small gamma, it need not be monotone.
    """
    if not records:
        raise InvalidParamError("Empty sweep")
    first = records[0]
    for record in records:
        if record.side != first.side or not np.array_equal(record.point,
                                                           first.point):
            raise InvalidParamError(
                "limit_report needs records from a single sweep")
    envelope = [r.envelope for r in records]
    theta = [r.theta_at_prox for r in records]
    term = [r.bregman_term for r in records]

    def distance(a, b):
        return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))

    checks = [
        _monotone_check('envelope_nonincreasing', envelope, 1, slack),
        _monotone_check('theta_prox_nonincreasing', theta, 1, slack),
        _monotone_check('divergence_nondecreasing', term, -1, slack),
        _limit_check('envelope_to_theta',
                     [abs(r.envelope - r.theta_at_point) for r in records],
                     tolerance, slack),
        _limit_check('envelope_to_inf',
                     [abs(r.envelope - r.inf_theta) for r in records[::-1]],
                     tolerance, slack),
        _limit_check('prox_to_point',
                     [distance(r.prox, r.point) for r in records],
                     tolerance, slack),
        _limit_check('prox_to_projection',
                     [distance(r.prox, r.argmin_projection)
                      for r in records[::-1]],
                     tolerance, slack),
        _limit_check('scaled_term_vanishes',
                     [r.scaled_term for r in records], tolerance, slack),
    ]
    report = LimitReport(tuple(checks))
    for check in report.failures():
        LOG.info("Limit check %s failed: %s", check.name, check.detail)
    return report
