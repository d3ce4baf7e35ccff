"""
Command line front end.

    bregmoreau envelope --kernel bs --theta abs:0.5 --side right --point 3
    bregmoreau project --kernel bs --set hyp:1,1=1 --point 1,2
    bregmoreau figures --out figures/

Exit codes: 0 ok, 1 usage or parse error, 2 infeasible problem,
3 solver failure or non-convergence, 4 anything else.
"""
import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from bregmoreau import export
from bregmoreau.asymptotics import default_gammas, gamma_sweep, limit_report
from bregmoreau.envelope import envelope
from bregmoreau.exceptions import (ConvergenceError, DomainError,
                                   InvalidParamError, InvalidSetError,
                                   ParseError, SetupError, SolverError)
from bregmoreau.helpers import parse_gammas, parse_grid, parse_point
from bregmoreau.legendre import get_kernel
from bregmoreau.objective import parse_objective
from bregmoreau.projector import parse_set, project
from bregmoreau.prox import envelope_gradient, proximal_point_solve, solve_prox
from bregmoreau.settings import LOG, _set_debug_log, get_settings
from bregmoreau.version import __version__


COMMANDS = ('envelope', 'prox', 'project', 'sweep', 'solve', 'figures')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_SOLVER = 3
EXIT_INTERNAL = 4

FIGURE_GAMMAS = (2.0, 1.0, 0.5, 0.25, 0.1)

ENVELOPE_PANELS = (
    ('energy', 'left', '-2:3:0.01'),
    ('bs', 'left', '0.01:3:0.01'),
    ('bs', 'right', '0:3:0.01'),
    ('fd', 'left', '0.005:0.995:0.005'),
    ('fd', 'right', '0:1:0.005'),
)


@dataclass(frozen=True)
class RunConfig:
    command: str
    kernel: str = 'energy'
    theta: str = 'abs:0.5'
    side: str = 'left'
    gammas: tuple = (1.0,)
    points: tuple = ()
    set_spec: str = None
    output_format: str = 'csv'
    out: str = None
    settings: object = None
    max_iter: int = None


class _Parser(argparse.ArgumentParser):

    def error(self, message):
        raise ParseError(message)


def build_parser():
    parser = _Parser(
        prog='bregmoreau',
        description='Bregman-Moreau envelopes, proximity operators and '
                    'projectors.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('--kernel', default='energy',
                        help='energy, bs or fd')
    parser.add_argument('--theta', default='abs:0.5',
                        help='objective, e.g. "abs:0.5" or "ind:0,1,quad:1,0"')
    parser.add_argument('--side', default='left',
                        choices=('left', 'right', 'orthogonal'))
    parser.add_argument('--gamma', type=str, default=None)
    parser.add_argument('--gammas', default=None,
                        help='"lo:hi:logsteps=N" or a comma separated list')
    parser.add_argument('--point', action='append', default=[],
                        help='comma separated coordinates, repeatable')
    parser.add_argument('--grid', default=None, help='lo:hi:step')
    parser.add_argument('--set', dest='set_spec', default=None,
                        help='"box:lo,hi;lo,hi" or "hyp:a1,a2=b"')
    parser.add_argument('--format', dest='output_format', default='csv',
                        choices=('csv', 'json'))
    parser.add_argument('--out', default=None,
                        help='output file, or directory for "figures"')
    parser.add_argument('--tol', default=None)
    parser.add_argument('--max-iter', dest='max_iter', default=None)
    parser.add_argument('--jobs', default=None)
    parser.add_argument('--config', default=None, help='.ini settings file')
    parser.add_argument('--debug', action='store_true')
    return parser


def parse_config(argv=None):
    args = build_parser().parse_args(argv)
    if args.debug:
        _set_debug_log()
    settings = get_settings(file_path=args.config, tol=args.tol,
                            jobs=args.jobs)
    if args.gammas is not None:
        gammas = parse_gammas(args.gammas)
    elif args.gamma is not None:
        gammas = parse_gammas(args.gamma)
    elif args.command == 'sweep':
        gammas = default_gammas()
    else:
        gammas = np.array([1.0])
    points = [parse_point(p) for p in args.point]
    if args.grid is not None:
        points.extend(np.array([t]) for t in parse_grid(args.grid))
    if args.side == 'orthogonal' and args.command != 'project':
        raise ParseError("side 'orthogonal' only applies to project")
    max_iter = None
    if args.max_iter is not None:
        try:
            max_iter = int(args.max_iter)
        except ValueError:
            raise ParseError("Invalid --max-iter %r" % args.max_iter)
    return RunConfig(
        command=args.command, kernel=args.kernel, theta=args.theta,
        side=args.side, gammas=tuple(float(g) for g in gammas),
        points=tuple(points), set_spec=args.set_spec,
        output_format=args.output_format, out=args.out, settings=settings,
        max_iter=max_iter)


def _require_points(config):
    if not config.points:
        raise ParseError("Command '%s' needs --point or --grid"
                         % config.command)
    return config.points


def _parallel_map(func, items, jobs):
    """ Ordered map, threaded when jobs > 1. """
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(func, items))
    return [func(item) for item in items]


def _write(rows, config, stream, summary=None, path=None):
    path = path or config.out
    if path is None:
        _emit(rows, config.output_format, stream, summary)
        return
    with open(path, 'w', newline='') as handle:
        _emit(rows, config.output_format, handle, summary)
    LOG.info("Wrote %d rows to %s", len(rows), path)


def _emit(rows, output_format, stream, summary):
    if output_format == 'json':
        export.write_json(rows, stream, summary=summary)
        return
    export.write_csv(rows, stream)
    if summary:
        stream.write('\n')
        export.write_csv(summary, stream)


def _grid_tasks(config):
    return [(point, gamma) for gamma in config.gammas
            for point in _require_points(config)]


def envelope_rows(k, th, side, tasks, settings):
    def run(task):
        point, gamma = task
        try:
            sample = envelope(k, th, gamma, point, side=side,
                              want_gradient=True, settings=settings)
        except (DomainError, SolverError) as exc:
            return export.error_row(point, gamma, side, exc)
        return export.envelope_row(sample)
    return _parallel_map(run, tasks, settings.jobs)


def prox_rows(k, th, side, tasks, settings):
    def run(task):
        point, gamma = task
        try:
            outcome = solve_prox(k, th, gamma, point, side=side,
                                 settings=settings,
                                 **({'allow_boundary': True}
                                    if side == 'right' else {}))
        except (DomainError, SolverError) as exc:
            return export.error_row(point, gamma, side, exc)
        gradient = None
        if k.in_interior(point) and k.in_interior(outcome.point):
            gradient = envelope_gradient(k, gamma, point, outcome.point, side)
        return export.prox_row(outcome, gradient=gradient)
    return _parallel_map(run, tasks, settings.jobs)


def cmd_envelope(config, stream=sys.stdout):
    k = get_kernel(config.kernel)
    th = parse_objective(config.theta)
    rows = envelope_rows(k, th, config.side, _grid_tasks(config),
                         config.settings)
    _write(rows, config, stream)
    return EXIT_OK


def cmd_prox(config, stream=sys.stdout):
    k = get_kernel(config.kernel)
    th = parse_objective(config.theta)
    rows = prox_rows(k, th, config.side, _grid_tasks(config), config.settings)
    _write(rows, config, stream)
    return EXIT_OK


def _projection_distance(k, point, projection, side):
    if side == 'left':
        return float(np.sum(k.divergence(projection, point)))
    if side == 'right':
        return float(np.sum(k.divergence(point, projection)))
    return 0.5 * float(np.sum((point - projection) ** 2))


def cmd_project(config, stream=sys.stdout):
    if config.set_spec is None:
        raise ParseError("Command 'project' needs --set")
    k = get_kernel(config.kernel)
    spec = parse_set(config.set_spec)
    rows = []
    for point in _require_points(config):
        projection = project(k, spec, point, side=config.side,
                             **({} if config.side == 'orthogonal'
                                else {'settings': config.settings}))
        rows.append(export.projection_row(
            point, config.side, projection,
            _projection_distance(k, point, projection, config.side)))
    _write(rows, config, stream)
    return EXIT_OK


def _summary_rows(point, report):
    return [export.check_row(point, check) for check in report.checks]


def cmd_sweep(config, stream=sys.stdout):
    k = get_kernel(config.kernel)
    th = parse_objective(config.theta)
    rows, summary, failures = [], [], []
    for point in _require_points(config):
        failed = []
        records = gamma_sweep(k, th, point, side=config.side,
                              gammas=config.gammas, failures=failed,
                              settings=config.settings)
        rows.extend(export.sweep_row(r) for r in records)
        rows.extend(export.error_row(point, gamma, config.side, exc)
                    for gamma, exc in failed)
        if records:
            summary.extend(_summary_rows(point, limit_report(records)))
        failures.extend(failed)
    _write(rows, config, stream, summary=summary)
    if failures:
        raise SolverError("Sweep failed at gamma %s" % ', '.join(
            '%g' % gamma for gamma, _ in failures),
            gamma=failures[0][0])
    return EXIT_OK


def cmd_solve(config, stream=sys.stdout):
    k = get_kernel(config.kernel)
    th = parse_objective(config.theta)
    gamma = config.gammas[0]
    points = _require_points(config)
    rows, unconverged = [], []
    for x0 in points:
        result = proximal_point_solve(k, th, gamma, x0,
                                      max_iter=config.max_iter,
                                      side=config.side,
                                      settings=config.settings)
        last = len(result.trajectory) - 1
        for i, iterate in enumerate(result.trajectory):
            rows.append(export.trajectory_row(
                iterate, gamma, config.side, th.value(iterate), i,
                residual=result.stationarity if i == last else None))
        if not result.converged:
            unconverged.append(result)
    _write(rows, config, stream)
    if unconverged:
        result = unconverged[0]
        raise ConvergenceError(
            "Proximal point did not converge in %d iterations, last "
            "iterate %r (step %g)" % (result.iterations,
                                      result.point.tolist(), result.step),
            trajectory=list(result.trajectory), gamma=gamma)
    return EXIT_OK


def _reference_rows(th, points):
    return [export.reference_row(p, th.value(p)) for p in points]


def _figure_envelope(kernel_name, side, grid, settings):
    k = get_kernel(kernel_name)
    th = parse_objective('abs:0.5')
    points = [np.array([t]) for t in parse_grid(grid)]
    tasks = [(p, g) for g in FIGURE_GAMMAS for p in points]
    return _reference_rows(th, points) + envelope_rows(
        k, th, side, tasks, settings)


def _figure_divergence(settings):
    k = get_kernel('energy')
    th = parse_objective('abs:0.5')
    gammas = parse_gammas('1e-2:1e1:logsteps=61')
    rows = []
    for y in (-1.0, 0.0, 1.0, 2.0):
        records = gamma_sweep(k, th, [y], gammas=gammas, settings=settings)
        rows.extend(export.sweep_row(r) for r in records)
    return rows


def _figure_projection(settings):
    spec = parse_set('hyp:1,1=1')
    point = np.array([1.0, 2.0])
    rows, levels = [], []
    for name in ('energy', 'bs'):
        k = get_kernel(name)
        projection = project(k, spec, point, side='left', settings=settings)
        rows.append(dict(
            [('kernel', name)] + list(export.projection_row(
                point, 'left', projection,
                _projection_distance(k, point, projection, 'left')).items())))
    kernels = [get_kernel('energy'), get_kernel('bs')]
    axis = parse_grid('0.05:2:0.05')
    for p1 in axis:
        for p2 in axis:
            p = np.array([p1, p2])
            levels.append(dict(
                [('p_1', p1), ('p_2', p2)]
                + [('divergence_%s' % k.name,
                    float(np.sum(k.divergence(p, point))))
                   for k in kernels]))
    return rows, levels


def figure_tables(settings):
    """ Ordered (name, rows) pairs, one per figure panel. """
    tables = [('divergence_energy', _figure_divergence(settings))]
    for kernel_name, side, grid in ENVELOPE_PANELS:
        tables.append(('envelope_%s_%s' % (kernel_name, side),
                       _figure_envelope(kernel_name, side, grid, settings)))
    projections, levels = _figure_projection(settings)
    tables.append(('projection_simplex', projections))
    tables.append(('projection_levels', levels))
    return tables


def cmd_figures(config, stream=sys.stdout):
    directory = config.out or 'figures'
    if not os.path.isdir(directory):
        os.makedirs(directory)
    for name, rows in figure_tables(config.settings):
        path = os.path.join(directory, '%s.%s' % (name, config.output_format))
        _write(rows, config, stream, path=path)
    return EXIT_OK


HANDLERS = {
    'envelope': cmd_envelope,
    'prox': cmd_prox,
    'project': cmd_project,
    'sweep': cmd_sweep,
    'solve': cmd_solve,
    'figures': cmd_figures,
}


def run(config, stream=sys.stdout):
    return HANDLERS[config.command](config, stream=stream)


def exit_code(exc):
    if isinstance(exc, (InvalidParamError, InvalidSetError, DomainError)):
        return EXIT_USAGE
    if isinstance(exc, SetupError):
        return EXIT_INFEASIBLE
    if isinstance(exc, SolverError):
        return EXIT_SOLVER
    return EXIT_INTERNAL


def main(argv=None, stream=None):
    logging.basicConfig(format='%(levelname)s %(name)s: %(message)s')
    stream = stream or sys.stdout
    try:
        config = parse_config(argv)
        return run(config, stream=stream)
    except Exception as exc:
        code = exit_code(exc)
        if code == EXIT_INTERNAL:
            LOG.exception("Unexpected failure")
        sys.stderr.write('bregmoreau: %s\n' % exc)
        return code


if __name__ == '__main__':
    sys.exit(main())
