from .legendre import (
    get_kernel, kernel_energy, kernel_boltzmann_shannon, kernel_fermi_dirac,
    custom_kernel)
from .objective import (
    parse_objective, objective_abs_deviation, objective_indicator_interval,
    objective_quadratic, objective_dead_zone)
from .bregman import bregman_distance, coercivity_certificate
from .prox import left_prox, right_prox, proximal_point_solve
from .envelope import left_envelope, right_envelope
from .projector import parse_set, left_project, right_project
from .asymptotics import gamma_sweep, limit_report
from .settings import get_settings
from .version import __version__


__all__ = [
    'get_kernel', 'kernel_energy', 'kernel_boltzmann_shannon',
    'kernel_fermi_dirac', 'custom_kernel', 'parse_objective',
    'objective_abs_deviation', 'objective_indicator_interval',
    'objective_quadratic', 'objective_dead_zone', 'bregman_distance',
    'coercivity_certificate', 'left_prox', 'right_prox',
    'proximal_point_solve', 'left_envelope', 'right_envelope', 'parse_set',
    'left_project', 'right_project', 'gamma_sweep', 'limit_report',
    'get_settings', '__version__'
]
