"""Flip-density (gamma) analysis of one-dimensional orbits and their response
to weak periodic stimulation."""

from .dynsys import (
    FractionalParts,
    Logistic,
    Orbit,
    StandardTheta,
    Stimulation,
    Tent,
    fractional_parts_orbit,
    generate_orbit,
    iterate_logistic,
    iterate_tent,
    load_orbit_csv,
    save_orbit_csv,
    step_standard,
    stimulation_term,
)
from .findiff import (
    conjugate_orbit,
    decompose,
    detect_period,
    difference_row,
    max_run_length,
    monotony_sequence,
    reconstruct,
)
from .measures import (
    dim_bound_entropy,
    dim_bound_runlength,
    gamma_estimate,
    gamma_from_orbit,
    lyapunov_analytic,
    lyapunov_numeric,
    positive_part,
    shannon_H,
)
from .response import gamma_max, mu_smooth, sweep_epsilon, sweep_param, sweep_tau

__version__ = "0.1.0"
