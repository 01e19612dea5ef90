"""Joint transmit-covariance and fluid-antenna port selection for a UAV ISAC link."""

from .ao import AOResult, SolveTrace, ao_optimize, fixed_port_baseline
from .config import DomainError, NumericError, SystemConfig, load_config, parse_config
from .geometry import (path_difference, port_offset, response_matrix, rx_antenna_offset,
                       sensing_steering)
from .metrics import achievable_rate, beampattern_gain, check_feasibility
from .search import coordinate_sweep, exhaustive_search, initial_selection
from .solver import SolverOptions, SolverResult, solve_covariance, waterfilling_oracle

__version__ = "0.1.0"
