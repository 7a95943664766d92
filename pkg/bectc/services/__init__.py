"""
Numerical services: special functions, trap geometry, exact sums,
semiclassical formulas, validity checks, sweeps and table output.
"""

from .special_functions import polylog, zeta
from .trap import make_trap, level_spectrum
from .exact import solve_fugacity, condensate_fraction, threshold_temperature
from .semiclassical import tc0, tc_first_order
from .validity import check_validity, min_atoms, max_anisotropy
from .sweeps import SweepService
from .output import TableWriter

__all__ = [
    "zeta",
    "polylog",
    "make_trap",
    "level_spectrum",
    "solve_fugacity",
    "condensate_fraction",
    "threshold_temperature",
    "tc0",
    "tc_first_order",
    "check_validity",
    "min_atoms",
    "max_anisotropy",
    "SweepService",
    "TableWriter",
]
