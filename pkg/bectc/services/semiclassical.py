"""Thermodynamic-limit and first-order finite-size formulas.

The first-order shift is the standard ideal-gas result

    dTc / Tc0 = -zeta(2) / (2 zeta(3)**(2/3)) * (omega_arith / omega_geo) * N**(-1/3)

which follows from the density of states rho(E) = E**2 / (2 w**3) + 3 w_a E / (2 w**3)
(w geometric, w_a arithmetic mean frequency, energies from E0).
"""

import logging
import math

from bectc.exceptions import DomainError
from bectc.models import SemiclassicalResult, TrapSpec
from bectc.services.special_functions import polylog, zeta_value
from bectc.services.trap import arithmetic_mean_spacing, geometric_mean_spacing

logger = logging.getLogger(__name__)


def first_order_coefficient() -> float:
    """zeta(2) / (2 zeta(3)**(2/3)), about 0.7275"""
    return zeta_value(2.0) / (2.0 * zeta_value(3.0) ** (2.0 / 3.0))


def tc0(trap: TrapSpec, n_atoms: float) -> float:
    """Condensation temperature in the thermodynamic limit, s**n (N / zeta(3))**(1/3)"""
    if not math.isfinite(n_atoms) or n_atoms <= 0.0:
        raise DomainError(f"particle number must be positive, got N={n_atoms}")
    return geometric_mean_spacing(trap) * (n_atoms / zeta_value(3.0)) ** (1.0 / 3.0)


def tc_first_order(trap: TrapSpec, n_atoms: float) -> SemiclassicalResult:
    """Tc0 with the first-order finite-size correction"""
    if not math.isfinite(n_atoms) or n_atoms <= 1.0:
        raise DomainError(f"first-order correction needs N > 1, got N={n_atoms}")

    t_c0 = tc0(trap, n_atoms)
    anisotropy = arithmetic_mean_spacing(trap) / geometric_mean_spacing(trap)
    correction = -first_order_coefficient() * anisotropy * n_atoms ** (-1.0 / 3.0)
    return SemiclassicalResult(t_c0=t_c0, t_c_first_order=t_c0 * (1.0 + correction), correction=correction)


def lda_condensate_fraction_limit(t_over_tc0: float) -> float:
    """1 - (T/Tc0)**3 above zero, the N -> infinity condensate fraction"""
    if math.isnan(t_over_tc0) or t_over_tc0 < 0.0:
        raise DomainError(f"rescaled temperature must be non-negative, got {t_over_tc0}")
    return max(0.0, 1.0 - t_over_tc0 ** 3)


def first_order_condensate_fraction(trap: TrapSpec, n_atoms: float, t: float) -> float:
    """Condensate fraction including the first-order finite-size term"""
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"temperature must be non-negative, got t={t}")
    x = t / tc0(trap, n_atoms)
    anisotropy = arithmetic_mean_spacing(trap) / geometric_mean_spacing(trap)
    shift = 3.0 * first_order_coefficient() * anisotropy * x ** 2 * n_atoms ** (-1.0 / 3.0)
    return min(1.0, max(0.0, 1.0 - x ** 3 - shift))


def semiclassical_thermal_atoms(trap: TrapSpec, z: float, t: float, first_order: bool = True) -> float:
    """Continuum (phase-space) estimate of the excited-level occupation"""
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"temperature must be positive, got t={t}")
    omega = geometric_mean_spacing(trap)
    scale = t / omega
    value = scale ** 3 * polylog(3.0, z).value
    if first_order:
        gamma = 1.5 * arithmetic_mean_spacing(trap) / omega
        value += gamma * scale ** 2 * polylog(2.0, z).value
    return value
