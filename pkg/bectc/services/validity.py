"""Applicability domain of the continuum (semiclassical) description.

The level structure can be treated as a continuum when k_B Tc0 exceeds
threshold * hbar * omega_max, the largest level spacing. With the default
threshold of 20 this gives N > 20**3 zeta(3) ~ 9616 for an isotropic trap,
N > (20 s**(1-n))**3 zeta(3) for anisotropic traps, or equivalently
s < [(N / zeta(3))**(1/3) / 20]**(1 / (1 - n)).
"""

import logging
import math

from bectc.exceptions import DomainError
from bectc.models import TrapShape, TrapSpec, ValidityReport
from bectc.services.semiclassical import tc0
from bectc.services.special_functions import zeta_value
from bectc.services.trap import anisotropy_exponent

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 20.0


def check_validity(trap: TrapSpec, n_atoms: float, threshold: float = DEFAULT_THRESHOLD) -> ValidityReport:
    _check_threshold(threshold)
    lhs = tc0(trap, n_atoms)
    rhs = threshold * trap.max_spacing
    margin = lhs / rhs

    report = ValidityReport(
        shape=trap.shape,
        s=trap.s,
        n_atoms=n_atoms,
        threshold=threshold,
        criterion_lhs=lhs,
        criterion_rhs=rhs,
        n_min=min_atoms(trap.shape, trap.s, threshold),
        s_max=max_anisotropy(trap.shape, n_atoms, threshold),
        valid=margin > 1.0,
        margin=margin,
    )
    logger.debug(f"validity {trap.shape.value} s={trap.s} N={n_atoms}: margin={margin:.6g}")
    return report


def min_atoms(shape: TrapShape, s: float, threshold: float = DEFAULT_THRESHOLD) -> float:
    """Smallest N for which the continuum description holds"""
    if not math.isfinite(s) or s < 1.0:
        raise DomainError(f"anisotropy parameter must satisfy s >= 1, got s={s}")
    _check_threshold(threshold)
    n = anisotropy_exponent(shape)
    return (threshold * s ** (1.0 - n)) ** 3 * zeta_value(3.0)


def max_anisotropy(shape: TrapShape, n_atoms: float, threshold: float = DEFAULT_THRESHOLD) -> float:
    """Largest anisotropy s for which the continuum description holds at N"""
    if not math.isfinite(n_atoms) or n_atoms <= 0.0:
        raise DomainError(f"particle number must be positive, got N={n_atoms}")
    _check_threshold(threshold)
    n = anisotropy_exponent(shape)
    return ((n_atoms / zeta_value(3.0)) ** (1.0 / 3.0) / threshold) ** (1.0 / (1.0 - n))


def render_report(report: ValidityReport) -> str:
    verdict = "VALID" if report.valid else "INVALID"
    lines = [
        f"verdict: {verdict}",
        f"shape: {report.shape.value}",
        f"s: {report.s:.12g}",
        f"n_atoms: {report.n_atoms:.12g}",
        f"threshold: {report.threshold:.12g}",
        f"criterion_lhs: {report.criterion_lhs:.12g}",
        f"criterion_rhs: {report.criterion_rhs:.12g}",
        f"margin: {report.margin:.12g}",
        f"n_min: {report.n_min:.12g}",
        f"s_max: {report.s_max:.12g}",
    ]
    return "\n".join(lines) + "\n"


def _check_threshold(threshold: float):
    if not math.isfinite(threshold) or threshold <= 0.0:
        raise DomainError(f"validity threshold must be positive, got {threshold}")
