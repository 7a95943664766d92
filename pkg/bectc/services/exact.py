"""Grand-canonical ideal Bose gas on the discrete harmonic-trap spectrum.

Two evaluators of the total occupation N(z, t) are provided:

* occupation_sum_direct sums 1 / (exp((E - E0)/t) / z - 1) over every level with
  (E - E0)/t <= 45; it is the reference path.
* occupation_sum_series uses the resummed form
  sum_j z**j prod_i 1 / (1 - exp(-j d_i / t)) with the ground state split off
  (z / (1 - z)), so the remaining series converges like exp(-j d_min / t) even
  when z is within 1e-15 of one. It is the production path.

The solvers work in u = -ln z, on a log scale, so n0 = 1 / expm1(u) stays accurate
deep in the condensed phase. Ensemble: grand canonical. Condensate: ground level
only, also for strongly anisotropic traps.
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from bectc.exceptions import BracketError, ConvergenceError, DomainError
from bectc.models import GasState, ThresholdResult, TrapSpec
from bectc.services.semiclassical import tc0
from bectc.services.trap import level_spectrum

logger = logging.getLogger(__name__)

# Levels with (E - E0)/t above this carry occupancy below 3e-20 and are dropped
ENERGY_CUTOFF = 45.0
SERIES_STOP_RATIO = 1e-15
SERIES_MAX_TERMS = 10_000_000

FUGACITY_CAP = 1.0 - 1e-15
MAX_ATOMS = 1e12
MAX_ITERATIONS = 200
FUGACITY_REL_TOL = 1e-10
THRESHOLD_REL_RESIDUAL = 1e-6
THRESHOLD_BRACKET = (0.1, 2.0)
MAX_BRACKET_EXPANSIONS = 60

_MIN_U = -math.log1p(FUGACITY_CAP - 1.0)
_CHUNK = 4096


def occupation_sum_direct(trap: TrapSpec, z: float, t: float, energy_cutoff: float = ENERGY_CUTOFF) -> float:
    """Total occupation by explicit summation over trap levels"""
    _check_point(z, t)
    energies, degeneracies = level_spectrum(trap, energy_cutoff * t)
    u = -math.log(z)
    with np.errstate(over="ignore"):
        occupations = degeneracies / np.expm1(energies / t + u)
    return float(np.sum(occupations))


def occupation_sum_series(trap: TrapSpec, z: float, t: float) -> float:
    """Total occupation from the resummed series"""
    _check_point(z, t)
    ground, excited, _ = _series_parts(trap.spacings, math.log(z), t)
    return ground + excited


def thermal_atoms(trap: TrapSpec, z: float, t: float) -> float:
    """Occupation of all excited levels"""
    _check_point(z, t)
    _, excited, _ = _series_parts(trap.spacings, math.log(z), t)
    return excited


def solve_fugacity(trap: TrapSpec, n_atoms: float, t: float) -> GasState:
    """Fugacity at which the mean total occupation equals n_atoms"""
    _check_atoms(n_atoms)
    _check_temperature(t)
    spacings = trap.spacings

    def excess(log_u: float) -> float:
        ground, excited, _ = _series_parts(spacings, -math.exp(log_u), t)
        return (ground + excited) / n_atoms - 1.0

    # At the fugacity cap n0 alone is ~1e15, above any supported N
    lo = math.log(_MIN_U)
    hi = 0.0
    expansions = 0
    while excess(hi) > 0.0:
        hi += math.log(4.0)
        expansions += 1
        if expansions > MAX_BRACKET_EXPANSIONS:
            raise BracketError(f"no fugacity bracket for N={n_atoms}, t={t}")

    log_u, info = brentq(excess, lo, hi, xtol=1e-14, maxiter=MAX_ITERATIONS, full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceError(
            f"fugacity solve for N={n_atoms}, t={t} stopped after {info.iterations} iterations: {info.flag}"
        )

    log_z = -math.exp(log_u)
    ground, excited, _ = _series_parts(spacings, log_z, t)
    residual = abs((ground + excited) / n_atoms - 1.0)
    if residual > FUGACITY_REL_TOL:
        raise ConvergenceError(f"fugacity solve for N={n_atoms}, t={t} left relative residual {residual:.3e}")

    logger.debug(f"solve_fugacity N={n_atoms} t={t}: u={-log_z:.6e} after {info.iterations} iterations")
    return GasState(
        trap=trap,
        n_atoms=n_atoms,
        t=t,
        z=math.exp(log_z),
        log_z=log_z,
        n0=ground,
        f0=min(ground / n_atoms, 1.0),
        residual=residual,
    )


def condensate_fraction(trap: TrapSpec, n_atoms: float, t: float) -> float:
    return solve_fugacity(trap, n_atoms, t).f0


def condensate_fraction_curve(trap: TrapSpec, n_atoms: float, t_values: Sequence[float]) -> List[float]:
    return [condensate_fraction(trap, n_atoms, t) for t in t_values]


def threshold_temperature(trap: TrapSpec, n_atoms: float, x: float) -> ThresholdResult:
    """Temperature at which the condensate fraction equals x"""
    if not math.isfinite(x) or not 0.0 < x < 1.0:
        raise DomainError(f"target fraction must lie in (0, 1), got {x}")
    _check_atoms(n_atoms)

    t_ref = tc0(trap, n_atoms)

    def excess(t: float) -> float:
        return condensate_fraction(trap, n_atoms, t) - x

    lo, hi = THRESHOLD_BRACKET[0] * t_ref, THRESHOLD_BRACKET[1] * t_ref
    expansions = 0
    while excess(lo) <= 0.0:
        lo /= 2.0
        expansions += 1
        if expansions > MAX_BRACKET_EXPANSIONS:
            raise BracketError(f"f0 stays below {x} down to t={lo:.3e} (N={n_atoms}, {trap.shape.value})")
    expansions = 0
    while excess(hi) >= 0.0:
        hi *= 2.0
        expansions += 1
        if expansions > MAX_BRACKET_EXPANSIONS:
            raise BracketError(f"f0 stays above {x} up to t={hi:.3e} (N={n_atoms}, {trap.shape.value})")

    t_root, info = brentq(excess, lo, hi, xtol=1e-13 * t_ref, maxiter=MAX_ITERATIONS, full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceError(
            f"threshold search for x={x}, N={n_atoms} stopped after {info.iterations} iterations: {info.flag}"
        )

    residual = abs(excess(t_root))
    if residual > THRESHOLD_REL_RESIDUAL * x:
        raise ConvergenceError(f"threshold search for x={x}, N={n_atoms} left residual {residual:.3e}")

    return ThresholdResult(t_threshold=t_root, target_fraction=x, iterations=info.iterations, residual=residual)


def _series_parts(spacings: Sequence[float], log_z: float, t: float) -> Tuple[float, float, int]:
    """(ground occupation, excited occupation, terms used) of the resummed series"""
    ground = math.exp(log_z) / -math.expm1(log_z)
    ratios = np.asarray(spacings, dtype=float)[:, None] / t
    excited = 0.0
    start = 1

    with np.errstate(over="ignore", under="ignore"):
        while start <= SERIES_MAX_TERMS:
            j = np.arange(start, min(start + _CHUNK, SERIES_MAX_TERMS + 1), dtype=float)
            # 1 / prod(1 - exp(-j d / t)) - 1, kept accurate when the product is near one
            log_product = np.log(-np.expm1(-ratios * j)).sum(axis=0)
            terms = np.exp(j * log_z) * np.expm1(-log_product)

            running = ground + excited + np.cumsum(terms)
            small = np.nonzero(terms <= SERIES_STOP_RATIO * running)[0]
            if small.size:
                stop = small[0] + 1
                excited += float(terms[:stop].sum())
                return ground, excited, start + stop - 1
            excited += float(terms.sum())
            start += j.size

    raise ConvergenceError(f"occupation series did not converge within {SERIES_MAX_TERMS} terms (t={t})")


def _check_point(z: float, t: float):
    if not math.isfinite(z) or not 0.0 < z < 1.0:
        raise DomainError(f"fugacity must lie in (0, 1), got z={z}")
    _check_temperature(t)


def _check_temperature(t: float):
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"temperature must be positive, got t={t}")


def _check_atoms(n_atoms: float):
    if not math.isfinite(n_atoms) or n_atoms <= 0.0 or n_atoms > MAX_ATOMS:
        raise DomainError(f"particle number must lie in (0, {MAX_ATOMS:g}], got N={n_atoms}")
