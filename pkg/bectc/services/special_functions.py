"""Riemann zeta and polylogarithm (Bose function) with a reported truncation bound.

Both functions are sums of f(j) = exp(-a j) j**(-s) over j >= 1, with a = -ln z
(a = 0 for zeta). The leading terms are summed directly; when the series converges
slowly the remaining tail is replaced by its integral plus the first endpoint
corrections. f is completely monotone, so the error of that tail is bounded by
the first correction left out.
"""

import logging
import math
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np

from bectc.exceptions import ConvergenceError, DomainError
from bectc.models import SeriesResult

logger = logging.getLogger(__name__)

REL_BOUND = 1e-12
# Tail corrections are added until their remainder drops below this (absolute)
TAIL_REMAINDER = 1e-14
# Plain series is used up to this z; above it convergence is too slow
DIRECT_SERIES_MAX_Z = 0.9
STOP_RATIO = 1e-16
MAX_TERMS = 10_000_000

_EPS = float(np.finfo(float).eps)
_CHUNK = 4096


def zeta(s: float, terms: Optional[int] = None) -> SeriesResult:
    """Riemann zeta function zeta(s) for real s > 1"""
    if not math.isfinite(s) or s <= 1.0:
        raise DomainError(f"zeta(s) needs s > 1, got s={s}")
    _check_terms(terms)
    return _tail_corrected_sum(s, 0.0, terms)


@lru_cache(maxsize=None)
def zeta_value(s: float) -> float:
    """zeta(s).value, memoised for the constants used throughout"""
    return zeta(s).value


def polylog(s: float, z: float, terms: Optional[int] = None) -> SeriesResult:
    """Polylogarithm Li_s(z) = sum z**j / j**s for s >= 2 and 0 <= z <= 1"""
    if not math.isfinite(s) or s < 2.0:
        raise DomainError(f"polylog(s, z) needs s >= 2, got s={s}")
    if not math.isfinite(z) or z < 0.0 or z > 1.0:
        raise DomainError(f"polylog(s, z) needs 0 <= z <= 1, got z={z}")
    _check_terms(terms)

    if z == 0.0:
        return SeriesResult(value=0.0, terms_used=1, bound=0.0)
    if z == 1.0:
        return zeta(s, terms)
    if z <= DIRECT_SERIES_MAX_Z:
        return _direct_sum(s, z, terms)
    return _tail_corrected_sum(s, -math.log(z), terms)


def _direct_sum(s: float, z: float, terms: Optional[int]) -> SeriesResult:
    """Plain series; stops once a term falls below STOP_RATIO of the running sum"""
    log_z = math.log(z)
    partials = []
    running = 0.0
    last_term = 0.0
    used = 0
    limit = terms if terms is not None else MAX_TERMS
    start = 1

    while used < limit:
        stop = min(start + _CHUNK, limit + 1)
        j = np.arange(start, stop, dtype=float)
        chunk = np.exp(j * log_z - s * np.log(j))

        converged = False
        if terms is None:
            cumulative = running + np.cumsum(chunk)
            small = np.nonzero(chunk < STOP_RATIO * cumulative)[0]
            if small.size:
                chunk = chunk[: small[0] + 1]
                converged = True

        partials.extend(chunk.tolist())
        running += float(chunk.sum())
        used += chunk.size
        last_term = float(chunk[-1])
        start = stop

        if converged:
            break
    else:
        if terms is None:
            raise ConvergenceError(f"polylog({s}, {z}) did not converge within {MAX_TERMS} terms")

    value = math.fsum(partials)
    # Consecutive terms shrink by at least a factor z
    bound = last_term * z / (1.0 - z) + 8.0 * _EPS * value
    return _checked(SeriesResult(value=value, terms_used=used, bound=bound), f"polylog({s}, {z})")


def _tail_corrected_sum(s: float, a: float, terms: Optional[int]) -> SeriesResult:
    """sum_{j>=1} exp(-a j) j**-s as J-1 explicit terms plus a corrected tail from J"""
    if terms is not None:
        anchor = max(int(terms), 2)
    else:
        anchor = 16
        while _tail_remainder(s, a, anchor) > TAIL_REMAINDER:
            anchor *= 2
            if anchor > MAX_TERMS:
                raise ConvergenceError(f"tail of ({s}, a={a}) did not settle within {MAX_TERMS} terms")

    j = np.arange(1, anchor, dtype=float)
    head = np.exp(-a * j - s * np.log(j))

    f_anchor = math.exp(-a * anchor - s * math.log(anchor))
    tail = _tail_integral(s, a, anchor) + 0.5 * f_anchor + f_anchor * (a + s / anchor) / 12.0

    value = math.fsum(head.tolist() + [tail])
    bound = 2.0 * _tail_remainder(s, a, anchor) + 8.0 * _EPS * value
    label = f"zeta({s})" if a == 0.0 else f"polylog({s}, {math.exp(-a)})"
    logger.debug(f"{label}: anchor={anchor}, bound={bound:.3e}")
    return _checked(SeriesResult(value=value, terms_used=anchor, bound=bound), label)


def _tail_integral(s: float, a: float, anchor: int) -> float:
    """Integral of exp(-a x) x**-s from anchor to infinity"""
    if a == 0.0:
        return anchor ** (1.0 - s) / (s - 1.0)
    return float(mpmath.expint(s, a * anchor)) * anchor ** (1.0 - s)


def _tail_remainder(s: float, a: float, anchor: int) -> float:
    """|f'''(J)| / 720, the first correction not included in the tail"""
    f = math.exp(-a * anchor - s * math.log(anchor))
    g = a + s / anchor
    third = f * (g ** 3 + 3.0 * g * s / anchor ** 2 + 2.0 * s / anchor ** 3)
    return third / 720.0


def _check_terms(terms: Optional[int]):
    if terms is not None and terms < 1:
        raise DomainError(f"term count must be at least 1, got {terms}")


def _checked(result: SeriesResult, label: str) -> SeriesResult:
    if result.bound > REL_BOUND * max(abs(result.value), 1.0):
        raise ConvergenceError(
            f"{label}: truncation bound {result.bound:.3e} exceeds tolerance after {result.terms_used} terms"
        )
    return result
