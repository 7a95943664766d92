"""Trap geometry and the reduced unit system.

Units: hbar = k_B = 1 and the loosest trap frequency omega = 1. Temperatures are
t = k_B T / (hbar omega), energies are in hbar omega and are measured from the
ground-state energy E0.

A disk tightens one axis, (1, 1, s); a cigar tightens two, (s, s, 1). This
convention follows from the s**n prefactor of Tc0 (n = 1/3 disk, 2/3 cigar).
"""

import logging
import math
from typing import Tuple

import numpy as np

from bectc.exceptions import DomainError, ShapeMismatchError
from bectc.models import TrapShape, TrapSpec

logger = logging.getLogger(__name__)


def make_trap(shape: TrapShape, s: float = 1.0) -> TrapSpec:
    shape = TrapShape(shape)
    if not math.isfinite(s) or s < 1.0:
        raise DomainError(f"anisotropy parameter must satisfy s >= 1, got s={s}")

    if shape == TrapShape.ISOTROPIC:
        if s != 1.0:
            raise ShapeMismatchError(f"an isotropic trap has s = 1, got s={s}")
        spacings = (1.0, 1.0, 1.0)
    elif shape == TrapShape.DISK:
        spacings = (1.0, 1.0, float(s))
    else:
        spacings = (float(s), float(s), 1.0)

    return TrapSpec(shape=shape, s=float(s), spacings=spacings)


def anisotropy_exponent(shape: TrapShape) -> float:
    """n in Tc0 = s**n (N / zeta(3))**(1/3)"""
    return make_trap(shape, 1.0).exponent


def geometric_mean_spacing(trap: TrapSpec) -> float:
    """(d1 d2 d3)**(1/3), which is s**n for the supported shapes"""
    d1, d2, d3 = trap.spacings
    return (d1 * d2 * d3) ** (1.0 / 3.0)


def arithmetic_mean_spacing(trap: TrapSpec) -> float:
    return sum(trap.spacings) / 3.0


def level_spectrum(trap: TrapSpec, e_max: float) -> Tuple[np.ndarray, np.ndarray]:
    """Energies (from E0) and degeneracies of every level with E - E0 <= e_max.

    Axes with equal spacing are grouped so their degeneracy is counted instead of
    enumerated.
    """
    if e_max < 0:
        raise DomainError(f"e_max must be non-negative, got {e_max}")
    d1, d2, d3 = sorted(trap.spacings)

    if d1 == d2 == d3:
        n = np.arange(0, int(math.floor(e_max / d1)) + 1, dtype=float)
        return d1 * n, (n + 1.0) * (n + 2.0) / 2.0

    # Disk and cigar traps always share one spacing between two axes
    pair, single = (d1, d3) if d1 == d2 else (d2, d1)
    m = np.arange(0, int(math.floor(e_max / pair)) + 1, dtype=float)
    k = np.arange(0, int(math.floor(e_max / single)) + 1, dtype=float)
    energies = pair * m[:, None] + single * k[None, :]
    degeneracy = np.broadcast_to(m[:, None] + 1.0, energies.shape)
    keep = energies <= e_max
    return energies[keep], degeneracy[keep]
