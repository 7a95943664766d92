import logging
import math
from typing import List

import numpy as np

logger = logging.getLogger(__name__)


def log_spaced(start: float, stop: float, points: int) -> List[float]:
    """Log-spaced grid whose endpoints are exactly start and stop"""
    if points < 2:
        raise ValueError("a grid needs at least two points")
    grid = np.logspace(math.log10(start), math.log10(stop), points).tolist()
    grid[0], grid[-1] = float(start), float(stop)
    return grid


def lin_spaced(start: float, stop: float, points: int) -> List[float]:
    """Linear grid whose endpoints are exactly start and stop"""
    if points < 2:
        raise ValueError("a grid needs at least two points")
    grid = np.linspace(start, stop, points).tolist()
    grid[0], grid[-1] = float(start), float(stop)
    return grid


def format_number(value: float, digits: int = 12) -> str:
    """Deterministic text form of a real: fixed significant digits, '.' separator"""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, f".{digits}g")
    return "0" if text == "-0" else text


def format_atoms(n_atoms: float) -> str:
    """Compact label for a particle number, e.g. 10000 or 1e+07"""
    return format(n_atoms, ".6g")


def log_sweep_metrics(command: str, grid_points: int, workers: int, processing_time_ms: int):
    """Log sweep metrics for monitoring"""
    logger.info(f"METRICS - Command: {command}, "
                f"Points: {grid_points}, "
                f"Workers: {workers}, "
                f"Time: {processing_time_ms}ms")
