import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, List, Optional, Sequence, Tuple

from bectc import __version__
from bectc.config import settings
from bectc.exceptions import ConfigError, DomainError, SweepError
from bectc.models import Column, SweepTable, TrapShape
from bectc.services.exact import condensate_fraction, threshold_temperature
from bectc.services.semiclassical import (
    first_order_condensate_fraction,
    lda_condensate_fraction_limit,
    tc0,
    tc_first_order,
)
from bectc.services.trap import make_trap
from bectc.services.validity import DEFAULT_THRESHOLD, check_validity, max_anisotropy
from bectc.utils import format_atoms, lin_spaced, log_sweep_metrics, log_spaced

logger = logging.getLogger(__name__)

THRESHOLD_FRACTIONS = (0.001, 0.005, 0.01)
DETECTION_WINDOW = (0.001, 0.01)
FIG1_SAFE_N_MIN = 1e4
MIN_ATOMS = 1e2
FIG2_RANGE = (0.2, 1.3)
ANISOSCAN_FRACTION = 0.001


def fig1_row(n_atoms: float) -> Tuple[float, ...]:
    """Rescaled first-order Tc and T_x% at N for the isotropic trap"""
    trap = make_trap(TrapShape.ISOTROPIC)
    semiclassical = tc_first_order(trap, n_atoms)
    thresholds = [threshold_temperature(trap, n_atoms, x).t_threshold for x in THRESHOLD_FRACTIONS]
    return (
        math.log10(n_atoms),
        1.0,
        semiclassical.t_c_first_order / semiclassical.t_c0,
        *(t / semiclassical.t_c0 for t in thresholds),
    )


def fig2_point(n_atoms: float, t_over_tc0: float) -> float:
    """Exact condensate fraction of the isotropic trap at T/Tc0"""
    trap = make_trap(TrapShape.ISOTROPIC)
    return condensate_fraction(trap, n_atoms, t_over_tc0 * tc0(trap, n_atoms))


def anisoscan_row(shape: TrapShape, s: float, n_atoms: float, threshold: float) -> Tuple[float, ...]:
    trap = make_trap(shape, s)
    t_exact = threshold_temperature(trap, n_atoms, ANISOSCAN_FRACTION).t_threshold
    t_first = tc_first_order(trap, n_atoms).t_c_first_order
    valid = check_validity(trap, n_atoms, threshold).valid
    return (s, t_exact, t_first, abs(t_first - t_exact) / t_exact, 1.0 if valid else 0.0)


class SweepService:
    """Builds the figure datasets, fanning grid points out to worker processes"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers if workers is not None else settings.workers

    def fig1(self, n_min: float = 1e4, n_max: float = 1e7, points: int = 25, unsafe: bool = False) -> SweepTable:
        """Rescaled Tc vs log10 N: first order and T_0.1%, T_0.5%, T_1% from exact sums"""
        if n_min < MIN_ATOMS:
            raise DomainError(f"fig1 needs n_min >= {MIN_ATOMS:g}, got {n_min:g}")
        if n_min < FIG1_SAFE_N_MIN and not unsafe:
            raise ConfigError(
                f"n_min={n_min:g} lies below the validity range (N >= {FIG1_SAFE_N_MIN:g}); pass --unsafe to proceed"
            )
        if n_max <= n_min:
            raise DomainError(f"fig1 needs n_max > n_min, got {n_max:g} <= {n_min:g}")
        if points < 2:
            raise DomainError(f"fig1 needs at least 2 points, got {points}")

        grid = log_spaced(n_min, n_max, points)
        rows = self._evaluate("fig1", fig1_row, [(n,) for n in grid])

        columns = [
            Column(name="log10_N"),
            Column(name="tc0_over_tc0"),
            Column(name="tc_first_order_over_tc0"),
            Column(name="t_0p1pct_over_tc0"),
            Column(name="t_0p5pct_over_tc0"),
            Column(name="t_1pct_over_tc0"),
        ]
        metadata = self._metadata(
            "fig1",
            shape=TrapShape.ISOTROPIC.value,
            n_min=n_min,
            n_max=n_max,
            points=points,
            threshold_fractions=list(THRESHOLD_FRACTIONS),
        )
        if unsafe:
            metadata["unsafe"] = True
        return SweepTable(columns=columns, rows=rows, metadata=metadata)

    def fig2(self, n_atoms: Sequence[float] = (1e4, 1e5), t_points: int = 60) -> SweepTable:
        """Condensate fraction vs T/Tc0 per N, with first-order and LDA-limit references"""
        n_values = list(dict.fromkeys(float(n) for n in n_atoms))
        if not n_values:
            raise DomainError("fig2 needs at least one particle number")
        if any(n < MIN_ATOMS for n in n_values):
            raise DomainError(f"fig2 needs every N >= {MIN_ATOMS:g}, got {n_values}")
        if t_points < 10:
            raise DomainError(f"fig2 needs at least 10 temperature points, got {t_points}")

        labels = [format_atoms(n) for n in n_values]
        if len(set(labels)) != len(labels):
            raise DomainError(f"fig2 particle numbers must differ within 6 significant digits, got {n_values}")

        grid = lin_spaced(FIG2_RANGE[0], FIG2_RANGE[1], t_points)
        trap = make_trap(TrapShape.ISOTROPIC)
        markers = [tc_first_order(trap, n) for n in n_values]

        tasks = [(n, x) for n in n_values for x in grid]
        tasks += [(n, marker.t_c_first_order / marker.t_c0) for n, marker in zip(n_values, markers)]
        fractions = self._evaluate("fig2", fig2_point, tasks)
        curves = [fractions[i * t_points:(i + 1) * t_points] for i in range(len(n_values))]
        at_markers = fractions[len(n_values) * t_points:]

        columns = [Column(name="t_over_tc0")]
        for label in labels:
            columns.append(Column(name=f"f0_exact_N{label}"))
            columns.append(Column(name=f"f0_first_order_N{label}"))
        columns += [Column(name="f0_lda_limit"), Column(name="window_low"), Column(name="window_high")]

        rows = []
        for k, x in enumerate(grid):
            row = [x]
            for i, n in enumerate(n_values):
                row.append(curves[i][k])
                row.append(first_order_condensate_fraction(trap, n, x * tc0(trap, n)))
            row += [lda_condensate_fraction_limit(x), DETECTION_WINDOW[0], DETECTION_WINDOW[1]]
            rows.append(tuple(row))

        metadata = self._metadata(
            "fig2",
            shape=TrapShape.ISOTROPIC.value,
            n_atoms=n_values,
            t_points=t_points,
            t_over_tc0_range=list(FIG2_RANGE),
            detection_window=list(DETECTION_WINDOW),
            first_order_tc_over_tc0={
                label: result.t_c_first_order / result.t_c0 for label, result in zip(labels, markers)
            },
            f0_at_first_order_tc=dict(zip(labels, at_markers)),
        )
        return SweepTable(columns=columns, rows=rows, metadata=metadata)

    def anisoscan(
        self,
        shape: TrapShape,
        n_atoms: float = 1e5,
        s_max_scan: Optional[float] = None,
        points: int = 12,
        threshold: float = DEFAULT_THRESHOLD,
        s_values: Optional[Sequence[float]] = None,
    ) -> SweepTable:
        """Exact T_0.1% against first-order Tc over anisotropy s"""
        shape = TrapShape(shape)
        if shape == TrapShape.ISOTROPIC:
            raise DomainError("anisoscan needs a disk or cigar trap")
        boundary = max_anisotropy(shape, n_atoms, threshold)

        if s_values is None:
            if s_max_scan is None:
                s_max_scan = max(3.0 * boundary, 2.0)
            if s_max_scan <= 1.0:
                raise DomainError(f"s_max_scan must exceed 1, got {s_max_scan}")
            if points < 2:
                raise DomainError(f"anisoscan needs at least 2 points, got {points}")
            grid = lin_spaced(1.0, s_max_scan, points)
        else:
            grid = sorted(float(s) for s in s_values)
            if not grid or grid[0] < 1.0:
                raise DomainError(f"anisotropy values must be >= 1, got {list(s_values)}")

        rows = self._evaluate("anisoscan", anisoscan_row, [(shape, s, n_atoms, threshold) for s in grid])
        columns = [
            Column(name="s"),
            Column(name="t_0p1pct", unit="hbar_omega/k_B"),
            Column(name="tc_first_order", unit="hbar_omega/k_B"),
            Column(name="relative_deviation"),
            Column(name="valid", unit="bool"),
        ]
        metadata = self._metadata(
            "anisoscan",
            shape=shape.value,
            n_atoms=n_atoms,
            threshold=threshold,
            target_fraction=ANISOSCAN_FRACTION,
            validity_boundary_s=boundary,
            points=len(grid),
        )
        return SweepTable(columns=columns, rows=rows, metadata=metadata)

    def _evaluate(self, command: str, func: Callable, tasks: List[Tuple[Any, ...]]) -> List[Any]:
        """Run func over tasks; results come back in task order"""
        start_time = time.time()
        workers = max(1, min(self.workers, len(tasks)))

        if workers == 1:
            results = []
            for index, task in enumerate(tasks):
                try:
                    results.append(func(*task))
                except Exception as e:
                    raise SweepError(command, index, self._describe(task), e) from e
        else:
            executor = ProcessPoolExecutor(max_workers=workers)
            try:
                futures = [executor.submit(func, *task) for task in tasks]
                results = []
                for index, (task, future) in enumerate(zip(tasks, futures)):
                    try:
                        results.append(future.result())
                    except Exception as e:
                        raise SweepError(command, index, self._describe(task), e) from e
            finally:
                executor.shutdown(wait=True, cancel_futures=True)

        processing_time = int((time.time() - start_time) * 1000)
        log_sweep_metrics(command, len(tasks), workers, processing_time)
        return results

    @staticmethod
    def _describe(task: Tuple[Any, ...]) -> str:
        return ", ".join(getattr(item, "value", None) or format(item, "g") for item in task)

    @staticmethod
    def _metadata(command: str, **values: Any) -> dict:
        return {"command": command, "tool_version": __version__, **values}
