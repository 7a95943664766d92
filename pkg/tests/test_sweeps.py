import numpy as np
import pytest

from bectc import __version__
from bectc.exceptions import ConfigError, ConvergenceError, DomainError, SweepError
from bectc.models import TrapShape
from bectc.services import sweeps
from bectc.services.sweeps import SweepService


@pytest.fixture(scope="module")
def fig2_default():
    return SweepService(workers=1).fig2()


def test_fig1_two_points_has_exact_endpoints():
    table = SweepService().fig1(n_min=1e4, n_max=2e4, points=2)
    assert len(table.rows) == 2
    assert 10.0 ** table.rows[0][0] == pytest.approx(1e4, rel=1e-14)
    assert 10.0 ** table.rows[-1][0] == pytest.approx(2e4, rel=1e-14)
    assert table.headers == [
        "log10_N[1]",
        "tc0_over_tc0[1]",
        "tc_first_order_over_tc0[1]",
        "t_0p1pct_over_tc0[1]",
        "t_0p5pct_over_tc0[1]",
        "t_1pct_over_tc0[1]",
    ]
    assert table.metadata["command"] == "fig1"
    assert table.metadata["tool_version"] == __version__
    assert "unsafe" not in table.metadata


def test_fig1_first_order_between_thresholds():
    table = SweepService().fig1(n_min=3e4, n_max=1e6, points=3)
    for row in table.rows:
        _, unit, first_order, t_01, t_05, t_1 = row
        assert unit == 1.0
        assert t_1 < t_05 < t_01
        assert t_1 < first_order < t_01, row


def test_fig1_first_order_at_small_n_sits_just_below_t_1pct():
    log10_n, _, first_order, t_01, t_05, t_1 = sweeps.fig1_row(1e4)
    assert log10_n == 4.0
    assert t_1 < t_05 < t_01
    assert first_order < t_1
    assert first_order / t_1 == pytest.approx(1.0, abs=0.002)
    assert first_order == pytest.approx(0.966232, abs=1e-5)
    assert t_1 == pytest.approx(0.967213, abs=1e-5)


def test_fig1_below_validity_needs_unsafe():
    with pytest.raises(ConfigError):
        SweepService().fig1(n_min=1e3, n_max=1e4, points=2)
    table = SweepService().fig1(n_min=1e3, n_max=1e4, points=2, unsafe=True)
    assert table.metadata["unsafe"] is True


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_min": 50.0, "unsafe": True},
        {"n_min": 1e5, "n_max": 1e4},
        {"points": 1},
    ],
)
def test_fig1_rejects_bad_grids(kwargs):
    with pytest.raises(DomainError):
        SweepService().fig1(**kwargs)


@pytest.mark.slow
def test_fig1_defaults_converge_to_one():
    table = SweepService().fig1()
    assert len(table.rows) == 25
    last = table.rows[-1]
    assert all(abs(v - 1.0) < 0.05 for v in last[1:])
    for row in table.rows:
        if 4.5 <= row[0] <= 6.0 + 1e-9:
            assert row[5] < row[2] < row[3], row


def test_fig2_columns(fig2_default):
    assert [c.name for c in fig2_default.columns] == [
        "t_over_tc0",
        "f0_exact_N10000",
        "f0_first_order_N10000",
        "f0_exact_N100000",
        "f0_first_order_N100000",
        "f0_lda_limit",
        "window_low",
        "window_high",
    ]
    assert len(fig2_default.rows) == 60
    grid = fig2_default.column("t_over_tc0")
    assert grid[0] == 0.2 and grid[-1] == 1.3
    assert set(fig2_default.column("window_low")) == {0.001}
    assert set(fig2_default.column("window_high")) == {0.01}


def test_fig2_curves_decrease(fig2_default):
    for name in ("f0_exact_N10000", "f0_exact_N100000"):
        assert np.all(np.diff(fig2_default.column(name)) < 0), name


def test_fig2_smaller_n_condenses_later(fig2_default):
    for x, small, large in zip(
        fig2_default.column("t_over_tc0"),
        fig2_default.column("f0_exact_N10000"),
        fig2_default.column("f0_exact_N100000"),
    ):
        if x <= 0.9:
            assert small < large, x


def test_fig2_first_order_markers_in_detection_window(fig2_default):
    markers = fig2_default.metadata["first_order_tc_over_tc0"]
    fractions = fig2_default.metadata["f0_at_first_order_tc"]
    assert set(markers) == {"10000", "100000"}
    for label, f0 in fractions.items():
        assert 0.0005 <= f0 <= 0.02, (label, f0)
        assert markers[label] < 1.0


def test_fig2_lda_column(fig2_default):
    for x, f in zip(fig2_default.column("t_over_tc0"), fig2_default.column("f0_lda_limit")):
        assert f == pytest.approx(max(0.0, 1.0 - x ** 3), abs=1e-15)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_atoms": [50.0]},
        {"n_atoms": []},
        {"n_atoms": [1e4, 1.0000001e4]},
        {"t_points": 5},
    ],
)
def test_fig2_rejects_bad_inputs(kwargs):
    with pytest.raises(DomainError):
        SweepService().fig2(**kwargs)


def test_fig2_one_column_pair_and_marker_per_n():
    table = SweepService().fig2(n_atoms=[2e3, 1e3, 2e3], t_points=10)
    names = [c.name for c in table.columns]
    assert len(names) == len(set(names))
    assert names[1:5] == ["f0_exact_N2000", "f0_first_order_N2000", "f0_exact_N1000", "f0_first_order_N1000"]
    assert set(table.metadata["first_order_tc_over_tc0"]) == {"1000", "2000"}
    assert set(table.metadata["f0_at_first_order_tc"]) == {"1000", "2000"}


def test_parallel_sweep_matches_serial():
    serial = SweepService(workers=1).fig2(n_atoms=[1e3], t_points=10)
    parallel = SweepService(workers=2).fig2(n_atoms=[1e3], t_points=10)
    assert parallel.rows == serial.rows
    assert parallel.metadata == serial.metadata


def test_anisoscan_boundary_in_metadata():
    disk = SweepService().anisoscan(TrapShape.DISK, 1e5, s_max_scan=2.0, points=2)
    assert disk.metadata["validity_boundary_s"] == pytest.approx(3.2, abs=0.03)
    assert [row[0] for row in disk.rows] == [1.0, 2.0]
    assert all(row[4] == 1.0 for row in disk.rows)
    cigar = SweepService().anisoscan("cigar", 1e5, s_values=[12.0])
    assert cigar.metadata["validity_boundary_s"] == pytest.approx(10.4, abs=0.01)
    assert cigar.rows[0][4] == 0.0


def test_anisoscan_deviation_column():
    table = SweepService().anisoscan(TrapShape.DISK, 1e5, s_values=[3.0, 1.5])
    for s, t_exact, t_first, deviation, _ in table.rows:
        assert deviation == pytest.approx(abs(t_first - t_exact) / t_exact, rel=1e-15)
    assert table.column("s") == [1.5, 3.0]


def test_anisoscan_rejects_isotropic():
    with pytest.raises(DomainError):
        SweepService().anisoscan(TrapShape.ISOTROPIC, 1e5)


def test_failed_grid_point_is_named(monkeypatch):
    def broken(n_atoms, t_over_tc0):
        if t_over_tc0 > 1.0:
            raise ConvergenceError("no root")
        return 0.5

    monkeypatch.setattr(sweeps, "fig2_point", broken)
    with pytest.raises(SweepError) as info:
        SweepService().fig2(n_atoms=[1e4], t_points=10)
    assert info.value.command == "fig2"
    assert "grid point" in str(info.value)
    assert isinstance(info.value.cause, ConvergenceError)


def test_default_worker_count_follows_settings():
    assert SweepService().workers == 1
    assert SweepService(workers=3).workers == 3
