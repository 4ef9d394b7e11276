import numpy as np
import pytest

from gmidkit import (
    ChartSeries,
    DeviceLUT,
    GridRangeError,
    InfeasibleGainError,
    InfeasibleTargetError,
    InvalidArgumentError,
    LutParseError,
    Quantity,
    emit_charts,
    interp,
    invert_gmid,
    load_lut,
    save_lut,
    select_length,
)
from gmidkit.lut import lut_to_csv, parse_lut_csv

RNG_SEED = 20240917


def tiny_lut():
    """Hand-built 2x2 chart with exactly representable coordinates."""
    return DeviceLUT(
        polarity="N",
        l_grid=[1e-7, 2e-7],
        vgs_grid=[0.25, 0.5],
        gm_over_id=[[8.0, 4.0], [8.5, 4.5]],
        gm_over_gds=[[30.0, 20.0], [60.0, 40.0]],
        id_per_w=[[1.0, 3.0], [0.5, 1.5]],
        vds_char=0.45,
    )


# ---------------------------------------------------------------------------
# construction invariants
# ---------------------------------------------------------------------------

def test_lut_rejects_non_ascending_grid():
    with pytest.raises(InvalidArgumentError):
        DeviceLUT(
            polarity="N", l_grid=[2e-7, 1e-7], vgs_grid=[0.25, 0.5],
            gm_over_id=[[8.0, 4.0], [8.5, 4.5]],
            gm_over_gds=[[30.0, 20.0], [60.0, 40.0]],
            id_per_w=[[1.0, 3.0], [0.5, 1.5]], vds_char=0.45,
        )


def test_lut_rejects_non_monotone_rows():
    with pytest.raises(InvalidArgumentError):
        DeviceLUT(
            polarity="N", l_grid=[1e-7, 2e-7], vgs_grid=[0.25, 0.5],
            gm_over_id=[[4.0, 8.0], [8.5, 4.5]],  # first row rises
            gm_over_gds=[[30.0, 20.0], [60.0, 40.0]],
            id_per_w=[[1.0, 3.0], [0.5, 1.5]], vds_char=0.45,
        )


def test_lut_arrays_immutable(nmos_lut):
    with pytest.raises(ValueError):
        nmos_lut.gm_over_id[0, 0] = 1.0


# ---------------------------------------------------------------------------
# interpolation
# ---------------------------------------------------------------------------

def test_interp_grid_nodes_bit_exact(nmos_lut):
    for i in (0, 3, 9):
        for j in (0, 5, 9):
            l = float(nmos_lut.l_grid[i])
            vgs = float(nmos_lut.vgs_grid[j])
            assert interp(nmos_lut, l, vgs, Quantity.GM_ID) == nmos_lut.gm_over_id[i, j]
            assert interp(nmos_lut, l, vgs, Quantity.ID_W) == nmos_lut.id_per_w[i, j]


def test_interp_midpoint_is_arithmetic_mean():
    lut = tiny_lut()
    mid_vgs = 0.375  # exactly representable midpoint of 0.25 and 0.5
    got = interp(lut, 1e-7, mid_vgs, Quantity.GM_ID)
    assert got == (8.0 + 4.0) / 2.0
    got = interp(lut, 1.5e-7, 0.25, Quantity.ID_W)  # l midpoint, grid-aligned vgs
    assert got == (1.0 + 0.5) / 2.0


def test_interp_out_of_range_names_axis_and_bounds(nmos_lut):
    with pytest.raises(GridRangeError) as err:
        interp(nmos_lut, 100e-9, 0.95, Quantity.GM_ID)
    msg = str(err.value)
    assert "vgs" in msg and "0.1" in msg and "0.9" in msg

    with pytest.raises(GridRangeError) as err:
        interp(nmos_lut, 10e-9, 0.5, Quantity.GM_ID)
    assert err.value.axis == "l"


def test_interp_never_overshoots(nmos_lut):
    rng = np.random.default_rng(RNG_SEED)
    lg, vg = nmos_lut.l_grid, nmos_lut.vgs_grid
    for _ in range(500):
        l = rng.uniform(lg[0], lg[-1])
        vgs = rng.uniform(vg[0], vg[-1])
        i = min(np.searchsorted(lg, l, side="right") - 1, len(lg) - 2)
        j = min(np.searchsorted(vg, vgs, side="right") - 1, len(vg) - 2)
        corners = nmos_lut.gm_over_gds[i:i + 2, j:j + 2]
        value = interp(nmos_lut, l, vgs, Quantity.GM_GDS)
        assert corners.min() <= value <= corners.max()


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------

def test_invert_round_trips_grid_nodes(nmos_lut):
    for i in (0, 4, 9):
        for j in (1, 5, 8):
            l = float(nmos_lut.l_grid[i])
            target = float(nmos_lut.gm_over_id[i, j])
            vgs = invert_gmid(nmos_lut, l, target)
            assert vgs == pytest.approx(float(nmos_lut.vgs_grid[j]), abs=1e-6)


def test_invert_reproduces_target_through_interp(nmos_lut):
    rng = np.random.default_rng(RNG_SEED)
    lo = float(nmos_lut.gm_over_id.min())
    hi = float(nmos_lut.gm_over_id.max())
    for _ in range(200):
        l = float(rng.uniform(nmos_lut.l_grid[0], nmos_lut.l_grid[-1]))
        target = float(rng.uniform(lo + 1e-6, hi - 1e-6))
        vgs = invert_gmid(nmos_lut, l, target)
        assert interp(nmos_lut, l, vgs, Quantity.GM_ID) == pytest.approx(target, rel=1e-6)


def test_invert_forward_round_trip_sweep(nmos_lut):
    # 1000 random in-range targets built by a forward read-off; the
    # round-trip vgs error stays below 0.1 percent of the sweep span.
    rng = np.random.default_rng(RNG_SEED)
    span = float(nmos_lut.vgs_grid[-1] - nmos_lut.vgs_grid[0])
    worst = 0.0
    for _ in range(1000):
        l = float(rng.uniform(nmos_lut.l_grid[0], nmos_lut.l_grid[-1]))
        vgs = float(rng.uniform(nmos_lut.vgs_grid[0], nmos_lut.vgs_grid[-1]))
        target = interp(nmos_lut, l, vgs, Quantity.GM_ID)
        back = invert_gmid(nmos_lut, l, target)
        worst = max(worst, abs(back - vgs))
    assert worst < 1e-3 * span


def test_invert_infeasible_above_weak_inversion_plateau(nmos_lut):
    # The default surrogate ceiling 1/(n*ut) = 29.755 1/V is never reached
    # on the chart, so asking for it must fail and report the interval.
    with pytest.raises(InfeasibleTargetError) as err:
        invert_gmid(nmos_lut, 100e-9, 29.755)
    assert err.value.hi < 29.755
    assert err.value.lo > 0


# ---------------------------------------------------------------------------
# length selection
# ---------------------------------------------------------------------------

def test_select_length_vacuous_requirement_gives_smallest_length(nmos_lut):
    assert select_length(nmos_lut, 10.0, 0.0) == 65e-9


def test_select_length_infeasible_reports_best(nmos_lut):
    l_max = float(nmos_lut.l_grid[-1])
    vgs = invert_gmid(nmos_lut, l_max, 10.0)
    best = interp(nmos_lut, l_max, vgs, Quantity.GM_GDS)
    with pytest.raises(InfeasibleGainError) as err:
        select_length(nmos_lut, 10.0, best * 1.001)
    assert err.value.best == pytest.approx(best, rel=1e-9)
    assert err.value.best_l == l_max


def test_select_length_monotone_in_requirement(nmos_lut):
    vgs = invert_gmid(nmos_lut, float(nmos_lut.l_grid[-1]), 10.0)
    top = interp(nmos_lut, float(nmos_lut.l_grid[-1]), vgs, Quantity.GM_GDS)
    requirements = np.linspace(0.0, top, 40)
    chosen = [select_length(nmos_lut, 10.0, float(r)) for r in requirements]
    assert all(b >= a for a, b in zip(chosen, chosen[1:]))


def test_select_length_dominance(nmos_lut):
    # Any grid length above the returned one also satisfies the requirement.
    requirement = 40.0
    l_sel = select_length(nmos_lut, 10.0, requirement)
    for l in nmos_lut.l_grid[nmos_lut.l_grid >= l_sel]:
        vgs = invert_gmid(nmos_lut, float(l), 10.0)
        assert interp(nmos_lut, float(l), vgs, Quantity.GM_GDS) >= requirement


# ---------------------------------------------------------------------------
# chart emission
# ---------------------------------------------------------------------------

def test_emit_charts_panel_structure(nmos_lut):
    series = emit_charts(nmos_lut)
    assert len(series) == 3 * 10
    for panel in (1, 2, 3):
        per_panel = [s for s in series if s.panel == panel]
        assert len(per_panel) == 10
        for s in per_panel:
            assert len(s.x) == 10 and len(s.y) == 10
            assert all(b > a for a, b in zip(s.x, s.x[1:]))  # ascending abscissa


def test_emit_charts_efficiency_panel_strictly_decreasing(nmos_lut):
    for s in emit_charts(nmos_lut):
        if s.panel == 3:
            assert all(b < a for a, b in zip(s.y, s.y[1:]))


def test_emit_charts_minimal_grid_values():
    lut = tiny_lut()
    series = emit_charts(lut)
    assert len(series) == 6
    panel3 = [s for s in series if s.panel == 3]
    assert list(panel3[0].x) == [0.25, 0.5]
    assert list(panel3[0].y) == [8.0, 4.0]
    panel1 = [s for s in series if s.panel == 1]
    assert list(panel1[0].x) == [4.0, 8.0]       # reversed to ascend
    assert list(panel1[0].y) == [20.0, 30.0]


def test_pmos_panel3_uses_source_gate_axis(pmos_lut):
    series = [s for s in emit_charts(pmos_lut) if s.panel == 3]
    assert series[0].x_name == "vsg_V"


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def test_csv_round_trip_is_exact(nmos_lut, tmp_path):
    path = tmp_path / "n.csv"
    save_lut(nmos_lut, path)
    back = load_lut(path)
    assert np.array_equal(back.l_grid, nmos_lut.l_grid)
    assert np.array_equal(back.vgs_grid, nmos_lut.vgs_grid)
    assert np.array_equal(back.gm_over_id, nmos_lut.gm_over_id)
    assert np.array_equal(back.gm_over_gds, nmos_lut.gm_over_gds)
    assert np.array_equal(back.id_per_w, nmos_lut.id_per_w)
    assert back.polarity == nmos_lut.polarity
    assert back.vds_char == nmos_lut.vds_char


def test_csv_format_header_shape(nmos_lut):
    text = lut_to_csv(nmos_lut)
    lines = text.split("\n")
    assert lines[0] == "polarity,vds_char_V"
    assert lines[1] == "N,0.45"
    assert lines[2] == "l_m,vgs_V,gm_over_id_perV,gm_over_gds,id_per_w_A_per_m"
    assert len(lines) == 3 + 100 + 1  # headers + rows + trailing newline
    assert "\r" not in text


def test_parse_rejects_missing_column(nmos_lut):
    text = lut_to_csv(nmos_lut)
    lines = text.splitlines()
    lines[2] = "l_m,vgs_V,gm_over_id_perV,id_per_w_A_per_m"
    with pytest.raises(LutParseError) as err:
        parse_lut_csv("\n".join(lines))
    assert "gm_over_gds" in str(err.value)


def test_parse_rejects_ragged_row(nmos_lut):
    lines = lut_to_csv(nmos_lut).splitlines()
    lines[10] = lines[10].rsplit(",", 1)[0]  # drop a field on data line 10
    with pytest.raises(LutParseError) as err:
        parse_lut_csv("\n".join(lines))
    assert err.value.line == 11  # splitlines dropped the trailing blank
    assert "line 11" in str(err.value)


def test_parse_rejects_duplicate_grid_key(nmos_lut):
    lines = lut_to_csv(nmos_lut).splitlines()
    lines.insert(5, lines[4])  # duplicate the second data row
    with pytest.raises(LutParseError) as err:
        parse_lut_csv("\n".join(lines))
    assert "duplicate" in str(err.value)


def test_parse_rejects_non_ascending_grid(nmos_lut):
    lines = lut_to_csv(nmos_lut).splitlines()
    data = lines[3:]
    data[0], data[1] = data[1], data[0]
    with pytest.raises(LutParseError) as err:
        parse_lut_csv("\n".join(lines[:3] + data))
    assert "ascending" in str(err.value)


def test_parse_rejects_malformed_header():
    with pytest.raises(LutParseError) as err:
        parse_lut_csv("polarity;vds\nP,0.45\nx\ny\n")
    assert err.value.line == 1


def test_chart_series_requires_two_points():
    with pytest.raises(InvalidArgumentError):
        ChartSeries(1, "L=65nm", np.array([1.0]), np.array([2.0]), "x", "y")


def test_zero_clm_chart_round_trips_and_selects(tmp_path):
    # With no channel-length modulation the intrinsic-gain sheet is all
    # infinite; persistence and length selection must still work.
    from gmidkit import DeviceParams, Polarity, generate_lut, thermal_voltage

    params = DeviceParams(
        polarity=Polarity.N, vth0=0.30, n=1.3, ut=thermal_voltage(300.0),
        k_prime=300e-6, lambda0=0.0, vds_char=0.45,
    )
    lut = generate_lut(params)
    assert np.all(np.isinf(lut.gm_over_gds))

    path = tmp_path / "ideal.csv"
    save_lut(lut, path)
    back = load_lut(path)
    assert np.all(np.isinf(back.gm_over_gds))
    assert np.array_equal(back.gm_over_id, lut.gm_over_id)

    # any finite gain requirement is met by the smallest length
    assert select_length(back, 10.0, 1e9) == 65e-9
