"""Closed-form small-signal verification of a finished design.

The report re-reads every sized device off its chart at the recorded
operating point, rebuilds the two stage gains, the pole/zero set and the
derived metrics, and grades them against the spec.  The frequency response
uses the standard compensated two-stage form

    A(jf) = a0 (1 - jf/z1) / ((1 + jf/p1)(1 + jf/p2))

with a feedforward (right-half-plane) zero, so both the zero and the
second pole subtract phase.  Branch currents and the compensation cap are
taken from the design record; everything else comes from the charts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GridRangeError, InvalidArgumentError, InvalidDesignError
from .lut import DeviceLUT, Quantity, interp
from .synth import AmpDesign, AmpSpec

GBW_REL_TOL = 0.05  # the bandwidth verdict allows +-5 %


def db20(x: float) -> float:
    """Voltage ratio to decibels."""
    return 20.0 * math.log10(x)


@dataclass(frozen=True)
class MetricVerdict:
    """One row of the compliance table."""

    name: str
    value: float
    target: float | None   # None means unconstrained
    sense: str              # ">=", "<=", "+-5%" or "info"
    passed: bool


@dataclass(frozen=True)
class BodePoint:
    freq: float
    mag_db: float
    phase_deg: float

    def __post_init__(self) -> None:
        if self.freq <= 0:
            raise InvalidArgumentError(f"frequency must be positive, got {self.freq}")


@dataclass(frozen=True)
class AmpReport:
    """Verified metrics of one design against one spec."""

    av1: float
    av2: float
    a0: float
    gbw: float
    p1: float
    p2: float
    z1: float
    pm: float
    cmrr: float
    slew: float
    power: float
    pass_fail: tuple[MetricVerdict, ...]
    overall_pass: bool

    @property
    def av1_db(self) -> float:
        return db20(self.av1)

    @property
    def av2_db(self) -> float:
        return db20(self.av2)

    @property
    def a0_db(self) -> float:
        return db20(self.a0)

    @property
    def cmrr_db(self) -> float:
        return db20(self.cmrr)


def _chart_point(
    lut: DeviceLUT, device: str, l: float, vgs: float, w: float
) -> tuple[float, float, float]:
    """(id, gm, gds) of one device re-read off its chart.

    Grid violations are re-raised with the device name on the axis label.
    """
    try:
        id_w = interp(lut, l, vgs, Quantity.ID_W)
        gm_id = interp(lut, l, vgs, Quantity.GM_ID)
        gm_gds = interp(lut, l, vgs, Quantity.GM_GDS)
    except GridRangeError as exc:
        raise GridRangeError(f"{device}.{exc.axis}", exc.value, exc.lo, exc.hi) from exc
    i_d = w * id_w
    gm = gm_id * i_d
    return i_d, gm, gm / gm_gds


def report(
    design: AmpDesign, lut_n: DeviceLUT, lut_p: DeviceLUT, spec: AmpSpec
) -> AmpReport:
    """Build the full verification report for a design.

    Raises InvalidDesignError for degenerate records (non-positive c_c,
    pole ordering that breaks the dominant-pole model).
    """
    if design.c_c <= 0:
        raise InvalidDesignError(f"compensation capacitance must be positive, got {design.c_c}")

    _, gm12, gds12 = _chart_point(lut_p, "M1", design.m1.l, design.vgs1, design.m1.w)
    _, gm34, gds34 = _chart_point(lut_n, "M3", design.m3.l, design.vgs34, design.m3.w)
    _, _, gds5 = _chart_point(lut_p, "M5", design.m5.l, design.vgs5, design.m5.w)
    _, gm6, gds6 = _chart_point(lut_n, "M6", design.m6.l, design.vgs6, design.m6.w)
    # M7 mirrors M6's gate drive.
    _, _, gds7 = _chart_point(lut_n, "M7", design.m7.l, design.vgs6, design.m7.w)

    av1 = gm12 / (gds12 + gds34)
    av2 = gm6 / (gds6 + gds7)
    a0 = av1 * av2

    gbw = gm12 / (2.0 * math.pi * design.c_c)
    z1 = gm6 / (2.0 * math.pi * design.c_c)
    p2 = gm6 / (2.0 * math.pi * spec.c_load)
    p1 = gbw / a0
    if not p1 < p2:
        raise InvalidDesignError(
            f"dominant-pole ordering violated: p1 = {p1} Hz >= p2 = {p2} Hz"
        )

    pm = 90.0 - math.degrees(math.atan(gbw / p2)) - math.degrees(math.atan(gbw / z1))
    cmrr = av1 * 2.0 * gm34 / gds5
    slew = design.i_d5 / design.c_c
    power = spec.vdd * (design.i_d5 + design.i_d6 + design.i_d8)

    partial = AmpReport(
        av1=av1, av2=av2, a0=a0, gbw=gbw, p1=p1, p2=p2, z1=z1,
        pm=pm, cmrr=cmrr, slew=slew, power=power,
        pass_fail=(), overall_pass=False,
    )
    verdicts = check_against_spec(partial, spec)
    return AmpReport(
        av1=av1, av2=av2, a0=a0, gbw=gbw, p1=p1, p2=p2, z1=z1,
        pm=pm, cmrr=cmrr, slew=slew, power=power,
        pass_fail=verdicts, overall_pass=all(v.passed for v in verdicts),
    )


def check_against_spec(rep: AmpReport, spec: AmpSpec) -> tuple[MetricVerdict, ...]:
    """Grade report metrics against the spec, boundary inclusive.

    Gain, phase margin, CMRR and slew must meet or exceed their targets;
    bandwidth must land within +-5 %; power must not exceed the budget
    (unconstrained when no budget is set).
    """
    gain_target = spec.av1_target * spec.av2_target
    gbw_ok = abs(rep.gbw - spec.gbw) <= GBW_REL_TOL * spec.gbw
    verdicts = (
        MetricVerdict("dc_gain", rep.a0, gain_target, ">=", rep.a0 >= gain_target),
        MetricVerdict("gbw", rep.gbw, spec.gbw, "+-5%", gbw_ok),
        MetricVerdict("phase_margin", rep.pm, spec.pm_target, ">=", rep.pm >= spec.pm_target),
        MetricVerdict("cmrr", rep.cmrr, spec.cmrr_target, ">=", rep.cmrr >= spec.cmrr_target),
        MetricVerdict("slew_rate", rep.slew, spec.slew_rate, ">=", rep.slew >= spec.slew_rate),
        MetricVerdict(
            "power_dissipation", rep.power, spec.power_budget, "<=",
            spec.power_budget is None or rep.power <= spec.power_budget,
        ),
    )
    return verdicts


def transfer_magnitude(rep: AmpReport, freq: float) -> float:
    """|A(jf)|; exact a0 at freq = 0."""
    num = math.hypot(1.0, freq / rep.z1)
    den = math.hypot(1.0, freq / rep.p1) * math.hypot(1.0, freq / rep.p2)
    return rep.a0 * num / den


def transfer_phase_deg(rep: AmpReport, freq: float) -> float:
    """Phase of A(jf) in degrees, continuous with phase(0) = 0.

    Both poles and the feedforward zero contribute lag, so the phase runs
    from 0 toward -270 degrees.
    """
    return -(
        math.degrees(math.atan(freq / rep.p1))
        + math.degrees(math.atan(freq / rep.p2))
        + math.degrees(math.atan(freq / rep.z1))
    )


def bode(
    rep: AmpReport, f_start: float, f_stop: float, points_per_decade: int
) -> list[BodePoint]:
    """Log-spaced frequency response points from f_start up to f_stop.

    The first point is exactly f_start; subsequent points step by
    10**(1/points_per_decade).
    """
    if not 0 < f_start < f_stop:
        raise InvalidArgumentError(
            f"need 0 < f_start < f_stop, got [{f_start}, {f_stop}]"
        )
    if points_per_decade < 1:
        raise InvalidArgumentError(
            f"points_per_decade must be >= 1, got {points_per_decade}"
        )
    n_steps = int(math.floor(points_per_decade * math.log10(f_stop / f_start) + 1e-9))
    points = []
    for i in range(n_steps + 1):
        f = f_start * 10.0 ** (i / points_per_decade)
        points.append(
            BodePoint(
                freq=f,
                mag_db=db20(transfer_magnitude(rep, f)),
                phase_deg=transfer_phase_deg(rep, f),
            )
        )
    return points


def bode_csv(points: list[BodePoint]) -> str:
    """Render bode points as ``freq_hz,mag_db,phase_deg`` CSV text."""
    lines = ["freq_hz,mag_db,phase_deg"]
    for p in points:
        lines.append(f"{p.freq!r},{p.mag_db!r},{p.phase_deg!r}")
    return "\n".join(lines) + "\n"
