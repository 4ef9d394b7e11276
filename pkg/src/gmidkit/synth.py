"""Two-stage Miller op-amp synthesis from sizing charts.

The flow turns an amplifier spec into transistor sizes in one pass:

    noise budget          -> input-pair transconductance
    bandwidth target      -> pole-splitting compensation capacitor
    slew requirement      -> tail and input branch currents
    per-stage gain        -> output-conductance budgets
    CMRR target           -> tail output-conductance limit
    stability (PM) target -> second-stage current and transconductance

Each device is then placed on its chart: the required gm/id fixes the gate
drive, the intrinsic-gain need picks the shortest adequate channel, and the
chart's current density fixes the width.  M1/M2 and the tail-side mirrors
(M5, M8) live on the P chart; the first-stage load (M3/M4) and the output
stage (M6, M7) live on the N chart.

All operations are pure; synthesis is deterministic for fixed inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .device import BOLTZMANN_J_PER_K
from .errors import (
    GridRangeError,
    InfeasibleError,
    InvalidArgumentError,
    InvalidDesignError,
    SynthesisError,
)
from .lut import DeviceLUT, Quantity, interp, invert_gmid, select_length

# Widths snap up to a manufacturable grid.
WIDTH_SNAP_M = 10e-9

# Starting transconductance efficiency for devices whose gm is not pinned by
# the spec (first-stage load, tail source): moderate inversion.
MODERATE_INVERSION_GM_ID = 10.0

# The load-efficiency re-check loop is bounded.
MAX_LOAD_ROUNDS = 5

# The phase-margin knob is backed off from the exact solve so that chart
# re-evaluation of the finished design (width snap included) cannot land the
# verified margin below target.  Valid while widths stay well above the
# 10 nm snap, which holds for any spec this chart range can serve.
ALPHA_BACKOFF = 1e-3


@dataclass(frozen=True)
class AmpSpec:
    """Target specification of the amplifier.

    Gains and CMRR are linear ratios; pm_target is in degrees; everything
    else is SI.  power_budget is optional (None leaves power unchecked).
    vcm_low is carried through to reports, not synthesized against.
    """

    vdd: float
    temperature: float
    noise_density: float       # input-referred noise voltage density (V/sqrt(Hz))
    gbw: float                 # gain-bandwidth product (Hz)
    c_load: float              # load capacitance (F)
    slew_rate: float           # V/s
    av1_target: float          # first-stage DC gain, linear
    av2_target: float          # second-stage DC gain, linear
    cmrr_target: float         # linear
    pm_target: float           # degrees, in (0, 90)
    vcm_low: float
    power_budget: float | None = None

    def __post_init__(self) -> None:
        positive = (
            ("vdd", self.vdd),
            ("temperature", self.temperature),
            ("noise_density", self.noise_density),
            ("gbw", self.gbw),
            ("c_load", self.c_load),
            ("slew_rate", self.slew_rate),
            ("av1_target", self.av1_target),
            ("av2_target", self.av2_target),
            ("cmrr_target", self.cmrr_target),
            ("vcm_low", self.vcm_low),
        )
        for name, value in positive:
            if not value > 0:
                raise InvalidArgumentError(f"spec field {name} must be positive, got {value}")
        if not 0 < self.pm_target < 90:
            raise InvalidArgumentError(
                f"pm_target must lie in (0, 90) degrees, got {self.pm_target}"
            )
        if self.power_budget is not None and not self.power_budget > 0:
            raise InvalidArgumentError(
                f"power_budget must be positive when given, got {self.power_budget}"
            )


@dataclass(frozen=True)
class DeviceSize:
    w: float  # m
    l: float  # m


class SizedDevice(NamedTuple):
    w: float
    l: float
    vgs: float


class LoadVerdict(NamedTuple):
    """Outcome of the first-stage load efficiency re-check."""

    accepted: bool
    gm_id: float  # the efficiency actually found on the chart


class ActiveLoad(NamedTuple):
    w: float
    l: float
    vgs: float
    gm_id: float
    rounds: int


@dataclass(frozen=True)
class AmpDesign:
    """Fully sized design: geometries, bias currents and small-signal values.

    M1/M2 (input pair) and M3/M4 (load) are identical pairs.  i_d5 is twice
    the per-side input current; the second-stage branch carries i_d6 = i_d7.
    alpha is the phase-margin knob, the ratio of first-stage to second-stage
    transconductance efficiency.
    """

    m1: DeviceSize
    m2: DeviceSize
    m3: DeviceSize
    m4: DeviceSize
    m5: DeviceSize
    m6: DeviceSize
    m7: DeviceSize
    m8: DeviceSize
    c_c: float
    alpha: float
    i_d1: float
    i_d5: float
    i_d6: float
    i_d7: float
    i_d8: float
    vgs1: float
    vgs34: float
    vgs5: float
    vgs6: float
    gm12: float
    gm34: float
    gm6: float
    gds12: float
    gds34: float
    gds5: float
    gds6: float
    gds7: float

    def __post_init__(self) -> None:
        if self.m1 != self.m2:
            raise InvalidDesignError("input pair M1/M2 must be identical")
        if self.m3 != self.m4:
            raise InvalidDesignError("load pair M3/M4 must be identical")
        for name in ("c_c", "alpha", "i_d1", "i_d5", "i_d6", "i_d7", "i_d8"):
            if not getattr(self, name) > 0:
                raise InvalidDesignError(f"design field {name} must be positive")
        if abs(self.i_d5 - 2.0 * self.i_d1) > 1e-9 * self.i_d5:
            raise InvalidDesignError("tail current must equal twice the input branch current")
        if abs(self.i_d7 - self.i_d6) > 1e-9 * self.i_d6:
            raise InvalidDesignError("second-stage branch requires i_d7 = i_d6")

    def devices(self) -> dict[str, DeviceSize]:
        return {
            "M1": self.m1, "M2": self.m2, "M3": self.m3, "M4": self.m4,
            "M5": self.m5, "M6": self.m6, "M7": self.m7, "M8": self.m8,
        }


def snap_width(w: float) -> float:
    """Round a width up to the manufacturing snap grid."""
    return math.ceil(w / WIDTH_SNAP_M) * WIDTH_SNAP_M


def gm_from_noise(noise_density: float, temperature: float) -> float:
    """Input-pair transconductance that meets an input-referred noise density.

    The pair's thermal noise dominates when the load contributes little, and
    the required transconductance is (16/3) kT / Sn with Sn the squared
    density.
    """
    if noise_density <= 0:
        raise InvalidArgumentError(f"noise_density must be positive, got {noise_density}")
    if temperature <= 0:
        raise InvalidArgumentError(f"temperature must be positive, got {temperature}")
    s_n = noise_density * noise_density
    return (16.0 / 3.0) * BOLTZMANN_J_PER_K * temperature / s_n


def compensation_cap(gm12: float, gbw: float) -> float:
    """Pole-splitting capacitor that places the unity-gain frequency at gbw."""
    if gm12 <= 0:
        raise InvalidArgumentError(f"gm12 must be positive, got {gm12}")
    if gbw <= 0:
        raise InvalidArgumentError(f"gbw must be positive, got {gbw}")
    return gm12 / (2.0 * math.pi * gbw)


def tail_currents(slew_rate: float, c_c: float) -> tuple[float, float]:
    """(tail, per-side) currents meeting the slew requirement through c_c."""
    if slew_rate <= 0:
        raise InvalidArgumentError(f"slew_rate must be positive, got {slew_rate}")
    if c_c <= 0:
        raise InvalidArgumentError(f"c_c must be positive, got {c_c}")
    i_d5 = slew_rate * c_c
    return i_d5, i_d5 / 2.0


def stage1_conductances(gm12: float, av1_target: float) -> tuple[float, float]:
    """Equal-split output-conductance budget delivering the stage gain.

    The stage gain is gm over the sum of the two output conductances;
    splitting the sum evenly gives gm/(2 Av) per side.
    """
    if av1_target <= 0:
        raise InvalidArgumentError(f"av1_target must be positive, got {av1_target}")
    gds = gm12 / (2.0 * av1_target)
    return gds, gds


def size_device(lut: DeviceLUT, gm: float, i_d: float, gds_max: float) -> SizedDevice:
    """Chart-driven sizing of one device.

    gm/i_d fixes the efficiency; the gm/gds requirement (gm over the
    conductance budget) picks the shortest adequate channel; the chart's
    current density fixes the width, snapped up to the 10 nm grid.
    Infeasible targets propagate from the chart operations.
    """
    if gm <= 0 or i_d <= 0:
        raise InvalidArgumentError(f"gm and i_d must be positive, got {gm}, {i_d}")
    if gds_max <= 0:
        raise InvalidArgumentError(f"gds_max must be positive, got {gds_max}")
    gm_id = gm / i_d
    l = select_length(lut, gm_id, gm / gds_max)
    vgs = invert_gmid(lut, l, gm_id)
    w = i_d / interp(lut, l, vgs, Quantity.ID_W)
    return SizedDevice(snap_width(w), l, vgs)


def active_load_check(
    lut_n: DeviceLUT, vgs34: float, l34: float, assumed_gm_id: float
) -> LoadVerdict:
    """Re-read the load's efficiency off the chart and compare to the assumption.

    A computed efficiency at or below the assumption means the realized gain
    is at least what the budget asked for: accept.  A higher efficiency
    means less gain than assumed: hand back the actual value so the caller
    can redo the length selection with it.  Equality holds to a 1e-9
    relative guard so chart round-off cannot flip the verdict.
    """
    actual = interp(lut_n, l34, vgs34, Quantity.GM_ID)
    accepted = actual <= assumed_gm_id * (1.0 + 1e-9)
    return LoadVerdict(accepted, actual)


def size_active_load(
    lut_n: DeviceLUT,
    i_d: float,
    gds_max: float,
    gm_id_init: float = MODERATE_INVERSION_GM_ID,
    max_rounds: int = MAX_LOAD_ROUNDS,
) -> ActiveLoad:
    """Size the first-stage load, iterating the efficiency assumption.

    Starts in moderate inversion and repeats length selection with the
    chart's own efficiency reading until the verdict accepts.  Raises
    InfeasibleError if the assumption does not settle within max_rounds.
    """
    gm_id = gm_id_init
    for rounds in range(1, max_rounds + 1):
        gm = gm_id * i_d
        l = select_length(lut_n, gm_id, gm / gds_max)
        vgs = invert_gmid(lut_n, l, gm_id)
        verdict = active_load_check(lut_n, vgs, l, gm_id)
        if verdict.accepted:
            w = snap_width(i_d / interp(lut_n, l, vgs, Quantity.ID_W))
            return ActiveLoad(w, l, vgs, gm_id, rounds)
        gm_id = verdict.gm_id
    raise InfeasibleError(
        f"load efficiency assumption did not settle within {max_rounds} rounds"
    )


def tail_requirement(
    cmrr_target: float, gm12: float, gds12: float, gds34: float, gm34: float
) -> float:
    """Largest tail output conductance that still meets the CMRR target.

    CMRR is the differential gain times twice the load transconductance
    times the tail output resistance; solving for that resistance and
    inverting it gives the conductance limit.
    """
    for name, value in (("cmrr_target", cmrr_target), ("gm12", gm12),
                        ("gds12", gds12), ("gds34", gds34), ("gm34", gm34)):
        if value <= 0:
            raise InvalidArgumentError(f"{name} must be positive, got {value}")
    r_ss = cmrr_target * (gds12 + gds34) / (gm12 * 2.0 * gm34)
    return 1.0 / r_ss


def second_stage_current(i_d1: float, c_c: float, c_load: float) -> float:
    """Smallest second-stage current compatible with the slew current ratio.

    The input-to-output branch current ratio may not exceed
    c_c / (2 (c_load + c_c)); binding that limit with equality minimizes
    second-stage power.
    """
    if i_d1 <= 0 or c_c <= 0:
        raise InvalidArgumentError(f"i_d1 and c_c must be positive, got {i_d1}, {c_c}")
    if c_load < 0:
        raise InvalidArgumentError(f"c_load must be >= 0, got {c_load}")
    return i_d1 * 2.0 * (c_load + c_c) / c_c


def phase_margin(alpha: float, i_d1: float, i_d6: float, c_load: float, c_c: float) -> float:
    """Phase margin in degrees under the dominant-pole model.

    With r = i_d1/i_d6, the margin is 90 deg minus the arctangents of
    alpha*r*(c_load/c_c) and alpha*r.  Strictly decreasing in alpha, in the
    current ratio and in the capacitance ratio.
    """
    if i_d1 <= 0 or i_d6 <= 0 or c_load <= 0 or c_c <= 0:
        raise InvalidArgumentError("currents and capacitances must be positive")
    if alpha < 0:
        raise InvalidArgumentError(f"alpha must be >= 0, got {alpha}")
    r = alpha * (i_d1 / i_d6)
    return 90.0 - math.degrees(math.atan(r * (c_load / c_c))) - math.degrees(math.atan(r))


def solve_alpha(pm_target: float, i_d1: float, i_d6: float, c_load: float, c_c: float) -> float:
    """Invert the phase-margin relation for the control knob.

    Bisection on the strictly decreasing margin-vs-alpha curve; the result
    reproduces pm_target to well within 0.01 degrees.  Targets at or above
    90 degrees are unreachable for positive ratios.
    """
    if pm_target >= 90.0:
        raise InfeasibleError(f"phase-margin target {pm_target} deg is unreachable (>= 90)")
    if pm_target <= 0.0:
        raise InvalidArgumentError(f"pm_target must be positive, got {pm_target}")

    hi = 1.0
    for _ in range(200):
        if phase_margin(hi, i_d1, i_d6, c_load, c_c) < pm_target:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phase_margin(mid, i_d1, i_d6, c_load, c_c) > pm_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mirror_width(w5: float, i_d8: float, i_d5: float) -> float:
    """Bias-mirror width from the tail width and the current ratio.

    Mirror widths scale with the copied current; the 2/3 factor corrects
    for the diode-connected reference sitting at a different drain bias
    than the tail device.
    """
    if w5 <= 0 or i_d8 <= 0 or i_d5 <= 0:
        raise InvalidArgumentError("w5, i_d8 and i_d5 must be positive")
    return (2.0 / 3.0) * w5 * (i_d8 / i_d5)


def _eval_gds(lut: DeviceLUT, sized: SizedDevice, gm: float) -> float:
    """Realized output conductance of a sized device at its chart point."""
    return gm / interp(lut, sized.l, sized.vgs, Quantity.GM_GDS)


def synthesize(spec: AmpSpec, lut_n: DeviceLUT, lut_p: DeviceLUT) -> AmpDesign:
    """Run the full sizing procedure against one N and one P chart.

    Raises SynthesisError naming the failing stage when any chart lookup is
    infeasible; never returns a partial design.
    """
    # 1) Input-pair transconductance from the noise budget, compensation
    #    capacitor from the bandwidth target, currents from the slew target.
    gm12 = gm_from_noise(spec.noise_density, spec.temperature)
    c_c = compensation_cap(gm12, spec.gbw)
    i_d5, i_d1 = tail_currents(spec.slew_rate, c_c)
    gds12_max, gds34_max = stage1_conductances(gm12, spec.av1_target)

    # 2) Input pair M1/M2 on the P chart.
    with _stage("input pair"):
        m12 = size_device(lut_p, gm12, i_d1, gds12_max)
        gds12 = _eval_gds(lut_p, m12, gm12)

    # 3) First-stage load M3/M4 on the N chart, with the efficiency re-check.
    with _stage("active load"):
        load = size_active_load(lut_n, i_d1, gds34_max)
        gm34 = load.gm_id * i_d1
        gds34 = _eval_gds(lut_n, SizedDevice(load.w, load.l, load.vgs), gm34)

    # 4) Tail source M5: conductance limit from the CMRR target, realized
    #    first-stage conductances in place of the budgets.
    with _stage("tail source"):
        gds5_max = tail_requirement(spec.cmrr_target, gm12, gds12, gds34, gm34)
        gm5 = MODERATE_INVERSION_GM_ID * i_d5
        m5 = size_device(lut_p, gm5, i_d5, gds5_max)
        gds5 = _eval_gds(lut_p, m5, gm5)

    # 5) Second stage: current at the ratio bound, then the phase-margin
    #    knob fixes gm6.  The knob is backed off slightly (see ALPHA_BACKOFF).
    with _stage("phase margin"):
        i_d6 = second_stage_current(i_d1, c_c, spec.c_load)
        alpha = solve_alpha(spec.pm_target, i_d1, i_d6, spec.c_load, c_c)
        alpha *= 1.0 - ALPHA_BACKOFF

    with _stage("output stage"):
        gm6 = (gm12 / i_d1) * i_d6 / alpha
        gds6_max, _ = stage1_conductances(gm6, spec.av2_target)
        m6 = size_device(lut_n, gm6, i_d6, gds6_max)
        gds6 = _eval_gds(lut_n, m6, gm6)

    # 6) M7 mirrors M6: same length and gate drive, width scaled by the
    #    (unit) current ratio, so its conductance matches M6's.
    i_d7 = i_d6
    w7 = snap_width(m6.w * (i_d7 / i_d6))
    gds7 = gds6 * (w7 / m6.w)

    # 7) Bias mirror M8 shares the tail's length; its width follows the
    #    mirror width law at the reference current (half the tail).
    i_d8 = i_d1
    w8 = mirror_width(m5.w, i_d8, i_d5)

    pair = DeviceSize(m12.w, m12.l)
    load_size = DeviceSize(load.w, load.l)
    return AmpDesign(
        m1=pair, m2=pair, m3=load_size, m4=load_size,
        m5=DeviceSize(m5.w, m5.l), m6=DeviceSize(m6.w, m6.l),
        m7=DeviceSize(w7, m6.l), m8=DeviceSize(w8, m5.l),
        c_c=c_c, alpha=alpha,
        i_d1=i_d1, i_d5=i_d5, i_d6=i_d6, i_d7=i_d7, i_d8=i_d8,
        vgs1=m12.vgs, vgs34=load.vgs, vgs5=m5.vgs, vgs6=m6.vgs,
        gm12=gm12, gm34=gm34, gm6=gm6,
        gds12=gds12, gds34=gds34, gds5=gds5, gds6=gds6, gds7=gds7,
    )


class _stage:
    """Re-raise chart infeasibilities as SynthesisError naming the stage."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (InfeasibleError, GridRangeError)):
            raise SynthesisError(self.name, str(exc)) from exc
        return False
