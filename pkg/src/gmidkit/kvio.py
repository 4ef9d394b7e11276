"""Flat key=value documents for designs, reports and verdict tables.

One ``key=value`` pair per line, stable key order, '.' radix, LF endings.
Floats are written with repr so a parse-back is exact, which keeps rerun
outputs byte-identical and lets a design file feed verification without
precision loss.
"""

from __future__ import annotations

from .errors import KvParseError
from .synth import AmpDesign, AmpSpec, DeviceSize
from .verify import AmpReport

_DEVICE_NAMES = ("m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8")


def format_kv(items: list[tuple[str, object]]) -> str:
    lines = []
    for key, value in items:
        if isinstance(value, float):
            text = repr(float(value))  # builtin-float repr, exact round-trip
        else:
            text = str(value)
        lines.append(f"{key}={text}")
    return "\n".join(lines) + "\n"


def parse_kv(text: str) -> dict[str, str]:
    """Parse key=value lines; duplicate or malformed keys are rejected."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line == "":
            continue
        if "=" not in line:
            raise KvParseError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        if key == "":
            raise KvParseError(f"line {lineno}: empty key")
        if key in out:
            raise KvParseError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _require_float(kv: dict[str, str], key: str) -> float:
    if key not in kv:
        raise KvParseError(f"missing required key {key!r}")
    try:
        return float(kv[key])
    except ValueError:
        raise KvParseError(f"key {key!r}: cannot parse value {kv[key]!r}") from None


def design_kv_items(design: AmpDesign) -> list[tuple[str, object]]:
    """Design record as ordered key/value pairs.

    Leads with the device table in micrometers for readability, then the
    circuit quantities, then the exact geometry in meters (the section a
    parse-back uses).
    """
    items: list[tuple[str, object]] = []
    sizes = design.devices()
    for name in _DEVICE_NAMES:
        size = sizes[name.upper()]
        items.append((f"{name}_w_um", size.w * 1e6))
        items.append((f"{name}_l_um", size.l * 1e6))
    items += [
        ("c_c_f", design.c_c),
        ("alpha", design.alpha),
        ("i_d1_a", design.i_d1),
        ("i_d5_a", design.i_d5),
        ("i_d6_a", design.i_d6),
        ("i_d7_a", design.i_d7),
        ("i_d8_a", design.i_d8),
        ("vgs1_v", design.vgs1),
        ("vgs34_v", design.vgs34),
        ("vgs5_v", design.vgs5),
        ("vgs6_v", design.vgs6),
        ("gm12_s", design.gm12),
        ("gm34_s", design.gm34),
        ("gm6_s", design.gm6),
        ("gds12_s", design.gds12),
        ("gds34_s", design.gds34),
        ("gds5_s", design.gds5),
        ("gds6_s", design.gds6),
        ("gds7_s", design.gds7),
        ("id1_over_id6_bound", design.i_d1 / design.i_d6),
    ]
    for name in _DEVICE_NAMES:
        size = sizes[name.upper()]
        items.append((f"{name}_w_m", size.w))
        items.append((f"{name}_l_m", size.l))
    return items


def design_from_kv(kv: dict[str, str]) -> AmpDesign:
    """Rebuild a design from its key=value form (meter-exact geometry)."""
    sizes = {}
    for name in _DEVICE_NAMES:
        sizes[name] = DeviceSize(
            w=_require_float(kv, f"{name}_w_m"),
            l=_require_float(kv, f"{name}_l_m"),
        )
    return AmpDesign(
        m1=sizes["m1"], m2=sizes["m2"], m3=sizes["m3"], m4=sizes["m4"],
        m5=sizes["m5"], m6=sizes["m6"], m7=sizes["m7"], m8=sizes["m8"],
        c_c=_require_float(kv, "c_c_f"),
        alpha=_require_float(kv, "alpha"),
        i_d1=_require_float(kv, "i_d1_a"),
        i_d5=_require_float(kv, "i_d5_a"),
        i_d6=_require_float(kv, "i_d6_a"),
        i_d7=_require_float(kv, "i_d7_a"),
        i_d8=_require_float(kv, "i_d8_a"),
        vgs1=_require_float(kv, "vgs1_v"),
        vgs34=_require_float(kv, "vgs34_v"),
        vgs5=_require_float(kv, "vgs5_v"),
        vgs6=_require_float(kv, "vgs6_v"),
        gm12=_require_float(kv, "gm12_s"),
        gm34=_require_float(kv, "gm34_s"),
        gm6=_require_float(kv, "gm6_s"),
        gds12=_require_float(kv, "gds12_s"),
        gds34=_require_float(kv, "gds34_s"),
        gds5=_require_float(kv, "gds5_s"),
        gds6=_require_float(kv, "gds6_s"),
        gds7=_require_float(kv, "gds7_s"),
    )


def report_kv_items(rep: AmpReport, spec: AmpSpec) -> list[tuple[str, object]]:
    """Report metrics plus informational spec echoes."""
    return [
        ("av1", rep.av1),
        ("av1_db", rep.av1_db),
        ("av2", rep.av2),
        ("av2_db", rep.av2_db),
        ("a0", rep.a0),
        ("a0_db", rep.a0_db),
        ("gbw_hz", rep.gbw),
        ("p1_hz", rep.p1),
        ("p2_hz", rep.p2),
        ("z1_hz", rep.z1),
        ("pm_deg", rep.pm),
        ("cmrr", rep.cmrr),
        ("cmrr_db", rep.cmrr_db),
        ("slew_v_per_s", rep.slew),
        ("power_w", rep.power),
        ("supply_voltage_v", spec.vdd),
        ("noise_density_v_per_rthz", spec.noise_density),
        ("load_capacitance_f", spec.c_load),
        ("vcm_low_v", spec.vcm_low),
    ]


def verdict_kv_items(rep: AmpReport) -> list[tuple[str, object]]:
    """Compliance table rows plus the overall verdict."""
    items: list[tuple[str, object]] = []
    for v in rep.pass_fail:
        items.append((v.name, "pass" if v.passed else "fail"))
        items.append((f"{v.name}_value", v.value))
        items.append((f"{v.name}_target", "none" if v.target is None else repr(v.target)))
        items.append((f"{v.name}_sense", v.sense))
    items.append(("overall", "pass" if rep.overall_pass else "fail"))
    return items
