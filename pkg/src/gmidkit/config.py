"""Tool configuration: one strict JSON document drives the whole flow.

Unknown keys are rejected and every complaint carries the dotted path to
the offending field.  All values are SI (volts, amps, farads, hertz,
meters, V/s, kelvin); gains may be given in dB where noted.  Device and
sweep blocks are optional and fall back to the built-in surrogate defaults
and the standard chart sweep; the amplifier block is required only by the
commands that synthesize or verify.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .device import (
    DEFAULT_L_MAX,
    DEFAULT_L_MIN,
    DEFAULT_N_L,
    DEFAULT_N_VGS,
    DEFAULT_TEMPERATURE_K,
    DEFAULT_VDS_CHAR,
    DEFAULT_VGS_MAX,
    DEFAULT_VGS_MIN,
    DeviceParams,
    Polarity,
    thermal_voltage,
)
from .errors import ConfigError, InvalidArgumentError
from .synth import AmpSpec


@dataclass(frozen=True)
class SweepConfig:
    l_min: float = DEFAULT_L_MIN
    l_max: float = DEFAULT_L_MAX
    n_l: int = DEFAULT_N_L
    vgs_min: float = DEFAULT_VGS_MIN
    vgs_max: float = DEFAULT_VGS_MAX
    n_vgs: int = DEFAULT_N_VGS


@dataclass(frozen=True)
class ToolConfig:
    nmos: DeviceParams
    pmos: DeviceParams
    sweep: SweepConfig
    amp: AmpSpec | None
    output_dir: str | None


def _check_keys(block: dict, allowed: set[str], path: str) -> None:
    for key in block:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")


def _number(block: dict, key: str, path: str, default=None):
    if key not in block:
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _count(block: dict, key: str, path: str, default: int) -> int:
    if key not in block:
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    return value


def _block(parent: dict, key: str, path: str) -> dict:
    value = parent.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object, got {value!r}")
    return value


_DEVICE_KEYS = {"vth0", "n", "k_prime", "lambda0", "vds_char", "temperature", "ut"}


def _parse_device(block: dict, polarity: Polarity, path: str) -> DeviceParams:
    _check_keys(block, _DEVICE_KEYS, path)
    defaults = (
        DeviceParams.default_nmos() if polarity is Polarity.N else DeviceParams.default_pmos()
    )
    if "ut" in block and "temperature" in block:
        raise ConfigError(f"{path}: give either 'ut' or 'temperature', not both")
    if "ut" in block:
        ut = _number(block, "ut", path)
    else:
        ut = thermal_voltage(_number(block, "temperature", path, DEFAULT_TEMPERATURE_K))
    try:
        return DeviceParams(
            polarity=polarity,
            vth0=_number(block, "vth0", path, defaults.vth0),
            n=_number(block, "n", path, defaults.n),
            ut=ut,
            k_prime=_number(block, "k_prime", path, defaults.k_prime),
            lambda0=_number(block, "lambda0", path, defaults.lambda0),
            vds_char=_number(block, "vds_char", path, DEFAULT_VDS_CHAR),
        )
    except InvalidArgumentError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


_SWEEP_KEYS = {"l_min", "l_max", "n_l", "vgs_min", "vgs_max", "n_vgs"}


def _parse_sweep(block: dict, path: str) -> SweepConfig:
    _check_keys(block, _SWEEP_KEYS, path)
    return SweepConfig(
        l_min=_number(block, "l_min", path, DEFAULT_L_MIN),
        l_max=_number(block, "l_max", path, DEFAULT_L_MAX),
        n_l=_count(block, "n_l", path, DEFAULT_N_L),
        vgs_min=_number(block, "vgs_min", path, DEFAULT_VGS_MIN),
        vgs_max=_number(block, "vgs_max", path, DEFAULT_VGS_MAX),
        n_vgs=_count(block, "n_vgs", path, DEFAULT_N_VGS),
    )


_AMP_KEYS = {
    "vdd", "temperature", "noise_density", "gbw", "c_load", "slew_rate",
    "total_gain_db", "av1", "av2", "cmrr_db", "cmrr", "pm_deg", "vcm_low",
    "power_budget",
}


def _parse_amp(block: dict, path: str) -> AmpSpec:
    _check_keys(block, _AMP_KEYS, path)

    has_total = "total_gain_db" in block
    has_split = "av1" in block or "av2" in block
    if has_total and has_split:
        raise ConfigError(f"{path}: give either 'total_gain_db' or 'av1'/'av2', not both")
    if has_total:
        total = 10.0 ** (_number(block, "total_gain_db", path) / 20.0)
        av1 = av2 = total ** 0.5  # even split across the two stages
    elif "av1" in block and "av2" in block:
        av1 = _number(block, "av1", path)
        av2 = _number(block, "av2", path)
    else:
        raise ConfigError(f"{path}: missing gain ('total_gain_db' or both 'av1' and 'av2')")

    if "cmrr_db" in block and "cmrr" in block:
        raise ConfigError(f"{path}: give either 'cmrr_db' or 'cmrr', not both")
    if "cmrr_db" in block:
        cmrr = 10.0 ** (_number(block, "cmrr_db", path) / 20.0)
    elif "cmrr" in block:
        cmrr = _number(block, "cmrr", path)
    else:
        raise ConfigError(f"{path}: missing 'cmrr_db' (or 'cmrr')")

    required = {
        "vdd": _number(block, "vdd", path),
        "noise_density": _number(block, "noise_density", path),
        "gbw": _number(block, "gbw", path),
        "c_load": _number(block, "c_load", path),
        "slew_rate": _number(block, "slew_rate", path),
        "pm_deg": _number(block, "pm_deg", path),
        "vcm_low": _number(block, "vcm_low", path),
    }
    for key, value in required.items():
        if value is None:
            raise ConfigError(f"{path}.{key}: missing required field")

    try:
        return AmpSpec(
            vdd=required["vdd"],
            temperature=_number(block, "temperature", path, DEFAULT_TEMPERATURE_K),
            noise_density=required["noise_density"],
            gbw=required["gbw"],
            c_load=required["c_load"],
            slew_rate=required["slew_rate"],
            av1_target=av1,
            av2_target=av2,
            cmrr_target=cmrr,
            pm_target=required["pm_deg"],
            vcm_low=required["vcm_low"],
            power_budget=_number(block, "power_budget", path),
        )
    except InvalidArgumentError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


_TOP_KEYS = {"devices", "sweep", "amp", "output_dir"}
_DEVICES_KEYS = {"nmos", "pmos"}


def parse_config(text: str, source: str = "<config>") -> ToolConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "config")

    devices = _block(doc, "devices", "config.devices")
    _check_keys(devices, _DEVICES_KEYS, "config.devices")
    nmos = _parse_device(_block(devices, "nmos", "config.devices.nmos"),
                         Polarity.N, "config.devices.nmos")
    pmos = _parse_device(_block(devices, "pmos", "config.devices.pmos"),
                         Polarity.P, "config.devices.pmos")

    sweep = _parse_sweep(_block(doc, "sweep", "config.sweep"), "config.sweep")

    amp = None
    if "amp" in doc:
        amp = _parse_amp(_block(doc, "amp", "config.amp"), "config.amp")

    output_dir = doc.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError(f"config.output_dir: expected a string, got {output_dir!r}")

    return ToolConfig(nmos=nmos, pmos=pmos, sweep=sweep, amp=amp, output_dir=output_dir)


def load_config(path: str | Path) -> ToolConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))
