"""gm/ID sizing-chart toolkit for a two-stage Miller op-amp.

Characterizes an analytic surrogate device into sizing charts, sizes the
amplifier against a spec, and verifies the result with a closed-form
small-signal model.  See the cli module (or the ``gmidkit`` command) for
the file-based workflow.
"""

from .config import SweepConfig, ToolConfig, load_config, parse_config
from .device import (
    DeviceMetrics,
    DeviceParams,
    Polarity,
    eval_device,
    generate_lut,
    thermal_voltage,
)
from .errors import (
    ConfigError,
    GmidKitError,
    GridRangeError,
    InfeasibleError,
    InfeasibleGainError,
    InfeasibleTargetError,
    InvalidArgumentError,
    InvalidDesignError,
    KvParseError,
    LutParseError,
    SynthesisError,
)
from .lut import (
    ChartSeries,
    DeviceLUT,
    Quantity,
    emit_charts,
    interp,
    invert_gmid,
    load_lut,
    save_lut,
    select_length,
)
from .synth import (
    AmpDesign,
    AmpSpec,
    DeviceSize,
    active_load_check,
    compensation_cap,
    gm_from_noise,
    mirror_width,
    phase_margin,
    second_stage_current,
    size_active_load,
    size_device,
    solve_alpha,
    stage1_conductances,
    synthesize,
    tail_currents,
    tail_requirement,
)
from .verify import (
    AmpReport,
    BodePoint,
    MetricVerdict,
    bode,
    check_against_spec,
    report,
    transfer_magnitude,
    transfer_phase_deg,
)

__version__ = "0.1.0"

__all__ = [
    "AmpDesign",
    "AmpReport",
    "AmpSpec",
    "BodePoint",
    "ChartSeries",
    "ConfigError",
    "DeviceLUT",
    "DeviceMetrics",
    "DeviceParams",
    "DeviceSize",
    "GmidKitError",
    "GridRangeError",
    "InfeasibleError",
    "InfeasibleGainError",
    "InfeasibleTargetError",
    "InvalidArgumentError",
    "InvalidDesignError",
    "KvParseError",
    "LutParseError",
    "MetricVerdict",
    "Polarity",
    "Quantity",
    "SweepConfig",
    "SynthesisError",
    "ToolConfig",
    "active_load_check",
    "bode",
    "check_against_spec",
    "compensation_cap",
    "emit_charts",
    "eval_device",
    "generate_lut",
    "gm_from_noise",
    "interp",
    "invert_gmid",
    "load_config",
    "load_lut",
    "mirror_width",
    "parse_config",
    "phase_margin",
    "report",
    "save_lut",
    "second_stage_current",
    "select_length",
    "size_active_load",
    "size_device",
    "solve_alpha",
    "stage1_conductances",
    "synthesize",
    "tail_currents",
    "tail_requirement",
    "thermal_voltage",
    "transfer_magnitude",
    "transfer_phase_deg",
]
