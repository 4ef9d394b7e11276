"""Analytic MOSFET surrogate and sizing-chart generation.

Foundry device data is proprietary, so characterization is done against a
compact analytic model that is continuous from weak to strong inversion:

    id/W = (2 n k' Ut^2 / L) * ln^2(1 + exp((Vgs - Vth)/(2 n Ut))) * (1 + lambda(L) Vds)

with channel-length modulation lambda(L) = lambda0 / L.  The closed-form
derivative with respect to Vgs gives gm, and gds follows from the (1 +
lambda Vds) factor, so the three chart quantities are

    gm/id   = sigmoid(u) / (n Ut ln(1 + exp(u))),   u = (Vgs - Vth)/(2 n Ut)
    gm/gds  = (gm/id) (1 + lambda Vds) / lambda
    id/W    = as above.

In deep weak inversion gm/id saturates at 1/(n Ut); in strong inversion it
falls off as 2/(Vgs - Vth).  PMOS devices use the magnitude convention:
vgs and vds are stored as positive Vsg/Vsd values.

All evaluation is pure and deterministic; parameter sets and generated
charts are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgumentError
from .lut import DeviceLUT

# CODATA 2018 exact SI values.
BOLTZMANN_J_PER_K = 1.380649e-23
ELEMENTARY_CHARGE_C = 1.602176634e-19

# Sizing-chart sweep defaults (gate drive in volts, channel length in meters).
DEFAULT_L_MIN = 65e-9
DEFAULT_L_MAX = 180e-9
DEFAULT_N_L = 10
DEFAULT_VGS_MIN = 0.1
DEFAULT_VGS_MAX = 0.9
DEFAULT_N_VGS = 10

DEFAULT_TEMPERATURE_K = 300.0
DEFAULT_VDS_CHAR = 0.45


class Polarity(Enum):
    N = "N"
    P = "P"


def thermal_voltage(temperature_k: float) -> float:
    """kT/q in volts."""
    if temperature_k <= 0:
        raise InvalidArgumentError(f"temperature must be positive, got {temperature_k}")
    return BOLTZMANN_J_PER_K * temperature_k / ELEMENTARY_CHARGE_C


@dataclass(frozen=True)
class DeviceParams:
    """Parameter set of the analytic surrogate device.

    Attributes:
        polarity: N or P (P uses magnitude convention for vgs/vds).
        vth0: threshold voltage magnitude (V).
        n: subthreshold slope factor, >= 1.
        ut: thermal voltage of the characterization model (V).
        k_prime: process transconductance factor (A/V^2).
        lambda0: channel-length-modulation scale (V^-1 m); lambda(L) = lambda0/L.
        vds_char: drain-source bias magnitude used for chart generation (V).
    """

    polarity: Polarity
    vth0: float
    n: float
    ut: float
    k_prime: float
    lambda0: float
    vds_char: float

    def __post_init__(self) -> None:
        if self.ut <= 0:
            raise InvalidArgumentError(f"ut must be positive, got {self.ut}")
        if self.n < 1.0:
            raise InvalidArgumentError(f"slope factor n must be >= 1, got {self.n}")
        if self.k_prime <= 0:
            raise InvalidArgumentError(f"k_prime must be positive, got {self.k_prime}")
        if self.lambda0 < 0:
            raise InvalidArgumentError(f"lambda0 must be >= 0, got {self.lambda0}")
        if self.vds_char <= 0:
            raise InvalidArgumentError(f"vds_char must be positive, got {self.vds_char}")

    @classmethod
    def default_nmos(cls, temperature_k: float = DEFAULT_TEMPERATURE_K) -> "DeviceParams":
        return cls(
            polarity=Polarity.N,
            vth0=0.30,
            n=1.3,
            ut=thermal_voltage(temperature_k),
            k_prime=300e-6,
            lambda0=0.02e-6,
            vds_char=DEFAULT_VDS_CHAR,
        )

    @classmethod
    def default_pmos(cls, temperature_k: float = DEFAULT_TEMPERATURE_K) -> "DeviceParams":
        return cls(
            polarity=Polarity.P,
            vth0=0.32,
            n=1.3,
            ut=thermal_voltage(temperature_k),
            k_prime=120e-6,
            lambda0=0.02e-6,
            vds_char=DEFAULT_VDS_CHAR,
        )

    def fingerprint(self) -> str:
        """Short provenance string recorded on generated charts."""
        return (
            f"surrogate(polarity={self.polarity.value}, vth0={self.vth0!r}, n={self.n!r}, "
            f"ut={self.ut!r}, k_prime={self.k_prime!r}, lambda0={self.lambda0!r}, "
            f"vds_char={self.vds_char!r})"
        )


@dataclass(frozen=True)
class DeviceMetrics:
    """Chart quantities of one operating point."""

    id_per_w: float       # drain current per unit width (A/m)
    gm_over_id: float     # transconductance efficiency (1/V)
    gm_over_gds: float    # intrinsic gain; math.inf when lambda0 == 0
    vgs: float            # gate drive magnitude (V)
    l: float              # channel length (m)


def _inversion_terms(params: DeviceParams, vgs):
    """Stable softplus/sigmoid pair of the normalized gate overdrive."""
    u = (np.asarray(vgs, dtype=float) - params.vth0) / (2.0 * params.n * params.ut)
    u = np.maximum(u, -700.0)  # keep exp(u) a normal float
    softplus = np.logaddexp(0.0, u)
    with np.errstate(over="ignore"):  # the unused where-branch may overflow
        sigmoid = np.where(u >= 0, 1.0 / (1.0 + np.exp(-u)), np.exp(u) / (1.0 + np.exp(u)))
    return softplus, sigmoid


def _eval_arrays(params: DeviceParams, vgs, vds, l):
    """Vectorized model core; broadcasts vgs/vds/l together."""
    vgs = np.asarray(vgs, dtype=float)
    vds = np.asarray(vds, dtype=float)
    l = np.asarray(l, dtype=float)
    softplus, sigmoid = _inversion_terms(params, vgs)

    lam = params.lambda0 / l
    clm = 1.0 + lam * vds
    id_per_w = (2.0 * params.n * params.k_prime * params.ut**2 / l) * softplus**2 * clm
    gm_over_id = sigmoid / (params.n * params.ut * softplus)
    with np.errstate(divide="ignore"):
        gm_over_gds = np.where(lam > 0, gm_over_id * clm / np.where(lam > 0, lam, 1.0), np.inf)
    return id_per_w, gm_over_id, gm_over_gds


def eval_device(params: DeviceParams, vgs: float, vds: float, l: float) -> DeviceMetrics:
    """Evaluate the surrogate at one bias point.

    vgs/vds are magnitudes (Vsg/Vsd for P devices).  Raises
    InvalidArgumentError for non-positive l or vds.
    """
    if l <= 0:
        raise InvalidArgumentError(f"channel length must be positive, got {l}")
    if vds <= 0:
        raise InvalidArgumentError(f"vds must be positive, got {vds}")
    id_per_w, gm_over_id, gm_over_gds = _eval_arrays(params, vgs, vds, l)
    return DeviceMetrics(
        id_per_w=float(id_per_w),
        gm_over_id=float(gm_over_id),
        gm_over_gds=float(gm_over_gds),
        vgs=float(vgs),
        l=float(l),
    )


def generate_lut(
    params: DeviceParams,
    l_min: float = DEFAULT_L_MIN,
    l_max: float = DEFAULT_L_MAX,
    n_l: int = DEFAULT_N_L,
    vgs_min: float = DEFAULT_VGS_MIN,
    vgs_max: float = DEFAULT_VGS_MAX,
    n_vgs: int = DEFAULT_N_VGS,
) -> DeviceLUT:
    """Sweep the surrogate over a uniform (L, Vgs) grid at vds = vds_char.

    Returns an n_l x n_vgs chart.  The sweep must satisfy l_min < l_max,
    vgs_min < vgs_max and at least two points per axis.
    """
    if not (l_min > 0 and l_min < l_max):
        raise InvalidArgumentError(f"need 0 < l_min < l_max, got [{l_min}, {l_max}]")
    if not vgs_min < vgs_max:
        raise InvalidArgumentError(f"need vgs_min < vgs_max, got [{vgs_min}, {vgs_max}]")
    if n_l < 2 or n_vgs < 2:
        raise InvalidArgumentError(f"need at least 2 points per axis, got {n_l} x {n_vgs}")
    if params.lambda0 / l_min * params.vds_char >= 1.0:
        raise InvalidArgumentError(
            "model validity requires lambda(L) * vds_char < 1 over the sweep; "
            f"violated at l_min = {l_min}"
        )

    l_grid = np.linspace(l_min, l_max, n_l)
    vgs_grid = np.linspace(vgs_min, vgs_max, n_vgs)
    id_per_w, gm_over_id, gm_over_gds = _eval_arrays(
        params, vgs_grid[np.newaxis, :], params.vds_char, l_grid[:, np.newaxis]
    )
    shape = (n_l, n_vgs)
    id_per_w = np.broadcast_to(id_per_w, shape)
    gm_over_id = np.broadcast_to(gm_over_id, shape)
    gm_over_gds = np.broadcast_to(gm_over_gds, shape)
    return DeviceLUT(
        polarity=params.polarity.value,
        l_grid=l_grid,
        vgs_grid=vgs_grid,
        gm_over_id=gm_over_id,
        gm_over_gds=gm_over_gds,
        id_per_w=id_per_w,
        vds_char=params.vds_char,
        provenance=params.fingerprint(),
    )
