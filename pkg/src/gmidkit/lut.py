"""Sizing-chart storage, interpolation, inversion and emission.

A DeviceLUT is the software form of a printed sizing chart: a rectangular
(L, Vgs) grid holding gm/id, gm/gds and id/W per node.  Reading a value off
a chart becomes bilinear interpolation; finding the Vgs that delivers a
wanted gm/id becomes bisection on a monotone column; picking the shortest
channel that still meets an intrinsic-gain requirement becomes a scan over
the grid lengths.

Charts persist as CSV with a fixed layout (see save_lut/load_lut) and are
immutable once constructed; all lookups are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    GridRangeError,
    InfeasibleGainError,
    InfeasibleTargetError,
    InvalidArgumentError,
    LutParseError,
)

_BISECT_ITERATIONS = 60

_CSV_META_HEADER = "polarity,vds_char_V"
_CSV_COLUMNS = ("l_m", "vgs_V", "gm_over_id_perV", "gm_over_gds", "id_per_w_A_per_m")


class Quantity(Enum):
    GM_ID = "gm_over_id"
    GM_GDS = "gm_over_gds"
    ID_W = "id_per_w"


@dataclass(frozen=True)
class DeviceLUT:
    """Gridded sizing-chart data for one device polarity.

    Matrices are indexed [i_l, j_vgs] and sized |l_grid| x |vgs_grid|.
    Grids are strictly ascending; along every fixed-L row gm_over_id is
    strictly decreasing in vgs and id_per_w strictly increasing.
    """

    polarity: str
    l_grid: np.ndarray
    vgs_grid: np.ndarray
    gm_over_id: np.ndarray
    gm_over_gds: np.ndarray
    id_per_w: np.ndarray
    vds_char: float
    provenance: str = ""

    def __post_init__(self) -> None:
        for name in ("l_grid", "vgs_grid", "gm_over_id", "gm_over_gds", "id_per_w"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

        if self.polarity not in ("N", "P"):
            raise InvalidArgumentError(f"polarity must be 'N' or 'P', got {self.polarity!r}")
        if self.vds_char <= 0:
            raise InvalidArgumentError(f"vds_char must be positive, got {self.vds_char}")
        if self.l_grid.ndim != 1 or self.vgs_grid.ndim != 1:
            raise InvalidArgumentError("grids must be one-dimensional")
        if len(self.l_grid) < 2 or len(self.vgs_grid) < 2:
            raise InvalidArgumentError("grids need at least 2 points per axis")
        shape = (len(self.l_grid), len(self.vgs_grid))
        for name in ("gm_over_id", "gm_over_gds", "id_per_w"):
            if getattr(self, name).shape != shape:
                raise InvalidArgumentError(
                    f"{name} matrix shape {getattr(self, name).shape} != grid shape {shape}"
                )
        for name, grid in (("l_grid", self.l_grid), ("vgs_grid", self.vgs_grid)):
            if not np.all(np.diff(grid) > 0):
                raise InvalidArgumentError(f"{name} must be strictly ascending")
        if not (
            np.all(np.isfinite(self.gm_over_id))
            and np.all(self.gm_over_id > 0)
            and np.all(np.isfinite(self.id_per_w))
            and np.all(self.id_per_w > 0)
        ):
            raise InvalidArgumentError("gm_over_id and id_per_w must be finite and positive")
        if np.any(np.isnan(self.gm_over_gds)) or np.any(self.gm_over_gds <= 0):
            raise InvalidArgumentError("gm_over_gds must be positive (inf allowed)")
        if not np.all(np.diff(self.gm_over_id, axis=1) < 0):
            raise InvalidArgumentError("gm_over_id must be strictly decreasing in vgs per row")
        if not np.all(np.diff(self.id_per_w, axis=1) > 0):
            raise InvalidArgumentError("id_per_w must be strictly increasing in vgs per row")

    def _matrix(self, quantity: Quantity) -> np.ndarray:
        return getattr(self, quantity.value)


@dataclass(frozen=True)
class ChartSeries:
    """One curve of one chart panel, points ordered by ascending abscissa."""

    panel: int
    label: str
    x: np.ndarray
    y: np.ndarray
    x_name: str
    y_name: str

    def __post_init__(self) -> None:
        if len(self.x) != len(self.y) or len(self.x) < 2:
            raise InvalidArgumentError("series needs matching x/y of length >= 2")


def _locate(grid: np.ndarray, x: float, axis: str, unit: str) -> tuple[int, float]:
    """Bracketing interval index and fractional position; exact at nodes."""
    if x < grid[0] or x > grid[-1]:
        raise GridRangeError(axis, x, float(grid[0]), float(grid[-1]), unit)
    i = int(np.searchsorted(grid, x, side="right")) - 1
    if i == len(grid) - 1:
        i -= 1
    t = (x - grid[i]) / (grid[i + 1] - grid[i])
    return i, float(t)


def interp(lut: DeviceLUT, l: float, vgs: float, quantity: Quantity) -> float:
    """Bilinear chart read-off at (l, vgs).

    Exact at grid nodes; never overshoots the surrounding node values.
    Raises GridRangeError outside the grid (no extrapolation).
    """
    i, tl = _locate(lut.l_grid, l, "l", "m")
    j, tv = _locate(lut.vgs_grid, vgs, "vgs", "V")
    m = lut._matrix(quantity)
    weights = (
        ((1.0 - tl) * (1.0 - tv), m[i, j]),
        ((1.0 - tl) * tv, m[i, j + 1]),
        (tl * (1.0 - tv), m[i + 1, j]),
        (tl * tv, m[i + 1, j + 1]),
    )
    # Zero-weight corners are skipped so node hits return the stored value
    # bit-exactly and infinite entries cannot produce 0 * inf.
    acc = 0.0
    for w, v in weights:
        if w != 0.0:
            acc += w * v
    return float(acc)


def invert_gmid(lut: DeviceLUT, l: float, target_gm_id: float) -> float:
    """Vgs at which the chart delivers the requested gm/id at length l.

    Bisection on the strictly decreasing gm/id-vs-vgs curve; the returned
    vgs reproduces the target through interp to better than 1e-6 relative.
    Raises InfeasibleTargetError when the target lies outside the range
    achievable at that length.
    """
    vgs_lo = float(lut.vgs_grid[0])
    vgs_hi = float(lut.vgs_grid[-1])
    gmid_max = interp(lut, l, vgs_lo, Quantity.GM_ID)
    gmid_min = interp(lut, l, vgs_hi, Quantity.GM_ID)
    if not gmid_min <= target_gm_id <= gmid_max:
        raise InfeasibleTargetError(target_gm_id, gmid_min, gmid_max, l)

    a, b = vgs_lo, vgs_hi
    for _ in range(_BISECT_ITERATIONS):
        mid = 0.5 * (a + b)
        if interp(lut, l, mid, Quantity.GM_ID) >= target_gm_id:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def select_length(lut: DeviceLUT, gm_id: float, required_gm_gds: float) -> float:
    """Smallest grid length whose gm/gds at the given gm/id meets the requirement.

    The smallest feasible L minimizes area and parasitics.  Raises
    InfeasibleGainError (reporting the best achievable gm/gds and its L)
    when no grid length is sufficient, or InfeasibleTargetError when the
    gm/id is not achievable at any grid length.
    """
    best = -np.inf
    best_l = float(lut.l_grid[0])
    first_infeasible: InfeasibleTargetError | None = None
    achievable = False
    for l in lut.l_grid:
        l = float(l)
        try:
            vgs = invert_gmid(lut, l, gm_id)
        except InfeasibleTargetError as exc:
            if first_infeasible is None:
                first_infeasible = exc
            continue
        achievable = True
        gm_gds = interp(lut, l, vgs, Quantity.GM_GDS)
        if gm_gds >= required_gm_gds:
            return l
        if gm_gds > best:
            best = gm_gds
            best_l = l
    if not achievable:
        assert first_infeasible is not None
        raise first_infeasible
    raise InfeasibleGainError(required_gm_gds, best, best_l)


def emit_charts(lut: DeviceLUT) -> list[ChartSeries]:
    """All three chart panels, one series per grid length.

    Panel 1: gm/gds vs gm/id.  Panel 2: id/W vs gm/id.  Panel 3: gm/id vs
    the gate drive (Vsg for P devices).  Points are ordered by ascending
    abscissa, so panels 1 and 2 run the vgs sweep backwards.
    """
    vgs_name = "vsg_V" if lut.polarity == "P" else "vgs_V"
    series: list[ChartSeries] = []
    for i, l in enumerate(lut.l_grid):
        label = f"L={float(l) * 1e9:g}nm"
        gmid_rev = lut.gm_over_id[i, ::-1]
        series.append(
            ChartSeries(1, label, gmid_rev, lut.gm_over_gds[i, ::-1],
                        "gm_over_id_perV", "gm_over_gds")
        )
        series.append(
            ChartSeries(2, label, gmid_rev, lut.id_per_w[i, ::-1],
                        "gm_over_id_perV", "id_per_w_A_per_m")
        )
        series.append(
            ChartSeries(3, label, lut.vgs_grid, lut.gm_over_id[i, :],
                        vgs_name, "gm_over_id_perV")
        )
    series.sort(key=lambda s: s.panel)
    return series


def _fmt(x: float) -> str:
    return repr(float(x))


def lut_to_csv(lut: DeviceLUT) -> str:
    """Render the chart as CSV text.

    Layout: a meta header ``polarity,vds_char_V`` and its single row, then
    the column header ``l_m,vgs_V,gm_over_id_perV,gm_over_gds,id_per_w_A_per_m``
    and one row per grid node in l-major order.  Decimal notation with '.'
    radix, LF line endings.  Values round-trip exactly (repr precision).
    """
    lines = [_CSV_META_HEADER, f"{lut.polarity},{_fmt(lut.vds_char)}", ",".join(_CSV_COLUMNS)]
    for i, l in enumerate(lut.l_grid):
        for j, vgs in enumerate(lut.vgs_grid):
            lines.append(
                ",".join(
                    (
                        _fmt(l),
                        _fmt(vgs),
                        _fmt(lut.gm_over_id[i, j]),
                        _fmt(lut.gm_over_gds[i, j]),
                        _fmt(lut.id_per_w[i, j]),
                    )
                )
            )
    return "\n".join(lines) + "\n"


def save_lut(lut: DeviceLUT, path: str | Path) -> None:
    """Write the chart CSV (see lut_to_csv for the layout)."""
    Path(path).write_text(lut_to_csv(lut), encoding="ascii", newline="")


def _parse_float(text: str, what: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise LutParseError(f"cannot parse {what} value {text!r}", line) from None


def parse_lut_csv(text: str, source: str = "<lut>") -> DeviceLUT:
    """Parse chart CSV text written by lut_to_csv.

    Raises LutParseError (with a line number where applicable) for a
    malformed header, missing columns, ragged rows, duplicate grid keys or
    non-ascending grids.
    """
    raw = text.splitlines()
    if len(raw) < 4:
        raise LutParseError(f"{source} too short for a chart ({len(raw)} lines)")

    if raw[0] != _CSV_META_HEADER:
        raise LutParseError(f"expected header {_CSV_META_HEADER!r}, got {raw[0]!r}", 1)
    meta = raw[1].split(",")
    if len(meta) != 2:
        raise LutParseError(f"expected 'polarity,vds_char' row, got {raw[1]!r}", 2)
    polarity = meta[0]
    if polarity not in ("N", "P"):
        raise LutParseError(f"polarity must be 'N' or 'P', got {polarity!r}", 2)
    vds_char = _parse_float(meta[1], "vds_char", 2)

    columns = tuple(raw[2].split(","))
    if columns != _CSV_COLUMNS:
        missing = [c for c in _CSV_COLUMNS if c not in columns]
        extra = [c for c in columns if c not in _CSV_COLUMNS]
        if missing:
            raise LutParseError(f"missing column(s): {', '.join(missing)}", 3)
        if extra:
            raise LutParseError(f"unknown column(s): {', '.join(extra)}", 3)
        raise LutParseError(f"columns out of order: got {','.join(columns)!r}", 3)

    # Rows are l-major blocks; every block must repeat one vgs sequence.
    l_values: list[float] = []
    block_vgs: list[list[float]] = []
    block_rows: list[list[tuple[float, float, float]]] = []
    for lineno, line in enumerate(raw[3:], start=4):
        if line == "":
            if lineno == len(raw):  # allow a single trailing newline artifact
                continue
            raise LutParseError("blank line inside data section", lineno)
        fields = line.split(",")
        if len(fields) != len(_CSV_COLUMNS):
            raise LutParseError(
                f"expected {len(_CSV_COLUMNS)} fields, got {len(fields)}", lineno
            )
        l = _parse_float(fields[0], "l_m", lineno)
        vgs = _parse_float(fields[1], "vgs_V", lineno)
        values = tuple(
            _parse_float(fields[k], _CSV_COLUMNS[k], lineno) for k in (2, 3, 4)
        )
        if not l_values or l != l_values[-1]:
            if l_values and l <= l_values[-1]:
                raise LutParseError(f"l grid not strictly ascending at l={l!r}", lineno)
            l_values.append(l)
            block_vgs.append([])
            block_rows.append([])
        else:
            prev = block_vgs[-1][-1]
            if vgs == prev:
                raise LutParseError(f"duplicate grid key (l={l!r}, vgs={vgs!r})", lineno)
            if vgs < prev:
                raise LutParseError(f"vgs grid not strictly ascending at vgs={vgs!r}", lineno)
        block_vgs[-1].append(vgs)
        block_rows[-1].append(values)

    if not l_values:
        raise LutParseError("no data rows", 4)
    vgs_values = block_vgs[0]
    for bi, bv in enumerate(block_vgs[1:], start=1):
        if bv != vgs_values:
            raise LutParseError(
                f"vgs grid of l={l_values[bi]!r} block differs from first block"
            )

    data = np.array(block_rows, dtype=float)  # (n_l, n_vgs, 3)
    try:
        return DeviceLUT(
            polarity=polarity,
            l_grid=np.array(l_values),
            vgs_grid=np.array(vgs_values),
            gm_over_id=data[:, :, 0],
            gm_over_gds=data[:, :, 1],
            id_per_w=data[:, :, 2],
            vds_char=vds_char,
            provenance=f"loaded from {source}",
        )
    except InvalidArgumentError as exc:
        raise LutParseError(f"chart data invalid: {exc}") from exc


def load_lut(path: str | Path) -> DeviceLUT:
    """Read a chart CSV file (see parse_lut_csv for error behavior)."""
    path = Path(path)
    return parse_lut_csv(path.read_text(encoding="ascii"), source=path.name)


def chart_series_csv(series: list[ChartSeries]) -> str:
    """Render chart series as ``panel,series_label,x,y`` CSV text."""
    lines = ["panel,series_label,x,y"]
    for s in series:
        for x, y in zip(s.x, s.y):
            lines.append(f"{s.panel},{s.label},{_fmt(x)},{_fmt(y)}")
    return "\n".join(lines) + "\n"
