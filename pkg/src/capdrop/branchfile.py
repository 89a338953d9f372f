"""JSONL branch files, CSV export and SVG rendering.

A branch file holds one JSON object per line: a header, one line per
solution point, and (for a finished run) a final ``{"status": ...}`` line.
Floats are written with 17 significant digits so every value reads back
bit for bit.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import IO, Optional

import numpy as np

from . import spectral as sp
from .bifurcation import bifurcation_speed
from .continuation import ContinuationConfig, SolutionPoint
from .errors import BranchFileError
from .residual import DiagnosticsReport
from .spectral import LatticeCoeffs

FORMAT_VERSION = 1
POINT_KEYS = ("s", "c", "coeffs", "residual_complex", "residual_real", "chord_arc", "c1_norm",
              "curvature_min", "curvature_max", "decay_slope", "newton_iters", "min_deriv")
CSV_COLUMNS = ("s", "c", "residual_complex", "chord_arc", "c1_norm", "curvature_min",
               "curvature_max", "decay_slope")


@dataclass(frozen=True)
class BranchFileHeader:
    m: int
    k: int
    sign: int
    N: int
    M: int
    c_bif: float
    config: ContinuationConfig
    created: str
    format_version: int = FORMAT_VERSION

    @classmethod
    def new(cls, m: int, k: int, sign: int, cfg: ContinuationConfig) -> "BranchFileHeader":
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return cls(m, k, sign, cfg.N, cfg.grid_size(m), bifurcation_speed(m, k), cfg, stamp)


# ---------------------------------------------------------------------------
# encoding


def fmt_float(x: float) -> str:
    """17 significant digits; non-finite values use the tokens Python's json reads."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _encode(v) -> str:
    if isinstance(v, (bool, np.bool_)) or v is None:
        return json.dumps(None if v is None else bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(x) for x in v) + "]"
    raise TypeError(f"cannot encode {type(v).__name__}")


def header_line(h: BranchFileHeader) -> str:
    d = {
        "format_version": h.format_version, "m": h.m, "k": h.k, "sign": h.sign,
        "N": h.N, "M": h.M, "c_bif": h.c_bif, "config": dataclasses.asdict(h.config),
        "created": h.created,
    }
    return _encode(d)


def point_line(p: SolutionPoint) -> str:
    d = p.diagnostics
    return _encode({
        "s": p.s, "c": p.c, "coeffs": [float(a) for a in p.z.coeffs],
        "residual_complex": p.residual_norms[0], "residual_real": p.residual_norms[1],
        "chord_arc": d.chord_arc, "c1_norm": d.c1_norm,
        "curvature_min": d.curvature_min, "curvature_max": d.curvature_max,
        "decay_slope": d.decay_slope, "newton_iters": p.newton_iters, "min_deriv": d.min_deriv,
    })


def status_line(status: str) -> str:
    return _encode({"status": status})


class BranchWriter:
    """Appends lines as the run proceeds, flushing after each one."""

    def __init__(self, fh: IO[str], header: BranchFileHeader):
        self.fh = fh
        self._write(header_line(header))

    def _write(self, line: str):
        self.fh.write(line + "\n")
        self.fh.flush()

    def point(self, p: SolutionPoint):
        self._write(point_line(p))

    def status(self, status: str):
        self._write(status_line(status))


# ---------------------------------------------------------------------------
# decoding


def parse_header(d: dict) -> BranchFileHeader:
    try:
        if d["format_version"] != FORMAT_VERSION:
            raise BranchFileError(f"unsupported format_version {d['format_version']}")
        cfg = ContinuationConfig(**d["config"])
        h = BranchFileHeader(int(d["m"]), int(d["k"]), int(d["sign"]), int(d["N"]), int(d["M"]),
                             float(d["c_bif"]), cfg, str(d["created"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, BranchFileError):
            raise
        raise BranchFileError(f"bad header: {exc}") from exc
    if abs(h.c_bif - bifurcation_speed(h.m, h.k)) > 1e-12:
        raise BranchFileError(f"header c_bif={h.c_bif} disagrees with the bifurcation speed")
    return h


def parse_point(d: dict, m: int) -> SolutionPoint:
    try:
        diag = DiagnosticsReport(
            float(d["curvature_min"]), float(d["curvature_max"]), float(d["chord_arc"]),
            float(d["c1_norm"]), float(d["decay_slope"]), float(d.get("min_deriv", math.nan)),
        )
        z = LatticeCoeffs(m, np.array(d["coeffs"], dtype=float))
        return SolutionPoint(z, float(d["c"]), float(d["s"]), diag,
                             (float(d["residual_complex"]), float(d["residual_real"])),
                             int(d["newton_iters"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise BranchFileError(f"bad point line: {exc}") from exc


def read_branch(path) -> tuple[BranchFileHeader, list, Optional[str]]:
    """Header, points and final status (``None`` if the run did not finish)."""
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        raise BranchFileError(f"{path}: empty branch file")
    try:
        rows = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as exc:
        raise BranchFileError(f"{path}: {exc}") from exc
    if not all(isinstance(r, dict) for r in rows):
        raise BranchFileError(f"{path}: every line must be a JSON object")
    header = parse_header(rows[0])
    status = None
    points = []
    for i, r in enumerate(rows[1:], start=2):
        if set(r) == {"status"}:
            if i != len(rows):
                raise BranchFileError(f"{path}:{i}: status line before end of file")
            status = str(r["status"])
        else:
            points.append(parse_point(r, header.m))
    return header, points, status


# ---------------------------------------------------------------------------
# exports


def write_csv(points, fh: IO[str]):
    w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for p in points:
        d = p.diagnostics
        row = (p.s, p.c, p.residual_norms[0], d.chord_arc, d.c1_norm, d.curvature_min,
               d.curvature_max, d.decay_slope)
        w.writerow([fmt_float(v) for v in row])


def select_point(points, index: Optional[int] = None, s: Optional[float] = None) -> SolutionPoint:
    if not points:
        raise IndexError("branch has no points")
    if index is not None:
        if not -len(points) <= index < len(points):
            raise IndexError(f"index {index} out of range for {len(points)} points")
        return points[index]
    if s is None:
        raise ValueError("need an index or an s value")
    return min(points, key=lambda p: abs(p.s - s))


def boundary_curve(z: LatticeCoeffs, M: int) -> np.ndarray:
    return sp.to_grid(z, M)


def render_svg(z: LatticeCoeffs, M: int, size: int = 480, circle_points: int = 360) -> str:
    """SVG of the drop boundary ``Z(e^{i alpha})`` with the unit circle for reference.

    The y axis is flipped so the picture has the usual math orientation.
    """
    curve = boundary_curve(z, M)
    circle = sp.nodes(circle_points)
    both = np.concatenate([curve, circle])
    x0, x1 = both.real.min(), both.real.max()
    y0, y1 = (-both.imag).min(), (-both.imag).max()
    pad = 0.05 * max(x1 - x0, y1 - y0)
    vb = (x0 - pad, y0 - pad, x1 - x0 + 2 * pad, y1 - y0 + 2 * pad)
    stroke = 0.004 * max(vb[2], vb[3])

    def pts(w):
        # adding 0.0 turns -0.0 into 0.0
        return " ".join(f"{round(p.real, 6) + 0.0:.6f},{round(-p.imag, 6) + 0.0:.6f}" for p in w)

    return "\n".join([
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{vb[0]:.6f} {vb[1]:.6f} {vb[2]:.6f} {vb[3]:.6f}">',
        f'<polygon id="unit-circle" points="{pts(circle)}" fill="none" stroke="#999999" '
        f'stroke-width="{stroke:.6f}" stroke-dasharray="{4 * stroke:.6f}"/>',
        f'<polygon id="drop" points="{pts(curve)}" fill="#cfe3f7" stroke="#1f4e79" '
        f'stroke-width="{stroke:.6f}"/>',
        "</svg>",
        "",
    ])


def svg_points(svg: str, element_id: str = "drop") -> np.ndarray:
    """Read the vertices of a polygon back from rendered SVG (for checks)."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(svg)
    for el in root.iter():
        if el.get("id") == element_id:
            xy = [tuple(map(float, t.split(","))) for t in el.get("points").split()]
            return np.array([x - 1j * y for x, y in xy])
    raise KeyError(element_id)
