"""File emission: exact JSON/CSV values and SVG pictures of the simplex.

Exact rationals are written as ``"p/q"`` strings next to a decimal rendering
with a fixed number of significant digits, so output files are
byte-reproducible.

SVG geometry: the simplex is an equilateral triangle of side 1000 with a
margin of 20; ``e1`` is bottom-left, ``e2`` bottom-right, ``e3`` on top.
A point ``(x1, x2, x3)`` of the simplex maps to ``x1*V1 + x2*V2 + x3*V3``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from decimal import Context, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .cones import ROOT, ConeBasis, SubdivisionTree, corner_cones, middle_cone, triangle_vertices

SCHEMA_VERSION = 1
DEFAULT_PRECISION = 12


def exact_str(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def decimal_str(v, precision: int = DEFAULT_PRECISION) -> str:
    v = Fraction(v)
    ctx = Context(prec=precision)
    d = ctx.divide(Decimal(v.numerator), Decimal(v.denominator))
    return format(d, "g") if d != 0 else "0"


def jsonable(obj, precision: int = DEFAULT_PRECISION):
    """Recursively convert to JSON types; Fractions become {"exact", "decimal"}."""
    if isinstance(obj, Fraction):
        return {"exact": exact_str(obj), "decimal": decimal_str(obj, precision)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v, precision) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps(payload: dict, precision: int = DEFAULT_PRECISION) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "tool_version": __version__}
    doc.update(jsonable(payload, precision))
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, payload: dict, precision: int = DEFAULT_PRECISION) -> Path:
    path.write_text(dumps(payload, precision))
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    path.write_text(buf.getvalue())
    return path


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

SIDE = 1000.0
MARGIN = 20.0
HEIGHT = SIDE * math.sqrt(3) / 2
V1 = (MARGIN, MARGIN + HEIGHT)
V2 = (MARGIN + SIDE, MARGIN + HEIGHT)
V3 = (MARGIN + SIDE / 2, MARGIN)

STYLES = {
    "absorbed-A": 'fill="#9ecae1" stroke="#08306b" stroke-width="1"',
    "absorbed": 'fill="#c6dbef" stroke="#08306b" stroke-width="1"',
    "complement": 'fill="none" stroke="#000000" stroke-width="1.5"',
    "cylinder": 'fill="none" stroke="#a50f15" stroke-width="0.75" stroke-dasharray="6,4"',
}


def to_plane(x: Sequence[Fraction]) -> tuple[float, float]:
    x1, x2, x3 = (float(v) for v in x)
    return (x1 * V1[0] + x2 * V2[0] + x3 * V3[0], x1 * V1[1] + x2 * V2[1] + x3 * V3[1])


def _polygon(c: ConeBasis, cls: str, depth: int) -> str:
    verts = triangle_vertices(c)
    exact = ";".join(",".join(exact_str(v) for v in pt) for pt in verts)
    pts = " ".join(f"{px:.3f},{py:.3f}" for px, py in map(to_plane, verts))
    return f'  <polygon class="{cls}" data-depth="{depth}" data-vertices="{exact}" points="{pts}" {STYLES[cls]}/>'


def render_depth(tree: SubdivisionTree, k: int) -> str:
    """Picture of depth ``k``: A and earlier absorbed middles shaded, current complements and cylinders outlined."""
    w, h = SIDE + 2 * MARGIN, HEIGHT + 2 * MARGIN
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" viewBox="0 0 {w:.3f} {h:.3f}">',
        f"  <title>complement of the depth-{k} preimage of A</title>",
    ]
    lines += [_polygon(c, "absorbed-A", 0) for c in corner_cones(ROOT)]
    for lv in tree.levels[:k]:
        lines += [_polygon(middle_cone(c), "absorbed", lv.depth) for c in lv.complements]
    lv = tree.levels[k]
    lines += [_polygon(c, "complement", k) for c in lv.complements]
    lines += [_polygon(c, "cylinder", k) for c in lv.cylinders]
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def svg_vertices(svg: str) -> set[tuple[Fraction, ...]]:
    """Exact barycentric vertices recorded in an SVG written by :func:`render_depth`."""
    out = set()
    for attr in re.findall(r'data-vertices="([^"]*)"', svg):
        for pt in attr.split(";"):
            out.add(tuple(Fraction(v) for v in pt.split(",")))
    return out
