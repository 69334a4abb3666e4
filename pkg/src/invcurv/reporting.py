"""Deterministic JSON/CSV writers and a plain-text SVG emitter."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

SIG_DIGITS = 17


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, f".{SIG_DIGITS}g")
    # keep a float marker so integers and floats stay distinguishable
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _emit(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _emit(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _emit(_plain(obj), indent, 0) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v
                    for v in _plain(list(row))])
    return buf.getvalue()


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows), encoding="utf-8")
    return path


def curve_records(curve):
    """(header, rows) for a sampled curve: s, x, y."""
    return ("s", "x", "y"), np.column_stack([curve.s, curve.x, curve.y])


def curve_json(curve, L):
    return {"x0": curve.x0, "L": L,
            "samples": [{"s": s, "x": x, "y": y} for s, x, y in zip(curve.s, curve.x, curve.y)]}


# ---------------------------------------------------------------- SVG

WIDTH, HEIGHT, MARGIN = 800, 500, 40


def curve_svg(curves, title: str = "") -> str:
    """Curves over the x-axis, each stroked black with the enclosed region at 25% opacity.

    All curves share one isotropic scale; the axis segment closes each region.
    """
    curves = list(curves)
    xs = np.concatenate([c.x for c in curves])
    ys = np.concatenate([c.y for c in curves])
    xmin, xmax = float(xs.min()), float(xs.max())
    ymax = float(max(ys.max(), 1e-12))
    scale = min((WIDTH - 2 * MARGIN) / max(xmax - xmin, 1e-12), (HEIGHT - 2 * MARGIN) / ymax)
    ox = 0.5 * WIDTH - 0.5 * (xmin + xmax) * scale
    oy = HEIGHT - MARGIN

    def path(c):
        px = ox + scale * c.x
        py = oy - scale * c.y
        pts = " L ".join(f"{a:.3f} {b:.3f}" for a, b in zip(px, py))
        return f"M {pts} Z"

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
             f'width="{WIDTH}" height="{HEIGHT}">',
             f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
             f'<line x1="{MARGIN}" y1="{oy}" x2="{WIDTH - MARGIN}" y2="{oy}" stroke="gray" '
             'stroke-width="1"/>']
    for c in curves:
        lines.append(f'<path d="{path(c)}" fill="black" fill-opacity="0.25" stroke="black" '
                     'stroke-width="1.5"/>')
    if title:
        lines.append(f'<text x="{MARGIN}" y="{MARGIN - 12}" font-family="sans-serif" '
                     f'font-size="14">{title}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(path: Path, curves, title: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(curve_svg(curves, title), encoding="utf-8")
    return path
