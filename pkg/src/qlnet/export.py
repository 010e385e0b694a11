"""CSV, SVG and PGM writers.  CSVs carry ``#`` comment headers."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

# I, X, Y, Z
PATTERN_COLORS = ("#ffffff", "#1f5fbf", "#2ca02c", "#ff7f0e")
PGM_LEVELS = (255, 0, 85, 170)


def _header(comments: Iterable[str]) -> str:
    return "".join(f"# {c}\n" for c in comments)


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence], comments: Iterable[str] = ()) -> None:
    buf = io.StringIO()
    buf.write(_header(comments))
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def damage_rows(series) -> list[tuple]:
    """Rows ``(t, mask, distance)`` for a classical damage series, mask in hex."""
    return [(t, format(p.mask, "x"), p.distance) for t, p in enumerate(series, start=1)]


def pattern_rows(grid: np.ndarray) -> list[tuple]:
    return [(t, "".join(str(int(c)) for c in row), int(np.count_nonzero(row))) for t, row in enumerate(grid, start=1)]


def grid_svg(grid: np.ndarray, cell: int = 8, colors: Sequence[str] = PATTERN_COLORS, title: str = "") -> str:
    """Space-time raster: node across, time down."""
    steps, n = grid.shape
    w, h = n * cell, steps * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    if title:
        parts.append(f"<title>{title}</title>")
    parts.append(f'<rect width="{w}" height="{h}" fill="{colors[0]}"/>')
    for t in range(steps):
        for i in range(n):
            code = int(grid[t, i])
            if code:
                parts.append(
                    f'<rect x="{i * cell}" y="{t * cell}" width="{cell}" height="{cell}" fill="{colors[code]}"/>'
                )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def grid_pgm(grid: np.ndarray, levels: Sequence[int] = PGM_LEVELS, comments: Iterable[str] = ()) -> str:
    """Plain (P2) greymap of a code grid."""
    steps, n = grid.shape
    lines = ["P2"] + [f"# {c}" for c in comments] + [f"{n} {steps}", "255"]
    for row in grid:
        lines.append(" ".join(str(levels[int(c)]) for c in row))
    return "\n".join(lines) + "\n"


def unit_circle_svg(eigenvalues: np.ndarray, degeneracies: Sequence[tuple[float, int]] = (), size: int = 320) -> str:
    """Eigenvalues on the unit circle, with multiplicities written next to degenerate ones."""
    r = size * 0.4
    c = size / 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="#888"/>',
        f'<line x1="{c - r - 10}" y1="{c}" x2="{c + r + 10}" y2="{c}" stroke="#ccc"/>',
        f'<line x1="{c}" y1="{c - r - 10}" x2="{c}" y2="{c + r + 10}" stroke="#ccc"/>',
    ]
    for ev in eigenvalues:
        x, y = c + r * ev.real, c - r * ev.imag
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="4" fill="#d62728"/>')
    for phase, mult in degeneracies:
        if mult > 1:
            x, y = c + (r + 18) * math.cos(phase), c - (r + 18) * math.sin(phase)
            parts.append(f'<text x="{x:.1f}" y="{y:.1f}" font-size="12" text-anchor="middle">{mult}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_json(path: str | Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
