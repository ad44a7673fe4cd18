"""
Static SVG renderings: sequence index plots, transition-rate heatmaps,
and modal-state plots. Output is plain XML text built with fixed
orderings and fixed-precision coordinates so identical inputs render to
identical bytes.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .model import FULL_ALPHABET, StateSymbol, render_state
from .seqstats import ModalTrajectory, TransitionMatrix

# Fixed state -> fill color. Single letters get saturated hues; blends
# darken with complexity down to black for the four-type state; the
# pooled state is orange and the clean state white.
COLOR_MAP: dict[str, str] = {
    "B": "#40e0d0",
    "I": "#2e8b57",
    "F": "#6699cc",
    "T": "#ff00ff",
    "BI": "#2d9579",
    "BF": "#449ba9",
    "BT": "#835cbe",
    "IF": "#3d7877",
    "IT": "#7b398c",
    "FT": "#923fbc",
    "BIF": "#808080",
    "BIT": "#4e4d75",
    "BFT": "#5a508e",
    "IFT": "#563e74",
    "BIFT": "#000000",
    "X": "#ff8c00",
    "Z": "#ffffff",
}

_FONT = 'font-family="DejaVu Sans, Helvetica, sans-serif"'
_LEGEND_COLS = 6
_SWATCH = 14
_LEGEND_ROW_H = 22


def color_of(state: StateSymbol) -> str:
    return COLOR_MAP[render_state(state)]


def _num(value: float) -> str:
    return f"{value:.2f}"


def _rect(x: float, y: float, w: float, h: float, fill: str, extra: str = "") -> str:
    return (
        f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(w)}" height="{_num(h)}" '
        f'fill="{fill}" stroke="#333333" stroke-width="0.3"{extra}/>'
    )


def _text(x: float, y: float, content: str, size: int = 11, anchor: str = "start") -> str:
    return (
        f'<text x="{_num(x)}" y="{_num(y)}" font-size="{size}" text-anchor="{anchor}" '
        f"{_FONT}>{escape(content)}</text>"
    )


def _legend(x: float, y: float) -> tuple[list[str], float]:
    """The full fixed state legend as SVG elements plus its height."""
    parts = [_text(x, y + 12, "states:", 11)]
    for i, state in enumerate(FULL_ALPHABET):
        col = i % _LEGEND_COLS
        row = i // _LEGEND_COLS
        sx = x + 60 + col * 90
        sy = y + row * _LEGEND_ROW_H
        parts.append(_rect(sx, sy, _SWATCH, _SWATCH, color_of(state)))
        parts.append(_text(sx + _SWATCH + 5, sy + 11, render_state(state), 11))
    rows = (len(FULL_ALPHABET) + _LEGEND_COLS - 1) // _LEGEND_COLS
    return parts, rows * _LEGEND_ROW_H + 8


def _document(width: float, height: float, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" '
        f'height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}">'
    )
    background = f'<rect x="0" y="0" width="{_num(width)}" height="{_num(height)}" fill="#fbfbf8"/>'
    return "\n".join([head, background, *body, "</svg>"]) + "\n"


def sequence_index_svg(rows: Sequence[tuple[str, Sequence[StateSymbol]]], title: str) -> str:
    """One horizontal color-banded bar per release, top to bottom in the
    given order. Equal-state runs are drawn as single rectangles."""
    left, top = 150.0, 40.0
    plot_w, bar_h, gap = 620.0, 12.0, 4.0
    body: list[str] = [_text(left, 22, title, 14)]
    y = top
    for release_id, states in rows:
        body.append(_text(left - 8, y + bar_h - 2, release_id, 10, anchor="end"))
        if states:
            step = plot_w / len(states)
            run_start = 0
            for pos in range(1, len(states) + 1):
                if pos == len(states) or states[pos] != states[run_start]:
                    body.append(
                        _rect(
                            left + run_start * step,
                            y,
                            (pos - run_start) * step,
                            bar_h,
                            color_of(states[run_start]),
                        )
                    )
                    run_start = pos
        y += bar_h + gap
    legend_parts, legend_h = _legend(left - 100, y + 16)
    body.extend(legend_parts)
    return _document(left + plot_w + 30, y + 16 + legend_h + 10, body)


def _heat_color(rate: float) -> str:
    """White through blue: intensity proportional to the rate."""
    level = max(0.0, min(1.0, rate))
    r = round(255 - 205 * level)
    g = round(255 - 155 * level)
    b = round(255 - 75 * level)
    return f"#{r:02x}{g:02x}{b:02x}"


def transition_heatmap_svg(tm: TransitionMatrix, title: str) -> str:
    """Rate matrix as a colored grid, source states as rows."""
    left, top = 110.0, 70.0
    cell = 42.0
    n = len(tm.alphabet)
    body: list[str] = [_text(left, 22, title, 14)]
    body.append(_text(left - 90, 45, "rows: from, columns: to", 10))
    for j, state in enumerate(tm.alphabet):
        body.append(_text(left + j * cell + cell / 2, top - 8, render_state(state), 10, "middle"))
    for i, state in enumerate(tm.alphabet):
        y = top + i * cell
        body.append(_text(left - 8, y + cell / 2 + 4, render_state(state), 10, "end"))
        for j in range(n):
            rate = float(tm.rates[i, j])
            body.append(_rect(left + j * cell, y, cell, cell, _heat_color(rate)))
            shade = "#ffffff" if rate > 0.6 else "#222222"
            body.append(
                f'<text x="{_num(left + j * cell + cell / 2)}" y="{_num(y + cell / 2 + 4)}" '
                f'font-size="9" text-anchor="middle" fill="{shade}" {_FONT}>'
                f"{rate:.2f}</text>"
            )
    grid_bottom = top + n * cell
    legend_parts, legend_h = _legend(left - 60, grid_bottom + 24)
    body.extend(legend_parts)
    width = max(left + n * cell + 40, 620.0)
    return _document(width, grid_bottom + 24 + legend_h + 10, body)


def modal_svg(modal: ModalTrajectory, title: str) -> str:
    """Per-position bars colored by the modal state; bar height shows
    the modal state's frequency."""
    left, top = 70.0, 40.0
    plot_h = 180.0
    count = len(modal.positions)
    bar_w = max(4.0, min(24.0, 560.0 / max(count, 1)))
    plot_w = bar_w * count
    body: list[str] = [_text(left, 22, title, 14)]
    for frac in (0.0, 0.5, 1.0):
        y = top + plot_h - frac * plot_h
        body.append(
            f'<line x1="{_num(left - 4)}" y1="{_num(y)}" x2="{_num(left + plot_w)}" '
            f'y2="{_num(y)}" stroke="#cccccc" stroke-width="0.5"/>'
        )
        body.append(_text(left - 8, y + 4, f"{frac:.1f}", 9, "end"))
    for i, pos in enumerate(modal.positions):
        h = pos.frequency * plot_h
        body.append(_rect(left + i * bar_w, top + plot_h - h, bar_w, h, color_of(pos.state)))
    body.append(_text(left + plot_w / 2, top + plot_h + 16, "position", 10, "middle"))
    body.append(_text(left - 50, top + plot_h / 2, "modal state frequency", 9, "middle"))
    legend_parts, legend_h = _legend(left - 40, top + plot_h + 34)
    body.extend(legend_parts)
    width = max(left + plot_w + 40, 620.0)
    return _document(width, top + plot_h + 34 + legend_h + 10, body)
