"""Minimal SVG 1.1 scatter plot of a spectrum against the unit circle."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

VIEW = 1.6
SIZE = 600


def spectrum_svg(eigs, title: str = "", marker_radius: float = 0.008) -> str:
    eigs = np.asarray(eigs, dtype=np.complex128).ravel()
    if eigs.size == 0:
        raise ValueError("nothing to plot")
    w = 2 * VIEW
    parts = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="{-VIEW} {-VIEW} {w} {w}" preserveAspectRatio="xMidYMid meet">',
    ]
    if title:
        parts.append(f"<title>{escape(title)}</title>")
    parts.append(f'<rect x="{-VIEW}" y="{-VIEW}" width="{w}" height="{w}" fill="white"/>')
    # flip y so the imaginary axis points up
    parts.append('<g transform="scale(1,-1)">')
    parts.append(f'<line class="axis" x1="{-VIEW}" y1="0" x2="{VIEW}" y2="0" stroke="#999" stroke-width="0.004"/>')
    parts.append(f'<line class="axis" x1="0" y1="{-VIEW}" x2="0" y2="{VIEW}" stroke="#999" stroke-width="0.004"/>')
    parts.append('<circle class="unit-circle" cx="0" cy="0" r="1" fill="none" stroke="red" '
                 'stroke-width="0.008" stroke-dasharray="0.04,0.03"/>')
    for z in eigs:
        parts.append(f'<circle class="eig" cx="{float(z.real)!r}" cy="{float(z.imag)!r}" r="{marker_radius}" '
                     'fill="#1f3b99"/>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_spectrum(eigs, out_path, title: str = "") -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(spectrum_svg(eigs, title))
    return out_path
