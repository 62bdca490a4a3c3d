"""
Figures of Gauss-type maps and attractors

Graphs are drawn on the projective line through one of two charts: the
rational circle chart u in [0, 2] (0 -> 1 -> inf -> -1 -> 0-), or the angle
chart theta in [-pi/2, 3pi/2] obtained by reparametrizing the line as the
boundary of the disk. Sample points and their images are computed exactly;
floats appear only when coordinates are written out.

Branches with the same acting matrix are drawn as one curve, so the number
of curves can be smaller than the number of labeled domains.
"""

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import plotly.graph_objects as go
from plotly.colors import qualitative

from src.cfspec import CFSpec
from src.dynamics import build_realization
from src.errors import OutOfRangeError, ValidationError
from src.exact import QNum, circle_coordinate, from_circle_coordinate
from src.intervals import IntervalUnion, key_coordinate
from src.modular import IDENTITY, Mat, mobius


logger = logging.getLogger(__name__)

WHICH = ("F", "Fjump", "Fdual", "FfirstReturn", "attractor")

PLOT_DEPTH = 12
SIZE = 480
MARGIN = 40
PALETTE = qualitative.Plotly

# landmarks drawn on both axes
TICKS = (("0", QNum(0)), ("1", QNum(1)), ("inf", QNum(1, 0, 0)), ("-1", QNum(-1)))


@dataclass(frozen=True)
class PlotSpec:
    which: str = "F"
    resolution: int = 200
    circular: bool = False

    def __post_init__(self):
        if self.which not in WHICH:
            raise ValidationError(f"unknown plot {self.which!r}, expected one of {', '.join(WHICH)}", "which")
        if self.resolution < 2:
            raise OutOfRangeError(f"resolution must be at least 2, got {self.resolution}")


@dataclass
class PlotBranch:
    """One acting matrix and the domains it acts on."""
    matrix: Mat
    labels: List[str] = field(default_factory=list)
    domains: List[IntervalUnion] = field(default_factory=list)
    segments: List[List[Tuple[float, float]]] = field(default_factory=list)


@dataclass
class Band:
    """Attractor component drawn as a strip of segments at one row."""
    label: str
    row: int
    segments: List[Tuple[float, float]] = field(default_factory=list)


@dataclass
class Figure:
    title: str
    plot: PlotSpec
    branches: List[PlotBranch] = field(default_factory=list)
    domain_labels: List[Tuple[str, float]] = field(default_factory=list)
    bands: List[Band] = field(default_factory=list)

    @property
    def curve_count(self) -> int:
        return len(self.branches)


# Charts ---------------------------------------------------------------------

def chart_range(circular: bool) -> Tuple[float, float]:
    if circular:
        return -np.pi / 2, 3 * np.pi / 2
    return 0.0, 2.0


def to_chart(u: Sequence[QNum], circular: bool) -> np.ndarray:
    """Circle-chart coordinates to plot coordinates."""
    values = np.array([float(v) for v in u], dtype=float)
    if not circular:
        return values
    out = np.empty_like(values)
    low = values <= 1.0
    out[low] = 2 * np.arctan2(values[low], 1.0 - values[low]) - np.pi / 2
    v = values[~low] - 2.0
    out[~low] = 2 * np.arctan2(v, 1.0 + v) + 3 * np.pi / 2
    return out


def _piece_grid(start, end, resolution: int) -> List[QNum]:
    lo, hi = key_coordinate(start), key_coordinate(end)
    step = (hi - lo) / (resolution - 1)
    return [lo + step * k for k in range(resolution)]


def sample_branch(m: Mat, domain: IntervalUnion, resolution: int,
                  circular: bool = False) -> List[List[Tuple[float, float]]]:
    """
    Sample x -> m x on every nondegenerate piece of the domain.

    A segment is broken where the image wraps around the chart.
    """
    lo, hi = chart_range(circular)
    half = (hi - lo) / 2
    segments = []
    for start, end in domain.pieces:
        if start == end:
            continue
        us = _piece_grid(start, end, resolution)
        vs = [circle_coordinate(mobius(m, from_circle_coordinate(u))) for u in us]
        xs, ys = to_chart(us, circular), to_chart(vs, circular)
        current = [(xs[0], ys[0])]
        for x, y in zip(xs[1:], ys[1:]):
            if abs(y - current[-1][1]) > half:
                segments.append(current)
                current = []
            current.append((x, y))
        segments.append(current)
    return [s for s in segments if len(s) > 1]


# Branch domains ---------------------------------------------------------------

def branch_domains(spec: CFSpec, which: str, depth: int = PLOT_DEPTH) -> List[Tuple[str, Mat, IntervalUnion]]:
    """
    (label, acting matrix, exact domain) for every branch of the map.

    Raises:
        ValidationError: if the attractors the map needs are missing
    """
    if which == "F":
        if spec.H is None:
            raise ValidationError("plotting F needs H", "attractors.H")
        out = []
        for a in spec.code.arrows:
            b = spec.branch[a.label]
            out.append((a.label, b.inverse(), spec.H[a.target].expand(depth).image(b)))
        return out

    r = build_realization(spec)
    if which == "Fdual":
        out = []
        for a in spec.code.arrows:
            dom = r.K[a.source].expand(depth).image(spec.dual[a.label])
            out.append((a.label, spec.branch[a.label], dom))
        return out

    if which == "Fjump":
        out = []
        for node in range(spec.nodes):
            p = r.P[node]
            for b in spec.code.arrows_from(node):
                if b.label == p:
                    continue
                power = IDENTITY
                for k in range(depth if p else 1):
                    m = power @ spec.branch[b.label]
                    dom = r.H[b.target].expand(depth).image(m)
                    out.append((_block_label(p, k, b.label), m.inverse(), dom))
                    if p:
                        power = power @ spec.branch[p]
        return out

    if which == "FfirstReturn":
        if r.R is None:
            raise ValidationError("plotting the first-return map needs R", "attractors.R")
        out = []
        for node in range(spec.nodes):
            for c in spec.code.arrows_into(node):
                a = r.P[c.source]
                power = IDENTITY
                for k in range(depth if a else 1):
                    m = power @ spec.branch[c.label]
                    dom = r.R[c.source].image(m.inverse()).intersection(r.R[node])
                    if not dom.is_empty:
                        out.append((_block_label(a, k, c.label, after=True), m, dom))
                    if a:
                        power = spec.branch[a] @ power
        return out

    raise ValidationError(f"{which} has no branches", "which")


def _block_label(p: Optional[str], k: int, label: str, after: bool = False) -> str:
    if not k:
        return label
    run = p if k == 1 else f"{p}^{k}"
    return label + run if after else run + label


def collect_branches(items: Sequence[Tuple[str, Mat, IntervalUnion]]) -> List[PlotBranch]:
    """Group domains by acting matrix, keeping first-seen order."""
    grouped: Dict[Mat, PlotBranch] = {}
    for label, m, dom in items:
        if not any(s != e for s, e in dom.pieces):
            continue
        br = grouped.setdefault(m, PlotBranch(m))
        br.labels.append(label)
        br.domains.append(dom)
    return list(grouped.values())


# Figures ------------------------------------------------------------------------

def build_figure(spec: CFSpec, plot: PlotSpec) -> Figure:
    fig = Figure(f"{spec.name}: {plot.which}", plot)
    if plot.which == "attractor":
        fig.bands = attractor_bands(spec, plot.circular)
        return fig
    fig.branches = collect_branches(branch_domains(spec, plot.which))
    for br in fig.branches:
        for label, dom in zip(br.labels, br.domains):
            br.segments.extend(sample_branch(br.matrix, dom, plot.resolution, plot.circular))
            start, end = next((s, e) for s, e in dom.pieces if s != e)
            mid = (key_coordinate(start) + key_coordinate(end)) / 2
            fig.domain_labels.append((label, float(to_chart([mid], plot.circular)[0])))
    logger.info("%s: %d domains, %d curves", fig.title, len(fig.domain_labels), fig.curve_count)
    return fig


def attractor_bands(spec: CFSpec, circular: bool = False) -> List[Band]:
    """Rows H_0, K_0, H_1, K_1, ... of attractor components."""
    bands = []
    for name, desc in (("H", spec.H), ("K", spec.K)):
        if desc is None:
            continue
        for node, d in enumerate(desc):
            band = Band(f"{name}_{node}", 2 * node + (name == "K"))
            for start, end in d.expand(PLOT_DEPTH).pieces:
                xs = to_chart([key_coordinate(start), key_coordinate(end)], circular)
                band.segments.append((float(xs[0]), float(xs[1])))
            bands.append(band)
    bands.sort(key=lambda b: b.row)
    return bands


def _color(idx: int) -> str:
    return PALETTE[idx % len(PALETTE)]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(fig: Figure) -> str:
    lo, hi = chart_range(fig.plot.circular)
    scale = SIZE / (hi - lo)

    def px(x: float) -> float:
        return MARGIN + (x - lo) * scale

    def py(y: float) -> float:
        return MARGIN + SIZE - (y - lo) * scale

    total = SIZE + 2 * MARGIN
    svg = ET.Element("svg", {"xmlns": "http://www.w3.org/2000/svg", "width": str(total),
                             "height": str(total), "viewBox": f"0 0 {total} {total}"})
    ET.SubElement(svg, "title").text = fig.title
    ET.SubElement(svg, "rect", {"x": str(MARGIN), "y": str(MARGIN), "width": str(SIZE),
                                "height": str(SIZE), "fill": "none", "stroke": "#888"})
    axes = ET.SubElement(svg, "g", {"class": "axes", "stroke": "#ccc"})
    ticks = to_chart([circle_coordinate(x) for _, x in TICKS], fig.plot.circular)
    for (name, _), t in zip(TICKS, ticks):
        ET.SubElement(axes, "line", {"x1": _fmt(px(t)), "y1": str(MARGIN), "x2": _fmt(px(t)),
                                     "y2": str(MARGIN + SIZE)})
        ET.SubElement(axes, "text", {"x": _fmt(px(t)), "y": str(MARGIN + SIZE + 14),
                                     "font-size": "10", "text-anchor": "middle"}).text = name

    if fig.bands:
        rows = max(b.row for b in fig.bands) + 1
        for idx, band in enumerate(fig.bands):
            y = MARGIN + SIZE * (band.row + 1) / (rows + 1)
            g = ET.SubElement(svg, "g", {"class": "component", "data-label": band.label,
                                         "stroke": _color(idx), "stroke-width": "4"})
            ET.SubElement(g, "text", {"x": "4", "y": _fmt(y), "font-size": "10"}).text = band.label
            for a, b in band.segments:
                ET.SubElement(g, "line", {"x1": _fmt(px(a)), "y1": _fmt(y), "x2": _fmt(px(b)), "y2": _fmt(y)})
    else:
        ET.SubElement(svg, "line", {"class": "diagonal", "x1": _fmt(px(lo)), "y1": _fmt(py(lo)),
                                    "x2": _fmt(px(hi)), "y2": _fmt(py(hi)), "stroke": "#eee"})
        for idx, br in enumerate(fig.branches):
            g = ET.SubElement(svg, "g", {"class": "branch", "data-labels": " ".join(br.labels),
                                         "data-matrix": str(br.matrix)})
            for seg in br.segments:
                points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in seg)
                ET.SubElement(g, "polyline", {"points": points, "fill": "none",
                                              "stroke": _color(idx), "stroke-width": "1.5"})
        labels = ET.SubElement(svg, "g", {"class": "domain-labels", "font-size": "9"})
        for label, x in fig.domain_labels:
            ET.SubElement(labels, "text", {"class": "domain-label", "x": _fmt(px(x)),
                                           "y": str(MARGIN - 6), "text-anchor": "middle"}).text = label
    return ET.tostring(svg, encoding="unicode")


def write_svg(fig: Figure, path: str) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        f.write(render_svg(fig))
        f.write("\n")


def to_plotly(fig: Figure) -> go.Figure:
    out = go.Figure()
    if fig.bands:
        for idx, band in enumerate(fig.bands):
            for k, (a, b) in enumerate(band.segments):
                out.add_trace(go.Scatter(x=[a, b], y=[band.row, band.row], mode='lines',
                                         name=band.label, legendgroup=band.label, showlegend=not k,
                                         line=dict(color=_color(idx), width=6)))
    for idx, br in enumerate(fig.branches):
        name = " ".join(br.labels)
        for k, seg in enumerate(br.segments):
            xs, ys = zip(*seg)
            out.add_trace(go.Scatter(x=list(xs), y=list(ys), mode='lines', name=name,
                                     legendgroup=name, showlegend=not k,
                                     line=dict(color=_color(idx))))
    lo, hi = chart_range(fig.plot.circular)
    out.update_layout(title=fig.title, width=SIZE + 2 * MARGIN, height=SIZE + 2 * MARGIN,
                      xaxis=dict(range=[lo, hi]), template='plotly_white')
    if not fig.bands:
        out.update_layout(yaxis=dict(range=[lo, hi], scaleanchor='x'))
    return out


def write_html(fig: Figure, path: str) -> None:
    to_plotly(fig).write_html(path)


def plot_map(spec: CFSpec, plot: PlotSpec, out_path: str, html_path: Optional[str] = None) -> Figure:
    """Build a figure and write it as SVG, plus an HTML twin when asked."""
    fig = build_figure(spec, plot)
    write_svg(fig, out_path)
    if html_path:
        write_html(fig, html_path)
    return fig


def demo():
    """Curve count of the tau-minus-one slow map."""
    from src.utils import load_preset
    spec = load_preset("tau-minus-one")
    fig = build_figure(spec, PlotSpec("F", resolution=20))
    print(f"{fig.title}: {len(fig.domain_labels)} domains, {fig.curve_count} curves")


if __name__ == '__main__':
    demo()
