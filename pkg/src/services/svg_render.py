"""
Dependency-free SVG charts for TRACE displays, YonX fits and confidence ellipses.

Every document uses a fixed viewBox and fixed-precision coordinates, so the same
inputs always render to the same bytes.
"""
import html
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import config
from src.errors import PathError, RenderError
from src.models.canonical import StandardizedModel
from src.models.inference import EllipseSpec
from src.models.paths import ShrinkagePath
from src.models.traces import TRACE_TYPES, TraceBundle
from src.services.trace_io import trace_series
from src.tracing import get_tracer, instrument_function

logger = logging.getLogger(__name__)
tracer = get_tracer()

TRACE_TITLES = {
    "coef": ("Shrunken Coefficients", "beta"),
    "spat": ("Shrinkage Pattern", "delta"),
    "rmse": ("Relative MSE Risk", "MSE / sigma^2"),
    "exev": ("Excess Eigenvalues", "eigenvalue"),
    "infd": ("Inferior Direction Cosines", "direction cosine"),
    "lr": ("Likelihood Ratio", "-2 log(LR)"),
}

Series = Tuple[str, Sequence[float], Sequence[float]]


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _tick_label(value: float) -> str:
    if abs(value) < 1e-12:
        return "0"
    return f"{value:.4g}"


def _ticks(lo: float, hi: float, count: int = 6) -> np.ndarray:
    return np.linspace(lo, hi, count)


def _data_range(values: Sequence[float], include_zero: bool = True, pad: float = 0.05) -> Tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if include_zero:
        finite.append(0.0)
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if hi - lo <= 1e-12 * max(1.0, abs(hi)):
        return lo - 1.0, hi + 1.0
    span = hi - lo
    return lo - pad * span, hi + pad * span


def _runs(xs: Sequence[float], ys: Sequence[float], ceiling: Optional[float] = None) -> List[List[Tuple[float, float]]]:
    """Split a series into runs of consecutive plottable points."""
    runs: List[List[Tuple[float, float]]] = [[]]
    for x, y in zip(xs, ys):
        if math.isfinite(y) and (ceiling is None or y <= ceiling):
            runs[-1].append((float(x), float(y)))
        elif runs[-1]:
            runs.append([])
    return [run for run in runs if run]


def _simplify(points: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    """Drop interior vertices that are collinear with their neighbours."""
    if len(points) < 3:
        return points
    kept = [points[0]]
    for current, following in zip(points[1:-1], points[2:]):
        x0, y0 = kept[-1]
        ax, ay = current[0] - x0, current[1] - y0
        bx, by = following[0] - current[0], following[1] - current[1]
        cross = ax * by - ay * bx
        if abs(cross) > 1e-9 * math.hypot(ax, ay) * math.hypot(bx, by):
            kept.append(current)
    kept.append(points[-1])
    return kept


class SvgCanvas:
    """Plot area with linear data-to-pixel mapping, axes and a legend column."""

    def __init__(self, title: str, x_range: Tuple[float, float], y_range: Tuple[float, float], x_label: str, y_label: str):
        style = config.plot_style
        self.width = int(style.get("width", 960))
        self.height = int(style.get("height", 640))
        margin = style.get("margin", {})
        self.left = margin.get("left", 90)
        self.right = self.width - margin.get("right", 190)
        self.top = margin.get("top", 50)
        self.bottom = self.height - margin.get("bottom", 70)
        self.x_range = x_range
        self.y_range = y_range
        self.legend_count = 0

        self.lines: List[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">',
            '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
            f'<text x="{_fmt((self.left + self.right) / 2)}" y="30" text-anchor="middle" font-size="20" '
            f'font-family="Arial">{html.escape(title)}</text>',
        ]
        self._axes(x_label, y_label)

    def x_px(self, x: float) -> float:
        lo, hi = self.x_range
        return self.left + (x - lo) / (hi - lo) * (self.right - self.left)

    def y_px(self, y: float) -> float:
        lo, hi = self.y_range
        return self.bottom - (y - lo) / (hi - lo) * (self.bottom - self.top)

    def _axes(self, x_label: str, y_label: str):
        for value in _ticks(*self.y_range):
            y = _fmt(self.y_px(value))
            self.lines.append(f'<line x1="{self.left}" y1="{y}" x2="{self.right}" y2="{y}" stroke="#e0e0e0" stroke-width="1"/>')
            self.lines.append(
                f'<text x="{self.left - 8}" y="{y}" text-anchor="end" dominant-baseline="middle" font-size="12" '
                f'font-family="Arial">{_tick_label(value)}</text>'
            )
        for value in _ticks(*self.x_range):
            x = _fmt(self.x_px(value))
            self.lines.append(f'<line x1="{x}" y1="{self.bottom}" x2="{x}" y2="{self.bottom + 5}" stroke="#000000" stroke-width="1"/>')
            self.lines.append(
                f'<text x="{x}" y="{self.bottom + 20}" text-anchor="middle" font-size="12" font-family="Arial">{_tick_label(value)}</text>'
            )

        self.lines.append(f'<rect x="{self.left}" y="{self.top}" width="{self.right - self.left}" '
                          f'height="{self.bottom - self.top}" fill="none" stroke="#000000" stroke-width="1.5"/>')
        self.lines.append(
            f'<text x="{_fmt((self.left + self.right) / 2)}" y="{self.height - 20}" text-anchor="middle" font-size="14" '
            f'font-family="Arial">{html.escape(x_label)}</text>'
        )
        cy = _fmt((self.top + self.bottom) / 2)
        self.lines.append(
            f'<text x="24" y="{cy}" text-anchor="middle" font-size="14" font-family="Arial" '
            f'transform="rotate(-90 24 {cy})">{html.escape(y_label)}</text>'
        )

    def hline(self, y: float, color: str = "#000000", dash: str = ""):
        if not self.y_range[0] <= y <= self.y_range[1]:
            return
        py = _fmt(self.y_px(y))
        self.lines.append(
            f'<line x1="{self.left}" y1="{py}" x2="{self.right}" y2="{py}" stroke="{color}" stroke-width="1"{_dash(dash)}/>'
        )

    def vline(self, x: float, color: str, dash: str, label: str = ""):
        px = _fmt(self.x_px(x))
        self.lines.append(
            f'<line x1="{px}" y1="{self.top}" x2="{px}" y2="{self.bottom}" stroke="{color}" stroke-width="1.5"{_dash(dash)}/>'
        )
        if label:
            self.lines.append(
                f'<text x="{px}" y="{self.top - 6}" text-anchor="middle" font-size="12" font-family="Arial" '
                f'fill="{color}">{html.escape(label)}</text>'
            )

    def polyline(self, points: List[Tuple[float, float]], color: str, dash: str, width: float = 2.0):
        pixels = _simplify([(self.x_px(x), self.y_px(y)) for x, y in points])
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pixels)
        self.lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{_dash(dash)} points="{coords}"/>'
        )

    def polygon(self, points: np.ndarray, color: str, dash: str = ""):
        coords = " ".join(f"{_fmt(self.x_px(x))},{_fmt(self.y_px(y))}" for x, y in points)
        self.lines.append(f'<polygon fill="none" stroke="{color}" stroke-width="1.5"{_dash(dash)} points="{coords}"/>')

    def circle(self, x: float, y: float, color: str, radius: float = 4.0, fill: Optional[str] = None):
        self.lines.append(
            f'<circle cx="{_fmt(self.x_px(x))}" cy="{_fmt(self.y_px(y))}" r="{radius}" '
            f'fill="{fill or color}" stroke="{color}" stroke-width="1"/>'
        )

    def legend(self, label: str, color: str, dash: str = ""):
        lx = self.right + 18
        ly = self.top + 16 + self.legend_count * 24
        self.lines.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 30}" y2="{ly}" stroke="{color}" stroke-width="2"{_dash(dash)}/>')
        self.lines.append(
            f'<text x="{lx + 38}" y="{ly}" dominant-baseline="middle" font-size="13" font-family="Arial">{html.escape(label)}</text>'
        )
        self.legend_count += 1

    def finish(self) -> str:
        return "\n".join(self.lines + ["</svg>"]) + "\n"


def _dash(pattern: str) -> str:
    return f' stroke-dasharray="{pattern}"' if pattern else ""


def _series_style(index: int) -> Tuple[str, str]:
    style = config.plot_style
    palette = style.get("palette", ["black"])
    dashes = style.get("dash_patterns", [""])
    return palette[index % len(palette)], dashes[index % len(dashes)]


def line_chart(
    title: str,
    x_range: Tuple[float, float],
    series: Sequence[Series],
    x_label: str = "m",
    y_label: str = "",
    knot: Optional[float] = None,
    marker: Optional[float] = None,
    ceiling: Optional[float] = None,
) -> str:
    """
    Render a multi-series line chart.

    Args:
        title: Chart title
        x_range: Horizontal data range
        series: (label, xs, ys) per line; non-finite values leave gaps
        x_label: Horizontal axis label
        y_label: Vertical axis label
        knot: m of a vertical dashed knot line
        marker: m of a vertical dot-dash marker
        ceiling: Values above this are off-scale

    Returns:
        SVG document
    """
    style = config.plot_style
    values = [y for _, _, ys in series for y in ys if ceiling is None or y <= ceiling]
    canvas = SvgCanvas(title, x_range, _data_range(values), x_label, y_label)
    canvas.hline(0.0, color="#808080")

    if knot is not None:
        canvas.vline(knot, style.get("knot_color", "gray"), "6,4", f"m*={knot:.3f}")
    if marker is not None:
        canvas.vline(marker, style.get("marker_color", "red"), "2,4,10,4", f"m={marker:.3f}")

    for index, (label, xs, ys) in enumerate(series):
        color, dash = _series_style(index)
        for run in _runs(xs, ys, ceiling):
            canvas.polyline(run, color, dash)
        canvas.legend(label, color, dash)

    return canvas.finish()


@instrument_function(tracer, "render_trace")
def render_trace(bundle: TraceBundle, trace_type: str, compare: Optional[TraceBundle] = None) -> str:
    """
    TRACE display of one diagnostic series against m.

    Args:
        bundle: Trace bundle
        trace_type: One of coef, spat, rmse, exev, infd, lr
        compare: Second bundle overlaid on the lr display; its m_star is marked

    Returns:
        SVG document
    """
    if trace_type not in TRACE_TYPES:
        raise RenderError(f"Unknown trace type '{trace_type}'; expected one of {', '.join(TRACE_TYPES)}")
    if compare is not None and trace_type != "lr":
        raise RenderError("A comparison bundle can only be overlaid on the lr display")

    title, y_label = TRACE_TITLES[trace_type]
    labels, values = trace_series(bundle, trace_type)
    lattice = np.array(bundle.lattice)
    series: List[Series] = [(label, lattice, values[:, j]) for j, label in enumerate(labels)]

    marker = None
    ceiling = None
    if trace_type == "lr":
        ceiling = float(config.plot_style.get("lr_ceiling", 80.0))
        series = [(_path_label(bundle.path), lattice, values[:, 0])]
        if compare is not None:
            series.append((_path_label(compare.path), np.array(compare.lattice), np.array(compare.lr)))
            marker = compare.m_star

    svg = line_chart(
        f"{title} ({bundle.path.kind.value} path)",
        (0.0, float(bundle.p)),
        series,
        x_label="m = multicollinearity allowance",
        y_label=y_label,
        knot=bundle.m_star,
        marker=marker,
        ceiling=ceiling,
    )
    logger.info(f"Rendered {trace_type} trace with {len(series)} series")
    return svg


def _path_label(path: ShrinkagePath) -> str:
    if path.q is not None:
        return f"{path.kind.value} q={path.q:g}"
    return path.kind.value


def yonx_lines(path: ShrinkagePath) -> List[Tuple[str, float, float]]:
    """(label, slope, intercept) of the OLS, minimum-MSE and double-shrunk fits."""
    if path.display is None:
        raise PathError(f"{path.kind.value} path carries no fitted-line display; build a yonx path")
    display = path.display
    labels = ["OLS (m=0)", f"minimum MSE (m={display.m[1]:.3f})", f"double shrunk (m={display.m[2]:.3f})"]
    return list(zip(labels, map(float, display.slopes), map(float, display.intercepts)))


@instrument_function(tracer, "render_yonx")
def render_yonx(model: StandardizedModel, path: ShrinkagePath) -> str:
    """
    Scatter of y against x in original units with three fitted lines through the means.

    Args:
        model: Standardized model with one predictor
        path: yonx path built from model

    Returns:
        SVG document
    """
    if model.p != 1:
        raise PathError(f"YonX display needs exactly one predictor, got p={model.p}")
    lines = yonx_lines(path)

    x = np.array(model.x[:, 0]) * model.x_scales[0] + model.x_means[0]
    y = np.array(model.y) * model.y_scale + model.y_mean
    x_range = _data_range(list(x), include_zero=False)
    fitted = [intercept + slope * np.array(x_range) for _, slope, intercept in lines]
    y_range = _data_range(list(y) + [v for f in fitted for v in f], include_zero=False)

    canvas = SvgCanvas(
        f"{model.y_name} on {model.x_names[0]}", x_range, y_range, model.x_names[0], model.y_name
    )
    colors = config.plot_style.get("yonx_colors", {})
    for (label, _, _), key, f in zip(lines, ("ols", "min_mse", "double"), fitted):
        color = colors.get(key, "black")
        canvas.polyline(list(zip(x_range, f)), color, "")
        canvas.legend(label, color)
    for xi, yi in zip(x, y):
        canvas.circle(xi, yi, "#000000", radius=3.5, fill="none")
    canvas.circle(path.display.x_mean, path.display.y_mean, "#000000", radius=2.0)

    logger.info(f"Rendered YonX display for {model.y_name} ~ {model.x_names[0]}")
    return canvas.finish()


@instrument_function(tracer, "render_ellipse")
def render_ellipse(spec: EllipseSpec) -> str:
    """
    Confidence ellipses for a coefficient pair with the shrinkage trajectory overlaid.

    Args:
        spec: Ellipse specification

    Returns:
        SVG document
    """
    style = config.plot_style
    points = np.vstack(list(spec.boundaries) + [spec.overlay, np.zeros((1, 2))])
    x_range = _data_range(list(points[:, 0]), include_zero=False)
    y_range = _data_range(list(points[:, 1]), include_zero=False)
    canvas = SvgCanvas(
        f"Confidence ellipses for ({spec.names[0]}, {spec.names[1]})",
        x_range,
        y_range,
        f"{spec.names[0]} ({spec.units})",
        f"{spec.names[1]} ({spec.units})",
    )
    canvas.hline(0.0, color="#808080")
    canvas.vline(0.0, "#808080", "")

    for index, (level, boundary) in enumerate(zip(spec.levels, spec.boundaries)):
        color, dash = _series_style(index + 1)
        canvas.polygon(np.array(boundary), color, dash)
        canvas.legend(f"{level:.0%} confidence", color, dash)

    path_color = style.get("palette", ["black"])[0]
    canvas.polyline([tuple(p) for p in np.array(spec.overlay)], path_color, "")
    canvas.legend("shrinkage path", path_color)
    canvas.circle(spec.center[0], spec.center[1], path_color)
    canvas.circle(spec.knot[0], spec.knot[1], style.get("marker_color", "red"), radius=5.0)
    canvas.legend("knot", style.get("marker_color", "red"))

    logger.info(f"Rendered confidence ellipses for {spec.names}")
    return canvas.finish()


def render_all_traces(bundle: TraceBundle) -> Dict[str, str]:
    """SVG document for every trace type of a bundle."""
    return {trace_type: render_trace(bundle, trace_type) for trace_type in TRACE_TYPES}
