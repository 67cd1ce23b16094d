"""Plot-ready columns and optional static charts from the tool's CSV output."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from vlsidec import textio


@dataclass(frozen=True)
class PlotData:
    x_name: str
    y_name: str
    x: np.ndarray
    y: np.ndarray
    slope: float | None
    intercept: float | None


def read_csv(text: str) -> tuple[list[str], list[list[str]]]:
    """Header and rows of a CSV, skipping ``#`` comment lines."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty CSV: no header row")
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def loglog_slope(x, y) -> tuple[float, float]:
    """Least-squares fit of ``log y = slope * log x + intercept``."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if len(x) < 2:
        raise ValueError("need at least two points for a slope")
    if (x <= 0).any() or (y <= 0).any():
        raise ValueError("log-log fit needs positive data")
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope), float(intercept)


def plot_data(text: str, x: str | None = None, y: str | None = None) -> PlotData:
    header, rows = read_csv(text)
    if not rows:
        raise ValueError("empty CSV: no data rows")
    xi = header.index(x) if x else 0
    yi = header.index(y) if y else (header.index("value") if "value" in header else 1)
    xs = np.array([float(r[xi]) for r in rows])
    ys = np.array([float(r[yi]) if r[yi] != "" else math.nan for r in rows])
    try:
        slope, icpt = loglog_slope(xs, ys)
    except ValueError:
        slope = icpt = None
    return PlotData(header[xi], header[yi], xs, ys, slope, icpt)


def gnuplot_columns(data: PlotData) -> str:
    out = io.StringIO()
    out.write(f"# {data.x_name} {data.y_name} log({data.x_name}) log({data.y_name})\n")
    if data.slope is not None:
        out.write(f"# slope = {data.slope!r}\n# intercept = {data.intercept!r}\n")
    for a, b in zip(data.x, data.y):
        la = repr(math.log(a)) if a > 0 else "nan"
        lb = repr(math.log(b)) if b > 0 else "nan"
        out.write(f"{a!r} {b!r} {la} {lb}\n")
    return out.getvalue()


def render_chart(data: PlotData, path: str | Path, title: str = "") -> None:
    """Write a log-log chart with the fitted line; the format follows the file suffix."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.loglog(data.x, data.y, "o-", label=data.y_name)
    if data.slope is not None:
        fit = np.exp(data.intercept) * data.x**data.slope
        ax.loglog(data.x, fit, "--", label=f"slope {data.slope:.3f}")
    ax.set_xlabel(data.x_name)
    ax.set_ylabel(data.y_name)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=".tmp-", suffix=path.suffix)
    os.close(fd)
    try:
        fig.savefig(tmp)
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.unlink(tmp)


def emit_plot_data(
    text: str,
    dat_path: str | Path | None = None,
    chart_path: str | Path | None = None,
    x: str | None = None,
    y: str | None = None,
) -> PlotData:
    """Turn a CSV into log-log gnuplot columns and, on request, a chart file."""
    data = plot_data(text, x, y)
    if dat_path is not None:
        textio.write_atomic(dat_path, gnuplot_columns(data))
    if chart_path is not None:
        render_chart(data, chart_path)
    return data
