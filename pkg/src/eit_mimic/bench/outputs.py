"""CSV, JSON summary and dependency-free SVG log-log plots."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .experiments import ConvergenceRecord, DiscrepancyRecord, RunResult

CSV_HEADER = ("experiment", "M", "n", "err", "runtime_s")
DISCREPANCY_HEADER = ("experiment", "M", "d", "kappa", "norm", "runtime_s")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")


def _num(x: float) -> str:
    return repr(float(x))


def _runtime(t: float, timing: bool) -> str:
    return f"{t:.6f}" if timing else ""


def records_csv(experiment: str, records, timing: bool = True) -> str:
    """Render convergence records; an empty record list yields the header only."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        label = experiment if r.series in ("", "pem") else f"{experiment}:{r.series}"
        w.writerow((label, r.M, r.n, _num(r.err), _runtime(r.runtime_s, timing)))
    return buf.getvalue()


def discrepancy_csv(records, timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DISCREPANCY_HEADER)
    for r in records:
        w.writerow((f"discrepancy:{r.sweep}", r.M, _num(r.d), _num(r.kappa), _num(r.norm),
                    _runtime(r.runtime_s, timing)))
    return buf.getvalue()


# -- SVG -----------------------------------------------------------------------

class LogLogPlot:
    """Fixed 800x600 log-log chart with decade grid, legend and free text notes."""

    width, height = 800, 600
    left, right, top, bottom = 90, 190, 50, 70

    def __init__(self, title: str, xlabel: str, ylabel: str):
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.series: list[tuple[str, np.ndarray, np.ndarray]] = []
        self.notes: list[str] = []

    def add(self, label: str, x, y) -> None:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        keep = (x > 0) & (y > 0)
        self.series.append((label, x[keep], y[keep]))

    def _bounds(self):
        xs = np.concatenate([s[1] for s in self.series] + [np.empty(0)])
        ys = np.concatenate([s[2] for s in self.series] + [np.empty(0)])
        if xs.size == 0:
            xs = ys = np.array([1.0, 10.0])
        lo_x, hi_x = math.floor(math.log10(xs.min())), math.ceil(math.log10(xs.max()))
        lo_y, hi_y = math.floor(math.log10(ys.min())), math.ceil(math.log10(ys.max()))
        return lo_x, max(hi_x, lo_x + 1), lo_y, max(hi_y, lo_y + 1)

    def render(self) -> str:
        lo_x, hi_x, lo_y, hi_y = self._bounds()
        pw = self.width - self.left - self.right
        ph = self.height - self.top - self.bottom

        def px(x):
            return self.left + (math.log10(x) - lo_x) / (hi_x - lo_x) * pw

        def py(y):
            return self.top + (hi_y - math.log10(y)) / (hi_y - lo_y) * ph

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
               f'height="{self.height}" viewBox="0 0 {self.width} {self.height}" '
               'font-family="sans-serif" font-size="12">',
               f'<rect width="{self.width}" height="{self.height}" fill="white"/>',
               f'<text x="{self.left + pw / 2:.1f}" y="28" text-anchor="middle" '
               f'font-size="16">{escape(self.title)}</text>']
        y_step = max(1, (hi_y - lo_y) // 12)
        for k in range(lo_y, hi_y + 1, y_step):
            y = py(10.0 ** k)
            out.append(f'<line x1="{self.left}" y1="{y:.2f}" x2="{self.left + pw}" y2="{y:.2f}" '
                       'stroke="#ddd"/>')
            out.append(f'<text x="{self.left - 8}" y="{y + 4:.2f}" text-anchor="end">1e{k}</text>')
        for k in range(lo_x, hi_x + 1):
            for sub in range(1, 10):
                v = sub * 10.0 ** k
                if k == hi_x and sub > 1:
                    break
                x = px(v)
                out.append(f'<line x1="{x:.2f}" y1="{self.top}" x2="{x:.2f}" '
                           f'y2="{self.top + ph}" stroke="{"#ddd" if sub == 1 else "#f2f2f2"}"/>')
                if sub in (1, 2, 5):
                    out.append(f'<text x="{x:.2f}" y="{self.top + ph + 18}" '
                               f'text-anchor="middle">{v:g}</text>')
        out.append(f'<rect x="{self.left}" y="{self.top}" width="{pw}" height="{ph}" '
                   'fill="none" stroke="black"/>')
        out.append(f'<text x="{self.left + pw / 2:.1f}" y="{self.height - 20}" '
                   f'text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="22" y="{self.top + ph / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 22 {self.top + ph / 2:.1f})">{escape(self.ylabel)}</text>')
        for i, (label, x, y) in enumerate(self.series):
            color = PALETTE[i % len(PALETTE)]
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
            if x.size:
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            out += [f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="{color}"/>'
                    for a, b in zip(x, y)]
            ly = self.top + 10 + 20 * i
            lx = self.left + pw + 15
            out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" '
                       'stroke-width="2"/>')
            out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(label)}</text>')
        base = self.top + 30 + 20 * len(self.series)
        for j, note in enumerate(self.notes):
            out.append(f'<text x="{self.left + pw + 15}" y="{base + 16 * j}" '
                       f'font-size="11">{escape(note)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def convergence_plots(result: RunResult, title: str) -> dict[str, LogLogPlot]:
    """One plot per series (e.g. width law), one curve per mode."""
    plots = {}
    for label in result.series():
        plot = LogLogPlot(title if label == "pem" else f"{title} ({label})", "M", "relative L2 error")
        modes = sorted({r.n for r in result.records if r.series == label}, key=abs)
        for n in modes:
            plot.add(f"n = {n}", *result.curve(label, n))
            slope = result.slopes.get((label, n))
            if slope is not None:
                plot.notes.append(f"slope n={n}: {slope:.2f}")
        if label in result.thresholds and result.thresholds[label] is not None:
            M = result.thresholds[label]
            plot.notes.append(f"all < 1e-2 at M={M} ({2 * M + 1} el.)")
        plots[label] = plot
    return plots


def discrepancy_plots(result: RunResult) -> dict[str, LogLogPlot]:
    plots = {}
    d_plot = LogLogPlot("CEM vs PEM discrepancy, fixed M", "electrode width d", "operator norm")
    kappas = sorted({r.kappa for r in result.records if r.sweep == "d-sweep"})
    for kappa in kappas:
        rows = sorted((r.d, r.norm) for r in result.records
                      if r.sweep == "d-sweep" and r.kappa == kappa)
        d_plot.add(f"kappa = {kappa:g}", [a for a, _ in rows], [b for _, b in rows])
    if "d_slope" in result.summary:
        d_plot.notes.append(f"d-slope: {result.summary['d_slope']:.2f}")
    plots["d-sweep"] = d_plot
    sweeps = sorted({r.sweep for r in result.records if r.sweep.startswith("M-sweep")})
    if sweeps:
        m_plot = LogLogPlot("CEM vs PEM discrepancy, width law", "M", "operator norm")
        for sweep in sweeps:
            rows = sorted((r.M, r.norm) for r in result.records if r.sweep == sweep)
            m_plot.add(sweep.split(":", 1)[1], [a for a, _ in rows], [b for _, b in rows])
        plots["M-sweep"] = m_plot
    return plots


def summary_dict(result: RunResult, checks: list | None = None) -> dict:
    out = {"experiment": result.experiment}
    if result.slopes:
        out["slopes"] = {f"{s}:n={n}": v for (s, n), v in result.slopes.items()}
    if result.successive_slopes:
        out["successive_slopes"] = {f"{s}:n={n}": [float(x) for x in v]
                                    for (s, n), v in result.successive_slopes.items()}
    if result.thresholds:
        out["thresholds"] = {s: None if M is None else {"M": M, "electrodes": 2 * M + 1}
                             for s, M in result.thresholds.items()}
    out.update(result.summary)
    if checks is not None:
        out["checks"] = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
    return out


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_outputs(result: RunResult, out_dir, stem: str, timing: bool = True,
                 checks: list | None = None) -> list[Path]:
    """Write CSV, SVG plot(s) and a JSON summary; returns the written paths."""
    out_dir = Path(out_dir)
    written = []
    if result.records and isinstance(result.records[0], DiscrepancyRecord):
        text = discrepancy_csv(result.records, timing)
        plots = discrepancy_plots(result)
    else:
        text = records_csv(result.experiment, list(result.records) + list(result.scan_records), timing)
        plots = convergence_plots(result, stem)
    path = out_dir / f"{stem}.csv"
    _write(path, text)
    written.append(path)
    for label, plot in plots.items():
        name = stem if len(plots) == 1 else f"{stem}_{label.replace('=', '').replace(':', '_')}"
        path = out_dir / f"{name}.svg"
        _write(path, plot.render())
        written.append(path)
    path = out_dir / f"{stem}_summary.json"
    _write(path, json.dumps(summary_dict(result, checks), indent=2, sort_keys=True) + "\n")
    written.append(path)
    return written


__all__ = ["CSV_HEADER", "ConvergenceRecord", "LogLogPlot", "emit_outputs", "records_csv",
           "discrepancy_csv", "summary_dict"]
