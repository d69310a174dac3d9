"""Result tables, atomic file writes and bare-bones SVG plots."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from .experiments import RabiResult, ThreeGateResult


def write_atomic(path: Union[str, Path], data: Union[str, bytes]) -> Path:
    """Write via a temp file in the same directory, then rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _g(x: float) -> str:
    return f"{x:.12g}"


def rabi_csv(result: RabiResult) -> str:
    lines = ["ip_code,in_code,measured_amp,p1_meas,p0_meas,p2_true"]
    for r in result.rows:
        amp = "NA" if r.measured_amp is None else _g(r.measured_amp)
        lines.append(f"{r.ip_code},{r.in_code},{amp},{_g(r.p1_measured)},"
                     f"{_g(r.p0_measured)},{_g(r.p2_true)}")
    return "\n".join(lines) + "\n"


def three_gate_csv(result: ThreeGateResult) -> str:
    lines = ["theta_index,phi_index,theta_target_rad,phi_rad,p1_meas,p1_ideal_corrected,error"]
    for p in result.points:
        lines.append(f"{p.theta_index},{p.phi_index},{_g(p.theta)},{_g(p.phi)},"
                     f"{_g(p.p1_measured)},{_g(p.p1_ideal_corrected)},{_g(p.error)}")
    lines.append(f"# rms_error={_g(result.rms_error)}")
    return "\n".join(lines) + "\n"


_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79"]


def _svg(width: int, height: int, body: List[str], title: str) -> str:
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="20" font-size="14" text-anchor="middle">{title}</text>',
        *body,
        "</svg>",
    ]) + "\n"


def line_plot(series: Sequence[Tuple[str, np.ndarray, np.ndarray]], title: str,
              xlabel: str, ylabel: str, width: int = 640, height: int = 420) -> str:
    """Polyline plot of ``(label, x, y)`` series; NaN x values are skipped."""
    m = 50
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    ok = np.isfinite(xs) & np.isfinite(ys)
    x0, x1 = (xs[ok].min(), xs[ok].max()) if ok.any() else (0.0, 1.0)
    y0, y1 = (min(0.0, ys[ok].min()), max(1.0, ys[ok].max())) if ok.any() else (0.0, 1.0)
    x1 = x1 if x1 > x0 else x0 + 1
    sx = lambda x: m + (x - x0) / (x1 - x0) * (width - 2 * m)
    sy = lambda y: height - m - (y - y0) / (y1 - y0) * (height - 2 * m)
    body = [f'<rect x="{m}" y="{m}" width="{width - 2 * m}" height="{height - 2 * m}" '
            'fill="none" stroke="black"/>',
            f'<text x="{width / 2:.0f}" y="{height - 12}" font-size="12" '
            f'text-anchor="middle">{xlabel}</text>',
            f'<text x="14" y="{height / 2:.0f}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 14 {height / 2:.0f})">{ylabel}</text>',
            f'<text x="{m}" y="{height - m + 14}" font-size="10">{x0:.3g}</text>',
            f'<text x="{width - m}" y="{height - m + 14}" font-size="10" '
            f'text-anchor="end">{x1:.3g}</text>',
            f'<text x="{m - 4}" y="{height - m}" font-size="10" text-anchor="end">{y0:.3g}</text>',
            f'<text x="{m - 4}" y="{m + 4}" font-size="10" text-anchor="end">{y1:.3g}</text>']
    for k, (label, x, y) in enumerate(series):
        x, y = np.asarray(x, float), np.asarray(y, float)
        keep = np.isfinite(x) & np.isfinite(y)
        order = np.argsort(x[keep], kind="stable")
        pts = " ".join(f"{sx(a):.1f},{sy(b):.1f}" for a, b in zip(x[keep][order], y[keep][order]))
        color = _PALETTE[k % len(_PALETTE)]
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        body.append(f'<text x="{width - m + 4}" y="{m + 12 * (k + 1)}" font-size="9" '
                    f'fill="{color}">{label}</text>')
    return _svg(width, height, body, title)


def heatmap(values: np.ndarray, title: str, width: int = 480, height: int = 480) -> str:
    values = np.asarray(values, float)
    nr, nc = values.shape
    m = 40
    cw, ch = (width - 2 * m) / nc, (height - 2 * m) / nr
    body = []
    for i in range(nr):
        for j in range(nc):
            v = float(np.clip(values[i, j], 0, 1))
            shade = int(255 * (1 - v))
            body.append(f'<rect x="{m + j * cw:.1f}" y="{height - m - (i + 1) * ch:.1f}" '
                        f'width="{cw:.1f}" height="{ch:.1f}" '
                        f'fill="rgb({shade},{shade},255)"/>')
    body.append(f'<text x="{width / 2:.0f}" y="{height - 10}" font-size="12" '
                'text-anchor="middle">phi_B index</text>')
    body.append(f'<text x="12" y="{height / 2:.0f}" font-size="12" text-anchor="middle" '
                f'transform="rotate(-90 12 {height / 2:.0f})">theta_A index</text>')
    return _svg(width, height, body, title)


def rabi_svg(result: RabiResult) -> str:
    series = []
    for ip in sorted({r.ip_code for r in result.rows}):
        rows = [r for r in result.rows if r.ip_code == ip]
        amp = np.array([np.nan if r.measured_amp is None else r.measured_amp for r in rows])
        series.append((f"I_P={ip}", amp, np.array([r.p1_measured for r in rows])))
    return line_plot(series, f"Rabi ({result.pulses} pulse)", "measured amplitude", "P(|1>)")
