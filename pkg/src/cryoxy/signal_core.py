"""Time grids, sampled traces and the two signal probes used everywhere else.

Traces are immutable: sample arrays are stored read-only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union
import io

import numpy as np

from .errors import FormatError, ValidationError

__all__ = [
    "TimeGrid",
    "RealTrace",
    "IQTrace",
    "make_time_grid",
    "tone_amplitude",
    "integrate_envelope",
    "concatenate",
    "trace_to_csv",
    "trace_from_csv",
]


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != 1:
        raise ValidationError("trace samples must be one-dimensional")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeGrid:
    sample_rate: float
    n_samples: int
    t0: float = 0.0

    def __post_init__(self):
        if not (self.sample_rate > 0 and math.isfinite(self.sample_rate)):
            raise ValidationError(f"sample_rate must be positive, got {self.sample_rate}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValidationError(f"n_samples must be a positive integer, got {self.n_samples}")
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n_samples) / self.sample_rate


@dataclass(frozen=True, eq=False)
class RealTrace:
    grid: TimeGrid
    samples: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.samples)
        if arr.size != self.grid.n_samples:
            raise ValidationError(
                f"{arr.size} samples do not match grid of {self.grid.n_samples}")
        object.__setattr__(self, "samples", arr)

    def __eq__(self, other):
        return (isinstance(other, RealTrace) and self.grid == other.grid
                and np.array_equal(self.samples, other.samples))

    def __len__(self):
        return self.grid.n_samples

    def scaled(self, factor: float) -> "RealTrace":
        return RealTrace(self.grid, self.samples * factor)


@dataclass(frozen=True, eq=False)
class IQTrace:
    grid: TimeGrid
    i_samples: np.ndarray
    q_samples: np.ndarray

    def __post_init__(self):
        i = _frozen_array(self.i_samples)
        q = _frozen_array(self.q_samples)
        if i.size != self.grid.n_samples or q.size != self.grid.n_samples:
            raise ValidationError("I and Q lengths must both match the grid")
        object.__setattr__(self, "i_samples", i)
        object.__setattr__(self, "q_samples", q)

    def __eq__(self, other):
        return (isinstance(other, IQTrace) and self.grid == other.grid
                and np.array_equal(self.i_samples, other.i_samples)
                and np.array_equal(self.q_samples, other.q_samples))

    def __len__(self):
        return self.grid.n_samples

    @property
    def i(self) -> RealTrace:
        return RealTrace(self.grid, self.i_samples)

    @property
    def q(self) -> RealTrace:
        return RealTrace(self.grid, self.q_samples)

    @classmethod
    def from_channels(cls, i: RealTrace, q: RealTrace) -> "IQTrace":
        if i.grid != q.grid:
            raise ValidationError("I and Q traces live on different grids")
        return cls(i.grid, i.samples, q.samples)

    def complex_samples(self) -> np.ndarray:
        return self.i_samples + 1j * self.q_samples


def make_time_grid(sample_rate: float, duration: float) -> TimeGrid:
    """Grid of ``ceil(duration * sample_rate)`` samples starting at t=0.

    The product is snapped to the nearest integer when it is within 1e-9 of
    it, so ``22e-9 * 1e9`` counts as 22 rather than 23.
    """
    if not sample_rate > 0 or not duration > 0:
        raise ValidationError("sample_rate and duration must be positive")
    x = duration * sample_rate
    nearest = round(x)
    n = int(nearest) if abs(x - nearest) <= 1e-9 * max(1.0, abs(x)) else math.ceil(x)
    return TimeGrid(sample_rate, max(n, 1))


def tone_amplitude(trace: RealTrace, f: float) -> complex:
    """Single-bin DFT probe, ``(2/N) * sum(x_i * exp(-j 2 pi f t_i))``.

    For a pure tone covering an integer number of periods the magnitude is
    the carrier amplitude and the angle is its phase relative to cosine.
    """
    nyquist = trace.grid.sample_rate / 2
    if not 0 <= f < nyquist:
        raise ValidationError(f"probe frequency {f} outside [0, {nyquist})")
    t = trace.grid.times()
    n = trace.grid.n_samples
    return complex(2.0 / n * np.sum(trace.samples * np.exp(-2j * np.pi * f * t)))


def integrate_envelope(trace: RealTrace) -> float:
    """Rectangle-rule area, ``sum(samples) / sample_rate`` (correctly rounded sum)."""
    return math.fsum(trace.samples) / trace.grid.sample_rate


def concatenate(first: RealTrace, *rest: RealTrace) -> RealTrace:
    """Join traces sharing a sample rate; the result starts at ``first``'s t0."""
    traces = (first,) + rest
    rate = first.grid.sample_rate
    if any(t.grid.sample_rate != rate for t in traces):
        raise ValidationError("cannot join traces with different sample rates")
    samples = np.concatenate([t.samples for t in traces])
    return RealTrace(TimeGrid(rate, samples.size, first.grid.t0), samples)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def trace_to_csv(trace: Union[RealTrace, IQTrace]) -> str:
    """Serialize to the text trace format.

    ``# sample_rate=<Hz>`` header (plus ``# t0=<s>`` when nonzero), then one
    sample per line; IQ traces write ``i,q`` pairs.
    """
    buf = io.StringIO()
    buf.write(f"# sample_rate={_fmt(trace.grid.sample_rate)}\n")
    if trace.grid.t0 != 0:
        buf.write(f"# t0={_fmt(trace.grid.t0)}\n")
    if isinstance(trace, IQTrace):
        for i, q in zip(trace.i_samples, trace.q_samples):
            buf.write(f"{_fmt(i)},{_fmt(q)}\n")
    else:
        for x in trace.samples:
            buf.write(_fmt(x) + "\n")
    return buf.getvalue()


def trace_from_csv(text: Union[str, Path]) -> Union[RealTrace, IQTrace]:
    if isinstance(text, Path):
        text = text.read_text()
    header = {}
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = float(value)
            continue
        rows.append([float(v) for v in line.split(",")])
    if "sample_rate" not in header:
        raise FormatError("missing '# sample_rate=' header")
    if not rows:
        raise FormatError("trace file holds no samples")
    width = {len(r) for r in rows}
    if width not in ({1}, {2}):
        raise FormatError("rows must all have one column or all have two")
    grid = TimeGrid(header["sample_rate"], len(rows), header.get("t0", 0.0))
    data = np.array(rows)
    if data.shape[1] == 1:
        return RealTrace(grid, data[:, 0])
    return IQTrace(grid, data[:, 0], data[:, 1])
