"""Compile analytic pulse shapes into waveform instructions.

The rising half of a symmetric envelope is sampled at the 12 sub-DAC
boundaries ``s = 0..11``; sub-DAC ``k`` gets the increment
``E(k+1) - E(k)``. Weights are scaled so the largest maps to 255, and the
requested amplitude and phase go into the two I_N codes and the polarity
bits.

Amplitude is measured against the largest peak the shape can reach, i.e.
``amplitude = 1`` means ``code_n = 255`` on a channel at |cos phase| = 1. The
rendered peak is then ``full_scale * code_p/63 * amplitude * |cos phase| *
shape_gain``, where ``shape_gain = sum(weight codes) / 2805`` (1 for the
triangle and staircase, about 0.64 for the raised cosine).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .envelope_generator import MAX_STAIRCASE, staircase_codes
from .errors import ValidationError
from .waveform_memory import N_SUBDACS, WaveformInstruction

SHAPES = ("raised_cosine", "clipped_raised_cosine", "gaussian", "staircase", "triangular")


@dataclass(frozen=True)
class PulseShape:
    kind: str = "raised_cosine"
    clip: float = 0.9
    sigma_fraction: float = 1 / 6
    steps: int = 1

    def __post_init__(self):
        if self.kind not in SHAPES:
            raise ValidationError(f"unknown pulse shape {self.kind!r}; choose from {SHAPES}")
        if not 0 < self.clip <= 1:
            raise ValidationError("clip must lie in (0, 1]")
        if not self.sigma_fraction > 0:
            raise ValidationError("sigma_fraction must be positive")
        if int(self.steps) != self.steps or not 1 <= self.steps <= N_SUBDACS:
            raise ValidationError(f"staircase steps must be an integer in [1, {N_SUBDACS}]")

    def rising_half(self, s: np.ndarray) -> np.ndarray:
        """Normalized rising half-envelope on ``s in [0, 11]``."""
        s = np.asarray(s, dtype=float)
        n = N_SUBDACS
        if self.kind == "raised_cosine":
            return (1 - np.cos(np.pi * s / n)) / 2
        if self.kind == "clipped_raised_cosine":
            return np.minimum((1 - np.cos(np.pi * s / n)) / 2, self.clip) / self.clip
        if self.kind == "gaussian":
            sigma = self.sigma_fraction * 2 * n
            g = np.exp(-((s - n) ** 2) / (2 * sigma ** 2))
            floor = math.exp(-4.5)  # value at 3 sigma
            return np.clip((g - floor) / (1 - floor), 0.0, None)
        if self.kind == "triangular":
            return s / n
        # staircase: equal jumps at evenly spaced sub-DAC boundaries
        return np.ceil(s * self.steps / n - 1e-12) / self.steps


@dataclass(frozen=True)
class CompiledWaveform:
    instruction: WaveformInstruction
    residual: float


def derivative_weights(shape: PulseShape) -> np.ndarray:
    e = shape.rising_half(np.arange(N_SUBDACS + 1))
    w = np.diff(e)
    if np.any(w < -1e-12):
        raise ValidationError(f"{shape.kind} envelope is not non-decreasing on its rising half")
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if not total > 0:
        raise ValidationError("shape has no rise")
    return w / total


def _round_half_away(x):
    x = np.asarray(x, dtype=float)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def weight_codes(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (N_SUBDACS,) or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValidationError(f"need {N_SUBDACS} finite non-negative weights")
    top = w.max()
    if not top > 0:
        raise ValidationError("weights are all zero")
    return _round_half_away(255 * w / top)


def shape_gain(weights) -> float:
    """Peak of the rendered staircase relative to full scale, at code_n = 255."""
    return float(weight_codes(weights).sum()) / MAX_STAIRCASE


def quantize(weights, amplitude: float, phase: float) -> WaveformInstruction:
    if not 0 <= amplitude <= 1:
        raise ValidationError(f"amplitude must lie in [0, 1], got {amplitude}")
    codes = tuple(int(v) for v in weight_codes(weights))
    c, s = math.cos(phase), math.sin(phase)
    return WaveformInstruction(
        w_i=codes,
        w_q=codes,
        code_n_i=int(_round_half_away(255 * amplitude * abs(c))),
        code_n_q=int(_round_half_away(255 * amplitude * abs(s))),
        pol_i=1 if c >= 0 else -1,
        pol_q=1 if s >= 0 else -1,
    )


def ideal_staircase(shape: PulseShape) -> np.ndarray:
    """Unquantized 22-cycle staircase with peak 1."""
    e = shape.rising_half(np.arange(1, N_SUBDACS + 1))
    e = e / e[-1]
    return np.concatenate([e, e[::-1]])


def compile(shape: PulseShape, amplitude: float, phase: float = 0.0) -> CompiledWaveform:
    """Quantize a shape and report the worst per-cycle deviation.

    The residual compares, on both channels, the normalized rendered staircase
    ``(code_n/255) * E[c] / max(E)`` with ``amplitude * |cos|`` (or ``|sin|``)
    times the unquantized staircase.
    """
    weights = derivative_weights(shape)
    instr = quantize(weights, amplitude, phase)
    target = ideal_staircase(shape)
    stairs = staircase_codes(instr.w_i).astype(float)
    stairs /= stairs.max()
    residual = 0.0
    for code_n, trig in ((instr.code_n_i, abs(math.cos(phase))),
                         (instr.code_n_q, abs(math.sin(phase)))):
        got = code_n / 255 * stairs
        want = amplitude * trig * target
        residual = max(residual, float(np.max(np.abs(got - want))))
    return CompiledWaveform(instr, residual)
