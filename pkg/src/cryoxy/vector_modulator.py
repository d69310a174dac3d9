"""Baseband filter, polarity switches, I/Q upconversion and LO-leakage paths.

The RF output is ``Re[r(t) exp(j 2 pi f_lo t)]`` with complex envelope
``r = pol_i I + j pol_q Q + L exp(j phi_L) + cancellation``. Experiments feed
the qubit the same ``r`` directly (rotating frame at f_lo); the RF trace is
only produced for the monitor probe and waveform dumps.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from .errors import ValidationError
from .signal_core import IQTrace, RealTrace, TimeGrid
from .waveform_memory import _check_code

LO_BAND = (4e9, 8e9)
AT1_MAX = 63
PH1_STEPS = 256


@dataclass(frozen=True)
class ModulatorConfig:
    f_lo: float = 5.6e9
    rf_sample_rate: float = 100e9
    filter_cutoff: Optional[float] = 500e6
    leak_amplitude: float = 1e-3
    leak_phase: float = 0.0
    # largest amplitude the off-chip attenuator path can inject (at1 = 0)
    leak_ref: float = 2e-3
    # zero-signal tail appended after a sequence so the filter can settle
    settle_time: float = 3e-9

    def __post_init__(self):
        if not self.f_lo > 0:
            raise ValidationError("f_lo must be positive")
        if not self.rf_sample_rate > 2 * self.f_lo:
            raise ValidationError("rf_sample_rate must exceed 2 * f_lo")
        if self.filter_cutoff is not None and not 0 < self.filter_cutoff < self.rf_sample_rate / 2:
            raise ValidationError("filter_cutoff must lie in (0, rf_sample_rate / 2)")
        if self.leak_amplitude < 0 or self.leak_ref < 0 or self.settle_time < 0:
            raise ValidationError("leak_amplitude, leak_ref and settle_time must be >= 0")
        if self.rf_sample_rate < 8 * self.f_lo:
            warnings.warn("rf_sample_rate below 8 * f_lo degrades the tone probe", stacklevel=3)
        if not LO_BAND[0] <= self.f_lo <= LO_BAND[1]:
            warnings.warn(f"f_lo={self.f_lo:g} Hz outside the 4-8 GHz band", stacklevel=3)

    @property
    def leak_phasor(self) -> complex:
        return self.leak_amplitude * complex(math.cos(self.leak_phase), math.sin(self.leak_phase))


@dataclass(frozen=True)
class CancelSetting:
    at1: int = AT1_MAX
    ph1: int = 0

    def __post_init__(self):
        object.__setattr__(self, "at1", _check_code("at1", self.at1, AT1_MAX))
        object.__setattr__(self, "ph1", _check_code("ph1", self.ph1, PH1_STEPS - 1))

    @property
    def phase(self) -> float:
        return 2 * math.pi * self.ph1 / PH1_STEPS

    def amplitude(self, leak_ref: float) -> float:
        return leak_ref * (1 - self.at1 / AT1_MAX)

    def phasor(self, leak_ref: float) -> complex:
        a = self.amplitude(leak_ref)
        return a * complex(math.cos(self.phase), math.sin(self.phase))


def cancel_phasors(leak_ref: float, at1: np.ndarray, ph1: np.ndarray) -> np.ndarray:
    """Vectorized :meth:`CancelSetting.phasor` over code arrays."""
    amp = leak_ref * (1 - np.asarray(at1) / AT1_MAX)
    return amp * np.exp(2j * np.pi * np.asarray(ph1) / PH1_STEPS)


def filter_coefficients(cutoff: float, sample_rate: float) -> tuple:
    """``(a, b)`` of ``y[n] = a (x[n] + x[n-1]) + b y[n-1]``."""
    w = 2 * math.pi * cutoff
    fs2 = 2 * sample_rate
    return w / (w + fs2), (fs2 - w) / (fs2 + w)


def baseband_filter(trace: RealTrace, cutoff: float) -> RealTrace:
    """Single-pole low-pass, bilinear-discretized, unity DC gain."""
    fs = trace.grid.sample_rate
    if not 0 < cutoff < fs / 2:
        raise ValidationError(f"cutoff {cutoff} must lie in (0, {fs / 2})")
    a, b = filter_coefficients(cutoff, fs)
    y = lfilter([a, a], [1.0, -b], trace.samples)
    return RealTrace(trace.grid, y)


def filter_response(f: float, cutoff: float, sample_rate: float) -> complex:
    """Frequency response of :func:`baseband_filter` at ``f``."""
    a, b = filter_coefficients(cutoff, sample_rate)
    z1 = np.exp(-2j * np.pi * f / sample_rate)
    return complex(a * (1 + z1) / (1 - b * z1))


def zero_order_hold(trace: RealTrace, grid: TimeGrid) -> RealTrace:
    """Resample a held (DAC-style) trace onto a finer grid; zero outside it."""
    src = trace.grid
    # small guard keeps exact clock edges from landing one sample early
    idx = np.floor((grid.times() - src.t0) * src.sample_rate + 1e-9).astype(np.int64)
    inside = (idx >= 0) & (idx < src.n_samples)
    out = np.zeros(grid.n_samples)
    out[inside] = trace.samples[idx[inside]]
    return RealTrace(grid, out)


def _check_rf_grid(grid: TimeGrid, cfg: ModulatorConfig):
    if grid.sample_rate != cfg.rf_sample_rate:
        raise ValidationError(
            f"trace sampled at {grid.sample_rate:g} Hz, modulator expects {cfg.rf_sample_rate:g} Hz")


def _carrier(grid: TimeGrid, f_lo: float):
    ph = 2 * np.pi * f_lo * grid.times()
    return np.cos(ph), np.sin(ph)


def upconvert(baseband: IQTrace, pol_i: int, pol_q: int, cfg: ModulatorConfig) -> RealTrace:
    """Mix held I/Q onto the LO and add the constant LO feed-through."""
    _check_rf_grid(baseband.grid, cfg)
    if pol_i not in (1, -1) or pol_q not in (1, -1):
        raise ValidationError("polarities must be +1 or -1")
    c, s = _carrier(baseband.grid, cfg.f_lo)
    rf = pol_i * baseband.i_samples * c - pol_q * baseband.q_samples * s
    if cfg.leak_amplitude:
        rf = rf + cfg.leak_amplitude * np.cos(2 * np.pi * cfg.f_lo * baseband.grid.times()
                                              + cfg.leak_phase)
    return RealTrace(baseband.grid, rf)


def offchip_cancel(rf: RealTrace, setting: CancelSetting, cfg: ModulatorConfig) -> RealTrace:
    """Add the AT1/PH1 cancellation tone."""
    _check_rf_grid(rf.grid, cfg)
    amp = setting.amplitude(cfg.leak_ref)
    if amp == 0:
        return rf
    t = rf.grid.times()
    return RealTrace(rf.grid, rf.samples + amp * np.cos(2 * np.pi * cfg.f_lo * t + setting.phase))


def carrier_phase(i_peak: float, q_peak: float, pol_i: int = 1, pol_q: int = 1) -> float:
    """Effective RF phase, ``atan2(pol_q Q, pol_i I)``."""
    return math.atan2(pol_q * q_peak, pol_i * i_peak)
