"""Sub-DAC state machine and the reference-current DAC transfer model.

Triggering an instruction enables the 11 weighted sub-DACs one per clock and
then disables them in reverse order, so the summed current is a symmetric
22-cycle staircase. The staircase is scaled by the global I_P code (6 bit,
linear) and by the per-waveform I_N code through a DAC transfer model that is
either ideal or carries a cryogenic-style compression plus per-code INL.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .signal_core import IQTrace, RealTrace, TimeGrid
from .waveform_memory import N_SUBDACS, WaveformInstruction, _check_byte_seq, _check_code

PULSE_CYCLES = 2 * N_SUBDACS
MAX_STAIRCASE = N_SUBDACS * 255  # 2805
CODE_P_MAX = 63
CLOCK_RANGE = (0.5e9, 3e9)

# Seed of the default cryo-perturbed DAC used by experiments and acceptance.
DEFAULT_DAC_SEED = 7


@dataclass(frozen=True)
class DacTransferModel:
    mode: str = "ideal"
    inl_amplitude: float = 0.05
    compression: float = 0.1
    seed: int = DEFAULT_DAC_SEED

    def __post_init__(self):
        if self.mode not in ("ideal", "cryo_perturbed"):
            raise ValidationError(f"unknown DAC mode {self.mode!r}")
        if not (self.inl_amplitude >= 0 and self.compression >= 0):
            raise ValidationError("inl_amplitude and compression must be >= 0")

    @cached_property
    def table(self) -> np.ndarray:
        """Normalized output for each of the 256 codes."""
        x = np.arange(256) / 255.0
        if self.mode == "ideal":
            t = x.copy()
        else:
            # one uniform draw per code, fixed by the seed
            u = np.random.Generator(np.random.PCG64(self.seed)).uniform(-1.0, 1.0, 256)
            t = np.maximum(x - self.compression * x ** 2 + self.inl_amplitude * u, 0.0)
            t[0] = 0.0
        t.flags.writeable = False
        return t

    def transfer(self, code: int) -> float:
        code = _check_code("DAC code", code, 255)
        if self.mode == "ideal":
            return code / 255
        return float(self.table[code])


def make_dac_transfer(mode: str = "ideal", alpha: float = 0.05, beta: float = 0.1,
                      seed: int = DEFAULT_DAC_SEED) -> DacTransferModel:
    if alpha < 0 or beta < 0:
        raise ValidationError("alpha and beta must be non-negative")
    return DacTransferModel(mode, alpha, beta, seed)


@dataclass(frozen=True)
class EnvelopeParams:
    f_clk: float = 1e9
    full_scale: float = 1.0

    def __post_init__(self):
        if not self.f_clk > 0:
            raise ValidationError("f_clk must be positive")
        if not self.full_scale > 0:
            raise ValidationError("full_scale must be positive")
        lo, hi = CLOCK_RANGE
        if not lo <= self.f_clk <= hi:
            warnings.warn(f"f_clk={self.f_clk:g} Hz outside the 0.5-3 GHz clock range",
                          stacklevel=3)


def staircase_codes(weights: Sequence[int]) -> np.ndarray:
    """Summed sub-DAC code on each of the 22 clock cycles.

    Cycle ``c`` has the first ``min(c, 21 - c) + 1`` sub-DACs enabled.
    """
    w = np.array(_check_byte_seq("weights", weights), dtype=np.int64)
    rising = np.cumsum(w)
    return np.concatenate([rising, rising[::-1]])


def render_envelope(weights: Sequence[int], code_n: int, code_p: int,
                    params: EnvelopeParams, dac: DacTransferModel) -> RealTrace:
    """One channel's held output, one sample per clock cycle."""
    code_n = _check_code("code_n", code_n, 255)
    code_p = _check_code("code_p", code_p, CODE_P_MAX)
    stairs = staircase_codes(weights)
    gain = params.full_scale * (code_p / CODE_P_MAX) * dac.transfer(code_n)
    return RealTrace(TimeGrid(params.f_clk, PULSE_CYCLES), gain * stairs / MAX_STAIRCASE)


def render_instruction(instr: WaveformInstruction, code_p: int, params: EnvelopeParams,
                       dac: DacTransferModel) -> IQTrace:
    """Both envelope channels of an instruction; polarity is applied downstream."""
    i = render_envelope(instr.w_i, instr.code_n_i, code_p, params, dac)
    q = render_envelope(instr.w_q, instr.code_n_q, code_p, params, dac)
    return IQTrace.from_channels(i, q)


def envelope_area(weights: Sequence[int], code_n: int, code_p: int,
                  params: EnvelopeParams, dac: DacTransferModel) -> float:
    """Closed-form area of :func:`render_envelope`, in volt-seconds."""
    total = int(staircase_codes(weights).sum())
    return (params.full_scale * (code_p / CODE_P_MAX) * dac.transfer(code_n)
            * total / MAX_STAIRCASE / params.f_clk)
