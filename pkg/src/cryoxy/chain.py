"""End-to-end signal chain from stored instructions to qubit state.

A pulse sequence is a list of clock-rate complex baseband arrays
(``pol_i * I + j * pol_q * Q``, 22 samples per pulse). The sequence is played
back to back, held onto the RF grid, low-pass filtered, and combined with LO
leakage and the off-chip cancellation tone. The resulting complex envelope is
what the qubit sees in the LO rotating frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .envelope_compiler import PulseShape, derivative_weights, weight_codes
from .envelope_generator import (PULSE_CYCLES, DacTransferModel, EnvelopeParams,
                                 render_instruction, staircase_codes)
from .measurement import ConfusionMatrix
from .signal_core import IQTrace, RealTrace, TimeGrid, make_time_grid
from .transmon_sim import QuantumState, TransmonParams, propagate_drive
from .vector_modulator import (CancelSetting, ModulatorConfig, baseband_filter,
                               offchip_cancel, upconvert, zero_order_hold)
from .waveform_memory import WaveformInstruction


@dataclass(frozen=True)
class System:
    transmon: TransmonParams = field(default_factory=TransmonParams)
    modulator: ModulatorConfig = field(default_factory=ModulatorConfig)
    envelope: EnvelopeParams = field(default_factory=EnvelopeParams)
    dac: DacTransferModel = field(default_factory=DacTransferModel)
    confusion: ConfusionMatrix = field(default_factory=ConfusionMatrix)
    cancel: CancelSetting = field(default_factory=CancelSetting)
    min_steps_per_pulse: int = 1000

    @classmethod
    def ideal(cls, **overrides) -> "System":
        """Ideal DAC, no LO leakage, no baseband filter, two-level qubit."""
        base = cls(**overrides)
        return replace(
            base,
            transmon=replace(base.transmon, two_level_limit=True),
            modulator=replace(base.modulator, leak_amplitude=0.0, filter_cutoff=None),
            dac=replace(base.dac, mode="ideal"),
        )

    def with_dac_mode(self, mode: str) -> "System":
        return replace(self, dac=replace(self.dac, mode=mode))

    def without_leakage(self) -> "System":
        return replace(self, modulator=replace(self.modulator, leak_amplitude=0.0))

    @property
    def detuning(self) -> float:
        return 2 * math.pi * (self.transmon.f01 - self.modulator.f_lo)

    @property
    def pulse_duration(self) -> float:
        return PULSE_CYCLES / self.envelope.f_clk


def instruction_baseband(instr: WaveformInstruction, code_p: int, system: System) -> np.ndarray:
    iq = render_instruction(instr, code_p, system.envelope, system.dac)
    return instr.pol_i * iq.i_samples + 1j * instr.pol_q * iq.q_samples


def unit_staircase(shape: PulseShape) -> np.ndarray:
    """Quantized staircase of ``shape`` scaled to peak 1."""
    stairs = staircase_codes(weight_codes(derivative_weights(shape))).astype(float)
    return stairs / stairs.max()


def analog_baseband(shape: PulseShape, peak: float, phase: float) -> np.ndarray:
    """Continuously scaled pulse, as from a perfectly calibrated reference DAC."""
    return peak * np.exp(1j * phase) * unit_staircase(shape)


def analog_peak_for_angle(shape: PulseShape, theta: float, system: System) -> float:
    """Peak voltage whose area-law rotation equals ``theta``."""
    area_per_volt = unit_staircase(shape).sum() / system.envelope.f_clk
    return theta / (system.transmon.drive_gain * area_per_volt)


@dataclass(frozen=True, eq=False)
class Synthesis:
    grid: TimeGrid
    i: np.ndarray  # filtered, signed baseband on the RF grid
    q: np.ndarray
    offset: complex  # leakage plus cancellation phasor

    @property
    def envelope(self) -> np.ndarray:
        return self.i + 1j * self.q + self.offset

    def rf(self, system: System) -> RealTrace:
        rf = upconvert(IQTrace(self.grid, self.i, self.q), 1, 1, system.modulator)
        return offchip_cancel(rf, system.cancel, system.modulator)


def synthesize(pulses: Sequence[np.ndarray], system: System) -> Synthesis:
    clk = np.concatenate([np.asarray(p, dtype=complex) for p in pulses])
    env = system.envelope
    mod = system.modulator
    clk_grid = TimeGrid(env.f_clk, clk.size)
    grid = make_time_grid(mod.rf_sample_rate, clk.size / env.f_clk + mod.settle_time)
    chans = []
    for part in (clk.real, clk.imag):
        held = zero_order_hold(RealTrace(clk_grid, part), grid)
        if mod.filter_cutoff is not None:
            held = baseband_filter(held, mod.filter_cutoff)
        chans.append(held.samples)
    offset = mod.leak_phasor + system.cancel.phasor(mod.leak_ref)
    return Synthesis(grid, chans[0], chans[1], offset)


def evolve(pulses: Sequence[np.ndarray], system: System,
           state: Optional[QuantumState] = None, trajectory: bool = False):
    """Play ``pulses`` back to back and propagate the transmon (from |0> by default)."""
    syn = synthesize(pulses, system)
    per_pulse = PULSE_CYCLES * system.modulator.rf_sample_rate / system.envelope.f_clk
    upsample = max(1, math.ceil(system.min_steps_per_pulse / per_pulse))
    drive = system.transmon.drive_gain * syn.envelope
    if upsample > 1:
        drive = np.repeat(drive, upsample)
    state = QuantumState.ground() if state is None else state
    return propagate_drive(state, drive, syn.grid.dt / upsample, system.transmon,
                           system.detuning, trajectory)
