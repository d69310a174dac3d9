"""Rabi sweeps, the three-gate phase sweep, and the two calibrations.

Every sweep point is an independent job seeded from ``(seed, tag, index)``,
and results are merged by index, so output does not depend on ``jobs``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .chain import (System, analog_baseband, analog_peak_for_angle, evolve,
                    instruction_baseband, synthesize)
from .envelope_compiler import PulseShape, derivative_weights, quantize, weight_codes
from .envelope_generator import envelope_area
from .errors import CalibrationRangeError, NumericalError, PreconditionError, ValidationError
from .measurement import apply_confusion, readout_excited, sample_shots
from .signal_core import RealTrace, tone_amplitude
from .transmon_sim import _stack_hamiltonians, ideal_rotation, populations, step_propagators
from .vector_modulator import AT1_MAX, PH1_STEPS, CancelSetting, cancel_phasors
from .waveform_memory import WaveformInstruction

DEFAULT_IP_CODES = tuple(int(round(x)) for x in np.linspace(8, 63, 11))
DEFAULT_IN_CODES = tuple(int(round(x)) for x in np.linspace(0, 255, 32))

_RABI_TAG = 1
_THREE_GATE_TAG = 3


def parallel_map(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """``list(map(fn, items))``, fanned out over processes when ``jobs > 1``."""
    items = list(items)
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _read(pops, system: System, shots: int, seed: int, stream) -> float:
    p = apply_confusion(readout_excited(pops), system.confusion)
    if shots <= 0:
        return p
    return sample_shots(p, shots, seed, stream).f1_measured


# -- monitor port ---------------------------------------------------------

def monitor_amplitude(rf: RealTrace, f_lo: float, noise_floor: float,
                      full_scale_reference: float) -> Optional[float]:
    """Normalized tone amplitude at ``f_lo``; ``None`` when below the noise floor."""
    if not full_scale_reference > 0:
        raise ValidationError("full_scale_reference must be positive")
    amp = abs(tone_amplitude(rf, f_lo)) / full_scale_reference
    return None if amp < noise_floor else amp


def reference_amplitude(shape: PulseShape, system: System) -> float:
    """Monitor reading of the full-scale pulse of ``shape`` on an ideal, leak-free chain."""
    ref = replace(system.with_dac_mode("ideal").without_leakage(), cancel=CancelSetting())
    instr = quantize(derivative_weights(shape), 1.0, 0.0)
    syn = synthesize([instruction_baseband(instr, 63, ref)], ref)
    return abs(tone_amplitude(syn.rf(ref), ref.modulator.f_lo))


# -- Rabi -----------------------------------------------------------------

@dataclass(frozen=True)
class RabiConfig:
    pulses: str = "one"
    ip_codes: Tuple[int, ...] = DEFAULT_IP_CODES
    in_codes: Tuple[int, ...] = DEFAULT_IN_CODES
    shots: int = 5000
    dac_mode: str = "cryo_perturbed"
    shape: PulseShape = field(default_factory=PulseShape)
    noise_floor: float = 0.25

    def __post_init__(self):
        if self.pulses not in ("one", "two"):
            raise ValidationError("pulses must be 'one' or 'two'")
        object.__setattr__(self, "ip_codes", tuple(int(c) for c in self.ip_codes))
        object.__setattr__(self, "in_codes", tuple(int(c) for c in self.in_codes))
        if not self.ip_codes or not self.in_codes:
            raise ValidationError("Rabi sweeps must be non-empty")
        if any(not 0 <= c <= 63 for c in self.ip_codes):
            raise ValidationError("ip_codes must lie in [0, 63]")
        if any(not 0 <= c <= 255 for c in self.in_codes):
            raise ValidationError("in_codes must lie in [0, 255]")
        if self.shots < 0:
            raise ValidationError("shots must be >= 0 (0 = noiseless)")
        if self.dac_mode not in ("ideal", "cryo_perturbed"):
            raise ValidationError(f"unknown dac_mode {self.dac_mode!r}")
        if self.noise_floor < 0:
            raise ValidationError("noise_floor must be >= 0")

    @property
    def n_pulses(self) -> int:
        return 1 if self.pulses == "one" else 2


@dataclass(frozen=True)
class RabiRow:
    ip_code: int
    in_code: int
    measured_amp: Optional[float]
    p1_measured: float
    p0_measured: float
    p2_true: float


@dataclass(frozen=True)
class RabiResult:
    rows: Tuple[RabiRow, ...]
    pulses: str = "one"

    def best(self) -> RabiRow:
        return max(self.rows, key=lambda r: r.p1_measured)


def _rabi_point(job, cfg: RabiConfig, system: System, seed: int, reference: float):
    index, ip, code = job
    weights = weight_codes(derivative_weights(cfg.shape))
    instr = WaveformInstruction(tuple(int(w) for w in weights), tuple(int(w) for w in weights),
                                code_n_i=code, code_n_q=0)
    pulse = instruction_baseband(instr, ip, system)
    try:
        state = evolve([pulse] * cfg.n_pulses, system)
    except NumericalError as exc:
        raise NumericalError(f"Rabi point ip={ip} in={code}: {exc}") from None
    pops = populations(state)
    p1 = _read(pops, system, cfg.shots, seed, (_RABI_TAG, cfg.n_pulses, index))
    rf = synthesize([pulse], system).rf(system)
    amp = monitor_amplitude(rf, system.modulator.f_lo, cfg.noise_floor, reference)
    return RabiRow(ip, code, amp, p1, 1.0 - p1, pops[2])


def run_rabi(cfg: RabiConfig, system: System, seed: int = 0, jobs: int = 1) -> RabiResult:
    """Amplitude Rabi sweep over (I_P, I_N) codes, from |0>, one or two pulses."""
    system = system.with_dac_mode(cfg.dac_mode)
    reference = reference_amplitude(cfg.shape, system)
    grid = [(k, ip, code) for k, (ip, code) in
            enumerate((ip, code) for ip in cfg.ip_codes for code in cfg.in_codes)]
    fn = partial(_rabi_point, cfg=cfg, system=system, seed=seed, reference=reference)
    return RabiResult(tuple(parallel_map(fn, grid, jobs)), cfg.pulses)


# -- calibrations ---------------------------------------------------------

@dataclass(frozen=True)
class PiCalibration:
    code_p: int
    code_n: int
    p1: float
    theta: float  # area-law rotation of the chosen code


def area_law_angles(shape: PulseShape, code_p: int, system: System) -> np.ndarray:
    """``kappa * area`` for each I_N code through the system's DAC model."""
    w = weight_codes(derivative_weights(shape))
    return np.array([system.transmon.drive_gain
                     * envelope_area(w, c, code_p, system.envelope, system.dac)
                     for c in range(256)])


def _pi_scan_point(code, shape: PulseShape, code_p: int, system: System) -> float:
    instr = quantize(derivative_weights(shape), 0.0, 0.0)
    instr = replace(instr, code_n_i=code)
    return populations(evolve([instruction_baseband(instr, code_p, system)], system))[1]


def pi_scan(system: System, shape: Optional[PulseShape] = None, code_p: int = 63,
            jobs: int = 1) -> np.ndarray:
    """Noiseless P1 after one pulse for every I_N code."""
    shape = shape or PulseShape()
    fn = partial(_pi_scan_point, shape=shape, code_p=code_p, system=system)
    return np.array(parallel_map(fn, range(256), jobs))


def calibrate_pi_amplitude(system: System, shape: Optional[PulseShape] = None,
                           code_p: int = 63, jobs: int = 1) -> PiCalibration:
    """I_N code maximizing noiseless P1 after one phase-0 pulse."""
    shape = shape or PulseShape()
    thetas = area_law_angles(shape, code_p, system)
    if thetas.max() < 0.9 * math.pi:
        raise CalibrationRangeError(
            f"largest rotation in the scan is {thetas.max() / math.pi:.3f} pi (< 0.9 pi)")
    p1 = pi_scan(system, shape, code_p, jobs)
    best = int(np.argmax(p1))
    return PiCalibration(code_p, best, float(p1[best]), float(thetas[best]))


@dataclass(frozen=True)
class LoNullResult:
    setting: CancelSetting
    residual_p1: float
    uncancelled_p1: float


def idle_excitation(system: System, at1, ph1, idle_time: float = 1e-6) -> np.ndarray:
    """Noiseless P1 after idling ``idle_time`` under leakage plus cancellation."""
    at1 = np.atleast_1d(np.asarray(at1))
    ph1 = np.atleast_1d(np.asarray(ph1))
    mod = system.modulator
    r = mod.leak_phasor + cancel_phasors(mod.leak_ref, at1, ph1)
    hams = _stack_hamiltonians(system.transmon, system.detuning,
                               system.transmon.drive_gain * r.ravel())
    us = step_propagators(hams, idle_time)
    return (np.abs(us[:, 1, 0]) ** 2).reshape(r.shape)


def calibrate_lo_null(system: System, idle_time: float = 1e-6,
                      max_refinements: int = 16) -> LoNullResult:
    """Coarse 8x16 grid over (AT1, PH1), then 8x16 unit-step refinement windows.

    The refinement window is re-centred on its own winner until the winner
    stops moving, so a coarse tie cannot strand the search one window away.
    """
    coarse_at = np.arange(0, AT1_MAX + 1, 9)
    coarse_ph = np.arange(0, PH1_STEPS, 16)
    a, p = np.meshgrid(coarse_at, coarse_ph, indexing="ij")
    obj = idle_excitation(system, a, p, idle_time)
    i, j = np.unravel_index(np.argmin(obj), obj.shape)
    best = (float(obj[i, j]), int(coarse_at[i]), int(coarse_ph[j]))
    if coarse_at[i] == AT1_MAX:
        # zero cancellation amplitude: phase is meaningless, take it from the
        # weakest non-zero row
        j = int(np.argmin(obj[i - 1]))
        best = (best[0], AT1_MAX, int(coarse_ph[j]))

    for _ in range(max_refinements):
        _, a0, p0 = best
        start = min(max(a0 - 4, 0), AT1_MAX + 1 - 8)
        fine_at = np.arange(start, start + 8)
        fine_ph = (p0 + np.arange(-8, 8)) % PH1_STEPS
        a, p = np.meshgrid(fine_at, fine_ph, indexing="ij")
        fine = idle_excitation(system, a, p, idle_time)
        k, m = np.unravel_index(np.argmin(fine), fine.shape)
        cand = (float(fine[k, m]), int(fine_at[k]), int(fine_ph[m]))
        if not cand[0] < best[0]:
            break
        best = cand
    uncancelled = float(idle_excitation(system, AT1_MAX, 0, idle_time)[0])
    return LoNullResult(CancelSetting(best[1], best[2]), best[0], uncancelled)


# -- three-gate sequence ----------------------------------------------------

@dataclass(frozen=True)
class ThreeGateConfig:
    theta_grid: Tuple[float, ...] = tuple(k * math.pi / 16 for k in range(16))
    phi_grid: Tuple[float, ...] = tuple(k * 2 * math.pi / 16 for k in range(16))
    shots: int = 5000
    calibrated: bool = False
    shape: PulseShape = field(default_factory=PulseShape)

    def __post_init__(self):
        object.__setattr__(self, "theta_grid", tuple(float(x) for x in self.theta_grid))
        object.__setattr__(self, "phi_grid", tuple(float(x) for x in self.phi_grid))
        if not self.theta_grid or not self.phi_grid:
            raise ValidationError("three-gate grids must be non-empty")
        if self.shots < 0:
            raise ValidationError("shots must be >= 0 (0 = noiseless)")


@dataclass(frozen=True)
class ThreeGatePoint:
    theta_index: int
    phi_index: int
    theta: float
    phi: float
    p1_measured: float
    p1_ideal_corrected: float

    @property
    def error(self) -> float:
        return self.p1_measured - self.p1_ideal_corrected


@dataclass(frozen=True)
class ThreeGateResult:
    points: Tuple[ThreeGatePoint, ...]
    shape: Tuple[int, int]

    @property
    def p1_measured(self) -> np.ndarray:
        return np.array([p.p1_measured for p in self.points]).reshape(self.shape)

    @property
    def p1_ideal_corrected(self) -> np.ndarray:
        return np.array([p.p1_ideal_corrected for p in self.points]).reshape(self.shape)

    @property
    def rms_error(self) -> float:
        err = np.array([p.error for p in self.points])
        return float(np.sqrt(np.mean(err ** 2)))


def three_gate_ideal(theta: float, phi: float) -> float:
    """``|<1| Rx(theta) R_phi(pi) Rx(theta) |0>|^2``."""
    rx = ideal_rotation(theta, 0.0)
    u = rx @ ideal_rotation(math.pi, phi) @ rx
    return float(abs(u[1, 0]) ** 2)


def _three_gate_pulses(theta: float, phi: float, cfg: ThreeGateConfig, system: System,
                       cal: Optional[PiCalibration]):
    if cfg.calibrated:
        x_peak = analog_peak_for_angle(cfg.shape, theta, system)
        pi_peak = analog_peak_for_angle(cfg.shape, math.pi, system)
        x = analog_baseband(cfg.shape, x_peak, 0.0)
        return [x, analog_baseband(cfg.shape, pi_peak, phi), x]
    # linear code scaling from the pi calibration, no DAC inversion
    weights = derivative_weights(cfg.shape)
    a_pi = cal.code_n / 255
    x = instruction_baseband(quantize(weights, a_pi * theta / math.pi, 0.0), cal.code_p, system)
    y = instruction_baseband(quantize(weights, a_pi, phi), cal.code_p, system)
    return [x, y, x]


def _three_gate_point(job, cfg: ThreeGateConfig, system: System,
                      cal: Optional[PiCalibration], seed: int) -> ThreeGatePoint:
    index, ti, pj = job
    theta, phi = cfg.theta_grid[ti], cfg.phi_grid[pj]
    try:
        state = evolve(_three_gate_pulses(theta, phi, cfg, system, cal), system)
    except NumericalError as exc:
        raise NumericalError(f"three-gate point theta={theta:.4f} phi={phi:.4f}: {exc}") from None
    p1 = _read(populations(state), system, cfg.shots, seed, (_THREE_GATE_TAG, index))
    ideal = apply_confusion(three_gate_ideal(theta, phi), system.confusion)
    return ThreeGatePoint(ti, pj, theta, phi, p1, ideal)


def run_three_gate(cfg: ThreeGateConfig, system: System,
                   pi_calibration: Optional[PiCalibration] = None,
                   seed: int = 0, jobs: int = 1) -> ThreeGateResult:
    """X(theta) . R_phi(pi) . X(theta) from |0>, over the (theta, phi) grid.

    In uncalibrated mode pulse codes are scaled linearly from
    ``pi_calibration`` and played through the system's DAC model as is.
    """
    if not cfg.calibrated and pi_calibration is None:
        raise PreconditionError("uncalibrated three-gate run needs a pi-amplitude calibration")
    nt, nphi = len(cfg.theta_grid), len(cfg.phi_grid)
    grid = [(ti * nphi + pj, ti, pj) for ti in range(nt) for pj in range(nphi)]
    fn = partial(_three_gate_point, cfg=cfg, system=system, cal=pi_calibration, seed=seed)
    return ThreeGateResult(tuple(parallel_map(fn, grid, jobs)), (nt, nphi))
