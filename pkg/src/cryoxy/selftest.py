"""Fast invariant battery behind ``cryoxy selftest`` (the CI gate)."""
from __future__ import annotations

import math
from typing import Callable, List, Tuple

import numpy as np

from .chain import System, evolve, instruction_baseband
from .envelope_compiler import SHAPES, PulseShape, compile
from .envelope_generator import (DacTransferModel, EnvelopeParams, envelope_area,
                                 render_envelope, staircase_codes)
from .experiments import calibrate_lo_null, three_gate_ideal
from .measurement import ConfusionMatrix, apply_confusion, invert_confusion
from .signal_core import integrate_envelope
from .transmon_sim import (_stack_hamiltonians, populations, step_propagators,
                           TransmonParams)
from .waveform_memory import (WaveformInstruction, decode_instruction, encode_instruction,
                              estimate_control_data_rate)


def _staircase_symmetry(rng) -> bool:
    for _ in range(200):
        e = staircase_codes(rng.integers(0, 256, 11))
        if e.size != 22 or not np.array_equal(e, e[::-1]) or np.any(np.diff(e[:11]) < 0):
            return False
    return True


def _codec(rng) -> bool:
    for _ in range(200):
        instr = WaveformInstruction(tuple(rng.integers(0, 256, 11)), tuple(rng.integers(0, 256, 11)),
                                    int(rng.integers(256)), int(rng.integers(256)),
                                    int(rng.choice([-1, 1])), int(rng.choice([-1, 1])))
        if decode_instruction(encode_instruction(instr)) != instr:
            return False
    return True


def _area_law(rng) -> bool:
    params, dac = EnvelopeParams(), DacTransferModel("cryo_perturbed")
    for _ in range(50):
        w = rng.integers(0, 256, 11)
        cn, cp = int(rng.integers(256)), int(rng.integers(64))
        got = integrate_envelope(render_envelope(w, cn, cp, params, dac))
        want = envelope_area(w, cn, cp, params, dac)
        if abs(got - want) > 1e-12 * max(abs(want), 1e-30):
            return False
    return True


def _unitarity(rng) -> bool:
    p = TransmonParams()
    drive = p.drive_gain * rng.uniform(-1, 1, 500) * np.exp(1j * rng.uniform(0, 6.3, 500))
    us = step_propagators(_stack_hamiltonians(p, 0.0, drive), 1e-11)
    err = np.abs(np.conj(np.swapaxes(us, -1, -2)) @ us - np.eye(3)).max()
    return err < 1e-12


def _compile_residual(rng) -> bool:
    return all(compile(PulseShape(k), 1.0, 0.0).residual <= 1 / 255 + 1e-12 for k in SHAPES)


def _confusion(rng) -> bool:
    cm = ConfusionMatrix()
    ps = rng.uniform(0, 1, 100)
    return all(abs(invert_confusion(apply_confusion(p, cm), cm) - p) < 1e-12 for p in ps)


def _data_rate(rng) -> bool:
    std = estimate_control_data_rate("standard_awg", channels=2, bits_per_sample=14, sample_rate=1e9)
    ic = estimate_control_data_rate("ic_streaming", bits_per_gate=5, gate_period=22e-9)
    return std == 28e9 and ic < 0.5e9


def _three_gate_anchors(rng) -> bool:
    return (abs(three_gate_ideal(0.0, 1.3) - 1) < 1e-12
            and abs(three_gate_ideal(math.pi / 2, 0.0)) < 1e-12)


def _pi_pulse(rng) -> bool:
    system = System().without_leakage()
    instr = compile(PulseShape(), 212 / 255, 0.0).instruction
    p0, p1, p2 = populations(evolve([instruction_baseband(instr, 63, system)], system))
    return p1 > 0.97 and p2 < 2e-2


def _lo_null(rng) -> bool:
    res = calibrate_lo_null(System())
    return res.residual_p1 * 100 <= res.uncancelled_p1


CHECKS: List[Tuple[str, Callable]] = [
    ("staircase is 22 cycles, symmetric, monotone rise", _staircase_symmetry),
    ("instruction codec round-trips", _codec),
    ("rendered area matches closed form", _area_law),
    ("step propagators unitary to 1e-12", _unitarity),
    ("compiled shapes within one LSB", _compile_residual),
    ("confusion inversion is exact", _confusion),
    ("control data rates", _data_rate),
    ("three-gate oracle anchors", _three_gate_anchors),
    ("raised-cosine pi pulse", _pi_pulse),
    ("LO null gains >= 100x", _lo_null),
]


def run_selftest(seed: int = 0, echo=print) -> bool:
    rng = np.random.default_rng(seed)
    ok = True
    for name, check in CHECKS:
        passed = bool(check(rng))
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
