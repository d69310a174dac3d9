import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cryoxy.chain import System, synthesize, instruction_baseband
from cryoxy.envelope_compiler import (SHAPES, PulseShape, compile, derivative_weights,
                                      ideal_staircase, quantize, shape_gain, weight_codes)
from cryoxy.envelope_generator import EnvelopeParams, DacTransferModel, render_instruction, staircase_codes
from cryoxy.errors import ValidationError
from cryoxy.signal_core import tone_amplitude

ALL_SHAPES = [PulseShape(k) for k in SHAPES] + [
    PulseShape("clipped_raised_cosine", clip=0.6),
    PulseShape("gaussian", sigma_fraction=1 / 8),
    PulseShape("staircase", steps=3),
]


def test_triangular_weights_uniform():
    assert np.allclose(derivative_weights(PulseShape("triangular")), 1 / 11, atol=1e-15)


def test_raised_cosine_weights_closed_form():
    w = derivative_weights(PulseShape("raised_cosine"))
    e = lambda s: (1 - math.cos(math.pi * s / 11)) / 2
    assert np.allclose(w, [e(k + 1) - e(k) for k in range(11)], atol=1e-15)
    assert w[0] == pytest.approx(0.02025, abs=5e-6)
    assert w[5] == pytest.approx(0.14231, abs=5e-6)


def test_single_step_staircase_weights():
    w = derivative_weights(PulseShape("staircase", steps=1))
    assert w[0] == 1 and not np.any(w[1:])


@pytest.mark.parametrize("shape", ALL_SHAPES, ids=lambda s: f"{s.kind}")
def test_weights_sum_to_one(shape):
    w = derivative_weights(shape)
    assert abs(w.sum() - 1) < 1e-12
    assert np.all(w >= 0)


def test_decreasing_shape_rejected():
    class Falling(PulseShape):
        def rising_half(self, s):
            return 1 - np.asarray(s) / 11
    with pytest.raises(ValidationError):
        derivative_weights(Falling("triangular"))


def test_shape_parameter_validation():
    with pytest.raises(ValidationError):
        PulseShape("sinc")
    with pytest.raises(ValidationError):
        PulseShape("clipped_raised_cosine", clip=0)
    with pytest.raises(ValidationError):
        PulseShape("staircase", steps=12)


def test_quantize_triangular_full_amplitude():
    instr = quantize(derivative_weights(PulseShape("triangular")), 1.0, 0.0)
    assert instr.w_i == (255,) * 11
    assert instr.code_n_i == 255 and instr.code_n_q == 0 and instr.pol_i == 1


def test_raised_cosine_weight_codes():
    codes = weight_codes(derivative_weights(PulseShape()))
    assert codes[5] == 255
    assert codes[0] == round(255 * 0.02025 / 0.14231) == 36
    assert list(codes) == [36, 106, 167, 215, 245, 255, 245, 215, 167, 106, 36]
    assert shape_gain(derivative_weights(PulseShape())) == pytest.approx(1793 / 2805)


def test_quantize_second_quadrant():
    instr = quantize(derivative_weights(PulseShape()), 1.0, 3 * math.pi / 4)
    assert (instr.pol_i, instr.pol_q) == (-1, 1)
    assert instr.code_n_i == instr.code_n_q == round(255 / math.sqrt(2))


def test_quantize_rejects_amplitude():
    w = derivative_weights(PulseShape())
    for a in (-0.1, 1.1):
        with pytest.raises(ValidationError):
            quantize(w, a, 0.0)


def test_compile_triangular_exact():
    assert compile(PulseShape("triangular"), 1.0, 0.0).residual == 0


def test_compile_raised_cosine_within_lsb():
    res = compile(PulseShape(), 1.0, 0.0).residual
    # exhaustive 22-sample comparison oracle
    stairs = staircase_codes(weight_codes(derivative_weights(PulseShape())))
    target = ideal_staircase(PulseShape())
    assert res == pytest.approx(np.max(np.abs(stairs / stairs.max() - target)), abs=1e-15)
    assert res <= 1 / 255


def test_compile_gaussian_zero_amplitude():
    c = compile(PulseShape("gaussian"), 0.0, 1.0)
    assert c.instruction.code_n_i == c.instruction.code_n_q == 0
    iq = render_instruction(c.instruction, 63, EnvelopeParams(), DacTransferModel())
    assert not np.any(iq.i_samples) and not np.any(iq.q_samples)


@settings(max_examples=32, deadline=None)
@given(st.sampled_from(ALL_SHAPES), st.floats(0, 1), st.floats(0, 2 * math.pi))
def test_rendered_matches_target_within_two_lsb(shape, amp, phase):
    c = compile(shape, amp, phase)
    iq = render_instruction(c.instruction, 63, EnvelopeParams(), DacTransferModel())
    target = amp * ideal_staircase(shape)
    # rendered peak is code_n * shape_gain; normalize that gain out
    g = shape_gain(derivative_weights(shape))
    for samples, trig in ((iq.i_samples, abs(math.cos(phase))), (iq.q_samples, abs(math.sin(phase)))):
        assert np.max(np.abs(samples / g - trig * target)) <= 2 / 255 + 1e-12
    assert c.residual <= 2 / 255 + 1e-12


@pytest.mark.parametrize("k", range(32))
def test_phase_coverage(k):
    phase = k * math.pi / 16
    system = System.ideal()
    instr = compile(PulseShape(), 1.0, phase).instruction
    rf = synthesize([instruction_baseband(instr, 63, system)], system).rf(system)
    got = np.angle(tone_amplitude(rf, system.modulator.f_lo))
    err = (got - phase + math.pi) % (2 * math.pi) - math.pi
    assert abs(err) < math.radians(2)
