import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cryoxy.errors import CapacityError, FormatError, NotProgrammedError, ValidationError
from cryoxy.waveform_memory import (IMAGE_SIZE, N_SLOTS, GateSchedule, WaveformInstruction,
                                    WaveformMemory, decode_instruction, decode_memory,
                                    encode_instruction, encode_memory,
                                    estimate_control_data_rate, select_and_trigger,
                                    store_instruction)

byte = st.integers(0, 255)
pol = st.sampled_from([1, -1])
instructions = st.builds(WaveformInstruction, st.lists(byte, min_size=11, max_size=11),
                         st.lists(byte, min_size=11, max_size=11), byte, byte, pol, pol)


def _distinct(k):
    return WaveformInstruction((k,) * 11, (255 - k,) * 11, k, 2 * k)


def test_instruction_validation():
    with pytest.raises(ValidationError):
        WaveformInstruction((0,) * 10, (0,) * 11)
    with pytest.raises(ValidationError):
        WaveformInstruction((256,) + (0,) * 10, (0,) * 11)
    with pytest.raises(ValidationError):
        WaveformInstruction((0,) * 11, (0,) * 11, code_n_i=-1)
    with pytest.raises(ValidationError):
        WaveformInstruction((0,) * 11, (0,) * 11, pol_q=0)


def test_store_into_empty_memory():
    mem = store_instruction(WaveformMemory(), 0, _distinct(1))
    assert mem.occupied == 1


def test_store_boundaries():
    assert store_instruction(WaveformMemory(), 15, _distinct(1)).slots[15] == _distinct(1)
    with pytest.raises(CapacityError):
        store_instruction(WaveformMemory(), 16, _distinct(1))


def test_store_leaves_other_slots_unchanged():
    mem = WaveformMemory()
    for k in range(N_SLOTS):
        mem = store_instruction(mem, k, _distinct(k))
    new = store_instruction(mem, 4, WaveformInstruction.zero())
    assert new.slots[4] == WaveformInstruction.zero()
    assert all(new.slots[k] == mem.slots[k] for k in range(N_SLOTS) if k != 4)
    assert mem.slots[4] == _distinct(4)


def test_memory_capacity_is_sixteen():
    with pytest.raises(CapacityError):
        WaveformMemory(slots=(None,) * 17)
    with pytest.raises(ValidationError):
        WaveformMemory(code_p=64)


def test_select_returns_programmed_instruction():
    mem = WaveformMemory()
    for k in range(N_SLOTS):
        mem = store_instruction(mem, k, _distinct(k))
    assert select_and_trigger(mem, 3) == _distinct(3)
    assert select_and_trigger(mem, 3) == select_and_trigger(mem, 3)


def test_select_empty_slot():
    with pytest.raises(NotProgrammedError):
        select_and_trigger(WaveformMemory(), 7)


def test_encode_zero_instruction():
    assert encode_instruction(WaveformInstruction.zero()) == bytes(25)


def test_encode_negative_i_polarity():
    data = encode_instruction(WaveformInstruction((0,) * 11, (0,) * 11, pol_i=-1))
    assert data[24] == 0x01
    data = encode_instruction(WaveformInstruction((0,) * 11, (0,) * 11, pol_q=-1))
    assert data[24] == 0x02


def test_encode_layout():
    instr = WaveformInstruction(tuple(range(11)), tuple(range(100, 111)), 200, 201, -1, -1)
    data = encode_instruction(instr)
    assert list(data[:11]) == list(range(11))
    assert list(data[11:22]) == list(range(100, 111))
    assert (data[22], data[23], data[24]) == (200, 201, 0x03)


@settings(max_examples=200, deadline=None)
@given(instructions)
def test_codec_round_trip(instr):
    assert decode_instruction(encode_instruction(instr)) == instr


def test_decode_rejects_reserved_bits_and_length():
    for flag in (0x04, 0x80, 0xFF):
        with pytest.raises(FormatError):
            decode_instruction(bytes(24) + bytes([flag]))
    with pytest.raises(FormatError):
        decode_instruction(bytes(24))


def test_memory_image_round_trip():
    mem = WaveformMemory(code_p=42)
    for k in (0, 3, 15):
        mem = store_instruction(mem, k, _distinct(k))
    image = encode_memory(mem)
    assert len(image) == IMAGE_SIZE == 417
    assert image[0] == 42
    assert image[1 + 3 * 26] == 1 and image[1 + 26] == 0
    assert decode_memory(image) == mem


def test_memory_image_rejects_garbage():
    with pytest.raises(FormatError):
        decode_memory(bytes(416))
    bad = bytearray(417)
    bad[1] = 2
    with pytest.raises(FormatError):
        decode_memory(bytes(bad))
    bad = bytearray(417)
    bad[5] = 9  # payload under an absent slot
    with pytest.raises(FormatError):
        decode_memory(bytes(bad))


def test_standard_awg_rate():
    rate = estimate_control_data_rate("standard_awg", channels=2, bits_per_sample=14, sample_rate=1e9)
    assert rate == 28e9


def test_ic_streaming_rate():
    rate = estimate_control_data_rate("ic_streaming", bits_per_gate=5, gate_period=22e-9)
    assert rate == pytest.approx(0.22727e9, rel=1e-4)
    assert rate < 0.5e9
    assert estimate_control_data_rate("ic_streaming", bits_per_gate=0, gate_period=1e-6) == 0


def test_data_rate_rejects_bad_parameters():
    with pytest.raises(ValidationError):
        estimate_control_data_rate("standard_awg", channels=0, bits_per_sample=14, sample_rate=1e9)
    with pytest.raises(ValidationError):
        estimate_control_data_rate("ic_streaming", bits_per_gate=5, gate_period=0)
    with pytest.raises(ValidationError):
        estimate_control_data_rate("ic_streaming", bits_per_gate=5)
    with pytest.raises(ValidationError):
        estimate_control_data_rate("carrier_pigeon")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 64), st.floats(1e-9, 1e-5))
def test_rate_linear_in_bits_inverse_in_period(bits, period):
    base = estimate_control_data_rate("ic_streaming", bits_per_gate=bits, gate_period=period)
    assert estimate_control_data_rate("ic_streaming", bits_per_gate=2 * bits,
                                      gate_period=period) == pytest.approx(2 * base)
    assert estimate_control_data_rate("ic_streaming", bits_per_gate=bits,
                                      gate_period=2 * period) == pytest.approx(base / 2)


def test_gate_schedule():
    assert GateSchedule(22e-9).stream_rate == pytest.approx(5 / 22e-9)
    with pytest.raises(ValidationError):
        GateSchedule(0.0)
