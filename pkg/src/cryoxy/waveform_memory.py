"""On-chip waveform store: 16 instruction slots, select/trigger, binary codec.

Each instruction carries the 11 sub-DAC weights for both envelope channels,
their reference-current codes and the two polarity bits feeding the vector
modulator. The memory image format is 417 bytes::

    byte 0            global I_P code (0..63)
    16 x 26 bytes     presence flag, then the 25-byte instruction record
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .errors import CapacityError, FormatError, NotProgrammedError, ValidationError

N_SLOTS = 16
N_SUBDACS = 11
RECORD_SIZE = 25
IMAGE_SIZE = 1 + N_SLOTS * (1 + RECORD_SIZE)

SELECT_BITS = 4
TRIGGER_BITS = 1


def _check_byte_seq(name: str, values: Sequence[int]) -> Tuple[int, ...]:
    vals = tuple(int(v) for v in values)
    if len(vals) != N_SUBDACS:
        raise ValidationError(f"{name} needs {N_SUBDACS} weights, got {len(vals)}")
    if any(v != w for v, w in zip(vals, values)) or any(not 0 <= v <= 255 for v in vals):
        raise ValidationError(f"{name} weights must be integers in [0, 255]")
    return vals


def _check_code(name: str, value, hi: int) -> int:
    if int(value) != value or not 0 <= value <= hi:
        raise ValidationError(f"{name} must be an integer in [0, {hi}], got {value}")
    return int(value)


@dataclass(frozen=True)
class WaveformInstruction:
    w_i: Tuple[int, ...]
    w_q: Tuple[int, ...]
    code_n_i: int = 0
    code_n_q: int = 0
    pol_i: int = 1
    pol_q: int = 1

    def __post_init__(self):
        object.__setattr__(self, "w_i", _check_byte_seq("w_i", self.w_i))
        object.__setattr__(self, "w_q", _check_byte_seq("w_q", self.w_q))
        object.__setattr__(self, "code_n_i", _check_code("code_n_i", self.code_n_i, 255))
        object.__setattr__(self, "code_n_q", _check_code("code_n_q", self.code_n_q, 255))
        for name in ("pol_i", "pol_q"):
            if getattr(self, name) not in (1, -1):
                raise ValidationError(f"{name} must be +1 or -1")
            object.__setattr__(self, name, int(getattr(self, name)))

    @classmethod
    def zero(cls) -> "WaveformInstruction":
        return cls((0,) * N_SUBDACS, (0,) * N_SUBDACS)


@dataclass(frozen=True)
class WaveformMemory:
    slots: Tuple[Optional[WaveformInstruction], ...] = field(
        default=(None,) * N_SLOTS)
    code_p: int = 63

    def __post_init__(self):
        slots = tuple(self.slots)
        if len(slots) != N_SLOTS:
            raise CapacityError(f"memory holds exactly {N_SLOTS} slots")
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "code_p", _check_code("code_p", self.code_p, 63))

    @property
    def occupied(self) -> int:
        return sum(s is not None for s in self.slots)


def _check_slot(slot) -> int:
    if int(slot) != slot or slot < 0:
        raise ValidationError(f"slot index must be a non-negative integer, got {slot}")
    if slot >= N_SLOTS:
        raise CapacityError(f"slot {slot} exceeds the {N_SLOTS}-waveform memory")
    return int(slot)


def store_instruction(mem: WaveformMemory, slot: int,
                      instr: WaveformInstruction) -> WaveformMemory:
    slot = _check_slot(slot)
    if not isinstance(instr, WaveformInstruction):
        raise ValidationError("instr must be a WaveformInstruction")
    slots = list(mem.slots)
    slots[slot] = instr
    return WaveformMemory(tuple(slots), mem.code_p)


def select_and_trigger(mem: WaveformMemory, slot: int) -> WaveformInstruction:
    slot = _check_slot(slot)
    instr = mem.slots[slot]
    if instr is None:
        raise NotProgrammedError(f"slot {slot} is not programmed")
    return instr


def encode_instruction(instr: WaveformInstruction) -> bytes:
    flags = (instr.pol_i < 0) | ((instr.pol_q < 0) << 1)
    return bytes(instr.w_i + instr.w_q + (instr.code_n_i, instr.code_n_q, flags))


def decode_instruction(data: bytes) -> WaveformInstruction:
    data = bytes(data)
    if len(data) != RECORD_SIZE:
        raise FormatError(f"instruction record must be {RECORD_SIZE} bytes, got {len(data)}")
    flags = data[24]
    if flags & 0xFC:
        raise FormatError(f"reserved polarity bits set: 0x{flags:02x}")
    return WaveformInstruction(
        w_i=tuple(data[0:11]),
        w_q=tuple(data[11:22]),
        code_n_i=data[22],
        code_n_q=data[23],
        pol_i=-1 if flags & 1 else 1,
        pol_q=-1 if flags & 2 else 1,
    )


def encode_memory(mem: WaveformMemory) -> bytes:
    out = bytearray([mem.code_p])
    for instr in mem.slots:
        if instr is None:
            out += bytes(1 + RECORD_SIZE)
        else:
            out += b"\x01" + encode_instruction(instr)
    return bytes(out)


def decode_memory(data: bytes) -> WaveformMemory:
    data = bytes(data)
    if len(data) != IMAGE_SIZE:
        raise FormatError(f"memory image must be {IMAGE_SIZE} bytes, got {len(data)}")
    if data[0] > 63:
        raise FormatError(f"code_p byte {data[0]} exceeds 6 bits")
    slots = []
    for k in range(N_SLOTS):
        base = 1 + k * (1 + RECORD_SIZE)
        present = data[base]
        record = data[base + 1:base + 1 + RECORD_SIZE]
        if present == 0:
            if any(record):
                raise FormatError(f"absent slot {k} is not zero-filled")
            slots.append(None)
        elif present == 1:
            slots.append(decode_instruction(record))
        else:
            raise FormatError(f"bad presence byte {present} in slot {k}")
    return WaveformMemory(tuple(slots), data[0])


@dataclass(frozen=True)
class GateSchedule:
    """Streaming schedule: ``bits_per_gate`` control bits every ``gate_period``."""

    gate_period: float
    bits_per_gate: int = SELECT_BITS + TRIGGER_BITS

    def __post_init__(self):
        if not self.gate_period > 0:
            raise ValidationError("gate_period must be positive")
        if self.bits_per_gate < 0:
            raise ValidationError("bits_per_gate must be non-negative")

    @property
    def stream_rate(self) -> float:
        return self.bits_per_gate / self.gate_period


def estimate_control_data_rate(schedule_kind: str, **params) -> float:
    """Digital control bandwidth in bits/s.

    ``standard_awg`` takes ``channels``, ``bits_per_sample``, ``sample_rate``
    and streams every sample. ``ic_streaming`` takes ``bits_per_gate`` and
    ``gate_period`` and streams only select/trigger words.
    """
    if schedule_kind == "standard_awg":
        try:
            ch = params["channels"]
            bits = params["bits_per_sample"]
            rate = params["sample_rate"]
        except KeyError as exc:
            raise ValidationError(f"standard_awg needs {exc.args[0]}") from None
        if not (ch > 0 and bits > 0 and rate > 0):
            raise ValidationError("standard_awg parameters must be positive")
        return float(ch * bits * rate)
    if schedule_kind == "ic_streaming":
        try:
            bits = params["bits_per_gate"]
            period = params["gate_period"]
        except KeyError as exc:
            raise ValidationError(f"ic_streaming needs {exc.args[0]}") from None
        return GateSchedule(period, bits).stream_rate
    raise ValidationError(f"unknown schedule kind {schedule_kind!r}")
