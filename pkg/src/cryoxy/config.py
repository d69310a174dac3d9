"""Run configuration: one JSON document fully determines a CLI run."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from .chain import System
from .envelope_compiler import PulseShape
from .envelope_generator import DacTransferModel, EnvelopeParams
from .errors import ValidationError
from .experiments import RabiConfig, ThreeGateConfig
from .measurement import ConfusionMatrix
from .transmon_sim import TransmonParams
from .vector_modulator import CancelSetting, ModulatorConfig
from .waveform_memory import N_SLOTS


@dataclass(frozen=True)
class WaveformSpec:
    label: str
    shape: PulseShape
    amplitude: float = 1.0
    phase: float = 0.0


def _catalog() -> Tuple[WaveformSpec, ...]:
    rc, q = PulseShape("raised_cosine"), math.pi / 4
    return (
        WaveformSpec("CRC #1", PulseShape("clipped_raised_cosine", clip=0.9)),
        WaveformSpec("RC #1", rc, 1.0, 0.0),
        WaveformSpec("RC #2", rc, 0.8, 0.0),
        WaveformSpec("RC #3", rc, 0.6, 0.0),
        WaveformSpec("RC #4", rc, 0.4, 0.0),
        WaveformSpec("RC #5", rc, 1.0, 2 * q),
        WaveformSpec("RC #6", rc, 1.0, 4 * q),
        WaveformSpec("SC #1", PulseShape("staircase", steps=1), 0.5),
        WaveformSpec("RC #7", rc, 1.0, 6 * q),
        WaveformSpec("RC #1", rc, 1.0, 0.0),
        WaveformSpec("RC #1", rc, 1.0, 0.0),
        WaveformSpec("RC #1", rc, 1.0, 0.0),
        WaveformSpec("GN #1", PulseShape("gaussian", sigma_fraction=1 / 6)),
        WaveformSpec("GN #2", PulseShape("gaussian", sigma_fraction=1 / 8)),
        WaveformSpec("SC #2", PulseShape("staircase", steps=3)),
        WaveformSpec("TR #1", PulseShape("triangular")),
    )


@dataclass(frozen=True)
class LoNullConfig:
    enabled: bool = True
    idle_time: float = 1e-6

    def __post_init__(self):
        if not self.idle_time > 0:
            raise ValidationError("idle_time must be positive")


@dataclass(frozen=True)
class RunConfig:
    master_seed: int = 0
    code_p: int = 63
    transmon: TransmonParams = field(default_factory=TransmonParams)
    modulator: ModulatorConfig = field(default_factory=ModulatorConfig)
    envelope: EnvelopeParams = field(default_factory=EnvelopeParams)
    # the cold chip's perturbed reference DAC, seeded reproducibly
    dac: DacTransferModel = field(default_factory=lambda: DacTransferModel("cryo_perturbed"))
    confusion: ConfusionMatrix = field(default_factory=ConfusionMatrix)
    cancel: CancelSetting = field(default_factory=CancelSetting)
    lo_null: LoNullConfig = field(default_factory=LoNullConfig)
    rabi: RabiConfig = field(default_factory=RabiConfig)
    three_gate: ThreeGateConfig = field(default_factory=ThreeGateConfig)
    waveforms: Tuple[WaveformSpec, ...] = field(default_factory=_catalog)

    def __post_init__(self):
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ValidationError("master_seed must be a non-negative integer")
        if int(self.code_p) != self.code_p or not 0 <= self.code_p <= 63:
            raise ValidationError("code_p must be an integer in [0, 63]")
        object.__setattr__(self, "waveforms", tuple(self.waveforms))
        if len(self.waveforms) > N_SLOTS:
            raise ValidationError(f"at most {N_SLOTS} waveforms fit in memory")

    def system(self) -> System:
        return System(self.transmon, self.modulator, self.envelope, self.dac,
                      self.confusion, self.cancel)


_NESTED = {
    "transmon": TransmonParams,
    "modulator": ModulatorConfig,
    "envelope": EnvelopeParams,
    "dac": DacTransferModel,
    "confusion": ConfusionMatrix,
    "cancel": CancelSetting,
    "lo_null": LoNullConfig,
    "rabi": RabiConfig,
    "three_gate": ThreeGateConfig,
}


def _to_plain(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj):
        return {f.name: _to_plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, (tuple, list)):
        return [_to_plain(x) for x in obj]
    return obj


def _build(cls, data: Any, where: str):
    if not isinstance(data, dict):
        raise ValidationError(f"{where} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown keys in {where}: {sorted(unknown)}")
    kwargs = dict(data)
    if "shape" in kwargs:
        kwargs["shape"] = _build(PulseShape, kwargs["shape"], f"{where}.shape")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def config_to_dict(cfg: RunConfig) -> Dict[str, Any]:
    return _to_plain(cfg)


def config_from_dict(data: Dict[str, Any]) -> RunConfig:
    if not isinstance(data, dict):
        raise ValidationError("config root must be an object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown top-level config keys: {sorted(unknown)}")
    kwargs: Dict[str, Any] = {}
    for key, value in data.items():
        if key in _NESTED:
            kwargs[key] = _build(_NESTED[key], value, key)
        elif key == "waveforms":
            if not isinstance(value, list):
                raise ValidationError("waveforms must be a list")
            kwargs[key] = tuple(_build(WaveformSpec, v, f"waveforms[{k}]")
                                for k, v in enumerate(value))
        else:
            kwargs[key] = value
    return RunConfig(**kwargs)


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"


def load_config(source: Optional[Union[str, Path]]) -> RunConfig:
    """Read a JSON config; ``None`` or ``"default"`` gives the built-in defaults."""
    if source is None or str(source) == "default":
        return RunConfig()
    try:
        data = json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ValidationError(f"cannot read config {source}: {exc}") from None
    return config_from_dict(data)
