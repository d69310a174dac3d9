"""Digital twin of a cryogenic CMOS XY pulse modulator driving a transmon."""

from .chain import System
from .config import RunConfig, load_config
from .envelope_compiler import PulseShape, compile, derivative_weights, quantize
from .envelope_generator import (DacTransferModel, EnvelopeParams, make_dac_transfer,
                                 render_envelope, staircase_codes)
from .experiments import (RabiConfig, ThreeGateConfig, calibrate_lo_null,
                          calibrate_pi_amplitude, monitor_amplitude, run_rabi, run_three_gate)
from .measurement import ConfusionMatrix, apply_confusion, sample_shots
from .signal_core import IQTrace, RealTrace, TimeGrid, integrate_envelope, make_time_grid, tone_amplitude
from .transmon_sim import (DriveSegment, QuantumState, TransmonParams, bloch_coords,
                           hamiltonian_rwa, ideal_rotation, populations, propagate)
from .vector_modulator import CancelSetting, ModulatorConfig, baseband_filter, offchip_cancel, upconvert
from .waveform_memory import (WaveformInstruction, WaveformMemory, decode_instruction,
                              encode_instruction, estimate_control_data_rate,
                              select_and_trigger, store_instruction)

__version__ = "0.1.0"

__all__ = [
    "System",
    "RunConfig",
    "load_config",
    "PulseShape",
    "compile",
    "derivative_weights",
    "quantize",
    "DacTransferModel",
    "EnvelopeParams",
    "make_dac_transfer",
    "render_envelope",
    "staircase_codes",
    "RabiConfig",
    "ThreeGateConfig",
    "calibrate_lo_null",
    "calibrate_pi_amplitude",
    "monitor_amplitude",
    "run_rabi",
    "run_three_gate",
    "ConfusionMatrix",
    "apply_confusion",
    "sample_shots",
    "IQTrace",
    "RealTrace",
    "TimeGrid",
    "integrate_envelope",
    "make_time_grid",
    "tone_amplitude",
    "DriveSegment",
    "QuantumState",
    "TransmonParams",
    "bloch_coords",
    "hamiltonian_rwa",
    "ideal_rotation",
    "populations",
    "propagate",
    "CancelSetting",
    "ModulatorConfig",
    "baseband_filter",
    "offchip_cancel",
    "upconvert",
    "WaveformInstruction",
    "WaveformMemory",
    "decode_instruction",
    "encode_instruction",
    "estimate_control_data_rate",
    "select_and_trigger",
    "store_instruction",
]
