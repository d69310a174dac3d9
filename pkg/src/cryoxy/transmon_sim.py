"""Three-level transmon in the frame rotating at the LO frequency.

With drive ``eps(t) = Omega(t) exp(j phi)``::

    H = Delta |1><1| + (2 Delta - delta) |2><2|
        + 1/2 [eps (|1><0| + sqrt2 |2><1|) + h.c.]

so a drive of phase phi rotates the qubit about the axis
``(cos phi, sin phi, 0)``, matching :func:`ideal_rotation`. Each sample of the
drive is held for one step and the step propagator is built from the
eigendecomposition of the 3x3 Hermitian matrix, which keeps it unitary to
machine precision.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import NumericalError, UndefinedBlochError, ValidationError
from .signal_core import RealTrace

SQRT2 = math.sqrt(2.0)
QUBIT_BAND = (4e9, 8e9)

# rad/s per volt: a full-scale compiled raised cosine (code_p=63, code_n=255,
# ideal DAC, f_clk = 1 GHz, full_scale = 1 V) produces a 1.2*pi rotation.
DEFAULT_DRIVE_GAIN = 491476151.3284645

NORM_TOL = 1e-9


@dataclass(frozen=True)
class TransmonParams:
    f01: float = 5.6e9
    anharmonicity: float = 250e6
    drive_gain: float = DEFAULT_DRIVE_GAIN
    # drop the |1>-|2> coupling (anharmonicity -> infinity)
    two_level_limit: bool = False

    def __post_init__(self):
        if not self.anharmonicity > 0:
            raise ValidationError("anharmonicity must be positive")
        if not self.drive_gain > 0:
            raise ValidationError("drive_gain must be positive")
        if not QUBIT_BAND[0] <= self.f01 <= QUBIT_BAND[1]:
            warnings.warn(f"f01={self.f01:g} Hz outside 4-8 GHz", stacklevel=3)

    @property
    def delta(self) -> float:
        """Anharmonicity in rad/s."""
        return 2 * math.pi * self.anharmonicity


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.shape != (3,):
            raise ValidationError("a transmon state has exactly 3 amplitudes")
        if abs(np.vdot(a, a).real - 1) > NORM_TOL:
            raise ValidationError("state is not normalized")
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def basis(cls, level: int) -> "QuantumState":
        a = np.zeros(3, dtype=complex)
        a[level] = 1
        return cls(a)

    @classmethod
    def ground(cls) -> "QuantumState":
        return cls.basis(0)


@dataclass(frozen=True)
class DriveSegment:
    """Drive envelope in volts at the XY port, one sample per integration step.

    ``quadrature`` (optional) is the out-of-phase component; the complex drive
    is ``(envelope + j quadrature) * exp(j carrier_phase)``.
    """
    envelope: RealTrace
    carrier_phase: float = 0.0
    detuning: float = 0.0
    quadrature: Optional[RealTrace] = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.envelope.samples)):
            raise ValidationError("envelope samples must be finite")
        if self.quadrature is not None and self.quadrature.grid != self.envelope.grid:
            raise ValidationError("quadrature must share the envelope grid")

    def complex_drive(self) -> np.ndarray:
        r = self.envelope.samples.astype(complex)
        if self.quadrature is not None:
            r = r + 1j * self.quadrature.samples
        return r * np.exp(1j * self.carrier_phase)


def _stack_hamiltonians(params: TransmonParams, detuning: float,
                        drive: np.ndarray) -> np.ndarray:
    """H for each complex Rabi-rate sample ``drive`` (rad/s)."""
    drive = np.atleast_1d(np.asarray(drive, dtype=complex))
    h = np.zeros(drive.shape + (3, 3), dtype=complex)
    h[..., 1, 1] = detuning
    h[..., 2, 2] = 2 * detuning - params.delta
    h[..., 1, 0] = drive / 2
    h[..., 0, 1] = np.conj(drive) / 2
    if not params.two_level_limit:
        h[..., 2, 1] = SQRT2 * drive / 2
        h[..., 1, 2] = SQRT2 * np.conj(drive) / 2
    return h


def hamiltonian_rwa(params: TransmonParams, detuning: float, rabi: float,
                    phase: float) -> np.ndarray:
    """Rotating-frame Hamiltonian (rad/s) for Rabi rate ``rabi`` at drive phase ``phase``."""
    return _stack_hamiltonians(params, detuning, rabi * np.exp(1j * phase))[0]


def step_propagators(hams: np.ndarray, dt: float) -> np.ndarray:
    """``exp(-i H dt)`` for a stack of Hermitian matrices."""
    vals, vecs = np.linalg.eigh(hams)
    phases = np.exp(-1j * vals * dt)
    return np.einsum("...ij,...j,...kj->...ik", vecs, phases, vecs.conj())


def _ordered_product(us: np.ndarray) -> np.ndarray:
    """``U[n-1] @ ... @ U[1] @ U[0]`` by pairwise reduction."""
    while us.shape[0] > 1:
        n = us.shape[0]
        paired = us[1:n - n % 2:2] @ us[0:n - n % 2:2]
        if n % 2:
            paired = np.concatenate([paired, us[-1:]], axis=0)
        us = paired
    return us[0]


def _finish(psi: np.ndarray) -> QuantumState:
    norm = math.sqrt(float(np.vdot(psi, psi).real))
    if abs(norm - 1) >= NORM_TOL:
        raise NumericalError(f"state norm drifted to {norm!r}; step too large")
    return QuantumState(psi / norm)


def propagate_drive(state: QuantumState, drive: np.ndarray, dt: float,
                    params: TransmonParams, detuning: float = 0.0,
                    trajectory: bool = False):
    """Propagate under complex Rabi-rate samples ``drive`` (rad/s), each held ``dt``.

    Returns the final state, or ``(state, psi_history)`` with ``trajectory``
    where ``psi_history[n]`` is the state after step ``n`` (row 0 = input).
    """
    drive = np.asarray(drive, dtype=complex)
    if drive.ndim != 1 or drive.size == 0:
        raise ValidationError("drive must be a non-empty 1-D array")
    if not np.all(np.isfinite(drive)):
        raise ValidationError("drive samples must be finite")
    us = step_propagators(_stack_hamiltonians(params, detuning, drive), dt)
    psi0 = np.array(state.amplitudes)
    if not trajectory:
        return _finish(_ordered_product(us) @ psi0)
    history = np.empty((drive.size + 1, 3), dtype=complex)
    history[0] = psi = psi0
    for n, u in enumerate(us, start=1):
        psi = u @ psi
        history[n] = psi
    return _finish(psi), history


def propagate(state: QuantumState, segment: DriveSegment, params: TransmonParams,
              trajectory: bool = False):
    """Propagate through a drive segment; Rabi rate is ``drive_gain * envelope``."""
    drive = params.drive_gain * segment.complex_drive()
    return propagate_drive(state, drive, segment.envelope.grid.dt, params,
                           segment.detuning, trajectory)


def ideal_rotation(theta: float, phi: float) -> np.ndarray:
    """``exp(-i theta/2 (cos phi X + sin phi Y))``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * np.exp(-1j * phi) * s],
                     [-1j * np.exp(1j * phi) * s, c]])


def populations(state: QuantumState) -> Tuple[float, float, float]:
    p = np.abs(state.amplitudes) ** 2
    return float(p[0]), float(p[1]), float(p[2])


def bloch_coords(state: QuantumState) -> Tuple[float, float, float]:
    c0, c1 = state.amplitudes[0], state.amplitudes[1]
    p0, p1 = abs(c0) ** 2, abs(c1) ** 2
    w = p0 + p1
    if w <= 1e-300:
        raise UndefinedBlochError("state has no weight in the {|0>, |1>} subspace")
    rho01 = np.conj(c0) * c1
    return float(2 * rho01.real / w), float(2 * rho01.imag / w), float((p0 - p1) / w)


def rotation_angle(state: QuantumState) -> float:
    """Polar angle of the Bloch vector, i.e. the rotation applied to |0>."""
    x, y, z = bloch_coords(state)
    return math.atan2(math.hypot(x, y), z)


def trajectory_table(history: np.ndarray, dt: float, t0: float = 0.0) -> np.ndarray:
    """Rows of ``t, p0, p1, p2, x, y, z`` for a psi history."""
    p = np.abs(history) ** 2
    w = p[:, 0] + p[:, 1]
    rho01 = np.conj(history[:, 0]) * history[:, 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        x = 2 * rho01.real / w
        y = 2 * rho01.imag / w
        z = (p[:, 0] - p[:, 1]) / w
    t = t0 + np.arange(history.shape[0]) * dt
    return np.column_stack([t, p, x, y, z])
