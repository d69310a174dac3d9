"""Readout confusion and finite-shot sampling.

Shots are drawn from a Philox (counter-based) generator keyed by
``SeedSequence([seed, *stream])``, so each sweep point owns an independent
stream and results do not depend on evaluation order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ConfusionMatrix:
    e0: float = 0.024  # P(read 1 | true 0)
    e1: float = 0.068  # P(read 0 | true 1)

    def __post_init__(self):
        if not (0 <= self.e0 <= 1 and 0 <= self.e1 <= 1):
            raise ValidationError("readout error rates must lie in [0, 1]")


@dataclass(frozen=True)
class ShotResult:
    n_shots: int
    f1_measured: float

    @property
    def f0_measured(self) -> float:
        return 1.0 - self.f1_measured


def _check_prob(p: float, name: str = "probability") -> float:
    p = float(p)
    # tolerate round-off from propagation
    if -1e-12 <= p < 0:
        p = 0.0
    elif 1 < p <= 1 + 1e-12:
        p = 1.0
    if not 0 <= p <= 1:
        raise ValidationError(f"{name} {p} outside [0, 1]")
    return p


def readout_excited(pops: Sequence[float]) -> float:
    """True population read as ``1``: leakage into |2> reads as |1>."""
    if len(pops) == 3:
        return _check_prob(pops[1] + pops[2])
    return _check_prob(pops[1])


def apply_confusion(p1_true: float, cm: ConfusionMatrix) -> float:
    p = _check_prob(p1_true, "p1_true")
    return p * (1 - cm.e1) + (1 - p) * cm.e0


def invert_confusion(p1_measured: float, cm: ConfusionMatrix) -> float:
    """Unclipped inverse of :func:`apply_confusion` (needs ``e0 + e1 != 1``)."""
    denom = 1 - cm.e0 - cm.e1
    if denom == 0:
        raise ValidationError("confusion matrix is singular (e0 + e1 = 1)")
    return (float(p1_measured) - cm.e0) / denom


def shot_rng(seed: int, stream: Union[int, Tuple[int, ...]] = ()) -> np.random.Generator:
    key = (stream,) if isinstance(stream, (int, np.integer)) else tuple(stream)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, key)])))


def sample_shots(p1_meas: float, n: int, rng_seed: int,
                 stream: Union[int, Tuple[int, ...]] = ()) -> ShotResult:
    p = _check_prob(p1_meas, "p1_meas")
    if int(n) != n or n < 1:
        raise ValidationError("need at least one shot")
    ones = shot_rng(rng_seed, stream).binomial(int(n), p)
    return ShotResult(int(n), ones / int(n))
