"""Conformal densities, stored as their value in a chosen scale."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WeightedScalar:
    """A density of weight ``weight`` trivialised by the metric labelled ``scale``.

    Under ``g -> exp(2 U) g`` its value picks up ``exp(weight * U)``.
    """

    value: float
    weight: float
    scale: str

    def __post_init__(self):
        if (2 * self.weight) != int(2 * self.weight):
            raise ValueError("density weights are integers or half-integers")

    def rescaled(self, upsilon: float, new_scale: str) -> "WeightedScalar":
        return WeightedScalar(self.value * float(np.exp(self.weight * upsilon)), self.weight, new_scale)

    def in_scale(self, scale: str) -> float:
        if scale != self.scale:
            raise ValueError(f"density is expressed in scale {self.scale!r}, not {scale!r}")
        return self.value
