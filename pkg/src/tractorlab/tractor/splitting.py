"""Tractors in the splitting determined by a metric in the conformal class.

A tractor at a point is stored as the stacked column ``(rho, mu^1..mu^n, sigma)``,
with the densities ``rho`` (weight -1) and ``sigma`` (weight +1) and the
weighted vector ``mu`` (weight -1) all trivialised by the chart metric.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._jax import jax, jnp
from ..geometry.charts import MetricChart


@dataclass(frozen=True)
class TractorVector:
    rho: float
    mu: np.ndarray
    sigma: float
    basepoint: np.ndarray
    scale: str

    @classmethod
    def from_array(cls, U, basepoint, scale: str) -> "TractorVector":
        U = np.asarray(U, dtype=float)
        return cls(float(U[0]), U[1:-1].copy(), float(U[-1]), np.asarray(basepoint, dtype=float), scale)

    def to_array(self) -> np.ndarray:
        return np.concatenate([[self.rho], np.asarray(self.mu, dtype=float), [self.sigma]])


def tractor_metric_matrix(g) -> np.ndarray:
    """Gram matrix of ``h(U, U) = 2 rho sigma + g(mu, mu)`` in the stacked frame."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    H = np.zeros((n + 2, n + 2))
    H[0, n + 1] = H[n + 1, 0] = 1.0
    H[1:n + 1, 1:n + 1] = g
    return H


def tractor_metric_matrix_jnp(g):
    n = g.shape[0]
    H = jnp.zeros((n + 2, n + 2), dtype=g.dtype)
    H = H.at[0, n + 1].set(1.0).at[n + 1, 0].set(1.0)
    return H.at[1:n + 1, 1:n + 1].set(g)


def tractor_metric(chart: MetricChart, U: TractorVector, V: TractorVector) -> float:
    for W in (U, V):
        if W.scale != chart.name:
            raise ValueError(f"tractor is split in scale {W.scale!r}; convert to {chart.name!r} first")
    if not np.allclose(U.basepoint, V.basepoint, atol=1e-12):
        raise ValueError("tractors live over different points")
    H = tractor_metric_matrix(chart.g(U.basepoint))
    return float(U.to_array() @ H @ V.to_array())


def change_matrix(g, upsilon_grad, upsilon: float) -> np.ndarray:
    """Components in the splitting of ``exp(2U) g`` from those in the splitting of ``g``.

    This is the unipotent matrix with rows ``(1, -U_j, -|dU|^2/2)``,
    ``(0, delta, U^i)``, ``(0, 0, 1)`` (index raised with ``g``), followed by the
    weight factors ``exp(-U)``, ``exp(-U)``, ``exp(U)`` that move each slot
    into the trivialisation of the new scale.
    """
    g = np.asarray(g, dtype=float)
    dU = np.asarray(upsilon_grad, dtype=float)
    n = g.shape[0]
    up = np.linalg.solve(g, dU)
    M = np.eye(n + 2)
    M[0, 1:n + 1] = -dU
    M[0, n + 1] = -0.5 * dU @ up
    M[1:n + 1, n + 1] = up
    weights = np.r_[np.exp(-upsilon), np.full(n, np.exp(-upsilon)), np.exp(upsilon)]
    return weights[:, None] * M


def change_matrix_at(chart: MetricChart, x, upsilon) -> np.ndarray:
    """:func:`change_matrix` for a traceable rescaling function ``upsilon``."""
    xj = jnp.asarray(x, dtype=float)
    val, grad = jax.value_and_grad(upsilon)(xj)
    return change_matrix(chart.g(x), np.asarray(grad), float(val))


def convert(U: TractorVector, chart: MetricChart, upsilon, new_scale: str) -> TractorVector:
    """Re-express ``U`` in the splitting of ``exp(2 upsilon) g``."""
    M = change_matrix_at(chart, U.basepoint, upsilon)
    return TractorVector.from_array(M @ U.to_array(), U.basepoint, new_scale)
