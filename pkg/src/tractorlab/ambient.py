"""First-order ambient metric and the ambient picture of tractors.

Coordinates on the ambient space are ``(t, x^1..x^n, r)`` with ``t > 0`` the
fibre coordinate of the metric bundle and ``r`` the transverse coordinate::

    g~ = 2 r dt^2 + 2 t dt dr + t^2 (g + 2 r P)_ij dx^i dx^j

A tractor at ``x`` is a vector field along ``{(t, x, 0)}`` homogeneous of
degree -1 under ``t -> s t``; it is recorded by its value at ``t = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._jax import jax, jnp
from .geometry.charts import MetricChart
from .geometry.curvature import christoffel, ricci, schouten
from .lie_core import Signature
from .tractor.connection import connection_matrix
from .tractor.splitting import tractor_metric_matrix

RHO_MAX = 0.1


class FrameError(ArithmeticError):
    pass


@dataclass(eq=False)
class AmbientChart:
    base: MetricChart
    chart: MetricChart
    rho_max: float = RHO_MAX

    @property
    def dim(self) -> int:
        return self.base.dim + 2

    def point(self, t: float, x, r: float = 0.0) -> np.ndarray:
        return np.concatenate([[t], np.asarray(x, dtype=float), [r]])

    def g(self, X) -> np.ndarray:
        return self.chart.g(X)

    @cached_property
    def _christoffel(self):
        return jax.jit(lambda X: christoffel(self.chart.metric, X))

    @cached_property
    def _ricci(self):
        return jax.jit(lambda X: ricci(self.chart.metric, X))

    def christoffel(self, X) -> np.ndarray:
        return np.asarray(self._christoffel(jnp.asarray(X, dtype=float)))

    def ricci(self, X) -> np.ndarray:
        return np.asarray(self._ricci(jnp.asarray(X, dtype=float)))


def ambient_metric(chart: MetricChart, rho_max: float = RHO_MAX) -> AmbientChart:
    chart.signature.require_geometric()
    base = chart.metric
    n = chart.dim

    def metric(X):
        t, x, r = X[0], X[1:n + 1], X[n + 1]
        G = jnp.zeros((n + 2, n + 2), dtype=X.dtype)
        G = G.at[0, 0].set(2.0 * r)
        G = G.at[0, n + 1].set(t).at[n + 1, 0].set(t)
        return G.at[1:n + 1, 1:n + 1].set(t * t * (base(x) + 2.0 * r * schouten(base, x)))

    sig = chart.signature
    amb = MetricChart(
        name=f"ambient[{chart.name}]",
        signature=Signature(sig.p + 1, sig.q + 1),
        metric=metric,
        lower=np.r_[0.05, chart.lower, -rho_max],
        upper=np.r_[20.0, chart.upper, rho_max],
        description=f"first-order ambient metric over {chart.name}",
    )
    return AmbientChart(chart, amb, rho_max)


def tangential_ricci(A: AmbientChart, x) -> tuple[float, float]:
    """``(max |Ric_ab| over pairs other than (r, r), |Ric_rr|)`` at ``(1, x, 0)``."""
    x = A.base.check_point(x)
    Ric = A.ricci(A.point(1.0, x))
    mask = np.ones_like(Ric, dtype=bool)
    mask[-1, -1] = False
    return float(np.max(np.abs(Ric[mask]))), float(abs(Ric[-1, -1]))


def tangential_ricci_check(A: AmbientChart, x) -> float:
    return tangential_ricci(A, x)[0]


def tractor_frame(A: AmbientChart, x, t: float = 1.0) -> np.ndarray:
    """Columns: ambient vectors at ``(t, x, 0)`` matching the ``rho``, ``mu^i``, ``sigma`` slots.

    ``rho`` slot: ``T / t = d_t``; ``mu`` slots: coordinate lifts ``d_i / t``;
    ``sigma`` slot: the null multiple of ``d_r`` pairing to one with ``d_t``.
    Every column is homogeneous of degree -1.
    """
    n = A.base.dim
    G = A.g(A.point(t, x))
    pair = G[0, n + 1]
    if abs(pair) < 1e-12:
        raise FrameError("g~(T, d_r) vanishes; the ambient frame cannot be normalised")
    if abs(G[n + 1, n + 1]) > 1e-12:
        raise FrameError("d_r is not null; the ambient metric is not in normal form")
    F = np.zeros((n + 2, n + 2))
    F[0, 0] = 1.0
    F[1:n + 1, 1:n + 1] = np.eye(n) / t
    F[n + 1, n + 1] = 1.0 / pair
    return F


def homogeneous_extension(U, t: float) -> np.ndarray:
    """Ambient components at ``(t, x, 0)`` of the degree -1 field with tractor components ``U``."""
    U = np.asarray(U, dtype=float)
    out = U / t
    out[0] = U[0]
    return out


def ambient_connection_matrix(A: AmbientChart, x, v) -> np.ndarray:
    """Ambient Levi-Civita derivative along the horizontal lift of ``v``, in the tractor frame."""
    x = A.base.check_point(x)
    v = np.asarray(v, dtype=float)
    X = A.point(1.0, x)
    Gam = A.christoffel(X)
    V = np.r_[0.0, v, 0.0]
    F = tractor_frame(A, x)
    eps = 1e-6
    dF = (tractor_frame(A, x + eps * v) - tractor_frame(A, x - eps * v)) / (2 * eps)
    GV = np.einsum("abc,b->ac", Gam, V)
    return np.linalg.solve(F, dF + GV @ F)


def ambient_connection_compare(A: AmbientChart, x, v) -> float:
    """Largest entry of the difference between the ambient and the splitting connection matrices."""
    amb = ambient_connection_matrix(A, x, v)
    beg = connection_matrix(A.base, x, v).matrix
    return float(np.max(np.abs(amb - beg)))


def ambient_metric_compare(A: AmbientChart, x) -> float:
    """``|F^T g~ F - h|`` at ``(1, x, 0)`` with ``F`` the tractor frame."""
    x = A.base.check_point(x)
    F = tractor_frame(A, x)
    G = A.g(A.point(1.0, x))
    return float(np.max(np.abs(F.T @ G @ F - tractor_metric_matrix(A.base.g(x)))))
