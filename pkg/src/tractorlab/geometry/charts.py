"""Coordinate charts carrying a pseudo-Riemannian metric, and maps between them."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .._jax import jax, jnp
from ..lie_core import Signature

BOUNDARY_MARGIN = 1e-6


class DomainError(ValueError):
    """A point lies outside (or too close to the edge of) a chart domain."""


@dataclass(eq=False)
class MetricChart:
    """A coordinate box with a smooth metric evaluator.

    ``metric`` must be written with ``jax.numpy`` so that it can be
    differentiated in forward mode; it maps a point of shape ``(n,)`` to an
    ``(n, n)`` symmetric matrix.  Charts compare and hash by identity, which
    is what the per-chart compilation caches key on.
    """

    name: str
    signature: Signature
    metric: Callable
    lower: np.ndarray
    upper: np.ndarray
    description: str = ""

    def __post_init__(self):
        self.lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dim,)).copy()
        self.upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dim,)).copy()

    @property
    def dim(self) -> int:
        return self.signature.n

    def __repr__(self):
        return f"MetricChart({self.name!r})"

    def contains(self, x, margin: float = BOUNDARY_MARGIN) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x > self.lower + margin) and np.all(x < self.upper - margin))

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"{self.name}: expected a point of shape ({self.dim},), got {x.shape}")
        if not self.contains(x):
            raise DomainError(f"{self.name}: point {x} is outside the open domain")
        return x

    @cached_property
    def _metric_jit(self):
        return jax.jit(self.metric)

    def g(self, x) -> np.ndarray:
        return np.asarray(self._metric_jit(jnp.asarray(x, dtype=float)))

    def sample(self, rng: np.random.Generator, shrink: float = 0.8) -> np.ndarray:
        mid = 0.5 * (self.lower + self.upper)
        half = 0.5 * (self.upper - self.lower) * shrink
        return mid + rng.uniform(-1.0, 1.0, self.dim) * half

    def signature_at(self, x) -> tuple[int, int]:
        ev = np.linalg.eigvalsh(self.g(x))
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))


@dataclass(eq=False)
class ChartTransition:
    """Coordinate change ``forward: source -> target`` on an overlap region.

    ``overlap`` is a predicate on source coordinates.  Transitions are
    expected to be isometries of the two chart metrics; ``metric_defect``
    measures how far that holds at a point.
    """

    name: str
    source: MetricChart
    target: MetricChart
    forward: Callable
    inverse: Callable
    overlap: Callable = field(default=lambda x: True)

    @cached_property
    def _forward_jit(self):
        return jax.jit(self.forward)

    @cached_property
    def _jacobian_jit(self):
        return jax.jit(jax.jacfwd(self.forward))

    @cached_property
    def _inverse_jit(self):
        return jax.jit(self.inverse)

    def in_overlap(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if not self.source.contains(x) or not self.overlap(x):
            return False
        return self.target.contains(np.asarray(self._forward_jit(jnp.asarray(x))))

    def map_point(self, x) -> np.ndarray:
        return np.asarray(self._forward_jit(jnp.asarray(x, dtype=float)))

    def map_back(self, y) -> np.ndarray:
        return np.asarray(self._inverse_jit(jnp.asarray(y, dtype=float)))

    def jacobian(self, x) -> np.ndarray:
        return np.asarray(self._jacobian_jit(jnp.asarray(x, dtype=float)))

    def metric_defect(self, x) -> float:
        D = self.jacobian(x)
        pulled = D.T @ self.target.g(self.map_point(x)) @ D
        return float(np.max(np.abs(pulled - self.source.g(x))))


def transition_pushforward(t: ChartTransition, x, v) -> tuple[np.ndarray, np.ndarray]:
    """Image of the tangent vector ``v`` at ``x`` under the coordinate change."""
    x = np.asarray(x, dtype=float)
    if not t.in_overlap(x):
        raise DomainError(f"{t.name}: point {x} is not in the overlap")
    return t.map_point(x), t.jacobian(x) @ np.asarray(v, dtype=float)


def conformal_rescale(chart: MetricChart, upsilon: Callable, name: str | None = None) -> MetricChart:
    """The chart with metric ``exp(2 upsilon(x)) g(x)`` on the same box."""
    base = chart.metric

    def metric(x):
        return jnp.exp(2.0 * upsilon(x)) * base(x)

    return MetricChart(
        name=name or f"{chart.name}*exp(2U)",
        signature=chart.signature,
        metric=metric,
        lower=chart.lower,
        upper=chart.upper,
        description=f"conformal rescale of {chart.name}",
    )
