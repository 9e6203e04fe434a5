"""Parallel transport of tractors along chart curves, and holonomy.

Transport solves ``U' + A(x(t), x'(t)) U = 0`` with classical RK4 at a fixed
step.  The integration loop is compiled once per (chart, curve kind) pair.
Frames are never re-orthonormalised; the drift of the tractor metric along
the way is returned as a diagnostic instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .._jax import jax, jnp
from ..geometry.charts import ChartTransition, MetricChart
from ..geometry.library import get_chart, get_transition
from .connection import connection_kernel
from .splitting import TractorVector, tractor_metric_matrix, tractor_metric_matrix_jnp

DEFAULT_STEPS_PER_UNIT = 1000
ENDPOINT_TOL = 1e-10


class StepSizeError(ArithmeticError):
    """Halving the step moved the answer by more than the allowed amount."""


# --- curve kinds -------------------------------------------------------------
# Each kind is a hashable callable ``(t, params) -> x`` written with jax.numpy.

@dataclass(frozen=True)
class Line:
    """``params = [a, b]``: ``x = a + t (b - a)``."""

    def __call__(self, t, params):
        return params[0] + t * (params[1] - params[0])


@dataclass(frozen=True)
class Poly:
    """``params[k]`` is the coefficient of ``t**k``."""

    def __call__(self, t, params):
        powers = t ** jnp.arange(params.shape[0])
        return powers @ params


@dataclass(frozen=True)
class Arc:
    """``params = [c, a, b]``: ``x = c + cos(t) a + sin(t) b``."""

    def __call__(self, t, params):
        return params[0] + jnp.cos(t) * params[1] + jnp.sin(t) * params[2]


def _stereo(z):
    return z[:-1] / (1.0 - z[-1])


@dataclass(frozen=True)
class GreatCircles:
    """Great circles in both factors of S^p x S^q, read in the north-north chart.

    ``params`` is the flat concatenation ``(z0_u, z1_u, z0_w, z1_w)`` of two
    orthonormal pairs in R^{p+1} and R^{q+1}; ``t`` is the angle.
    """

    p: int
    q: int

    def __call__(self, t, params):
        p1, q1 = self.p + 1, self.q + 1
        z0u, z1u = params[:p1], params[p1:2 * p1]
        z0w, z1w = params[2 * p1:2 * p1 + q1], params[2 * p1 + q1:]
        u = _stereo(jnp.cos(t) * z0u + jnp.sin(t) * z1u)
        w = _stereo(jnp.cos(t) * z0w + jnp.sin(t) * z1w)
        return jnp.concatenate([u, w])


CURVE_KINDS = {"line": Line, "poly": Poly, "arc": Arc, "great_circles": GreatCircles}


@dataclass(eq=False)
class Segment:
    chart: MetricChart
    curve: object
    params: np.ndarray
    t0: float = 0.0
    t1: float = 1.0

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)

    def point(self, t) -> np.ndarray:
        return np.asarray(self.curve(jnp.asarray(float(t)), jnp.asarray(self.params)))

    @property
    def start(self) -> np.ndarray:
        return self.point(self.t0)

    @property
    def end(self) -> np.ndarray:
        return self.point(self.t1)


@dataclass(eq=False)
class LoopPath:
    """Segments joined by chart transitions; ``closing`` identifies the last point with the first.

    ``handoffs[i]`` is the transition from segment ``i`` to segment ``i + 1``
    (``None`` when both lie in the same chart).
    """

    segments: list
    handoffs: list = field(default_factory=list)
    closing: ChartTransition | None = None
    closed: bool = False

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a path needs at least one segment")
        if not self.handoffs:
            self.handoffs = [None] * (len(self.segments) - 1)
        if len(self.handoffs) != len(self.segments) - 1:
            raise ValueError("need one hand-off per pair of consecutive segments")
        for i, (a, b) in enumerate(zip(self.segments, self.segments[1:])):
            t = self.handoffs[i]
            if t is None and a.chart is not b.chart:
                t = self.handoffs[i] = get_transition(a.chart.name, b.chart.name)
            end = a.end if t is None else t.map_point(a.end)
            if np.max(np.abs(end - b.start)) > ENDPOINT_TOL:
                raise ValueError(f"segment {i} does not end where segment {i + 1} starts")
        if self.closed:
            last = self.segments[-1]
            end = last.end if self.closing is None else self.closing.map_point(last.end)
            if self.closing is not None and self.closing.target is not self.segments[0].chart:
                raise ValueError("closing map must land in the first chart")
            if np.max(np.abs(end - self.segments[0].start)) > ENDPOINT_TOL:
                raise ValueError("path is flagged closed but does not return to its start")

    @property
    def start(self) -> np.ndarray:
        return self.segments[0].start

    @property
    def chart(self) -> MetricChart:
        return self.segments[0].chart


def segment(chart: MetricChart | str, kind: str, params, t_range=(0.0, 1.0)) -> Segment:
    if isinstance(chart, str):
        chart = get_chart(chart)
    if kind == "great_circles":
        curve = GreatCircles(chart.signature.p, chart.signature.q)
    else:
        curve = CURVE_KINDS[kind]()
    return Segment(chart, curve, np.asarray(params, dtype=float), float(t_range[0]), float(t_range[1]))


def path_from_spec(spec: list, closed: bool = False, closing: ChartTransition | None = None) -> LoopPath:
    """Build a path from ``[{"chart", "kind", "params", "t_range"}, ...]``."""
    segs = [segment(s["chart"], s["kind"], s["params"], s.get("t_range", (0.0, 1.0))) for s in spec]
    return LoopPath(segs, closed=closed, closing=closing)


def tractor_frame_change(t: ChartTransition, x) -> np.ndarray:
    """Tractor components across an isometric chart change: ``diag(1, D phi, 1)``."""
    n = t.source.dim
    F = np.eye(n + 2)
    F[1:n + 1, 1:n + 1] = t.jacobian(x)
    return F


# --- integrator ---------------------------------------------------------------

@dataclass(frozen=True)
class ConformalFamily:
    """``U(x; theta) = c0 + c.x + x.Q.x / 2 + amp sin(k.x)`` with ``theta`` packed flat.

    Lets one compiled integrator serve many rescalings ``exp(2U) g``.
    """

    n: int

    @property
    def size(self) -> int:
        return 2 + 2 * self.n + self.n * self.n

    def unpack(self, theta):
        n = self.n
        return theta[0], theta[1:n + 1], theta[n + 1:n + 1 + n * n].reshape(n, n), theta[-n - 1], theta[-n:]

    def __call__(self, x, theta):
        c0, c, Q, amp, k = self.unpack(theta)
        return c0 + c @ x + 0.5 * x @ Q @ x + amp * jnp.sin(k @ x)

    def sample(self, rng: np.random.Generator, scale: float = 0.3) -> np.ndarray:
        n = self.n
        Q = rng.normal(scale=scale, size=(n, n))
        return np.concatenate([[rng.normal(scale=scale)], rng.normal(scale=scale, size=n),
                               (0.5 * (Q + Q.T)).ravel(), [rng.normal(scale=scale)], rng.normal(size=n)])

    def at(self, theta):
        """Plain ``x -> U(x)`` for a fixed ``theta``."""
        th = jnp.asarray(theta, dtype=float)
        return lambda x: self(x, th)


@lru_cache(maxsize=None)
def _integrator(chart: MetricChart, curve, family: ConformalFamily | None = None):
    """Compiled RK4 loop; with ``family`` the metric is ``exp(2 family(x, theta)) g``."""

    def metric_for(theta):
        if family is None:
            return chart.metric
        return lambda x: jnp.exp(2.0 * family(x, theta)) * chart.metric(x)

    def gen(t, params, theta):
        x, v = jax.jvp(lambda s: curve(s, params), (t,), (jnp.ones_like(t),))
        return connection_kernel(metric_for(theta), x, v)

    def gram(U, t, params, theta):
        H = tractor_metric_matrix_jnp(metric_for(theta)(curve(t, params)))
        return U.T @ H @ U

    gen2 = jax.vmap(gen, in_axes=(0, None, None))

    def run(U0, params, theta, t0, t1, steps):
        h = (t1 - t0) / steps
        G0 = gram(U0, t0, params, theta)

        # k2 and k3 share the midpoint matrix; the endpoint matrix is carried to the next step
        def body(i, carry):
            U, A0, drift = carry
            t = t0 + i * h
            Am, A1 = gen2(jnp.stack([t + h / 2, t + h]), params, theta)
            k1 = -A0 @ U
            k2 = -Am @ (U + h / 2 * k1)
            k3 = -Am @ (U + h / 2 * k2)
            k4 = -A1 @ (U + h * k3)
            U = U + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            drift = jnp.maximum(drift, jnp.max(jnp.abs(gram(U, t + h, params, theta) - G0)))
            return U, A1, drift

        init = (U0, gen(t0, params, theta), jnp.zeros((), dtype=U0.dtype))
        U, _, drift = jax.lax.fori_loop(0, steps, body, init)
        return U, drift

    return jax.jit(run)


def _segment_steps(seg: Segment, steps_per_unit: int) -> int:
    return max(1, int(np.ceil(abs(seg.t1 - seg.t0) * steps_per_unit)))


def _run(path: LoopPath, U0: np.ndarray, steps_per_unit: int, close: bool, family=None, theta=None):
    U = np.asarray(U0, dtype=float)
    th = jnp.zeros(0) if family is None else jnp.asarray(theta, dtype=float)
    drift = 0.0
    for i, seg in enumerate(path.segments):
        if i > 0 and path.handoffs[i - 1] is not None:
            U = tractor_frame_change(path.handoffs[i - 1], path.segments[i - 1].end) @ U
        run = _integrator(seg.chart, seg.curve, family)
        Uj, d = run(jnp.asarray(U), jnp.asarray(seg.params), th, float(seg.t0), float(seg.t1),
                    _segment_steps(seg, steps_per_unit))
        U = np.asarray(Uj)
        drift = max(drift, float(d))
    if close and path.closing is not None:
        U = tractor_frame_change(path.closing, path.segments[-1].end) @ U
    return U, drift


@dataclass(frozen=True)
class TransportResult:
    value: np.ndarray
    metric_drift: float
    halving_error: float | None
    steps_per_unit: int


def transport_array(path: LoopPath, U0, steps_per_unit: int = DEFAULT_STEPS_PER_UNIT,
                    tol: float | None = None, estimate_error: bool = True,
                    close: bool = True, family: ConformalFamily | None = None,
                    theta=None) -> TransportResult:
    """Transport a stacked tractor (vector or matrix of columns) along ``path``.

    With ``estimate_error`` the transport is repeated at half the step and the
    difference reported; if ``tol`` is given and that difference exceeds
    ``10 * tol`` a :class:`StepSizeError` is raised.  ``family``/``theta``
    replace each chart metric ``g`` by ``exp(2 family(x, theta)) g``.
    """
    if family is not None and any(seg.chart is not path.chart for seg in path.segments):
        raise ValueError("rescaled transport is only supported within one chart")
    U0 = np.asarray(U0, dtype=float)
    squeeze = U0.ndim == 1
    U0m = U0[:, None] if squeeze else U0
    U, drift = _run(path, U0m, steps_per_unit, close, family, theta)
    err = None
    if estimate_error:
        U2, _ = _run(path, U0m, 2 * steps_per_unit, close, family, theta)
        err = float(np.max(np.abs(U2 - U)))
        if tol is not None and err > 10 * tol:
            raise StepSizeError(f"halving the step changed the transport by {err:.3e} (> 10 x {tol:.1e})")
    return TransportResult(U[:, 0] if squeeze else U, drift, err, steps_per_unit)


def parallel_transport(path: LoopPath, U0: TractorVector | np.ndarray, **kwargs):
    """Parallel transport ``U0`` from the start of ``path`` to its end.

    A :class:`TractorVector` comes back as a :class:`TractorVector` in the
    splitting of the final chart; arrays come back as arrays.
    """
    if isinstance(U0, TractorVector):
        if U0.scale != path.chart.name:
            raise ValueError(f"initial tractor is split in {U0.scale!r}, path starts in {path.chart.name!r}")
        res = transport_array(path, U0.to_array(), **kwargs)
        last = path.segments[-1]
        end, chart = last.end, last.chart
        if path.closing is not None and kwargs.get("close", True):
            end, chart = path.closing.map_point(end), path.closing.target
        return TractorVector.from_array(res.value, end, chart.name)
    return transport_array(path, U0, **kwargs).value


def holonomy(loop: LoopPath, steps_per_unit: int = DEFAULT_STEPS_PER_UNIT,
             tol: float | None = None) -> np.ndarray:
    """Transport of the basepoint splitting frame once around a closed loop."""
    if not loop.closed:
        raise ValueError("holonomy needs a closed loop")
    N = loop.chart.dim + 2
    return transport_array(loop, np.eye(N), steps_per_unit=steps_per_unit, tol=tol,
                           estimate_error=tol is not None).value


def orthogonality_defect(M: np.ndarray, H: np.ndarray) -> float:
    return float(np.max(np.abs(M.T @ H @ M - H)))


def holonomy_metric_defect(loop: LoopPath, Hol: np.ndarray) -> float:
    return orthogonality_defect(Hol, tractor_metric_matrix(loop.chart.g(loop.start)))
