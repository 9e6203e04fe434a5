"""Homogeneous models G/P for the conformal group and their associated bundles.

Points of ``S^p x S^q`` are stored as the stacked unit vectors ``z = (a, b)``
with ``a`` in ``R^{p+1}`` and ``b`` in ``R^{q+1}``.  The linear isometry

    L(a, b) = ((a_0 + b_0)/2, a_1..a_p, b_1..b_q, a_0 - b_0)

carries ``diag(I, -I)`` to the form ``J`` of :mod:`tractorlab.lie_core`, so
``z -> L(z)`` identifies ``S^p x S^q`` with the null rays and the quadric with
the null lines.  The base point ``(e_0, e_0)`` goes to ``e_0``.

Associated-bundle transport uses local sections ``s`` of ``G -> G/P``; in the
trivialisation by ``s`` the Maurer-Cartan connection reads
``v' = -rho(s^-1 s') v``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._jax import jax, jnp
from .geometry.library import deck_transition
from .lie_core import GROUP_TOL, Representation, Signature, membership, rep_algebra, rep_group
from .tractor.transport import CURVE_KINDS, DEFAULT_STEPS_PER_UNIT, LoopPath, holonomy, segment

PIVOT_TOL = 1e-3
MODEL_VARIANTS = ("P_ray", "P_line", "SP_ray", "SP_line")
SUBDIVISIONS = 6
MONODROMY_SAMPLES = 1000
MONODROMY_REFINEMENTS = 3


class TopologyError(ValueError):
    """The requested loop does not exist on this model."""


class SectionError(ValueError):
    """A local section was evaluated where its pivot coordinate degenerates."""


class TrackingError(ArithmeticError):
    """Line tracking stayed ambiguous after refinement."""


def _is_line(variant: str) -> bool:
    return variant.endswith("line")


def _check_variant(variant: str):
    if variant not in MODEL_VARIANTS:
        raise ValueError(f"homogeneous models exist for {MODEL_VARIANTS}, not {variant!r}")


# --- model spaces -------------------------------------------------------------

@dataclass(frozen=True)
class ModelSpace:
    """``product_sphere`` (null rays), ``quadric`` (null lines) or ``round_sphere`` (q = 0)."""

    kind: str
    p: int
    q: int

    def __post_init__(self):
        if self.kind not in ("product_sphere", "quadric", "round_sphere"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "round_sphere" and self.q != 0:
            raise ValueError("round_sphere(n) is the quadric of signature (n, 0)")
        Signature(self.p, self.q).require_geometric()

    @property
    def signature(self) -> Signature:
        return Signature(self.p, self.q)

    @property
    def chart_name(self) -> str:
        if self.p == 0 or self.q == 0:
            return f"sphere({self.p + self.q})"
        return f"product_sphere({self.p},{self.q})"

    @property
    def deck(self):
        """The deck involution ``z -> -z`` in the base chart, for quadrics with ``pq != 0``."""
        if self.kind == "product_sphere" or self.p * self.q == 0:
            return None
        return deck_transition(self.p, self.q)

    @property
    def variants(self) -> tuple:
        return ("P_ray", "SP_ray") if self.kind == "product_sphere" else ("P_line", "SP_line")

    def base_point(self) -> np.ndarray:
        return np.concatenate([np.eye(self.p + 1)[0], np.eye(self.q + 1)[0]])

    def split(self, z):
        z = np.asarray(z, dtype=float)
        return z[:self.p + 1], z[self.p + 1:]

    def contains(self, z, tol: float = 1e-10) -> bool:
        a, b = self.split(z)
        return len(z) == self.p + self.q + 2 and abs(a @ a - 1) < tol and abs(b @ b - 1) < tol


def embed(a, b):
    """``L(a, b)``; works on numpy and jax arrays."""
    xp = jnp if isinstance(a, jax.Array) or isinstance(b, jax.Array) else np
    return xp.concatenate([xp.stack([(a[0] + b[0]) / 2]), a[1:], b[1:], xp.stack([a[0] - b[0]])])


def null_ray_of(model: ModelSpace, z, line: bool | None = None) -> np.ndarray:
    """Null vector representing the point ``z``.

    For quadric points (``line=True``, the default on quadrics) the
    representative is normalised so that its first nonzero entry is positive.
    """
    if not model.contains(z):
        raise ValueError("point is not on S^p x S^q")
    a, b = model.split(z)
    v = embed(a, b)
    if line is None:
        line = model.kind != "product_sphere"
    if line:
        lead = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
        v = v * np.sign(lead)
    return v


# --- local sections -------------------------------------------------------------

def _complement(a, pivot: int):
    """Orthonormal basis of ``a^perp`` from the standard basis with ``e_pivot`` dropped."""
    k = a.shape[0]
    out = []
    for i in range(k):
        if i == pivot:
            continue
        v = jnp.eye(k, dtype=a.dtype)[i] - a[i] * a
        for u in out:
            v = v - (u @ v) * u
        out.append(v / jnp.linalg.norm(v))
    return out


@dataclass(frozen=True)
class LocalSection:
    """``z -> s(z)`` in ``G`` with ``s(z) e_0 = L(z)``.

    Columns: ``L(z)``, ``L(u_i, 0)``, ``L(0, w_j)``, ``L(a, -b)/2`` with
    ``u``, ``w`` Gram-Schmidt completions of ``a``, ``b``.  For the special
    variants one column may be negated to bring the determinant to one.
    """

    p: int
    q: int
    variant: str = field(compare=False)
    pivot_a: int = 0
    pivot_b: int = 0
    flip: bool = False
    center: tuple = field(default=(), compare=False, hash=False)

    @property
    def signature(self) -> Signature:
        return Signature(self.p, self.q)

    def kernel(self, z):
        p = self.p
        a, b = z[:p + 1], z[p + 1:]
        cols = [embed(a, b)]
        cols += [embed(u, jnp.zeros_like(b)) for u in _complement(a, self.pivot_a)]
        cols += [embed(jnp.zeros_like(a), w) for w in _complement(b, self.pivot_b)]
        cols.append(embed(a, -b) / 2)
        S = jnp.stack(cols, axis=1)
        if self.flip:
            S = S.at[:, 1].multiply(-1.0)
        return S

    @property
    def _jit(self):
        return _section_jit(self)

    def degeneracy(self, z) -> float:
        z = np.asarray(z, dtype=float)
        return min(abs(z[self.pivot_a]), abs(z[self.p + 1 + self.pivot_b]))

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.degeneracy(z) < PIVOT_TOL:
            raise SectionError(f"pivot coordinate degenerates at z = {np.array2string(z, precision=4)}")
        return np.asarray(self._jit(jnp.asarray(z)))


@lru_cache(maxsize=None)
def _section_jit(s: LocalSection):
    return jax.jit(s.kernel)


def local_section(variant: str, model: ModelSpace, center=None) -> LocalSection:
    """Section on the region around ``center`` (the base point by default).

    Pivots are the largest-magnitude coordinates of ``a`` and ``b`` at the
    centre, lowest index on ties.
    """
    _check_variant(variant)
    center = model.base_point() if center is None else np.asarray(center, dtype=float)
    if not model.contains(center):
        raise ValueError("region centre is not on S^p x S^q")
    a, b = model.split(center)
    s = LocalSection(model.p, model.q, variant, int(np.argmax(np.abs(a))), int(np.argmax(np.abs(b))),
                     center=tuple(center))
    if variant.startswith("S") and np.linalg.det(s(center)) < 0:
        if model.p == 0:
            raise SectionError("cannot fix the orientation of a section without a sphere factor of dimension >= 1")
        s = LocalSection(s.p, s.q, variant, s.pivot_a, s.pivot_b, True, center=s.center)
    return s


def gauge(s_from: LocalSection, s_to: LocalSection, z, z_to=None) -> np.ndarray:
    """``g`` with ``s_from(z) = s_to(z_to) g``: components in ``s_from`` map to ``s_to`` by ``rho(g)``."""
    z_to = z if z_to is None else z_to
    g = np.linalg.solve(s_to(z_to), s_from(z))
    if not membership(g, s_from.variant, s_from.signature, tol=GROUP_TOL):
        raise SectionError(f"transition {np.array2string(g, precision=3)} is not in {s_from.variant}")
    return g


# --- model curves and loops ------------------------------------------------------

def _unstereo(x):
    r2 = jnp.dot(x, x)
    return jnp.concatenate([2.0 * x / (1.0 + r2), jnp.stack([(r2 - 1.0) / (r2 + 1.0)])])


@dataclass(frozen=True)
class GreatCircleLift:
    """``a = cos t z0_u + sin t z1_u``, ``b = cos t z0_w + sin t z1_w`` (same params as the chart kind)."""

    p: int
    q: int

    def __call__(self, t, params):
        p1, q1 = self.p + 1, self.q + 1
        z0u, z1u = params[:p1], params[p1:2 * p1]
        z0w, z1w = params[2 * p1:2 * p1 + q1], params[2 * p1 + q1:]
        return jnp.concatenate([jnp.cos(t) * z0u + jnp.sin(t) * z1u, jnp.cos(t) * z0w + jnp.sin(t) * z1w])


@dataclass(frozen=True)
class ChartLift:
    """A chart curve in north stereographic coordinates, lifted to ``S^p x S^q``."""

    p: int
    q: int
    inner: object

    def __call__(self, t, params):
        x = self.inner(t, params)
        u, w = x[:self.p], x[self.p:]
        b = _unstereo(w) if self.q > 0 else jnp.ones((1,), dtype=x.dtype)
        a = _unstereo(u) if self.p > 0 else jnp.ones((1,), dtype=x.dtype)
        return jnp.concatenate([a, b])


@dataclass(frozen=True)
class Piece:
    kind: str
    params: tuple
    t0: float
    t1: float


@dataclass(frozen=True)
class ModelLoop:
    """Lift to ``S^p x S^q`` of a path in the model, with how its end is glued to its start.

    ``closure`` is ``"identity"`` (closed upstairs), ``"antipodal"`` (ends at
    ``-z_0``; closed only in the quadric) or ``"open"``.
    """

    model: ModelSpace
    pieces: tuple
    closure: str = "identity"
    name: str = "custom"

    def curve(self, piece: Piece):
        if piece.kind == "great_circles":
            return GreatCircleLift(self.model.p, self.model.q)
        return ChartLift(self.model.p, self.model.q, CURVE_KINDS[piece.kind]())

    def point(self, piece: Piece, t) -> np.ndarray:
        return np.asarray(self.curve(piece)(jnp.asarray(float(t)), jnp.asarray(piece.params)))

    @property
    def start(self) -> np.ndarray:
        return self.point(self.pieces[0], self.pieces[0].t0)

    @property
    def end(self) -> np.ndarray:
        return self.point(self.pieces[-1], self.pieces[-1].t1)

    def tractor_path(self) -> LoopPath:
        """The same loop in the model's chart, ready for tractor transport."""
        chart = self.model.chart_name
        segs = []
        for pc in self.pieces:
            segs.append(segment(chart, pc.kind, np.asarray(pc.params), (pc.t0, pc.t1)))
        if self.closure == "antipodal":
            if self.model.deck is None:
                raise TopologyError(f"{self.model} has no deck identification")
            return LoopPath(segs, closing=self.model.deck, closed=True)
        return LoopPath(segs, closed=self.closure == "identity")

    def samples(self, count: int) -> np.ndarray:
        """``count`` points spread over the pieces in proportion to their parameter length."""
        lengths = np.array([abs(pc.t1 - pc.t0) for pc in self.pieces])
        out = []
        for pc, ln in zip(self.pieces, lengths):
            k = max(2, int(np.ceil(count * ln / lengths.sum())))
            f = jax.jit(jax.vmap(lambda t, c=self.curve(pc): c(t, jnp.asarray(pc.params))))
            out.append(np.asarray(f(jnp.linspace(pc.t0, pc.t1, k))))
        return np.concatenate(out)


LOOP_IDS = ("antipodal", "control-arc", "control-backtrack")


def _great_circle_params(p: int, q: int) -> tuple:
    eu, ew = np.eye(p + 1), np.eye(q + 1)
    return tuple(np.concatenate([eu[0], -eu[p], ew[0], -ew[q]]))


def model_loop(model: ModelSpace, loop_id: str) -> ModelLoop:
    """The canonical loops: the antipodal great-circle lift and two contractible controls.

    ``control-arc`` is a small circle in the chart mixing both factors;
    ``control-backtrack`` runs two thirds of the way along the antipodal lift
    and returns on itself.
    """
    p, q = model.p, model.q
    if loop_id == "antipodal":
        if p * q == 0:
            raise TopologyError(f"the quadric of signature ({p},{q}) is a sphere; it has no noncontractible loop")
        pc = Piece("great_circles", _great_circle_params(p, q), 0.0, float(np.pi))
        closure = "antipodal" if model.kind != "product_sphere" else "open"
        return ModelLoop(model, (pc,), closure, loop_id)
    if loop_id == "control-arc":
        n = p + q
        c, a, b = np.zeros(n), np.zeros(n), np.zeros(n)
        c[0] = 0.4
        c[-1] = 0.3
        a[0] = 0.5
        b[-1] = 0.5
        arc = tuple(tuple(r) for r in (c, a, b))
        return ModelLoop(model, (Piece("arc", arc, 0.0, 2 * np.pi),), "identity", loop_id)
    if loop_id == "control-backtrack":
        if p * q == 0:
            raise TopologyError("great-circle loops need both sphere factors")
        par = _great_circle_params(p, q)
        t1 = 2 * np.pi / 3
        return ModelLoop(model, (Piece("great_circles", par, 0.0, t1), Piece("great_circles", par, t1, 0.0)),
                         "identity", loop_id)
    raise KeyError(f"unknown loop id {loop_id!r}; known: {LOOP_IDS}")


# --- Maurer-Cartan transport --------------------------------------------------------

@lru_cache(maxsize=None)
def _mc_integrator(section: LocalSection, curve):
    def gen(t, params):
        z, dz = jax.jvp(lambda s: curve(s, params), (t,), (jnp.ones_like(t),))
        S, dS = jax.jvp(section.kernel, (z,), (dz,))
        return jnp.linalg.solve(S, dS)

    def run(V0, params, t0, t1, steps):
        h = (t1 - t0) / steps

        def body(i, carry):
            V, A0 = carry
            t = t0 + i * h
            Am, A1 = gen(t + h / 2, params), gen(t + h, params)
            k1 = -A0 @ V
            k2 = -Am @ (V + h / 2 * k1)
            k3 = -Am @ (V + h / 2 * k2)
            k4 = -A1 @ (V + h * k3)
            return V + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), A1

        return jax.lax.fori_loop(0, steps, body, (V0, gen(t0, params)))[0]

    return jax.jit(run)


@dataclass(frozen=True)
class MCResult:
    value: np.ndarray
    direct: np.ndarray
    j_drift: float
    sections: tuple


def _pieces_with_sections(loop: ModelLoop, variant: str):
    out = []
    for pc in loop.pieces:
        edges = np.linspace(pc.t0, pc.t1, SUBDIVISIONS + 1)
        for t0, t1 in zip(edges, edges[1:]):
            s = local_section(variant, loop.model, loop.point(pc, 0.5 * (t0 + t1)))
            for t in np.linspace(t0, t1, 17):
                if s.degeneracy(loop.point(pc, t)) < PIVOT_TOL:
                    raise SectionError(f"no section region covers t = {t:.4f} of {loop.name}")
            out.append((pc, s, float(t0), float(t1)))
    return out


def mc_transport(variant: str, rep: Representation | str, loop: ModelLoop, v0,
                 steps_per_unit: int = DEFAULT_STEPS_PER_UNIT, close: bool = True) -> MCResult:
    """Parallel transport for the Maurer-Cartan connection on ``G x_P V``.

    The lift is cut into pieces, each trivialised by its own section; at
    joins the gauge ``rho(s_to^-1 s_from)`` is applied.  With ``close`` the
    result is brought back to the starting trivialisation through the
    closure (identity or antipodal).  ``direct`` is the same quantity built
    from products of section values, which is exact for a flat connection.
    """
    _check_variant(variant)
    rep = Representation(rep)
    v0 = np.asarray(v0, dtype=float)
    V = v0[:, None] if v0.ndim == 1 else v0
    D = V.copy()
    J = loop.model.signature.J
    G0 = V.T @ J @ V
    drift = 0.0
    parts = _pieces_with_sections(loop, variant)
    prev = None
    for pc, s, t0, t1 in parts:
        curve = loop.curve(pc)
        if prev is not None:
            z = loop.point(pc, t0)
            g = rep_group(rep, gauge(prev, s, z))
            V, D = g @ V, g @ D
        steps = max(1, int(np.ceil(abs(t1 - t0) * steps_per_unit)))
        V = np.asarray(_mc_integrator(s, curve)(jnp.asarray(V), jnp.asarray(pc.params), t0, t1, steps))
        za, zb = loop.point(pc, t0), loop.point(pc, t1)
        D = rep_group(rep, np.linalg.solve(s(zb), s(za))) @ D
        drift = max(drift, float(np.max(np.abs(V.T @ J @ V - G0))))
        prev = s
    if close and loop.closure != "open":
        first = parts[0][1]
        if loop.closure == "antipodal" and not _is_line(variant):
            raise TopologyError(f"an antipodal lift is not a closed loop in G/{variant}")
        zs, ze = loop.start, loop.end
        expect = -zs if loop.closure == "antipodal" else zs
        if np.max(np.abs(ze - expect)) > 1e-10:
            raise ValueError(f"{loop.name} does not close as declared ({loop.closure})")
        # s_last(z_end) = s_first(z_start) g, so [s_last(z_end), v] = [s_first(z_start), rho(g) v]
        g = np.linalg.solve(first(zs), prev(ze))
        if not membership(g, variant, loop.model.signature):
            raise SectionError(f"closing gauge is not in {variant}")
        g = rep_group(rep, g)
        V, D = g @ V, g @ D
    if v0.ndim == 1:
        V, D = V[:, 0], D[:, 0]
    return MCResult(V, D, drift, tuple(s for _, s, _, _ in parts))


def mc_holonomy(variant: str, rep: Representation | str, loop: ModelLoop, **kwargs) -> MCResult:
    N = loop.model.p + loop.model.q + 2
    return mc_transport(variant, rep, loop, np.eye(N), **kwargs)


def mc_generator(section: LocalSection, z, dz, rep: Representation | str = Representation.STANDARD) -> np.ndarray:
    """``rho(s^-1 ds(dz))`` at ``z``: the connection form pulled back through ``section``."""
    S, dS = jax.jvp(section.kernel, (jnp.asarray(z, dtype=float),), (jnp.asarray(dz, dtype=float),))
    return rep_algebra(rep, np.linalg.solve(np.asarray(S), np.asarray(dS)))


# --- tautological line ----------------------------------------------------------------

def _track(vectors: np.ndarray):
    prev = vectors[0]
    for v in vectors[1:]:
        c = float(v @ prev)
        if abs(c) < 0.5:
            return None
        prev = v if c > 0 else -v
    return prev


def line_monodromy(loop: ModelLoop, samples: int = MONODROMY_SAMPLES) -> int:
    """Sign picked up by a continuously tracked spanning vector of the tautological line.

    Only the line is used at each sample (through the sign-normalised
    representative), so any sign change is produced by the tracking itself.
    """
    if loop.closure == "open":
        raise ValueError("line monodromy needs a loop closed in the model")
    line = loop.model.kind != "product_sphere"
    for _ in range(MONODROMY_REFINEMENTS + 1):
        zs = loop.samples(samples)
        vs = np.stack([null_ray_of(loop.model, z, line=line) for z in zs])
        vs /= np.linalg.norm(vs, axis=1, keepdims=True)
        end = _track(vs)
        if end is not None:
            c = float(end @ vs[0])
            if abs(abs(c) - 1.0) > 1e-8:
                raise ValueError("tracked line does not return to the initial line")
            return 1 if c > 0 else -1
        samples *= 4
    raise TrackingError("consecutive line samples stayed near-orthogonal after refinement")


# --- quadric tractor holonomy ----------------------------------------------------------

def quadric_tractor_holonomy(p: int, q: int, loop_id: str = "antipodal",
                             steps_per_unit: int = DEFAULT_STEPS_PER_UNIT, tol: float | None = None) -> np.ndarray:
    """Holonomy of the normal tractor connection of the quadric along a library loop.

    The antipodal loop is closed through the deck map ``z -> -z``; its frame
    change ``diag(1, D(-id), 1)`` is applied at the seam.
    """
    Signature(p, q).require_geometric()
    if p * q == 0:
        if loop_id == "antipodal":
            raise TopologyError(f"the quadric of signature ({p},{q}) is a sphere; it has no noncontractible loop")
        model = ModelSpace("round_sphere", p + q, 0)
    else:
        model = ModelSpace("quadric", p, q)
    loop = model_loop(model, loop_id)
    return holonomy(loop.tractor_path(), steps_per_unit=steps_per_unit, tol=tol)
