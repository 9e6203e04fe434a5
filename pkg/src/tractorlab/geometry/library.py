"""Built-in charts and transitions, keyed by name.

Names understood by :func:`get_chart`::

    flat(p,q)
    sphere(n)                  sphere(n)/south
    product_sphere(p,q)        product_sphere(p,q)/NS, /SN, /SS
    riemannian_product_sphere(p,q)
    conformally_flat(preset,p,q)     preset in CONFORMAL_PRESETS
    generic_poly(p,q)

Sphere factors use stereographic coordinates ``x = z'/(1 - z_last)`` (north
chart) or ``x = z'/(1 + z_last)`` (south chart), in which the round metric
is ``4 |dx|^2 / (1 + |x|^2)^2``.
"""
from __future__ import annotations

import re
from functools import lru_cache

import numpy as np

from .._jax import jnp
from ..lie_core import Signature
from .charts import ChartTransition, MetricChart
from .config import chart_from_config

SPHERE_BOX = 3.0
FLAT_BOX = 5.0
POLY_BOX = 0.6


def round_factor(x):
    return 4.0 / (1.0 + jnp.dot(x, x)) ** 2


def inversion(x):
    return x / jnp.dot(x, x)


def antipode(x):
    """The antipodal map of a sphere written in one stereographic chart."""
    return -x / jnp.dot(x, x)


def stereo_to_sphere(x, south: bool = False) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r2 = x @ x
    last = (1.0 - r2) / (1.0 + r2) if south else (r2 - 1.0) / (r2 + 1.0)
    return np.append(2.0 * x / (1.0 + r2), last)


def sphere_to_stereo(z, south: bool = False) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    denom = 1.0 + z[-1] if south else 1.0 - z[-1]
    return z[:-1] / denom


CONFORMAL_PRESETS = {
    "sphere": lambda x: jnp.log(2.0 / (1.0 + jnp.dot(x, x))),
    "gauss": lambda x: 0.4 * jnp.exp(-0.5 * jnp.dot(x, x)),
    "wave": lambda x: 0.3 * jnp.sin(x[0]) * jnp.cos(x[1]) + 0.1 * x[-1],
}


def flat(p: int, q: int) -> MetricChart:
    sig = Signature(p, q)
    h = jnp.asarray(sig.h)
    return MetricChart(
        name=f"flat({p},{q})", signature=sig, metric=lambda x: h + 0.0 * x[0],
        lower=-FLAT_BOX, upper=FLAT_BOX, description="constant metric diag(+1..,-1..)",
    )


def sphere(n: int, south: bool = False) -> MetricChart:
    sig = Signature(n, 0)
    eye = jnp.eye(n)
    return MetricChart(
        name=f"sphere({n})" + ("/south" if south else ""), signature=sig,
        metric=lambda x: round_factor(x) * eye,
        lower=-SPHERE_BOX, upper=SPHERE_BOX, description="unit round sphere, stereographic",
    )


def _product_metric(p: int, q: int, sign: float):
    def metric(x):
        u, w = x[:p], x[p:]
        diag = jnp.concatenate([jnp.full((p,), round_factor(u)), jnp.full((q,), sign * round_factor(w))])
        return jnp.diag(diag)

    return metric


def product_sphere(p: int, q: int, poles: str = "NN") -> MetricChart:
    """``g_{S^p} - g_{S^q}`` in a product of stereographic charts."""
    if p < 1 or q < 1:
        raise ValueError("product_sphere needs p, q >= 1")
    suffix = "" if poles == "NN" else f"/{poles}"
    return MetricChart(
        name=f"product_sphere({p},{q}){suffix}", signature=Signature(p, q),
        metric=_product_metric(p, q, -1.0),
        lower=-SPHERE_BOX, upper=SPHERE_BOX, description="S^p x S^q with g_{S^p} - g_{S^q}",
    )


def riemannian_product_sphere(p: int, q: int) -> MetricChart:
    """``g_{S^p} + g_{S^q}``: parallel Ricci, hence zero Cotton; nonzero Weyl once p, q >= 2."""
    return MetricChart(
        name=f"riemannian_product_sphere({p},{q})", signature=Signature(p + q, 0),
        metric=_product_metric(p, q, 1.0),
        lower=-SPHERE_BOX, upper=SPHERE_BOX, description="S^p x S^q with g_{S^p} + g_{S^q}",
    )


def conformally_flat(preset: str, p: int, q: int) -> MetricChart:
    if preset not in CONFORMAL_PRESETS:
        raise KeyError(f"unknown conformal preset {preset!r}; known: {sorted(CONFORMAL_PRESETS)}")
    ups = CONFORMAL_PRESETS[preset]
    h = jnp.asarray(Signature(p, q).h)
    return MetricChart(
        name=f"conformally_flat({preset},{p},{q})", signature=Signature(p, q),
        metric=lambda x: jnp.exp(2.0 * ups(x)) * h,
        lower=-2.0, upper=2.0, description=f"exp(2U) h with U = {preset}",
    )


def generic_poly_config(p: int, q: int, seed: int = 20240611) -> dict:
    """Coefficient table of a fixed, generic (non conformally flat) polynomial metric."""
    n = p + q
    rng = np.random.default_rng(seed + 97 * p + q)
    entries = []
    for i in range(n):
        for j in range(i, n):
            terms = []
            for k in range(n):
                e = [0] * n
                e[k] = 1
                terms.append([round(float(rng.normal(scale=0.15)), 6), e])
            for k in range(n):
                for m in range(k, n):
                    e = [0] * n
                    e[k] += 1
                    e[m] += 1
                    terms.append([round(float(rng.normal(scale=0.12)), 6), e])
            e = [0] * n
            e[i] += 1
            e[j] += 1
            e[(i + j + 1) % n] += 1
            terms.append([0.2, e])
            entries.append({"i": i, "j": j, "terms": terms})
    return {
        "name": f"generic_poly({p},{q})",
        "signature": [p, q],
        "kind": "polynomial",
        "base": "h",
        "domain": [-POLY_BOX, POLY_BOX],
        "entries": entries,
    }


def generic_poly(p: int, q: int) -> MetricChart:
    return chart_from_config(generic_poly_config(p, q))


#: the charts every library-wide sweep runs over
REGISTERED_CHARTS = (
    "flat(2,3)", "flat(3,1)", "flat(4,0)",
    "sphere(3)", "sphere(4)", "sphere(5)", "sphere(4)/south",
    "product_sphere(1,2)", "product_sphere(2,2)", "product_sphere(2,3)", "product_sphere(2,3)/SN",
    "riemannian_product_sphere(2,2)",
    "conformally_flat(sphere,4,0)", "conformally_flat(gauss,2,3)", "conformally_flat(wave,3,1)",
    "generic_poly(2,3)", "generic_poly(3,1)",
)


_NAME = re.compile(r"^(?P<kind>[a-z_]+)\((?P<args>[^)]*)\)(?:/(?P<suffix>\w+))?$")


@lru_cache(maxsize=None)
def get_chart(name: str) -> MetricChart:
    """Look up (and memoise) a library chart by name."""
    m = _NAME.match(name.replace(" ", ""))
    if not m:
        raise KeyError(f"cannot parse chart name {name!r}")
    kind, suffix = m["kind"], m["suffix"]
    raw = [a for a in m["args"].split(",") if a]
    try:
        if kind == "flat":
            return flat(*map(int, raw))
        if kind == "sphere":
            if suffix not in (None, "south"):
                raise KeyError(name)
            return sphere(int(raw[0]), south=suffix == "south")
        if kind == "product_sphere":
            return product_sphere(*map(int, raw), poles=suffix or "NN")
        if kind == "riemannian_product_sphere":
            return riemannian_product_sphere(*map(int, raw))
        if kind == "conformally_flat":
            return conformally_flat(raw[0], int(raw[1]), int(raw[2]))
        if kind == "generic_poly":
            return generic_poly(*map(int, raw))
    except (TypeError, IndexError, ValueError) as exc:
        raise KeyError(f"bad arguments in chart name {name!r}: {exc}") from exc
    raise KeyError(f"unknown chart family {kind!r}")


def _away_from_origin(block: slice):
    def pred(x):
        return float(np.linalg.norm(np.asarray(x)[block])) > 1e-3
    return pred


def _blockwise(p: int, flip_u: bool, flip_w: bool, fn):
    def mapping(x):
        u, w = x[:p], x[p:]
        return jnp.concatenate([fn(u) if flip_u else u, fn(w) if flip_w else w])
    return mapping


@lru_cache(maxsize=None)
def get_transition(source: str, target: str) -> ChartTransition:
    """Registered transition between two library charts (north/south swaps)."""
    src, tgt = get_chart(source), get_chart(target)
    ms, mt = _NAME.match(source), _NAME.match(target)
    if ms["kind"] != mt["kind"] or ms["args"] != mt["args"]:
        raise KeyError(f"no transition registered from {source} to {target}")
    if ms["kind"] == "sphere":
        if ms["suffix"] == mt["suffix"]:
            raise KeyError("identity transitions are not registered")
        return ChartTransition(f"{source}->{target}", src, tgt, inversion, inversion,
                               overlap=_away_from_origin(slice(None)))
    if ms["kind"] == "product_sphere":
        p = src.signature.p
        a, b = ms["suffix"] or "NN", mt["suffix"] or "NN"
        flip_u, flip_w = a[0] != b[0], a[1] != b[1]
        if not (flip_u or flip_w):
            raise KeyError("identity transitions are not registered")
        fwd = _blockwise(p, flip_u, flip_w, inversion)

        def overlap(x):
            x = np.asarray(x)
            ok = True
            if flip_u:
                ok &= _away_from_origin(slice(None, p))(x)
            if flip_w:
                ok &= _away_from_origin(slice(p, None))(x)
            return ok

        return ChartTransition(f"{source}->{target}", src, tgt, fwd, fwd, overlap=overlap)
    raise KeyError(f"no transitions registered for the {ms['kind']} family")


@lru_cache(maxsize=None)
def deck_transition(p: int, q: int) -> ChartTransition:
    """The involution z -> -z of S^p x S^q, read in the north-north chart."""
    chart = get_chart(f"product_sphere({p},{q})")
    fwd = _blockwise(p, True, True, antipode)

    def overlap(x):
        x = np.asarray(x)
        return np.linalg.norm(x[:p]) > 1e-3 and np.linalg.norm(x[p:]) > 1e-3

    return ChartTransition(f"deck:product_sphere({p},{q})", chart, chart, fwd, fwd, overlap=overlap)


def registered_transitions(names) -> list[ChartTransition]:
    """All registered transitions among the given chart names."""
    out = []
    for s in names:
        for t in names:
            if s == t:
                continue
            try:
                out.append(get_transition(s, t))
            except KeyError:
                pass
    return out
