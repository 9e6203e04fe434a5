"""Curvature of a chart metric by nested forward-mode differentiation.

Conventions (none are fixed by the geometry itself, so they are pinned here)::

    Gamma^i_jk = 1/2 g^il (d_j g_lk + d_k g_lj - d_l g_jk)
    R^i_jkl    = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj
    Ric_ij     = R^k_ikj
    P_ij       = (Ric_ij - R g_ij / (2(n-1))) / (n-2)
    W_ijkl     = R_ijkl - (g_ik P_jl - g_il P_jk + g_jl P_ik - g_jk P_il)
    C_ijk      = nabla_j P_ki - nabla_k P_ji

The kernels below are traceable functions of ``(metric, x)``; the public
entry points compile them once per chart.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .._jax import jax, jnp
from .charts import MetricChart


def christoffel(metric, x):
    g = metric(x)
    dg = jax.jacfwd(metric)(x)  # dg[a, b, c] = d_c g_ab
    lower = 0.5 * (jnp.einsum("ljk->ljk", dg) + jnp.einsum("lkj->ljk", dg) - jnp.einsum("jkl->ljk", dg))
    return jnp.linalg.solve(g, lower.reshape(g.shape[0], -1)).reshape(lower.shape)


def riemann(metric, x):
    Gam = christoffel(metric, x)
    dGam = jax.jacfwd(christoffel, argnums=1)(metric, x)  # dGam[i, j, k, l] = d_l Gamma^i_jk
    return (
        jnp.einsum("iljk->ijkl", dGam)
        - jnp.einsum("ikjl->ijkl", dGam)
        + jnp.einsum("ikm,mlj->ijkl", Gam, Gam)
        - jnp.einsum("ilm,mkj->ijkl", Gam, Gam)
    )


def metric_jets(metric, x):
    """``(g, dg, d2g)`` with ``dg[a, b, c] = d_c g_ab`` and ``d2g[a, b, c, d] = d_d d_c g_ab``."""
    dmetric = jax.jacfwd(metric)
    return metric(x), dmetric(x), jax.jacfwd(dmetric)(x)


def christoffel_schouten(metric, x):
    """``(g, Gamma, P)`` from the second jet of ``g`` in closed form.

    Cheaper than differentiating :func:`christoffel` through the linear
    solve; this is what the transport integrators call at every stage.
    """
    g, dg, d2g = metric_jets(metric, x)
    n = g.shape[0]
    gi = jnp.linalg.inv(g)
    low = 0.5 * (dg + jnp.einsum("lkj->ljk", dg) - jnp.einsum("jkl->ljk", dg))
    dlow = 0.5 * (d2g + jnp.einsum("lkjm->ljkm", d2g) - jnp.einsum("jklm->ljkm", d2g))
    Gam = jnp.einsum("il,ljk->ijk", gi, low)
    dgi = -jnp.einsum("ia,abm,bl->ilm", gi, dg, gi)
    dGam = jnp.einsum("ilm,ljk->ijkm", dgi, low) + jnp.einsum("il,ljkm->ijkm", gi, dlow)
    Ric = (jnp.einsum("kjik->ij", dGam) - jnp.einsum("kkij->ij", dGam)
           + jnp.einsum("kkm,mji->ij", Gam, Gam) - jnp.einsum("kjm,mki->ij", Gam, Gam))
    R = jnp.einsum("ij,ij->", gi, Ric)
    return g, Gam, (Ric - R * g / (2.0 * (n - 1))) / (n - 2)


def ricci(metric, x):
    return jnp.einsum("kikj->ij", riemann(metric, x))


def scalar_curvature(metric, x):
    return jnp.einsum("ij,ij->", jnp.linalg.inv(metric(x)), ricci(metric, x))


def schouten(metric, x):
    g = metric(x)
    n = g.shape[0]
    Ric = ricci(metric, x)
    R = jnp.einsum("ij,ij->", jnp.linalg.inv(g), Ric)
    return (Ric - R * g / (2.0 * (n - 1))) / (n - 2)


def kulkarni_nomizu_gp(g, P):
    return (
        jnp.einsum("ik,jl->ijkl", g, P)
        - jnp.einsum("il,jk->ijkl", g, P)
        + jnp.einsum("jl,ik->ijkl", g, P)
        - jnp.einsum("jk,il->ijkl", g, P)
    )


def weyl(metric, x):
    """Weyl tensor with the first index raised, ``W^i_jkl``."""
    g = metric(x)
    Rlow = jnp.einsum("im,mjkl->ijkl", g, riemann(metric, x))
    Wlow = Rlow - kulkarni_nomizu_gp(g, schouten(metric, x))
    return jnp.einsum("im,mjkl->ijkl", jnp.linalg.inv(g), Wlow)


def schouten_gradient(metric, x):
    """``D[a, b, c] = nabla_c P_ab``."""
    Gam = christoffel(metric, x)
    P = schouten(metric, x)
    dP = jax.jacfwd(schouten, argnums=1)(metric, x)
    return dP - jnp.einsum("mca,mb->abc", Gam, P) - jnp.einsum("mcb,am->abc", Gam, P)


def cotton(metric, x):
    D = schouten_gradient(metric, x)
    return jnp.einsum("kij->ijk", D) - jnp.einsum("jik->ijk", D)


def _pack(metric, x):
    g = metric(x)
    Gam = christoffel(metric, x)
    Riem = riemann(metric, x)
    Ric = jnp.einsum("kikj->ij", Riem)
    ginv = jnp.linalg.inv(g)
    R = jnp.einsum("ij,ij->", ginv, Ric)
    n = g.shape[0]
    P = (Ric - R * g / (2.0 * (n - 1))) / (n - 2)
    Wlow = jnp.einsum("im,mjkl->ijkl", g, Riem) - kulkarni_nomizu_gp(g, P)
    W = jnp.einsum("im,mjkl->ijkl", ginv, Wlow)
    C = cotton(metric, x)
    return g, Gam, Riem, Ric, R, P, W, C


@dataclass(frozen=True)
class CurvaturePack:
    g: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    schouten: np.ndarray
    weyl: np.ndarray
    cotton: np.ndarray

    @property
    def ginv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    def weyl_lowered(self) -> np.ndarray:
        return np.einsum("im,mjkl->ijkl", self.g, self.weyl)

    def riemann_lowered(self) -> np.ndarray:
        return np.einsum("im,mjkl->ijkl", self.g, self.riemann)


@lru_cache(maxsize=None)
def _compiled(chart: MetricChart, kernel):
    return jax.jit(lambda x: kernel(chart.metric, x))


def compiled(chart: MetricChart, kernel):
    """Per-chart jitted version of one of the kernels in this module."""
    return _compiled(chart, kernel)


def curvature_pack(chart: MetricChart, x) -> CurvaturePack:
    if chart.dim < 3:
        raise ValueError(f"{chart.name}: the Schouten tensor needs n >= 3")
    x = chart.check_point(x)
    out = [np.asarray(a) for a in _compiled(chart, _pack)(jnp.asarray(x))]
    g, Gam, Riem, Ric, R, P, W, C = out
    return CurvaturePack(g, Gam, Riem, Ric, float(R), P, W, C)


def weyl_trace_defect(pack: CurvaturePack) -> float:
    W = pack.weyl
    traces = [
        np.einsum("iikl->kl", W),
        np.einsum("ijil->jl", W),
        np.einsum("ijki->jk", W),
    ]
    return float(max(np.max(np.abs(t)) for t in traces))


def bianchi_defect(pack: CurvaturePack) -> float:
    R = pack.riemann
    cyc = R + np.einsum("iljk->ijkl", R) + np.einsum("iklj->ijkl", R)
    return float(np.max(np.abs(cyc)))
