"""Central-difference oracle for the curvature pack and the tractor connection.

Only metric *values* are used, so this path shares nothing with the
forward-mode kernels beyond the index conventions.  Each derivative level is
a Richardson-extrapolated central difference; nested levels use larger steps
to keep round-off in check.
"""
from __future__ import annotations

import numpy as np

from .charts import MetricChart

STEP = 1e-4
NESTED_STEP = 2e-3
OUTER_STEP = 2e-2


def derivative(f, x, h: float = STEP, richardson: bool = True) -> np.ndarray:
    """``D[..., k] = d_k f(x)`` for an array-valued ``f``."""
    x = np.asarray(x, dtype=float)

    def central(step):
        cols = []
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = step
            cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * step))
        return np.stack(cols, axis=-1)

    d = central(h)
    if not richardson:
        return d
    return (4 * central(h / 2) - d) / 3


def christoffel_from(g, dg) -> np.ndarray:
    """``Gam[i, j, k] = Gamma^i_jk`` from ``g`` and ``dg[a, b, c] = d_c g_ab``."""
    low = 0.5 * (np.einsum("ljk->ljk", dg) + np.einsum("lkj->ljk", dg) - np.einsum("jkl->ljk", dg))
    return np.einsum("il,ljk->ijk", np.linalg.inv(g), low)


def christoffel(chart: MetricChart, x, h: float = STEP, richardson: bool = True) -> np.ndarray:
    g = chart.g(x)
    return christoffel_from(g, derivative(chart.g, x, h, richardson))


def riemann(chart: MetricChart, x, h: float = NESTED_STEP) -> np.ndarray:
    """``R^i_jkl = d_k Gam^i_lj - d_l Gam^i_kj + Gam^i_km Gam^m_lj - Gam^i_lm Gam^m_kj``."""
    Gam = christoffel(chart, x)
    dGam = derivative(lambda y: christoffel(chart, y), x, h)  # dGam[i, a, b, c] = d_c Gam^i_ab
    term = np.einsum("iljk->ijkl", dGam)  # d_k Gam^i_lj
    quad = np.einsum("ikm,mlj->ijkl", Gam, Gam)
    return term - np.einsum("ijkl->ijlk", term) + quad - np.einsum("ijkl->ijlk", quad)


def _schouten_of(g, R):
    n = g.shape[0]
    Ric = np.einsum("kikj->ij", R)
    scal = np.einsum("ij,ij->", np.linalg.inv(g), Ric)
    return (Ric - scal * g / (2 * (n - 1))) / (n - 2)


def curvature(chart: MetricChart, x) -> dict:
    """Christoffel, Riemann, Ricci, scalar, Schouten and Weyl (``W^i_jkl``) by finite differences."""
    x = chart.check_point(x)
    g = chart.g(x)
    Gam = christoffel(chart, x)
    R = riemann(chart, x)
    Ric = np.einsum("kikj->ij", R)
    ginv = np.linalg.inv(g)
    scal = float(np.einsum("ij,ij->", ginv, Ric))
    P = _schouten_of(g, R)
    Rlow = np.einsum("ai,ijkl->ajkl", g, R)
    KN = (np.einsum("ik,jl->ijkl", g, P) - np.einsum("il,jk->ijkl", g, P)
          + np.einsum("jl,ik->ijkl", g, P) - np.einsum("jk,il->ijkl", g, P))
    W = np.einsum("ai,ijkl->ajkl", ginv, Rlow - KN)
    return {"g": g, "christoffel": Gam, "riemann": R, "ricci": Ric, "scalar": scal, "schouten": P, "weyl": W}


def schouten(chart: MetricChart, x) -> np.ndarray:
    return _schouten_of(chart.g(x), riemann(chart, x))


def cotton(chart: MetricChart, x, h: float = OUTER_STEP) -> np.ndarray:
    """``C_ijk = nabla_j P_ki - nabla_k P_ji`` with a third nested difference."""
    x = chart.check_point(x)
    Gam = christoffel(chart, x)
    P = schouten(chart, x)
    dP = derivative(lambda y: schouten(chart, y), x, h)  # dP[a, b, c] = d_c P_ab
    nab = dP - np.einsum("mca,mb->abc", Gam, P) - np.einsum("mcb,am->abc", Gam, P)  # nab[a, b, c] = nabla_c P_ab
    return np.einsum("kij->ijk", nab) - np.einsum("jik->ijk", nab)


def connection_matrices(chart: MetricChart, x) -> np.ndarray:
    """Stack of tractor connection matrices ``A_k`` on the coordinate directions."""
    g = chart.g(x)
    n = g.shape[0]
    Gam = christoffel(chart, x)
    P = schouten(chart, x)
    out = np.zeros((n, n + 2, n + 2))
    for k in range(n):
        A = out[k]
        A[1:n + 1, 1:n + 1] = Gam[:, k, :]
        A[0, 1:n + 1] = -P[k]
        A[1:n + 1, 0] = np.eye(n)[k]
        A[1:n + 1, n + 1] = np.linalg.solve(g, P[k])
        A[n + 1, 1:n + 1] = -g[k]
    return out


def tractor_curvature(chart: MetricChart, x, h: float = OUTER_STEP) -> np.ndarray:
    """``Omega[k, l] = d_k A_l - d_l A_k + [A_k, A_l]`` by differencing the connection matrices."""
    x = chart.check_point(x)
    A = connection_matrices(chart, x)
    dA = derivative(lambda y: connection_matrices(chart, y), x, h)  # dA[l, a, b, k] = d_k (A_l)_ab
    dkAl = np.einsum("labk->klab", dA)
    comm = np.einsum("kac,lcb->klab", A, A) - np.einsum("lac,kcb->klab", A, A)
    return dkAl - np.einsum("klab->lkab", dkAl) + comm
