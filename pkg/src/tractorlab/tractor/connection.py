"""The normal tractor connection in a chart, its curvature, and the compatibility map."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .._jax import jax, jnp
from ..geometry.charts import MetricChart
from ..geometry.curvature import christoffel_schouten
from .splitting import tractor_metric_matrix


def connection_parts(metric, x, v):
    """``(levi_civita, algebraic)`` with ``nabla_v U = dU/dt + (levi_civita + algebraic) U``.

    ``algebraic`` carries the ``-P(v, mu)``, ``v rho + P(v)^# sigma`` and
    ``-g(v, mu)`` couplings; ``levi_civita`` the Christoffel term on ``mu``.
    """
    g, Gam, P = christoffel_schouten(metric, x)
    n = g.shape[0]
    Pv = P @ v
    lc = jnp.zeros((n + 2, n + 2), dtype=g.dtype)
    lc = lc.at[1:n + 1, 1:n + 1].set(jnp.einsum("jik,i->jk", Gam, v))
    alg = jnp.zeros((n + 2, n + 2), dtype=g.dtype)
    alg = alg.at[0, 1:n + 1].set(-Pv)
    alg = alg.at[1:n + 1, 0].set(v)
    alg = alg.at[1:n + 1, n + 1].set(jnp.linalg.solve(g, Pv))
    alg = alg.at[n + 1, 1:n + 1].set(-(g @ v))
    return lc, alg


def connection_kernel(metric, x, v):
    lc, alg = connection_parts(metric, x, v)
    return lc + alg


def coordinate_connections(metric, x):
    """Stack ``A_k = A(x, d_k)`` for the coordinate directions."""
    n = x.shape[0]
    return jax.vmap(lambda e: connection_kernel(metric, x, e))(jnp.eye(n, dtype=x.dtype))


def curvature_kernel(metric, x):
    """``Omega[k, l] = d_k A_l - d_l A_k + [A_k, A_l]``."""
    A = coordinate_connections(metric, x)
    dA = jax.jacfwd(coordinate_connections, argnums=1)(metric, x)  # dA[l, a, b, k] = d_k (A_l)_ab
    dkAl = jnp.einsum("labk->klab", dA)
    comm = jnp.einsum("kac,lcb->klab", A, A) - jnp.einsum("lac,kcb->klab", A, A)
    return dkAl - jnp.einsum("klab->lkab", dkAl) + comm


@lru_cache(maxsize=None)
def _compiled(chart: MetricChart, name: str):
    if name == "parts":
        return jax.jit(lambda x, v: connection_parts(chart.metric, x, v))
    if name == "curvature":
        return jax.jit(lambda x: curvature_kernel(chart.metric, x))
    raise KeyError(name)


@dataclass(frozen=True)
class ConnectionMatrix:
    direction: np.ndarray
    levi_civita: np.ndarray
    algebraic: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return self.levi_civita + self.algebraic


def _require_dim(chart: MetricChart):
    if chart.dim < 3:
        raise ValueError(f"{chart.name}: tractor calculus here needs n >= 3")


def connection_matrix(chart: MetricChart, x, v) -> ConnectionMatrix:
    _require_dim(chart)
    x = chart.check_point(x)
    v = np.asarray(v, dtype=float)
    lc, alg = _compiled(chart, "parts")(jnp.asarray(x), jnp.asarray(v))
    return ConnectionMatrix(v, np.asarray(lc), np.asarray(alg))


def tractor_curvature(chart: MetricChart, x, X=None, Y=None) -> np.ndarray:
    """Curvature of the tractor connection on ``(X, Y)``; all coordinate pairs if omitted.

    With ``X``/``Y`` omitted the result has shape ``(n, n, n+2, n+2)``.
    """
    _require_dim(chart)
    x = chart.check_point(x)
    Om = np.asarray(_compiled(chart, "curvature")(jnp.asarray(x)))
    if X is None and Y is None:
        return Om
    return np.einsum("k,l,klab->ab", np.asarray(X, dtype=float), np.asarray(Y, dtype=float), Om)


def curvature_blocks(Om: np.ndarray) -> dict:
    """Named blocks of a coordinate curvature array ``Om[k, l, a, b]``."""
    n = Om.shape[0]
    mid = slice(1, n + 1)
    return {
        "first_column": Om[:, :, :, 0],
        "bottom_row": Om[:, :, n + 1, :],
        "middle": Om[:, :, mid, mid],      # [k, l, i, j] ~ W^i_jkl
        "top_strip": Om[:, :, 0, mid],     # [k, l, j]    ~ -C_jkl
        "right_strip": Om[:, :, mid, n + 1],  # [k, l, i] ~ C^i_kl
    }


def tau_map(chart: MetricChart, x, rho: float = 1.0, drho=None) -> np.ndarray:
    """Columns ``tau(e_k)``: ``nabla_{e_k}(rho, 0, 0)`` modulo the null line, as mu-vectors.

    Returns an ``(n, n)`` array whose column ``k`` is the class of
    ``nabla_k`` of the section ``rho e_0`` divided by ``rho``, after checking
    that it lies in the orthogonal complement of the null line.
    """
    x = chart.check_point(x)
    n = chart.dim
    drho = np.zeros(n) if drho is None else np.asarray(drho, dtype=float)
    cols = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        A = connection_matrix(chart, x, e).matrix
        U = np.zeros(n + 2)
        U[0] = rho
        dU = np.zeros(n + 2)
        dU[0] = drho[k]
        nab = dU + A @ U
        if abs(nab[n + 1]) > 1e-12 * max(1.0, abs(rho)):
            raise ArithmeticError("derivative of a null-line section left the orthogonal complement")
        cols.append(nab[1:n + 1] / rho)
    return np.stack(cols, axis=1)


def compatibility_tau(chart: MetricChart, x, rho: float = 1.0, drho=None) -> float:
    """``max |h0(tau v, tau w) - g(v, w)|`` over a coordinate basis."""
    x = chart.check_point(x)
    g = chart.g(x)
    T = tau_map(chart, x, rho, drho)
    H = tractor_metric_matrix(g)
    n = chart.dim
    h0 = H[1:n + 1, 1:n + 1]  # h restricted to (T^1)^perp / T^1
    return float(np.max(np.abs(T.T @ h0 @ T - g)))
