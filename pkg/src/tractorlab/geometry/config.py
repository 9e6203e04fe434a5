"""Metrics described by polynomial or rational coefficient tables.

A table looks like::

    {
      "name": "my_metric",
      "signature": [2, 1],
      "kind": "polynomial",          # or "rational"
      "base": "h",                   # optional: add diag(+1..,-1..) to the entries
      "domain": [-0.5, 0.5],         # scalar box or [[lo...], [hi...]]
      "entries": [{"i": 0, "j": 1, "terms": [[coef, [e_1, ..., e_n]], ...]}, ...],
      "denominator": [[coef, [exponents]], ...]     # rational only, shared by all entries
    }

Entries are listed once for ``i <= j`` and symmetrised.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .._jax import jnp
from ..lie_core import Signature
from .charts import MetricChart


class _PolyTable:
    """Vectorised evaluation of sum_t c[..., t] x^E[t]."""

    def __init__(self, exponents: np.ndarray, coeffs: np.ndarray):
        self.exponents = np.asarray(exponents, dtype=int)
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.max_degree = int(self.exponents.max(initial=0))

    def monomials(self, x):
        powers = [jnp.ones_like(x)]
        for _ in range(self.max_degree):
            powers.append(powers[-1] * x)
        table = jnp.stack(powers, axis=1)  # table[k, e] = x_k ** e
        picked = table[np.arange(x.shape[0])[None, :], self.exponents]
        return jnp.prod(picked, axis=1)

    def __call__(self, x):
        return jnp.tensordot(self.coeffs, self.monomials(x), axes=1)


def _collect(term_lists, n):
    """Stack several term lists over one shared exponent set."""
    index = {}
    for terms in term_lists:
        for _, exps in terms:
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} should have length {n}")
            index.setdefault(tuple(int(e) for e in exps), len(index))
    E = np.zeros((max(len(index), 1), n), dtype=int)
    for exps, t in index.items():
        E[t] = exps
    C = np.zeros((len(term_lists), E.shape[0]))
    for r, terms in enumerate(term_lists):
        for c, exps in terms:
            C[r, index[tuple(int(e) for e in exps)]] += float(c)
    return E, C


def chart_from_config(cfg: dict) -> MetricChart:
    p, q = cfg["signature"]
    sig = Signature(int(p), int(q))
    n = sig.n
    kind = cfg.get("kind", "polynomial")
    if kind not in ("polynomial", "rational"):
        raise ValueError(f"unknown metric table kind {kind!r}")
    coeff_lists = {}
    for entry in cfg.get("entries", []):
        i, j = int(entry["i"]), int(entry["j"])
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"entry ({i}, {j}) out of range for n = {n}")
        coeff_lists[(min(i, j), max(i, j))] = entry["terms"]
    keys = list(coeff_lists)
    E, C = _collect([coeff_lists[k] for k in keys], n)
    full = np.zeros((n, n, E.shape[0]))
    for r, (i, j) in enumerate(keys):
        full[i, j] = full[j, i] = C[r]
    table = _PolyTable(E, full)
    if kind == "rational" and "denominator" not in cfg:
        raise ValueError("rational tables need a 'denominator'")
    denom = None
    if kind == "rational":
        dE, dC = _collect([cfg["denominator"]], n)
        denom = _PolyTable(dE, dC[0])
    base = jnp.asarray(sig.h) if cfg.get("base") == "h" else jnp.zeros((n, n))

    def metric(x):
        S = table(x)
        if denom is not None:
            S = S / denom(x)
        return base + S

    dom = cfg.get("domain", [-1.0, 1.0])
    lo, hi = (np.full(n, dom[0]), np.full(n, dom[1])) if np.ndim(dom[0]) == 0 else dom
    return MetricChart(
        name=cfg.get("name", "config_metric"), signature=sig, metric=metric,
        lower=np.asarray(lo, dtype=float), upper=np.asarray(hi, dtype=float),
        description=f"{kind} coefficient table",
    )


def load_chart(path: str | Path) -> MetricChart:
    return chart_from_config(json.loads(Path(path).read_text()))
