"""Matrix model of so(p+1, q+1) with its |1|-grading and parabolic subgroups.

Everything is expressed in the null basis ``(e_0, e_1, ..., e_n, e_inf)`` in
which the invariant quadratic form reads ``2 x^0 x^inf + h_ij x^i x^j`` with
``h = diag(+1 (p times), -1 (q times))``.  Matrices are plain ``numpy``
arrays; the functions here are pure.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.linalg import expm

GROUP_TOL = 1e-10
DET_TOL = 1e-8
ALGEBRA_TOL = 1e-12
#: entry bound for random group samples; keeps absolute round-off gates meaningful
SAMPLE_BOUND = 4.0

#: subgroup tags accepted by :func:`membership`
VARIANTS = (
    "O", "SO",
    "P_ray", "P_line", "SP_ray", "SP_line",
    "P0_ray", "P0_line", "SP0_ray", "SP0_line",
)


@dataclass(frozen=True)
class Signature:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError(f"signature entries must be non-negative, got ({self.p}, {self.q})")
        if self.p + self.q < 1:
            raise ValueError("need p + q >= 1")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def N(self) -> int:
        """Dimension of the standard representation, n + 2."""
        return self.n + 2

    @cached_property
    def h(self) -> np.ndarray:
        return np.diag([1.0] * self.p + [-1.0] * self.q)

    @cached_property
    def J(self) -> np.ndarray:
        return quadratic_form(self).J

    def require_geometric(self):
        if self.n < 3:
            raise ValueError(f"geometric constructions need n = p + q >= 3, got n = {self.n}")


@dataclass(frozen=True)
class QuadForm:
    J: np.ndarray
    h: np.ndarray


def quadratic_form(sig: Signature) -> QuadForm:
    n = sig.n
    h = np.diag([1.0] * sig.p + [-1.0] * sig.q)
    J = np.zeros((n + 2, n + 2))
    J[0, n + 1] = J[n + 1, 0] = 1.0
    J[1:n + 1, 1:n + 1] = h
    return QuadForm(J=J, h=h)


def _check_square(A: np.ndarray, sig: Signature):
    A = np.asarray(A, dtype=float)
    if A.shape != (sig.N, sig.N):
        raise ValueError(f"expected a {sig.N}x{sig.N} matrix, got shape {A.shape}")
    return A


# --- group side -------------------------------------------------------------

def orthogonality_defect(A: np.ndarray, sig: Signature) -> float:
    A = _check_square(A, sig)
    J = sig.J
    return float(np.linalg.norm(A.T @ J @ A - J))


def membership(A: np.ndarray, variant: str, sig: Signature, tol: float = GROUP_TOL) -> bool:
    """Decide whether ``A`` belongs to the subgroup named by ``variant``.

    ``P_ray``/``P_line`` stabilise the null ray / null line through ``e_0``,
    the ``S`` prefix adds ``det A = 1`` and a ``0`` suffix restricts to the
    block-diagonal Levi factor.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")
    A = _check_square(A, sig)
    if orthogonality_defect(A, sig) >= tol:
        return False
    special = variant.startswith("S")
    if special and abs(np.linalg.det(A) - 1.0) >= DET_TOL:
        return False
    if variant in ("O", "SO"):
        return True
    scale = max(1.0, abs(A[0, 0]))
    if np.linalg.norm(A[1:, 0]) >= tol * scale:
        return False
    if variant.endswith("ray") and A[0, 0] <= 0:
        return False
    if "0" in variant:
        n = sig.n
        off = np.linalg.norm(A[0, 1:]) + np.linalg.norm(A[1:n + 1, n + 1])
        if off >= tol * scale:
            return False
    return True


def variant_tags(A: np.ndarray, sig: Signature) -> frozenset:
    return frozenset(v for v in VARIANTS if membership(A, v, sig))


def levi_element(lam: float, m: np.ndarray) -> np.ndarray:
    """Block-diagonal ``diag(lam, m, 1/lam)``."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    n = m.shape[0]
    p = np.zeros((n + 2, n + 2))
    p[0, 0] = lam
    p[1:n + 1, 1:n + 1] = m
    p[n + 1, n + 1] = 1.0 / lam
    return p


def levi_parts(p: np.ndarray) -> tuple[float, np.ndarray]:
    n = p.shape[0] - 2
    return float(p[0, 0]), p[1:n + 1, 1:n + 1].copy()


# --- algebra side -----------------------------------------------------------

def algebra_defect(Z: np.ndarray, sig: Signature) -> float:
    Z = _check_square(Z, sig)
    J = sig.J
    return float(np.linalg.norm(Z.T @ J + J @ Z))


def g_minus(x: np.ndarray, sig: Signature) -> np.ndarray:
    """Grade -1 element with data ``x``: ``x`` down column 0, ``-x_j`` along the last row."""
    x = np.asarray(x, dtype=float)
    n = sig.n
    Z = np.zeros((n + 2, n + 2))
    Z[1:n + 1, 0] = x
    Z[n + 1, 1:n + 1] = -(sig.h @ x)
    return Z


def g_plus(y: np.ndarray, sig: Signature) -> np.ndarray:
    """Grade +1 element, the J-transpose partner of :func:`g_minus`."""
    y = np.asarray(y, dtype=float)
    n = sig.n
    Z = np.zeros((n + 2, n + 2))
    Z[0, 1:n + 1] = y
    Z[1:n + 1, n + 1] = -(sig.h @ y)
    return Z


def g_minus_data(Z: np.ndarray) -> np.ndarray:
    n = Z.shape[0] - 2
    return Z[1:n + 1, 0].copy()


def _grade_masks(N: int):
    e = np.zeros(N)
    e[0], e[-1] = 1.0, -1.0
    grade = e[:, None] - e[None, :]
    return grade


def grade_decompose(Z: np.ndarray, sig: Signature, tol: float = 1e-9):
    """Split ``Z`` in so(J) into its grade -1, 0 and +1 parts.

    The grading is the eigenspace decomposition of ``ad(diag(1, 0, ..., 0, -1))``,
    so each part is a masked copy of ``Z``.
    """
    Z = _check_square(Z, sig)
    if algebra_defect(Z, sig) > tol * max(1.0, np.linalg.norm(Z)):
        raise ValueError("matrix is not in so(J)")
    grade = _grade_masks(sig.N)
    parts = tuple(np.where(grade == k, Z, 0.0) for k in (-1, 0, 1))
    return parts


def random_algebra_element(sig: Signature, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    S = rng.normal(scale=scale, size=(sig.N, sig.N))
    S = S - S.T
    return sig.J @ S


def random_o_pq(sig: Signature, rng: np.random.Generator, scale: float = 0.5,
                component: bool = True) -> np.ndarray:
    """Random element of O(p, q) as ``exp(h K) @ reflection``."""
    n = sig.n
    K = rng.normal(scale=scale, size=(n, n))
    K = K - K.T
    m = expm(sig.h @ K)
    if component:
        signs = np.ones(n)
        if sig.p:
            signs[0] = rng.choice([-1.0, 1.0])
        if sig.q:
            signs[sig.p] = rng.choice([-1.0, 1.0])
        m = m @ np.diag(signs)
    return m


def random_levi(sig: Signature, rng: np.random.Generator, variant: str = "P_line") -> np.ndarray:
    """Random element of the Levi factor of ``variant`` with bounded entries."""
    lam = float(np.exp(rng.uniform(-0.7, 0.7)))
    if variant in ("P_line", "SP_line"):
        lam *= rng.choice([-1.0, 1.0])
    m = random_o_pq(sig, rng)
    p = levi_element(lam, m)
    if variant.startswith("S") and np.linalg.det(m) < 0:
        # det(levi) = det(m), independent of lam
        flip = np.ones(sig.n)
        flip[0] = -1.0
        p = levi_element(lam, m @ np.diag(flip))
    return p


def nilpotent_exp(Z: np.ndarray) -> np.ndarray:
    """exp of a grade +-1 element; the series stops after the quadratic term."""
    N = Z.shape[0]
    return np.eye(N) + Z + 0.5 * Z @ Z


def _bounded(draw, bound: float, tries: int = 1000) -> np.ndarray:
    for _ in range(tries):
        A = draw()
        if np.max(np.abs(A)) <= bound:
            return A
    raise RuntimeError(f"no sample with entries bounded by {bound} in {tries} draws")


def random_parabolic(sig: Signature, rng: np.random.Generator, variant: str = "P_line",
                     scale: float = 0.5, bound: float = SAMPLE_BOUND) -> np.ndarray:
    """``exp(Z_1) @ levi`` with ``Z_1`` a random grade +1 element, entries bounded by ``bound``."""
    base = variant.replace("0", "")

    def draw():
        Z1 = g_plus(rng.normal(scale=scale, size=sig.n), sig)
        return nilpotent_exp(Z1) @ random_levi(sig, rng, base)

    return _bounded(draw, bound)


def random_group_element(sig: Signature, rng: np.random.Generator, scale: float = 0.4,
                         bound: float = SAMPLE_BOUND) -> np.ndarray:
    """Random element of O(J) (a bounded exponential times a Levi element), entries bounded by ``bound``."""
    return _bounded(lambda: expm(random_algebra_element(sig, rng, scale=scale)) @ random_levi(sig, rng, "P_line"),
                    bound)


def group_inverse(A: np.ndarray, sig: Signature) -> np.ndarray:
    """``J A^T J``, the inverse of an element of O(J) without a linear solve."""
    return sig.J @ np.asarray(A, dtype=float).T @ sig.J


def ad(p: np.ndarray, Z: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if abs(np.linalg.det(p)) < 1e-14:
        raise ValueError("Ad needs an invertible matrix")
    return p @ Z @ np.linalg.inv(p)


def bracket(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return X @ Y - Y @ X


def det_twist(A: np.ndarray, sig: Signature) -> np.ndarray:
    """The isomorphism ``A -> det(A) A`` from P_ray onto SP_line (odd n only)."""
    if sig.n % 2 == 0:
        raise ValueError("det_twist lands in SP_line only when n is odd")
    A = _check_square(A, sig)
    # det is exactly +-1 on O(J); the sign avoids LU round-off in the scalar
    return np.sign(np.linalg.det(A)) * A


class Representation(Enum):
    STANDARD = "standard"
    DET_TWISTED = "det_twisted"


def rep_group(rep: Representation | str, A: np.ndarray) -> np.ndarray:
    rep = Representation(rep)
    A = np.asarray(A, dtype=float)
    if rep is Representation.STANDARD:
        return A
    return np.linalg.det(A) * A


def rep_algebra(rep: Representation | str, Z: np.ndarray) -> np.ndarray:
    # the determinant character is trivial on so(J)
    Representation(rep)
    return np.asarray(Z, dtype=float)


def rep_apply(rep: Representation | str, v: np.ndarray, *, group: np.ndarray | None = None,
              algebra: np.ndarray | None = None) -> np.ndarray:
    if (group is None) == (algebra is None):
        raise TypeError("pass exactly one of group= or algebra=")
    v = np.asarray(v, dtype=float)
    M = rep_group(rep, group) if group is not None else rep_algebra(rep, algebra)
    if M.shape[1] != v.shape[0]:
        raise ValueError(f"vector of length {v.shape[0]} does not fit a {M.shape} matrix")
    return M @ v


def ad_compatibility_defect(rep: Representation | str, p: np.ndarray, Z: np.ndarray,
                            sig: Signature | None = None) -> float:
    """``max |rho(Ad(p) Z) - rho(p) rho(Z) rho(p^-1)|`` over entries.

    With ``sig`` the inverse on the right is the group inverse ``J p^T J``,
    so the two sides share no arithmetic.
    """
    lhs = rep_algebra(rep, ad(p, Z))
    p_inv = np.linalg.inv(p) if sig is None else group_inverse(p, sig)
    rhs = rep_group(rep, p) @ rep_algebra(rep, Z) @ rep_group(rep, p_inv)
    return float(np.max(np.abs(lhs - rhs)))


def acts_trivially_on_g_minus(p: np.ndarray, sig: Signature, tol: float = 1e-9) -> bool:
    for i in range(sig.n):
        x = np.zeros(sig.n)
        x[i] = 1.0
        if np.linalg.norm(g_minus_data(ad(p, g_minus(x, sig))) - x) > tol:
            return False
    return True
