import numpy as np
import pytest

from tractorlab.ambient import (
    FrameError, ambient_connection_compare, ambient_connection_matrix, ambient_metric, ambient_metric_compare,
    homogeneous_extension, tangential_ricci, tangential_ricci_check, tractor_frame,
)
from tractorlab.geometry import get_chart
from tractorlab.tractor import connection_matrix


@pytest.fixture(scope="module")
def flat():
    return ambient_metric(get_chart("flat(2,3)"))


@pytest.fixture(scope="module")
def sphere():
    return ambient_metric(get_chart("sphere(4)"))


def test_flat_ambient_is_ricci_flat_off_the_cone(flat):
    rng = np.random.default_rng(0)
    for _ in range(3):
        X = flat.point(rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5, 5), rng.uniform(-0.05, 0.05))
        assert np.max(np.abs(flat.ricci(X))) < 1e-10


def test_ambient_signature(flat, sphere):
    for A, pq in ((flat, (3, 4)), (sphere, (5, 1))):
        ev = np.linalg.eigvalsh(A.g(A.point(1.3, np.full(A.base.dim, 0.1), 0.02)))
        assert (np.sum(ev > 0), np.sum(ev < 0)) == pq
        assert A.dim == A.base.dim + 2


def test_metric_homogeneous_of_degree_two(sphere):
    x, r, s = np.array([0.1, -0.2, 0.3, 0.0]), 0.03, 1.7
    G1 = sphere.g(sphere.point(1.0, x, r))
    Gs = sphere.g(sphere.point(s, x, r))
    # under t -> s t the metric scales by s^2; dt picks up no factor, so compare in the pulled-back frame
    D = np.diag(np.r_[s, np.ones(5)])
    assert np.max(np.abs(D.T @ Gs @ D - s**2 * G1)) < 1e-13


def test_tangential_ricci_flat(flat):
    assert tangential_ricci_check(flat, np.full(5, 0.2)) < 1e-10


@pytest.mark.parametrize("name", ["sphere(4)", "sphere(5)", "generic_poly(2,3)", "riemannian_product_sphere(2,2)"])
def test_tangential_ricci_vanishes(name):
    A = ambient_metric(get_chart(name))
    x = A.base.sample(np.random.default_rng(3), 0.5)
    tang, rr = tangential_ricci(A, x)
    assert tang < 1e-6
    if name == "generic_poly(2,3)":
        # only the transverse component survives at first order
        assert rr > 1e-8


@pytest.mark.parametrize("name,tol", [("flat(2,3)", 1e-9), ("sphere(4)", 1e-6), ("sphere(5)", 1e-6)])
def test_ambient_connection_matches_splitting(name, tol):
    A = ambient_metric(get_chart(name))
    rng = np.random.default_rng(1)
    for _ in range(3):
        x = A.base.sample(rng, 0.5)
        v = rng.normal(size=A.base.dim)
        assert ambient_connection_compare(A, x, v) < tol


def test_ambient_connection_generic_metric():
    # the frame agreement does not depend on conformal flatness
    A = ambient_metric(get_chart("generic_poly(2,3)"))
    x, v = np.full(5, 0.1), np.array([1.0, 0.0, -0.5, 0.2, 0.3])
    amb = ambient_connection_matrix(A, x, v)
    assert np.max(np.abs(amb - connection_matrix(A.base, x, v).matrix)) < 1e-6


@pytest.mark.parametrize("name", ["flat(2,3)", "sphere(4)", "generic_poly(2,3)"])
def test_ambient_metric_matches_tractor_metric(name):
    A = ambient_metric(get_chart(name))
    assert ambient_metric_compare(A, A.base.sample(np.random.default_rng(2), 0.5)) < 1e-9


def test_tractor_frame_homogeneity(sphere):
    x = np.array([0.1, 0.2, 0.0, -0.1])
    F1, F2 = tractor_frame(sphere, x, 1.0), tractor_frame(sphere, x, 2.0)
    # the d_t column is degree -1 as a vector field (components constant), the rest scale as 1/t
    assert np.allclose(F2[:, 0], F1[:, 0])
    assert np.allclose(F2[:, 1:], F1[:, 1:] / 2.0)


def test_frame_error_on_degenerate_pairing():
    A = ambient_metric(get_chart("flat(2,3)"))
    with pytest.raises(FrameError):
        tractor_frame(A, np.zeros(5), t=0.0)


def test_homogeneous_extension():
    U = np.array([2.0, 1.0, -1.0, 4.0])
    assert np.array_equal(homogeneous_extension(U, 1.0), U)
    out = homogeneous_extension(U, 4.0)
    assert out[0] == 2.0
    assert np.allclose(out[1:], U[1:] / 4.0)


def test_ambient_rejects_low_dimension():
    with pytest.raises(ValueError):
        ambient_metric(get_chart("sphere(2)"))
