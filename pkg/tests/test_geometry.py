import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tractorlab._jax import jax, jnp
from tractorlab.geometry import (
    REGISTERED_CHARTS, DomainError, WeightedScalar, bianchi_defect, chart_from_config, conformal_rescale,
    curvature_pack, deck_transition, get_chart, get_transition, load_chart, registered_transitions,
    transition_pushforward, weyl_trace_defect,
)
from tractorlab.geometry import finite_difference as fd
from tractorlab.geometry.curvature import christoffel, metric_jets

rng0 = np.random.default_rng(0)


def _max(a):
    return float(np.max(np.abs(a)))


def test_flat_pack_is_zero():
    c = get_chart("flat(2,3)")
    pk = curvature_pack(c, c.sample(rng0))
    for name in ("christoffel", "riemann", "ricci", "schouten", "weyl", "cotton"):
        assert _max(getattr(pk, name)) == 0.0
    assert pk.scalar == 0.0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_sphere_schouten_is_half_metric(n):
    c = get_chart(f"sphere({n})")
    rng = np.random.default_rng(n)
    for _ in range(5):
        pk = curvature_pack(c, c.sample(rng))
        assert _max(pk.schouten - 0.5 * pk.g) < 1e-12
        assert _max(pk.ricci - (n - 1) * pk.g) < 1e-11
        assert abs(pk.scalar - n * (n - 1)) < 1e-10


def test_product_sphere_cotton_vanishes_at_two_points():
    c = get_chart("product_sphere(2,2)")
    for x in (np.array([0.3, -0.2, 0.5, 0.1]), np.array([-1.1, 0.4, 0.2, 0.9])):
        pk = curvature_pack(c, x)
        assert _max(pk.cotton) < 1e-12


def test_product_sphere_is_conformally_flat():
    # g_{S^p} - g_{S^q} is the conformal structure of the flat model; its Weyl tensor vanishes
    for name in ("product_sphere(2,2)", "product_sphere(2,3)"):
        c = get_chart(name)
        for x in (c.sample(rng0, 0.5), c.sample(rng0, 0.5)):
            assert _max(curvature_pack(c, x).weyl) < 1e-12


def test_riemannian_product_has_weyl_and_no_cotton():
    c = get_chart("riemannian_product_sphere(2,2)")
    for x in (np.array([0.3, -0.2, 0.5, 0.1]), np.array([-1.1, 0.4, 0.2, 0.9])):
        pk = curvature_pack(c, x)
        assert _max(pk.weyl) > 0.1
        assert _max(pk.cotton) < 1e-12


@pytest.mark.parametrize("name", ["generic_poly(2,3)", "generic_poly(3,1)", "riemannian_product_sphere(2,2)",
                                  "conformally_flat(wave,3,1)"])
def test_pack_invariants(name):
    c = get_chart(name)
    rng = np.random.default_rng(4)
    for _ in range(4):
        pk = curvature_pack(c, c.sample(rng, 0.6))
        assert _max(pk.ricci - pk.ricci.T) < 1e-10
        assert weyl_trace_defect(pk) < 1e-8
        assert bianchi_defect(pk) < 1e-8


@pytest.mark.parametrize("name", ["generic_poly(2,3)", "sphere(4)", "riemannian_product_sphere(2,2)"])
def test_pack_matches_finite_difference_oracle(name):
    c = get_chart(name)
    x = c.sample(np.random.default_rng(1), 0.5)
    pk = curvature_pack(c, x)
    F = fd.curvature(c, x)
    assert _max(pk.christoffel - F["christoffel"]) < 1e-10
    assert _max(pk.riemann - F["riemann"]) < 1e-7
    assert _max(pk.schouten - F["schouten"]) < 1e-7
    assert _max(pk.weyl - F["weyl"]) < 1e-7
    assert _max(pk.cotton - fd.cotton(c, x)) < 1e-5


def test_pack_errors():
    with pytest.raises(ValueError):
        curvature_pack(get_chart("sphere(2)"), np.zeros(2))
    c = get_chart("sphere(3)")
    with pytest.raises(DomainError):
        curvature_pack(c, np.array([10.0, 0.0, 0.0]))
    with pytest.raises(DomainError):
        curvature_pack(c, np.array([c.upper[0] - 1e-7, 0.0, 0.0]))


def test_forward_mode_second_derivatives_exact_on_polynomials():
    cfg = {
        "name": "cubic", "signature": [2, 1], "kind": "polynomial", "base": "h",
        "entries": [
            {"i": 0, "j": 0, "terms": [[0.5, [2, 1, 0]]]},
            {"i": 0, "j": 2, "terms": [[0.25, [0, 1, 1]], [-0.1, [1, 0, 0]]]},
            {"i": 1, "j": 1, "terms": [[0.3, [0, 0, 3]]]},
        ],
    }
    c = chart_from_config(cfg)
    x = np.array([0.3, -0.4, 0.2])
    g, dg, d2g = (np.asarray(a) for a in metric_jets(c.metric, jnp.asarray(x)))
    x0, x1, x2 = x
    assert abs(g[0, 0] - (1 + 0.5 * x0**2 * x1)) < 1e-15
    assert abs(dg[0, 0, 0] - x0 * x1) < 1e-15
    assert abs(d2g[0, 0, 0, 1] - x0) < 1e-13
    assert abs(d2g[0, 0, 0, 0] - x1) < 1e-13
    assert abs(d2g[0, 2, 1, 2] - 0.25) < 1e-13
    assert abs(d2g[2, 0, 2, 1] - 0.25) < 1e-13
    assert abs(d2g[1, 1, 2, 2] - 1.8 * x2) < 1e-13
    assert abs(dg[0, 2, 0] + 0.1) < 1e-15


def test_config_loading_and_errors(tmp_path):
    cfg = {"name": "rat", "signature": [3, 0], "kind": "rational", "base": "h",
           "entries": [{"i": 0, "j": 1, "terms": [[0.1, [1, 0, 0]]]}],
           "denominator": [[1.0, [0, 0, 0]], [0.5, [0, 0, 2]]], "domain": [-0.5, 0.5]}
    path = tmp_path / "rat.json"
    path.write_text(json.dumps(cfg))
    c = load_chart(path)
    x = np.array([0.2, 0.1, 0.4])
    expect = np.eye(3)
    expect[0, 1] = expect[1, 0] = 0.1 * 0.2 / (1 + 0.5 * 0.16)
    assert _max(c.g(x) - expect) < 1e-15
    with pytest.raises(ValueError):
        chart_from_config({**cfg, "kind": "spline"})
    with pytest.raises(ValueError):
        chart_from_config({k: v for k, v in cfg.items() if k != "denominator"})
    with pytest.raises(ValueError):
        chart_from_config({**cfg, "entries": [{"i": 0, "j": 5, "terms": []}]})


def test_chart_names():
    for name in REGISTERED_CHARTS:
        c = get_chart(name)
        x = c.sample(rng0)
        assert c.signature_at(x) == (c.signature.p, c.signature.q)
    for bad in ("torus(3)", "flat(2)", "sphere(3)/east", "nonsense"):
        with pytest.raises(KeyError):
            get_chart(bad)


def test_conformal_rescale_trivial_and_constant():
    c = get_chart("flat(2,3)")
    x = c.sample(rng0)
    assert np.array_equal(conformal_rescale(c, lambda y: 0.0 * y[0]).g(x), c.g(x))
    assert _max(conformal_rescale(c, lambda y: jnp.log(2.0) + 0.0 * y[0]).g(x) - 4 * c.g(x)) < 1e-15


def test_conformal_rescale_of_flat_is_round_sphere():
    flat = get_chart("flat(4,0)")
    sph = get_chart("sphere(4)")
    resc = conformal_rescale(flat, lambda y: jnp.log(2.0 / (1.0 + jnp.dot(y, y))))
    rng = np.random.default_rng(2)
    for _ in range(3):
        x = rng.uniform(-1.5, 1.5, 4)
        a, b = curvature_pack(resc, x), curvature_pack(sph, x)
        for name in ("g", "christoffel", "riemann", "schouten", "weyl", "cotton"):
            assert _max(getattr(a, name) - getattr(b, name)) < 1e-10


UPSILONS = [
    lambda y: 0.3 * jnp.sin(y[0]) + 0.2 * y[1] * y[2],
    lambda y: 0.1 * jnp.dot(y, y) - 0.2 * y[0],
    lambda y: 0.25 * jnp.exp(-jnp.dot(y, y)),
]


@pytest.mark.parametrize("k", range(len(UPSILONS)))
@pytest.mark.parametrize("name", ["generic_poly(2,3)", "riemannian_product_sphere(2,2)"])
def test_weyl_invariance_and_schouten_law(name, k):
    ups = UPSILONS[k]
    c = get_chart(name)
    hat = conformal_rescale(c, ups)
    x = c.sample(np.random.default_rng(k), 0.5)
    a, b = curvature_pack(c, x), curvature_pack(hat, x)
    assert _max(a.weyl - b.weyl) < 1e-7
    xj = jnp.asarray(x)
    dU = np.asarray(jax.grad(ups)(xj))
    d2U = np.asarray(jax.hessian(ups)(xj))
    Gam = np.asarray(christoffel(c.metric, xj))
    hess = d2U - np.einsum("kij,k->ij", Gam, dU)
    expect = a.schouten - hess + np.outer(dU, dU) - 0.5 * (dU @ a.ginv @ dU) * a.g
    assert _max(b.schouten - expect) < 1e-7


@pytest.mark.parametrize("name", ["flat(2,3)", "sphere(4)", "conformally_flat(gauss,2,3)",
                                  "conformally_flat(sphere,4,0)", "product_sphere(2,3)"])
def test_conformally_flat_charts_have_no_weyl_or_cotton(name):
    c = get_chart(name)
    pk = curvature_pack(c, c.sample(np.random.default_rng(3), 0.6))
    assert _max(pk.weyl) < 1e-8
    assert _max(pk.cotton) < 1e-8


def test_weighted_scalar():
    s = WeightedScalar(2.0, -1, "g")
    r = s.rescaled(0.7, "ghat")
    assert abs(r.value - 2.0 * np.exp(-0.7)) < 1e-15
    assert r.rescaled(-0.7, "g").value == pytest.approx(2.0, abs=1e-15)
    assert r.in_scale("ghat") == r.value
    with pytest.raises(ValueError):
        r.in_scale("g")
    with pytest.raises(ValueError):
        WeightedScalar(1.0, 0.3, "g")
    assert WeightedScalar(1.0, 0.5, "g").rescaled(2.0, "h").value == pytest.approx(np.e)


def test_sphere_stereographic_transition_example():
    t = get_transition("sphere(2)", "sphere(2)/south")
    y, w = transition_pushforward(t, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    assert np.allclose(y, [1.0, 0.0])
    D = t.jacobian(np.array([1.0, 0.0]))
    assert abs(abs(np.linalg.det(D)) - 1.0) < 1e-14
    assert np.allclose(D.T @ D, np.eye(2))
    with pytest.raises(DomainError):
        transition_pushforward(t, np.zeros(2), np.ones(2))


def test_identity_transitions_not_registered():
    with pytest.raises(KeyError):
        get_transition("sphere(3)", "sphere(3)")


ALL_TRANSITIONS = registered_transitions(list(REGISTERED_CHARTS) + ["sphere(2)", "sphere(2)/south"]) + [
    deck_transition(2, 3), deck_transition(1, 2)]


@pytest.mark.parametrize("t", ALL_TRANSITIONS, ids=lambda t: t.name)
def test_transitions_are_isometries(t):
    rng = np.random.default_rng(5)
    done = 0
    while done < 100:
        x = t.source.sample(rng, 0.6)
        if not t.in_overlap(x):
            continue
        done += 1
        assert t.metric_defect(x) < 1e-8
        assert _max(t.map_back(t.map_point(x)) - x) < 1e-10
        v, w = rng.normal(size=(2, t.source.dim))
        y, Dv = transition_pushforward(t, x, v)
        Dw = t.jacobian(x) @ w
        assert abs(Dv @ t.target.g(y) @ Dw - v @ t.source.g(x) @ w) < 1e-8 * (1 + np.abs(v).max() * np.abs(w).max())


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["generic_poly(2,3)", "sphere(3)", "riemannian_product_sphere(2,2)"]),
       st.integers(0, 2**31))
def test_christoffel_matches_oracle_property(name, seed):
    c = get_chart(name)
    x = c.sample(np.random.default_rng(seed), 0.6)
    assert _max(np.asarray(christoffel(c.metric, jnp.asarray(x))) - fd.christoffel(c, x)) < 1e-9
