from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tractorlab import lie_core as lc
from tractorlab.homogeneous import (
    ModelSpace, SectionError, TopologyError, embed, gauge, line_monodromy, local_section, mc_generator,
    mc_holonomy, mc_transport, model_loop, null_ray_of, quadric_tractor_holonomy,
)
from tractorlab.tractor import holonomy_metric_defect


def _random_point(model, rng):
    a, b = rng.normal(size=model.p + 1), rng.normal(size=model.q + 1)
    return np.r_[a / np.linalg.norm(a), b / np.linalg.norm(b)]


def _max(a):
    return float(np.max(np.abs(a)))


# --- points and the embedding ----------------------------------------------------

def test_null_ray_of_base_point():
    m = ModelSpace("product_sphere", 2, 3)
    assert np.array_equal(null_ray_of(m, m.base_point()), np.eye(7)[0])


def test_antipode_same_line_opposite_ray():
    ups, quad = ModelSpace("product_sphere", 2, 3), ModelSpace("quadric", 2, 3)
    z = _random_point(ups, np.random.default_rng(0))
    assert np.allclose(null_ray_of(ups, -z), -null_ray_of(ups, z))
    assert np.allclose(null_ray_of(quad, -z), null_ray_of(quad, z))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([(1, 2), (2, 3), (3, 1), (4, 0)]), st.integers(0, 2**31))
def test_embedding_is_null(pq, seed):
    m = ModelSpace("product_sphere" if pq[1] else "round_sphere", *pq)
    z = _random_point(m, np.random.default_rng(seed))
    v = null_ray_of(m, z)
    assert abs(v @ m.signature.J @ v) < 1e-14
    # L is an isometry from diag(I, -I) to J
    a, b = m.split(z)
    u = np.random.default_rng(seed + 1).normal(size=len(z))
    ua, ub = m.split(u)
    Lu = embed(ua, ub)
    assert abs(Lu @ m.signature.J @ Lu - (ua @ ua - ub @ ub)) < 1e-12


def test_null_ray_rejects_off_sphere():
    with pytest.raises(ValueError):
        null_ray_of(ModelSpace("quadric", 1, 2), np.ones(5))


def test_model_space_validation():
    with pytest.raises(ValueError):
        ModelSpace("torus", 2, 2)
    with pytest.raises(ValueError):
        ModelSpace("round_sphere", 2, 1)


# --- sections --------------------------------------------------------------------

@pytest.mark.parametrize("variant", ["P_ray", "P_line", "SP_ray", "SP_line"])
def test_section_identity_at_base_point(variant):
    m = ModelSpace("quadric", 2, 3)
    s = local_section(variant, m)
    S = s(m.base_point())
    assert lc.orthogonality_defect(S, m.signature) < 1e-14
    assert np.allclose(S[:, 0], np.eye(7)[0])
    if variant.startswith("S"):
        assert np.linalg.det(S) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["P_line", "SP_line"]), st.integers(0, 2**31))
def test_section_orthogonal_and_covers_point(variant, seed):
    m = ModelSpace("quadric", 2, 3)
    z = _random_point(m, np.random.default_rng(seed))
    s = local_section(variant, m, center=z)
    S = s(z)
    assert lc.orthogonality_defect(S, m.signature) < 1e-12
    assert np.allclose(S[:, 0], embed(*m.split(z)), atol=1e-14)
    assert s(-z) == pytest.approx(S @ np.diag(np.r_[-1.0, np.ones(5), -1.0]), abs=1e-12)


def test_section_error_at_degenerate_pivot():
    m = ModelSpace("quadric", 2, 3)
    s = local_section("P_line", m)
    z = m.base_point()
    z[:3] = [0.0, 1.0, 0.0]
    with pytest.raises(SectionError):
        s(z)


def test_gauge_between_overlapping_sections():
    m = ModelSpace("quadric", 1, 2)
    rng = np.random.default_rng(4)
    z = _random_point(m, rng)
    s1 = local_section("P_line", m)
    s2 = local_section("P_line", m, center=z)
    g = gauge(s1, s2, z)
    assert lc.membership(g, "P_line", m.signature)
    assert np.allclose(s2(z) @ g, s1(z))


def test_mc_generator_in_algebra():
    m = ModelSpace("quadric", 2, 3)
    s = local_section("P_line", m)
    z = m.base_point()
    dz = np.r_[0.0, 0.3, -0.2, 0.0, 0.1, 0.4, 0.0]
    A = mc_generator(s, z, dz)
    assert lc.algebra_defect(A, m.signature) < 1e-14


# --- Maurer-Cartan transport -------------------------------------------------------

def test_mc_transport_constant_path():
    m = ModelSpace("quadric", 1, 2)
    loop = model_loop(m, "control-arc")
    const = replace(loop, pieces=(replace(loop.pieces[0], t1=0.0),), closure="open")
    v0 = np.arange(1.0, 6.0)
    assert _max(mc_transport("P_line", "standard", const, v0).value - v0) < 1e-15


@pytest.mark.parametrize("loop_id", ["control-arc", "control-backtrack"])
def test_mc_contractible_loops_trivial(loop_id):
    m = ModelSpace("quadric", 2, 3)
    r = mc_holonomy("P_line", "standard", model_loop(m, loop_id))
    assert _max(r.value - np.eye(7)) < 1e-6
    assert r.j_drift < 1e-8


@pytest.mark.parametrize("pq", [(1, 2), (2, 3)])
@pytest.mark.parametrize("rep", ["standard", "det_twisted"])
def test_mc_antipodal_holonomy_trivial(pq, rep):
    m = ModelSpace("quadric", *pq)
    N = sum(pq) + 2
    r = mc_holonomy("P_line", rep, model_loop(m, "antipodal"))
    assert _max(r.value - np.eye(N)) < 1e-6
    assert _max(r.value - r.direct) < 1e-7
    assert r.j_drift < 1e-8
    assert np.linalg.det(r.value) == pytest.approx(1.0, abs=1e-9)


def test_mc_antipodal_not_closed_upstairs():
    m = ModelSpace("quadric", 1, 2)
    with pytest.raises(TopologyError):
        mc_holonomy("P_ray", "standard", model_loop(m, "antipodal"))


def test_mc_open_path_matches_sections():
    m = ModelSpace("product_sphere", 1, 2)
    r = mc_holonomy("P_ray", "standard", model_loop(m, "antipodal"))
    assert _max(r.value - r.direct) < 1e-7


# --- tautological line ---------------------------------------------------------------

@pytest.mark.parametrize("pq", [(1, 2), (2, 3), (3, 1)])
def test_line_monodromy(pq):
    quad, ups = ModelSpace("quadric", *pq), ModelSpace("product_sphere", *pq)
    assert line_monodromy(model_loop(quad, "antipodal")) == -1
    assert line_monodromy(model_loop(quad, "control-arc")) == 1
    assert line_monodromy(model_loop(quad, "control-backtrack")) == 1
    assert line_monodromy(model_loop(ups, "control-backtrack")) == 1


def test_line_monodromy_needs_closed_loop():
    with pytest.raises(ValueError):
        line_monodromy(model_loop(ModelSpace("product_sphere", 1, 2), "antipodal"))


def test_unknown_loop():
    with pytest.raises(KeyError):
        model_loop(ModelSpace("quadric", 1, 2), "figure-eight")


# --- tractor holonomy of the quadric --------------------------------------------------

@pytest.mark.parametrize("pq", [(1, 2), (2, 3)])
def test_quadric_tractor_holonomy_minus_identity(pq):
    N = sum(pq) + 2
    H = quadric_tractor_holonomy(*pq)
    assert _max(H + np.eye(N)) < 1e-5
    control = quadric_tractor_holonomy(*pq, loop_id="control-arc")
    assert _max(control - np.eye(N)) < 1e-6


def test_quadric_holonomy_preserves_h():
    loop = model_loop(ModelSpace("quadric", 2, 3), "antipodal")
    path = loop.tractor_path()
    assert holonomy_metric_defect(path, quadric_tractor_holonomy(2, 3)) < 1e-6


def test_sphere_has_no_antipodal_loop():
    with pytest.raises(TopologyError):
        quadric_tractor_holonomy(0, 3)
    with pytest.raises(TopologyError):
        model_loop(ModelSpace("round_sphere", 3, 0), "antipodal")
    H = quadric_tractor_holonomy(3, 0, loop_id="control-arc")
    assert _max(H - np.eye(5)) < 1e-6
