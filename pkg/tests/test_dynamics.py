import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from afmllg.core import DimensionlessParams, Mesh, random_field, uniform_field
from afmllg.dynamics import (DegenerateProjectionError, cross, effective_field, effective_field_terms, energy,
                             llg_rhs, local_coupling_f, order_parameters, project)
from afmllg.gridops import ShapeError

vec = st.tuples(*[st.floats(-10, 10)] * 3).map(np.array)
seeds = st.integers(0, 2**32 - 1)


def params(q=0.7, eps=0.3, delta=2.0, s=1.0, h=(0.1, -0.2, 0.3)):
    return DimensionlessParams(q=q, eps=eps, delta=delta, alpha=0.1, s=s, h_ext=h)


@given(vec, vec)
def test_torques_orthogonal_to_m(m, h):
    mxh = cross(m, h)
    scale = max(1.0, np.linalg.norm(m) ** 2 * np.linalg.norm(h)) * np.linalg.norm(m)
    assert abs(m @ mxh) <= 1e-14 * scale
    assert abs(m @ cross(m, mxh)) <= 1e-14 * scale * max(1.0, np.linalg.norm(m))


@given(vec, vec)
def test_cross_matches_numpy(a, b):
    assert np.allclose(cross(a, b), np.cross(a, b), rtol=0, atol=1e-12)


def test_llg_rhs_preserves_norm_to_first_order():
    rng = np.random.default_rng(3)
    m = random_field(Mesh((10,), (0.1,)), 1.0, 3).values
    h = rng.standard_normal(m.shape)
    assert np.max(np.abs(np.sum(m * llg_rhs(m, h, 0.3), axis=0))) < 1e-14


def test_local_field_terms():
    mesh = Mesh((1,), (1.0,))
    a = np.array([[0.6], [0.8], [0.0]])
    b = np.array([[-1.0], [0.0], [0.0]])
    p = params()
    f = local_coupling_f(a, b, p)
    assert np.allclose(f[:, 0], [0.1 + 2.0, -0.7 * 0.8 - 0.2, 0.3])
    assert np.allclose(effective_field(a, b, p, mesh), f)


@pytest.mark.parametrize("delta", [0.5, 3.0, 240.0])
def test_antiparallel_easy_axis_is_lowest(delta):
    mesh = Mesh((2, 2, 2), (0.5, 0.5, 0.5))
    p = params(q=1.0, delta=delta, h=(0, 0, 0))
    w = {name: energy(uniform_field(mesh, da).values, uniform_field(mesh, db).values, p, mesh).total
         for name, da, db in [("anti_easy", (1, 0, 0), (-1, 0, 0)), ("par_easy", (1, 0, 0), (1, 0, 0)),
                              ("anti_hard", (0, 1, 0), (0, -1, 0))]}
    assert w["anti_easy"] < w["par_easy"]
    assert w["anti_easy"] < w["anti_hard"]


def test_energy_uniform_closed_form():
    mesh = Mesh((3, 2, 2), (0.2, 0.5, 0.5))
    p = params(q=0.9, delta=5.0, s=0.8, h=(0.0, 0.4, 0.0))
    a = uniform_field(mesh, (0, 1, 0)).values
    b = uniform_field(mesh, (0, -1, 0), 0.8).values
    w = energy(a, b, p, mesh)
    V = mesh.volume
    assert w.anisotropy == pytest.approx(0.9 * (1 + 0.64) * V)
    assert w.afm_exchange == pytest.approx(-5.0 * 0.8 * V)
    assert w.zeeman == pytest.approx(-0.4 * (1 - 0.8) * V)
    assert w.fm_exchange == 0.0


@given(seeds, st.floats(0.3, 1.0), st.floats(-50, 50))
def test_energy_parts_sum(seed, s, delta):
    mesh = Mesh((4, 3, 2), (0.25, 0.3, 0.5))
    p = params(delta=delta, s=s)
    w = energy(random_field(mesh, 1, seed).values, random_field(mesh, s, seed + 1).values, p, mesh)
    assert abs(w.total - (w.anisotropy + w.fm_exchange + w.afm_exchange + w.zeeman)) < 1e-14 * max(1, abs(w.total))


@pytest.mark.parametrize("mesh", [Mesh((8,), (0.1,)), Mesh((3, 4, 3), (0.3, 0.2, 0.25))],
                         ids=["1d", "3d"])
def test_gradient_matches_field(mesh):
    """-(1/dv) dW/dm_A = 2 (anisotropy + exchange) + coupling + Zeeman, term by term."""
    rng = np.random.default_rng(5)
    p = params(q=0.8, eps=0.4, delta=3.0, s=0.9)
    a = random_field(mesh, 1.0, 11).values
    b = random_field(mesh, 0.9, 12).values
    terms = effective_field_terms(a, b, p, mesh)
    h = 1e-5

    def grad(fn, idx):
        ap, am = a.copy(), a.copy()
        ap[idx] += h
        am[idx] -= h
        return -(fn(ap) - fn(am)) / (2 * h * mesh.cell_volume)

    parts = {
        "anisotropy": (lambda x: energy(x, b, p, mesh).anisotropy, 2 * terms.anisotropy),
        "fm_exchange": (lambda x: energy(x, b, p, mesh).fm_exchange, 2 * terms.fm_exchange),
        "afm_exchange": (lambda x: energy(x, b, p, mesh).afm_exchange, terms.afm_coupling),
        "zeeman": (lambda x: energy(x, b, p, mesh).zeeman, terms.zeeman),
    }
    for _ in range(12):
        idx = (int(rng.integers(3)),) + tuple(int(rng.integers(d)) for d in mesh.dims)
        for name, (fn, expect) in parts.items():
            got = grad(fn, idx)
            assert got == pytest.approx(expect[idx], abs=1e-6 * max(1.0, abs(expect[idx]))), name


@given(seeds, st.floats(0.05, 1.0))
def test_project_idempotent(seed, s):
    v = np.random.default_rng(seed).standard_normal((3, 5, 4, 3)) * 7.0
    once = project(v, s)
    assert once.max_norm_deviation() < 1e-14
    assert np.max(np.abs(project(once.values, s).values - once.values)) < 1e-14


def test_project_degenerate():
    v = np.ones((3, 4))
    v[:, 2] = 0.0
    with pytest.raises(DegenerateProjectionError) as err:
        project(v, 1.0, step=7)
    assert err.value.index == (2,) and err.value.step == 7
    v[:, 2] = np.nan
    with pytest.raises(DegenerateProjectionError):
        project(v)


@given(seeds, st.floats(0.1, 1.0))
def test_order_parameter_identity(seed, s):
    mesh = Mesh((5, 4, 2), (1, 1, 1))
    a = random_field(mesh, 1.0, seed).values
    b = random_field(mesh, s, seed ^ 0xABCDEF).values
    m, l = order_parameters(a, b)
    lhs = np.sum(m * m, axis=0) + np.sum(l * l, axis=0)
    assert np.max(np.abs(lhs - (1 + s * s) / 2)) < 1e-13


def test_shape_checks():
    mesh = Mesh((4,), (0.25,))
    with pytest.raises(ShapeError):
        effective_field(np.zeros((3, 5)), np.zeros((3, 5)), params(), mesh)
    with pytest.raises(ShapeError):
        energy(np.zeros((3, 4)), np.zeros((3, 3)), params(), mesh)
