import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from afmllg.core import InvalidParameterError, Mesh
from afmllg.gridops import (HelmholtzSolver, ShapeError, assemble_matrix, laplacian, neumann_eigenvalues,
                            prepare_helmholtz, solve, solve_count)

ORACLE = [
    Mesh((1,), (1.0,)),
    Mesh((2,), (0.5,)),
    Mesh((9,), (0.11,)),
    Mesh((2, 3, 4), (0.5, 0.3, 0.25)),
    Mesh((6, 6, 6), (1 / 6,) * 3),
    Mesh((6, 1, 5), (0.2, 1.0, 0.1)),
    Mesh((1, 1, 1), (1.0, 1.0, 1.0)),
]


def small_meshes():
    dims = st.one_of(st.tuples(st.integers(1, 8)), st.tuples(*[st.integers(1, 5)] * 3))
    return dims.flatmap(lambda d: st.tuples(st.just(d), st.tuples(*[st.floats(0.05, 2.0)] * len(d)))).map(
        lambda ds: Mesh(*ds))


@pytest.mark.parametrize("backend", ["dct", "cg"])
@pytest.mark.parametrize("mesh", ORACLE, ids=lambda m: "x".join(map(str, m.dims)))
def test_dense_oracle(mesh, backend):
    rng = np.random.default_rng(mesh.ncells)
    for c in (1e-3, 0.5, 30.0):
        A = assemble_matrix(mesh, c)
        hs = HelmholtzSolver(mesh, c, backend)
        for _ in range(10):
            b = rng.standard_normal(mesh.dims)
            ref = np.linalg.solve(A, b.ravel()).reshape(mesh.dims)
            assert np.max(np.abs(hs.solve(b) - ref)) <= 1e-11 * max(1.0, np.max(np.abs(ref)))


@given(small_meshes(), st.floats(0.0, 10.0), st.integers(0, 2**32 - 1))
def test_operator_symmetric(mesh, c, seed):
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal((2,) + mesh.dims)
    hs = HelmholtzSolver(mesh, c)
    lhs = np.sum(hs.apply_operator(u) * v)
    rhs = np.sum(u * hs.apply_operator(v))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, np.sum(np.abs(hs.apply_operator(u) * v)))


@given(small_meshes(), st.floats(0.0, 10.0), st.integers(0, 2**32 - 1))
def test_maximum_principle(mesh, c, seed):
    rhs = np.random.default_rng(seed).uniform(0.0, 1.0, mesh.dims)
    x = HelmholtzSolver(mesh, c).solve(rhs)
    assert np.min(x) >= -1e-13


@given(small_meshes(), st.integers(0, 2**32 - 1))
def test_laplacian_sums_to_zero(mesh, seed):
    f = np.random.default_rng(seed).standard_normal(mesh.dims)
    lap = laplacian(f, mesh)
    scale = np.max(np.abs(f)) / min(mesh.spacing) ** 2
    assert abs(np.mean(lap)) <= 1e-12 * max(1.0, scale)


def test_laplacian_second_order_interior():
    mesh = Mesh.from_extent((200,), (1.0,))
    x = mesh.centers()
    lap = laplacian(np.cos(np.pi * x), mesh)
    # cos(pi x) has zero slope at both ends, so the mirror ghost is consistent
    assert np.max(np.abs(lap + np.pi**2 * np.cos(np.pi * x))) < 1e-3


def test_eigenvalues_match_dense():
    mesh = Mesh((7,), (0.3,))
    ev = np.sort(np.linalg.eigvalsh(-assemble_matrix(mesh, 1.0) + np.eye(7)))
    assert np.allclose(np.sort(neumann_eigenvalues(7, 0.3)), ev, atol=1e-12)


def test_batch_solves_and_count():
    mesh = Mesh((4, 3, 2), (0.2, 0.3, 0.5))
    hs = prepare_helmholtz(mesh, 0.7)
    rhs = np.random.default_rng(0).standard_normal((3,) + mesh.dims)
    batch = solve(hs, rhs)
    assert solve_count(hs) == 3
    for i in range(3):
        assert np.allclose(batch[i], hs.solve(rhs[i]), atol=1e-15)
    assert solve_count(hs) == 6
    hs.reset()
    assert solve_count(hs) == 0


def test_identity_when_c_zero():
    mesh = Mesh((5,), (0.2,))
    b = np.arange(5.0)
    assert np.array_equal(HelmholtzSolver(mesh, 0.0).solve(b), b)


def test_bad_inputs():
    mesh = Mesh((5,), (0.2,))
    with pytest.raises(InvalidParameterError):
        HelmholtzSolver(mesh, -1.0)
    with pytest.raises(InvalidParameterError):
        HelmholtzSolver(mesh, 1.0, backend="lu")
    with pytest.raises(ShapeError):
        HelmholtzSolver(mesh, 1.0).solve(np.zeros(4))


def test_threads_agree_with_serial(monkeypatch):
    mesh = Mesh((24, 20, 6), (0.04, 0.05, 0.1))
    rhs = np.random.default_rng(1).standard_normal((3,) + mesh.dims)
    serial = HelmholtzSolver(mesh, 0.3).solve(rhs)
    monkeypatch.setenv("AFMLLG_THREADS", "4")
    threaded = HelmholtzSolver(mesh, 0.3).solve(rhs)
    assert np.max(np.abs(threaded - serial)) < 1e-13


def test_serial_bitwise_deterministic():
    mesh = Mesh((16, 8, 4), (0.1, 0.1, 0.1))
    rhs = np.random.default_rng(2).standard_normal(mesh.dims)
    assert np.array_equal(HelmholtzSolver(mesh, 2.0).solve(rhs), HelmholtzSolver(mesh, 2.0).solve(rhs))
