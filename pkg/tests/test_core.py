import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from afmllg.core import (MU0, TABLE6, DegenerateDirectionError, DimensionlessParams, InvalidParameterError,
                         MaterialParams, Mesh, nondimensionalize, random_field, to_dimensionless_time,
                         to_physical_time, uniform_field)

L_FILM = 100e-9


def test_table6_derived_values():
    p = nondimensionalize(TABLE6, L_FILM)
    # frozen from the closed forms with mu0 = 4 pi 1e-7
    assert p.q == pytest.approx(0.99471839, rel=1e-7)
    assert p.delta == pytest.approx(238.732415, rel=1e-7)
    assert p.eps == pytest.approx(4.97359197e-3, rel=1e-7)
    assert p.time_unit == pytest.approx(1.13319e-11, rel=1e-5)
    assert p.delta / p.q == pytest.approx(240.0)
    assert p.delta / p.eps == pytest.approx(4.8e4)


def test_one_femtosecond_is_small():
    p = nondimensionalize(TABLE6, L_FILM)
    assert to_dimensionless_time(1e-15, p) == pytest.approx(8.824663e-5, rel=1e-6)


def test_field_in_tesla():
    p = nondimensionalize(TABLE6, L_FILM, B_ext=(0.0, 2.0, 0.0))
    assert p.h_ext[1] == pytest.approx(2.0 / (MU0 * TABLE6.Ms))
    assert p.h_ext[0] == 0.0


@given(st.floats(1e-9, 1e-5))
def test_length_scaling(L):
    a = nondimensionalize(TABLE6, L)
    b = nondimensionalize(TABLE6, 2 * L)
    assert b.eps == pytest.approx(a.eps / 4, rel=1e-14)
    assert (b.q, b.delta) == (a.q, a.delta)


@given(st.floats(1e-18, 1e-6))
def test_time_round_trip(t):
    p = nondimensionalize(TABLE6, L_FILM)
    assert to_physical_time(to_dimensionless_time(t, p), p) == pytest.approx(t, rel=1e-15)


def test_sign_of_afm_coupling():
    assert nondimensionalize(TABLE6.with_(A_afm=-3e-12), L_FILM).delta < 0
    assert nondimensionalize(TABLE6.with_(A_afm=0.0), L_FILM).delta == 0.0


@pytest.mark.parametrize("change", [dict(Ms=-1.0), dict(alpha=0.0), dict(Ku=-1.0), dict(A_ex=-1e-12),
                                    dict(a_lattice=0.0), dict(A_afm=math.inf), dict(Ms=math.nan)])
def test_material_validation(change):
    with pytest.raises(InvalidParameterError):
        TABLE6.with_(**change)


def test_dimensionless_validation():
    with pytest.raises(InvalidParameterError):
        DimensionlessParams(q=1, eps=1, delta=1, alpha=0.1, s=1.5)
    with pytest.raises(InvalidParameterError):
        DimensionlessParams(q=-1, eps=1, delta=1, alpha=0.1)
    with pytest.raises(InvalidParameterError):
        nondimensionalize(TABLE6, 0.0)


def test_mesh_geometry():
    m = Mesh.from_extent((64, 32, 5), (0.2, 0.1, 0.02))
    assert m.spacing == pytest.approx((0.2 / 64, 0.1 / 32, 0.004))
    assert m.ncells == 64 * 32 * 5
    assert m.volume == pytest.approx(0.2 * 0.1 * 0.02)
    x, y, z = m.coordinates()
    assert x[0, 0, 0] == pytest.approx(0.5 * m.spacing[0])
    assert z[0, 0, -1] == pytest.approx(0.02 - 0.5 * m.spacing[2])
    assert Mesh.from_physical((50, 50, 5), 2e-9, L_FILM).spacing == pytest.approx((0.02,) * 3)


@pytest.mark.parametrize("dims,spacing", [((0,), (1.0,)), ((2, 2), (1.0, 1.0)), ((3,), (-1.0,)),
                                          ((3,), (1.0, 1.0))])
def test_mesh_validation(dims, spacing):
    with pytest.raises(InvalidParameterError):
        Mesh(dims, spacing)


@given(st.tuples(*[st.floats(-10, 10)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3),
       st.floats(0.1, 1.0))
def test_uniform_field_norm(direction, s):
    f = uniform_field(Mesh((3, 2, 2), (1, 1, 1)), direction, s)
    assert f.max_norm_deviation() <= 2e-16 * 4


def test_uniform_field_rejects_zero():
    with pytest.raises(DegenerateDirectionError):
        uniform_field(Mesh((3,), (1.0,)), (0, 0, 0))


def test_random_field_seeded():
    mesh = Mesh((4, 3, 2), (1, 1, 1))
    a = random_field(mesh, 0.8, seed=7)
    assert np.array_equal(a.values, random_field(mesh, 0.8, seed=7).values)
    assert not np.array_equal(a.values, random_field(mesh, 0.8, seed=8).values)
    assert a.max_norm_deviation() < 1e-15


def test_material_is_frozen():
    with pytest.raises(Exception):
        TABLE6.Ms = 1.0
    assert isinstance(TABLE6, MaterialParams)
