"""Effective fields, the discrete energy, and sphere projection.

Fields are arrays of shape ``(3, *mesh.dims)``.  The easy axis is x, so the
anisotropy field only acts on components 2 and 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from afmllg.core import DimensionlessParams, Mesh, SublatticeField
from afmllg.gridops import ShapeError, laplacian

# anisotropy weight per component: the x (easy) axis is free
HARD_MASK = np.array([0.0, 1.0, 1.0])

PROJECTION_FLOOR = 1e-14


class DegenerateProjectionError(ArithmeticError):
    """A cell vector is too short (or non-finite) to be renormalized."""

    def __init__(self, index, magnitude: float, step: int | None = None):
        self.index = index
        self.magnitude = magnitude
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"cannot project cell {index}{where}: |m| = {magnitude!r}")


def _values(m) -> np.ndarray:
    return m.values if isinstance(m, SublatticeField) else np.asarray(m, dtype=float)


def _hext(p: DimensionlessParams, ndim: int) -> np.ndarray:
    return np.asarray(p.h_ext).reshape((3,) + (1,) * ndim)


def _check_pair(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape or a.shape[0] != 3:
        raise ShapeError(f"sublattice fields must share a (3, ...) shape, got {a.shape} and {b.shape}")


def local_coupling_f(m_self, m_other, p: DimensionlessParams) -> np.ndarray:
    """Effective field without the exchange Laplacian: -q(m2 e2 + m3 e3) - delta m_other + h_ext."""
    a, b = _values(m_self), _values(m_other)
    _check_pair(a, b)
    ndim = a.ndim - 1
    return -p.q * HARD_MASK.reshape((3,) + (1,) * ndim) * a - p.delta * b + _hext(p, ndim)


@dataclass
class EffectiveFieldTerms:
    anisotropy: np.ndarray
    fm_exchange: np.ndarray
    afm_coupling: np.ndarray
    zeeman: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.anisotropy + self.fm_exchange + self.afm_coupling + self.zeeman


def effective_field_terms(m_self, m_other, p: DimensionlessParams, mesh: Mesh) -> EffectiveFieldTerms:
    a, b = _values(m_self), _values(m_other)
    _check_pair(a, b)
    if a.shape[1:] != mesh.dims:
        raise ShapeError(f"field shape {a.shape} does not match mesh {mesh.dims}")
    ndim = mesh.ndim
    return EffectiveFieldTerms(
        anisotropy=-p.q * HARD_MASK.reshape((3,) + (1,) * ndim) * a,
        fm_exchange=p.eps * laplacian(a, mesh),
        afm_coupling=-p.delta * b,
        zeeman=np.broadcast_to(_hext(p, ndim), a.shape).copy(),
    )


def effective_field(m_self, m_other, p: DimensionlessParams, mesh: Mesh) -> np.ndarray:
    a, b = _values(m_self), _values(m_other)
    if a.shape[1:] != mesh.dims:
        raise ShapeError(f"field shape {a.shape} does not match mesh {mesh.dims}")
    return local_coupling_f(a, b, p) + p.eps * laplacian(a, mesh)


@dataclass(frozen=True)
class EnergyBreakdown:
    anisotropy: float
    fm_exchange: float
    afm_exchange: float
    zeeman: float

    @property
    def total(self) -> float:
        return self.anisotropy + self.fm_exchange + self.afm_exchange + self.zeeman


def _gradient_sq(a: np.ndarray, mesh: Mesh) -> float:
    """Sum over interior faces of |m_j - m_i|^2 / h^2, times the cell volume."""
    total = 0.0
    for ax, h in enumerate(mesh.spacing):
        if a.shape[1 + ax] < 2:
            continue
        d = np.diff(a, axis=1 + ax)
        total += np.sum(d * d) / (h * h)
    return total * mesh.cell_volume


def energy(m_A, m_B, p: DimensionlessParams, mesh: Mesh) -> EnergyBreakdown:
    """Dimensionless energy q*aniso + eps*|grad m|^2 + delta*m_A.m_B - h.(m_A + m_B).

    Midpoint quadrature on cells; the gradient term uses face differences with
    no contribution from boundary faces.
    """
    a, b = _values(m_A), _values(m_B)
    _check_pair(a, b)
    if a.shape[1:] != mesh.dims:
        raise ShapeError(f"field shape {a.shape} does not match mesh {mesh.dims}")
    dv = mesh.cell_volume
    h = _hext(p, mesh.ndim)
    aniso = p.q * dv * float(np.sum(a[1:] ** 2) + np.sum(b[1:] ** 2))
    exch = p.eps * (_gradient_sq(a, mesh) + _gradient_sq(b, mesh))
    afm = p.delta * dv * float(np.sum(a * b))
    zee = -dv * float(np.sum(h * (a + b)))
    return EnergyBreakdown(aniso, exch, afm, zee)


def project(f, norm_target: float = 1.0, step: int | None = None) -> SublatticeField:
    """Rescale every cell vector to length ``norm_target``."""
    v = _values(f)
    mag = np.sqrt(np.einsum("i...,i...->...", v, v))
    bad = ~(mag > PROJECTION_FLOOR) | ~np.isfinite(mag)
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise DegenerateProjectionError(idx, float(mag[idx]), step)
    return SublatticeField(v * (norm_target / mag), norm_target)


def order_parameters(m_A, m_B) -> tuple:
    """Net magnetization m = (m_A + m_B)/2 and staggered order l = (m_A - m_B)/2."""
    a, b = _values(m_A), _values(m_B)
    return 0.5 * (a + b), 0.5 * (a - b)


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross product over the leading axis; cheaper than np.cross(axis=0) on small grids."""
    return np.stack((a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]))


def llg_rhs(m: np.ndarray, h: np.ndarray, alpha: float) -> np.ndarray:
    """-m x h - alpha m x (m x h), componentwise on (3, ...) arrays."""
    mxh = cross(m, h)
    return -mxh - alpha * cross(m, mxh)
