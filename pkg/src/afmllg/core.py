"""Material parameters, nondimensionalization, meshes and field containers.

Everything downstream works in dimensionless units: magnetization in units of
Ms, lengths in units of L (the largest domain edge), time in units of
(1 + alpha^2) / (mu0 gamma Ms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

MU0 = 4e-7 * math.pi


class InvalidParameterError(ValueError):
    """A physical or numerical parameter violates its documented constraint."""


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameterError(msg)


@dataclass(frozen=True)
class MaterialParams:
    """SI material constants. ``A_afm`` is signed: > 0 favours antiparallel sublattices."""

    alpha: float
    a_lattice: float
    Ms: float
    Ku: float
    A_ex: float
    A_afm: float
    gamma: float = 1.76e11
    mu0: float = MU0

    def __post_init__(self):
        for name in ("alpha", "Ms", "a_lattice", "gamma", "mu0"):
            value = getattr(self, name)
            _check(np.isfinite(value) and value > 0, f"{name} must be > 0, got {value!r}")
        _check(np.isfinite(self.Ku) and self.Ku >= 0, f"Ku must be >= 0, got {self.Ku!r}")
        _check(np.isfinite(self.A_ex) and self.A_ex >= 0, f"A_ex must be >= 0, got {self.A_ex!r}")
        _check(np.isfinite(self.A_afm), f"A_afm must be finite, got {self.A_afm!r}")

    def with_(self, **changes) -> "MaterialParams":
        return replace(self, **changes)


# Physical parameters of the thin-film experiments.
TABLE6 = MaterialParams(
    alpha=0.05,
    a_lattice=0.5e-9,
    Ms=4.0e5,
    Ku=1.0e5,
    A_ex=5.0e-12,
    A_afm=3.0e-12,
    gamma=1.76e11,
)


@dataclass(frozen=True)
class DimensionlessParams:
    """Coefficients of the rescaled coupled LLG system.

    ``delta`` multiplies -m_other in the effective field, so a positive value
    drives the sublattices antiparallel.
    """

    q: float
    eps: float
    delta: float
    alpha: float
    s: float = 1.0
    h_ext: tuple = (0.0, 0.0, 0.0)
    time_unit: float = 1.0

    def __post_init__(self):
        _check(self.q >= 0, f"q must be >= 0, got {self.q!r}")
        _check(self.eps >= 0, f"eps must be >= 0, got {self.eps!r}")
        _check(self.alpha >= 0, f"alpha must be >= 0, got {self.alpha!r}")
        _check(0 < self.s <= 1, f"s must lie in (0, 1], got {self.s!r}")
        _check(self.time_unit > 0, f"time_unit must be > 0, got {self.time_unit!r}")
        h = tuple(float(v) for v in self.h_ext)
        _check(len(h) == 3, "h_ext must be a 3-vector")
        object.__setattr__(self, "h_ext", h)

    def with_(self, **changes) -> "DimensionlessParams":
        return replace(self, **changes)


def nondimensionalize(p: MaterialParams, L: float, s: float = 1.0, B_ext=(0.0, 0.0, 0.0)) -> DimensionlessParams:
    """Map SI parameters onto (q, eps, delta, h_ext) for length scale ``L`` [m].

    ``B_ext`` is the applied field in Tesla; h_ext = B / (mu0 Ms).
    """
    _check(L > 0, f"L must be > 0, got {L!r}")
    denom = p.mu0 * p.Ms**2
    B = np.asarray(B_ext, dtype=float)
    _check(B.shape == (3,), "B_ext must be a 3-vector")
    return DimensionlessParams(
        q=2.0 * p.Ku / denom,
        eps=2.0 * p.A_ex / (denom * L**2),
        delta=4.0 * p.A_afm / (denom * p.a_lattice**2),
        alpha=p.alpha,
        s=s,
        h_ext=tuple(B / (p.mu0 * p.Ms)),
        time_unit=(1.0 + p.alpha**2) / (p.mu0 * p.gamma * p.Ms),
    )


def to_dimensionless_time(t_phys: float, p: DimensionlessParams) -> float:
    return t_phys / p.time_unit


def to_physical_time(t: float, p: DimensionlessParams) -> float:
    return t * p.time_unit


@dataclass(frozen=True)
class Mesh:
    """Uniform cell-centred box grid, 1D ``(M,)`` or 3D ``(M, N, K)``.

    Cell i (0-based) along an axis is centred at (i + 1/2) * spacing.
    """

    dims: tuple
    spacing: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        spacing = tuple(float(h) for h in self.spacing)
        _check(len(dims) in (1, 3), f"mesh must be 1D or 3D, got dims={dims}")
        _check(len(spacing) == len(dims), "spacing must have one entry per axis")
        _check(all(d >= 1 for d in dims), f"cell counts must be >= 1, got {dims}")
        _check(all(h > 0 and np.isfinite(h) for h in spacing), f"spacings must be > 0, got {spacing}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def from_extent(cls, dims, extent) -> "Mesh":
        dims = tuple(dims)
        extent = tuple(extent)
        _check(len(dims) == len(extent), "dims and extent must have equal length")
        return cls(dims, tuple(e / d for e, d in zip(extent, dims)))

    @classmethod
    def from_physical(cls, dims, cell_size, L: float) -> "Mesh":
        """Mesh from cell counts and SI cell edge lengths, rescaled by ``L``."""
        if np.isscalar(cell_size):
            cell_size = (cell_size,) * len(dims)
        return cls(tuple(dims), tuple(h / L for h in cell_size))

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def shape(self) -> tuple:
        return self.dims

    @property
    def ncells(self) -> int:
        return int(np.prod(self.dims))

    @property
    def extent(self) -> tuple:
        return tuple(d * h for d, h in zip(self.dims, self.spacing))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    def centers(self, axis: int = 0) -> np.ndarray:
        return (np.arange(self.dims[axis]) + 0.5) * self.spacing[axis]

    def coordinates(self) -> tuple:
        """Cell-centre coordinate arrays, each of shape ``dims``."""
        return tuple(np.meshgrid(*(self.centers(a) for a in range(self.ndim)), indexing="ij"))

    def field_shape(self) -> tuple:
        return (3,) + self.dims


@dataclass
class SublatticeField:
    """One 3-vector per cell, stored as an array of shape ``(3, *mesh.dims)``."""

    values: np.ndarray
    norm_target: float = 1.0

    def norms(self) -> np.ndarray:
        return np.sqrt(np.einsum("i...,i...->...", self.values, self.values))

    def max_norm_deviation(self) -> float:
        return float(np.max(np.abs(self.norms() - self.norm_target)))


class DegenerateDirectionError(InvalidParameterError):
    pass


def uniform_field(mesh: Mesh, direction, norm_target: float = 1.0) -> SublatticeField:
    d = np.asarray(direction, dtype=float)
    n = np.linalg.norm(d)
    if d.shape != (3,) or not n > 0:
        raise DegenerateDirectionError(f"direction must be a nonzero 3-vector, got {direction!r}")
    unit = norm_target * d / n
    values = np.empty(mesh.field_shape())
    values[:] = unit.reshape((3,) + (1,) * mesh.ndim)
    return SublatticeField(values, norm_target)


def random_field(mesh: Mesh, norm_target: float = 1.0, seed: int = 42) -> SublatticeField:
    """Cell values drawn uniformly on the sphere of radius ``norm_target``."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(mesh.field_shape())
    v *= norm_target / np.sqrt(np.sum(v * v, axis=0))
    return SublatticeField(v, norm_target)
