"""Neumann Laplacian and constant-coefficient Helmholtz solves (I - c*Lap_h)^-1.

Ghost cells mirror the adjacent interior cell, so the stencil is the usual
3/7-point second difference with boundary faces carrying zero flux.  Both
operators act on the trailing ``mesh.ndim`` axes; leading axes (e.g. the three
vector components) are treated as a batch.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.fft
from scipy.sparse.linalg import LinearOperator, cg

from afmllg.core import InvalidParameterError, Mesh


class ShapeError(ValueError):
    pass


class SolverNotConvergedError(RuntimeError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(f"Helmholtz CG did not converge after {iterations} iterations "
                         f"(relative residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


def _workers() -> int:
    return max(1, int(os.environ.get("AFMLLG_THREADS", "1")))


def _check_shape(mesh: Mesh, f: np.ndarray) -> None:
    if f.ndim < mesh.ndim or tuple(f.shape[f.ndim - mesh.ndim:]) != mesh.dims:
        raise ShapeError(f"field shape {f.shape} does not end with mesh dims {mesh.dims}")


def laplacian(f: np.ndarray, mesh: Mesh) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    _check_shape(mesh, f)
    out = np.zeros_like(f)
    lead = f.ndim - mesh.ndim
    for ax, h in enumerate(mesh.spacing):
        axis = lead + ax
        if f.shape[axis] < 2:
            continue
        flux = np.diff(f, axis=axis) / (h * h)
        hi = [slice(None)] * f.ndim
        lo = [slice(None)] * f.ndim
        hi[axis] = slice(0, -1)
        lo[axis] = slice(1, None)
        out[tuple(hi)] += flux
        out[tuple(lo)] -= flux
    return out


def neumann_eigenvalues(n: int, h: float) -> np.ndarray:
    """Eigenvalues of the 1D mirror-ghost second difference, one per cosine mode."""
    k = np.arange(n)
    return 2.0 * (np.cos(np.pi * k / n) - 1.0) / (h * h)


def assemble_matrix(mesh: Mesh, c: float = 0.0) -> np.ndarray:
    """Dense (I - c*Lap_h) in C order; meant for small meshes and testing."""
    n = mesh.ncells
    eye = np.eye(n).reshape((n,) + mesh.dims)
    lap = laplacian(eye, mesh).reshape(n, n).T
    return np.eye(n) - c * lap


class HelmholtzSolver:
    """Prepared solver for (I - c*Lap_h) x = rhs on a fixed mesh.

    ``backend="dct"`` diagonalizes the operator with type-II cosine transforms;
    ``backend="cg"`` runs conjugate gradients on the matrix-free stencil.
    """

    def __init__(self, mesh: Mesh, c: float, backend: str = "dct"):
        if not (np.isfinite(c) and c >= 0):
            raise InvalidParameterError(f"Helmholtz coefficient must be >= 0, got {c!r}")
        if backend not in ("dct", "cg"):
            raise InvalidParameterError(f"unknown backend {backend!r}")
        self.mesh = mesh
        self.c = float(c)
        self.backend = backend
        self.count = 0
        self._axes = tuple(a for a, d in enumerate(mesh.dims) if d > 1)
        self._identity = self.c == 0.0 or not self._axes
        if backend == "dct" and not self._identity:
            denom = np.ones(tuple(mesh.dims[a] for a in self._axes))
            for j, a in enumerate(self._axes):
                lam = neumann_eigenvalues(mesh.dims[a], mesh.spacing[a])
                shape = [1] * len(self._axes)
                shape[j] = -1
                denom = denom - self.c * lam.reshape(shape)
            self._inv = (1.0 / denom).reshape(mesh.dims)
        self.rtol = 1e-12
        # exact-arithmetic CG needs at most ncells iterations; leave room for rounding
        self.maxiter = 2 * mesh.ncells + 10 * max(mesh.dims)

    def reset(self) -> None:
        self.count = 0

    def apply_operator(self, x: np.ndarray) -> np.ndarray:
        return x - self.c * laplacian(x, self.mesh)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for one scalar field, or a batch stacked on leading axes.

        The solve counter advances by the number of scalar fields solved.
        """
        rhs = np.asarray(rhs, dtype=float)
        _check_shape(self.mesh, rhs)
        lead = rhs.ndim - self.mesh.ndim
        self.count += int(np.prod(rhs.shape[:lead])) if lead else 1
        if self._identity:
            return rhs.copy()
        if self.backend == "dct":
            w = _workers()
            if len(self._axes) == 1:
                # the 1D transform has noticeably less call overhead than dctn
                ax = lead + self._axes[0]
                coef = scipy.fft.dct(rhs, type=2, axis=ax, norm="ortho", workers=w)
                coef *= self._inv
                return scipy.fft.idct(coef, type=2, axis=ax, norm="ortho", workers=w)
            axes = tuple(lead + a for a in self._axes)
            coef = scipy.fft.dctn(rhs, type=2, axes=axes, norm="ortho", workers=w)
            coef *= self._inv
            return scipy.fft.idctn(coef, type=2, axes=axes, norm="ortho", workers=w)
        if lead:
            flat = rhs.reshape((-1,) + self.mesh.dims)
            return np.stack([self._cg(b) for b in flat]).reshape(rhs.shape)
        return self._cg(rhs)

    def _cg(self, b: np.ndarray) -> np.ndarray:
        n = self.mesh.ncells
        op = LinearOperator((n, n), matvec=lambda v: self.apply_operator(v.reshape(self.mesh.dims)).ravel(),
                            dtype=float)
        # constant diagonal: Jacobi preconditioning is a rescale
        diag = 1.0 + 2.0 * self.c * sum(1.0 / (self.mesh.spacing[a] ** 2) for a in self._axes)
        prec = LinearOperator((n, n), matvec=lambda v: v / diag, dtype=float)
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            return np.zeros_like(b)
        x, info = cg(op, b.ravel(), rtol=self.rtol, atol=0.0, maxiter=self.maxiter, M=prec)
        x = x.reshape(self.mesh.dims)
        if info != 0:
            res = np.linalg.norm(self.apply_operator(x) - b) / bnorm
            raise SolverNotConvergedError(info, res)
        return x


def prepare_helmholtz(mesh: Mesh, c: float, backend: str = "dct") -> HelmholtzSolver:
    return HelmholtzSolver(mesh, c, backend)


def solve(h: HelmholtzSolver, rhs: np.ndarray) -> np.ndarray:
    return h.solve(rhs)


def solve_count(h: HelmholtzSolver) -> int:
    return h.count
