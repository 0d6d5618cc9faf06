"""Manufactured-solution convergence studies and the exchange-limit oracle.

The forced test problem is

    dm_l/dt = -m_l x h_l - alpha m_l x (m_l x h_l) + F_l,
    h_A = Lap m_A + delta m_B,   h_B = Lap m_B + delta m_A,

i.e. unit exchange, no anisotropy, no applied field, and a coupling of the
opposite sign to the physical field.  The exact solutions are the orthogonal
families

    m_A = (cos(phi) sin t, sin(phi) sin t, cos t)
    m_B = s (cos(phi) cos t, sin(phi) cos t, -sin t)

with phi = xb (1D) or xb*yb*zb (3D) and xb = x^2 (1 - x)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from afmllg.core import DimensionlessParams, Mesh
from afmllg.dynamics import DegenerateProjectionError, cross, effective_field, llg_rhs
from afmllg.schemes import SCHEMES, advance, make_state, step


def _bump(x):
    """xb = x^2 (1-x)^2 and its first two derivatives."""
    x = np.asarray(x, dtype=float)
    v = x * x * (1 - x) ** 2
    d1 = 2 * x * (1 - x) * (1 - 2 * x)
    d2 = 2 * (1 - 6 * x + 6 * x * x)
    return v, d1, d2


@dataclass(frozen=True)
class ManufacturedSolution:
    """Closed-form exact pair on a 1D or 3D box. ``dims`` is 1 or 3."""

    dims: int = 1
    s: float = 1.0

    def phase(self, x):
        """phi, grad(phi) (stacked on axis 0) and Lap(phi) at points ``x`` of shape (dims, ...)."""
        x = np.asarray(x, dtype=float)
        if self.dims == 1:
            v, d1, d2 = _bump(x[0])
            return v, d1[None], d2
        (vx, dx, ddx), (vy, dy, ddy), (vz, dz, ddz) = (_bump(x[i]) for i in range(3))
        phi = vx * vy * vz
        grad = np.stack([dx * vy * vz, vx * dy * vz, vx * vy * dz])
        lap = ddx * vy * vz + vx * ddy * vz + vx * vy * ddz
        return phi, grad, lap

    def _parts(self, x, t):
        phi, grad, lap = self.phase(x)
        c, sn = np.cos(phi), np.sin(phi)
        g2 = np.sum(grad * grad, axis=0)
        return phi, c, sn, g2, lap, math.sin(t), math.cos(t)

    def exact(self, x, t: float):
        _, c, sn, _, _, st, ct = self._parts(x, t)
        one = np.ones_like(c)
        m_A = np.stack([c * st, sn * st, ct * one])
        m_B = self.s * np.stack([c * ct, sn * ct, -st * one])
        return m_A, m_B

    def time_derivative(self, x, t: float):
        _, c, sn, _, _, st, ct = self._parts(x, t)
        one = np.ones_like(c)
        d_A = np.stack([c * ct, sn * ct, -st * one])
        d_B = self.s * np.stack([-c * st, -sn * st, -ct * one])
        return d_A, d_B

    def laplacian(self, x, t: float):
        _, c, sn, g2, lap, st, ct = self._parts(x, t)
        base = np.stack([-sn * lap - c * g2, c * lap - sn * g2, np.zeros_like(c)])
        return st * base, self.s * ct * base


def eval_exact(sol: ManufacturedSolution, x, t: float):
    return sol.exact(x, t)


def eval_forcing(sol: ManufacturedSolution, x, t: float, alpha: float, delta: float):
    """Source terms F_A, F_B that make ``sol`` an exact solution of the forced system."""
    m_A, m_B = sol.exact(x, t)
    d_A, d_B = sol.time_derivative(x, t)
    l_A, l_B = sol.laplacian(x, t)
    h_A = l_A + delta * m_B
    h_B = l_B + delta * m_A
    out = []
    for m, d, h in ((m_A, d_A, h_A), (m_B, d_B, h_B)):
        mxh = cross(m, h)
        out.append(d + mxh + alpha * cross(m, mxh))
    return tuple(out)


class MeshForcing:
    """Forcing provider on cell centres, caching the time-independent parts."""

    def __init__(self, sol: ManufacturedSolution, mesh: Mesh, alpha: float, delta: float):
        self.sol, self.alpha, self.delta = sol, alpha, delta
        self.x = np.stack(mesh.coordinates())
        _, self.c, self.sn, self.g2, self.lap, _, _ = sol._parts(self.x, 0.0)
        self.base = np.stack([-self.sn * self.lap - self.c * self.g2,
                              self.c * self.lap - self.sn * self.g2, np.zeros_like(self.c)])
        self.one = np.ones_like(self.c)

    def __call__(self, t: float):
        st, ct, s = math.sin(t), math.cos(t), self.sol.s
        c, sn, one = self.c, self.sn, self.one
        m_A = np.stack([c * st, sn * st, ct * one])
        m_B = s * np.stack([c * ct, sn * ct, -st * one])
        d_A = np.stack([c * ct, sn * ct, -st * one])
        d_B = s * np.stack([-c * st, -sn * st, -ct * one])
        h_A = st * self.base + self.delta * m_B
        h_B = s * ct * self.base + self.delta * m_A
        out = []
        for m, d, h in ((m_A, d_A, h_A), (m_B, d_B, h_B)):
            mxh = cross(m, h)
            out.append(d + mxh + self.alpha * cross(m, mxh))
        return tuple(out)


class BoundaryFlux:
    """Field correction for the exact solution's normal derivative on the box faces.

    The mirror-ghost stencil imposes zero normal flux.  Where the exact
    solution has d(m)/d(nu) = g != 0, the consistent inhomogeneous stencil adds
    +-g/h in the boundary cell; with unit exchange that is a field term.  It
    vanishes identically on the unit interval/cube, where xb'(0) = xb'(1) = 0.
    """

    def __init__(self, sol: ManufacturedSolution, mesh: Mesh):
        self.s = sol.s
        base = np.zeros(mesh.field_shape())
        centers = [mesh.centers(a) for a in range(mesh.ndim)]
        for a in range(mesh.ndim):
            n, h = mesh.dims[a], mesh.spacing[a]
            if n < 2:
                continue
            for face, sign, idx in ((0.0, -1.0, 0), (mesh.extent[a], 1.0, n - 1)):
                axes = list(centers)
                axes[a] = np.array([face])
                pts = np.stack(np.meshgrid(*axes, indexing="ij"))
                phi, grad, _ = sol.phase(pts)
                dphi = grad[a]
                vec = np.stack([-np.sin(phi) * dphi, np.cos(phi) * dphi, np.zeros_like(phi)])
                sl = [slice(None)] * (mesh.ndim + 1)
                sl[a + 1] = slice(idx, idx + 1)
                base[tuple(sl)] += sign / h * vec
        self.base = base
        self.active = bool(np.any(base != 0.0))

    def __call__(self, t: float):
        return math.sin(t) * self.base, self.s * math.cos(t) * self.base


def mms_params(alpha: float, delta: float, s: float) -> DimensionlessParams:
    # the solver's field carries -delta*m_other; the test problem has +delta
    return DimensionlessParams(q=0.0, eps=1.0, delta=-delta, alpha=alpha, s=s)


def _mms_run(scheme, mesh, dt, T, s, alpha, delta, backend, boundary_flux):
    sol = ManufacturedSolution(dims=mesh.ndim, s=s)
    x = np.stack(mesh.coordinates())
    m_A0, m_B0 = sol.exact(x, 0.0)
    forcing = MeshForcing(sol, mesh, alpha, delta)
    flux = BoundaryFlux(sol, mesh) if boundary_flux else None
    nsteps = int(round(T / dt))
    state = make_state(scheme, m_A0, m_B0, mms_params(alpha, delta, s), mesh, T / nsteps,
                       forcing=forcing, field_forcing=flux if flux is not None and flux.active else None,
                       backend=backend)
    advance(state, nsteps)
    return state, sol.exact(x, state.t)


def mms_error(scheme: str, mesh: Mesh, dt: float, T: float, s: float = 1.0,
              alpha: float = 0.1, delta: float = 2.0, backend: str = "dct",
              boundary_flux: bool = True) -> dict:
    """Run one manufactured-solution case to time T; report max-norm errors.

    ``boundary_flux=False`` drops the face-flux correction, leaving the exact
    solution inconsistent with the discrete boundary condition on boxes where
    its normal derivative does not vanish.
    """
    state, (e_A, e_B) = _mms_run(scheme, mesh, dt, T, s, alpha, delta, backend, boundary_flux)
    err_A = float(np.max(np.abs(state.m_A - e_A)))
    err_B = float(np.max(np.abs(state.m_B - e_B)))
    norm_dev = max(float(np.max(np.abs(np.sqrt(np.sum(state.m_A**2, axis=0)) - 1.0))),
                   float(np.max(np.abs(np.sqrt(np.sum(state.m_B**2, axis=0)) - s))))
    return {"error": max(err_A, err_B), "error_A": err_A, "error_B": err_B,
            "steps": state.step_index, "solves": state.solves, "norm_deviation": norm_dev}


def reference_errors(study: "ConvergenceStudy", scheme: str, s: float = 1.0, refine: int = 16,
                     backend: str = "dct") -> dict:
    """Temporal errors measured against a run at (smallest dt)/refine on the same mesh.

    This isolates the time discretization when the spatial error of the mesh
    is larger than the temporal error against the exact solution.  Returns
    the errors, their fitted order and the reference run's own error against
    the exact solution (the spatial floor).
    """
    if study.axis != "time":
        raise ValueError("reference_errors needs a temporal study")
    mesh = study.meshes()[0]
    args = (study.T, s, study.alpha, study.delta, backend, True)
    ref, (e_A, e_B) = _mms_run(scheme, mesh, min(study.dts) / refine, *args)
    floor = max(float(np.max(np.abs(ref.m_A - e_A))), float(np.max(np.abs(ref.m_B - e_B))))
    errs = []
    for dt in study.dts:
        st, _ = _mms_run(scheme, mesh, dt, *args)
        errs.append(max(float(np.max(np.abs(st.m_A - ref.m_A))), float(np.max(np.abs(st.m_B - ref.m_B)))))
    return {"dts": list(study.dts), "errors": errs, "order": fit_order(study.dts, errs), "floor": floor}


def fit_order(steps, errors) -> float:
    """Least-squares slope of log(error) against log(step)."""
    slope, _ = np.polyfit(np.log(np.asarray(steps, float)), np.log(np.asarray(errors, float)), 1)
    return float(slope)


@dataclass
class ConvergenceStudy:
    """One column family of a convergence table.

    ``axis="time"`` varies ``dts`` on a fixed mesh; ``axis="space"`` varies the
    cells-per-axis in ``cells`` at a fixed ``dt``.
    """

    axis: str
    dims: int
    extent: tuple
    T: float
    dts: tuple = ()
    cells: tuple = ()
    dt: float = 1e-9
    alpha: float = 0.1
    delta: float = 2.0

    def meshes(self):
        if self.axis == "time":
            return [Mesh.from_extent(self.cells[0], self.extent)] * len(self.dts)
        return [Mesh.from_extent(c, self.extent) for c in self.cells]

    def step_sizes(self):
        if self.axis == "time":
            return list(self.dts)
        return [m.spacing[0] for m in self.meshes()]


def paper_study(axis: str, dims: int, **overrides) -> ConvergenceStudy:
    """Grids of the accuracy examples.

    Spatial studies run to T = 1e-4.  With the max-norm error, much shorter
    runs (T << dx^2) only see the O(dx) truncation of the boundary cells and
    report first order; by T = 1e-4 that error has spread through the
    interior.  dt = 1e-8 (1D) and 1e-7 (3D) keep the time error below ~15%
    and ~0.1% of the finest-mesh error while holding runs to 10^4 and 10^3
    steps.
    """
    if (axis, dims) == ("time", 1):
        T = 1e-3
        st = ConvergenceStudy("time", 1, (1.0,), T, dts=tuple(T / k for k in (1000, 500, 250, 125)),
                              cells=((1000,),))
    elif (axis, dims) == ("space", 1):
        st = ConvergenceStudy("space", 1, (1.0,), 1e-4, cells=tuple((n,) for n in (1000, 500, 250, 125)),
                              dt=1e-8)
    elif (axis, dims) == ("time", 3):
        T = 1e-6
        st = ConvergenceStudy("time", 3, (0.2, 0.1, 0.02), T, dts=tuple(T / k for k in (25, 50, 100, 200)),
                              cells=((64, 32, 5),))
    elif (axis, dims) == ("space", 3):
        st = ConvergenceStudy("space", 3, (1.0, 1.0, 1.0), 1e-4, cells=tuple((n, n, n) for n in (6, 8, 10, 12)),
                              dt=1e-7)
    else:
        raise ValueError(f"no study for axis={axis!r}, dims={dims!r}")
    for k, v in overrides.items():
        setattr(st, k, v)
    return st


@dataclass
class ConvergenceTable:
    study: ConvergenceStudy
    step_sizes: list
    columns: dict = field(default_factory=dict)  # (scheme, s) -> list of errors (nan for failed rows)
    orders: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        keys = list(self.columns)
        head = "dx" if self.study.axis == "space" else "dt"
        lines = [",".join([head] + [f"{sch}(s={s})" for sch, s in keys])]
        for i, h in enumerate(self.step_sizes):
            lines.append(",".join([repr(h)] + [f"{self.columns[k][i]:.4e}" for k in keys]))
        lines.append(",".join(["order"] + [f"{self.orders[k]:.2f}" for k in keys]))
        return "\n".join(lines) + "\n"


def run_convergence(study: ConvergenceStudy, schemes=SCHEMES, s_values=(1.0, 0.8),
                    backend: str = "dct", log=None) -> ConvergenceTable:
    """Fill a convergence table; a row whose run blows up is recorded as NaN."""
    table = ConvergenceTable(study, study.step_sizes())
    for scheme in schemes:
        for s in s_values:
            errs = []
            for mesh, h in zip(study.meshes(), table.step_sizes):
                dt = h if study.axis == "time" else study.dt
                try:
                    r = mms_error(scheme, mesh, dt, study.T, s=s, alpha=study.alpha,
                                  delta=study.delta, backend=backend)
                    errs.append(r["error"])
                except (DegenerateProjectionError, FloatingPointError):
                    errs.append(float("nan"))
                if log is not None:
                    log(scheme, s, h, errs[-1])
            ok = [(h, e) for h, e in zip(table.step_sizes, errs) if np.isfinite(e) and e > 0]
            table.columns[(scheme, s)] = errs
            table.orders[(scheme, s)] = fit_order(*zip(*ok)) if len(ok) >= 2 else float("nan")
    return table


def bernoulli_curve(t, u0: float, alpha: float, delta: float):
    """|m|^2(t) = 1 / (1 - C exp(4 alpha delta t)), with C fixed by |m|^2(0) = u0."""
    t = np.asarray(t, dtype=float)
    if u0 <= 0.0:
        return np.zeros_like(t)
    C = 1.0 - 1.0 / u0
    return 1.0 / (1.0 - C * np.exp(4.0 * alpha * delta * t))


def exchange_limit_trace(m0_A, m0_B, alpha: float, delta: float, dt: float, T: float,
                         scheme: str = "scheme-a"):
    """|m|^2 of m = (m_A + m_B)/2 for a uniform, exchange-only run, with the analytic curve.

    Returns (times, numerical, analytic).
    """
    mesh = Mesh((1,), (1.0,))
    p = DimensionlessParams(q=0.0, eps=1.0, delta=delta, alpha=alpha, s=1.0)
    a = np.asarray(m0_A, float).reshape(3, 1)
    b = np.asarray(m0_B, float).reshape(3, 1)
    state = make_state(scheme, a, b, p, mesh, dt)
    nsteps = int(round(T / dt))
    times = np.empty(nsteps + 1)
    vals = np.empty(nsteps + 1)

    def record(st, i):
        m = 0.5 * (st.m_A[:, 0] + st.m_B[:, 0])
        times[i] = st.t
        vals[i] = float(m @ m)

    record(state, 0)
    for i in range(1, nsteps + 1):
        advance(state, 1)
        record(state, i)
    return times, vals, bernoulli_curve(times, vals[0], alpha, delta)


_CELL = Mesh((1,), (1.0,))


def uniform_rhs(m_A, m_B, p: DimensionlessParams):
    """Right-hand side of the spatially uniform system (no exchange gradient)."""
    a, b = np.reshape(m_A, (3, 1)), np.reshape(m_B, (3, 1))
    return (llg_rhs(a, effective_field(a, b, p, _CELL), p.alpha)[:, 0],
            llg_rhs(b, effective_field(b, a, p, _CELL), p.alpha)[:, 0])


def rk4_uniform(m_A, m_B, p: DimensionlessParams, h: float, nsteps: int):
    """Classical RK4 on the uniform system; returns the trajectory (nsteps+1, 6)."""
    y = np.concatenate([np.asarray(m_A, float), np.asarray(m_B, float)])

    def f(y):
        da, db = uniform_rhs(y[:3], y[3:], p)
        return np.concatenate([da, db])

    out = np.empty((nsteps + 1, 6))
    out[0] = y
    for i in range(nsteps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = y
    return out


def uniform_oracle(scheme: str, m_A, m_B, p: DimensionlessParams, dt: float = 1e-4,
                   nsteps: int = 100, refine: int = 100) -> dict:
    """Compare a scheme on the uniform system against RK4 at dt/refine.

    Returns the max trajectory error over ``nsteps`` steps and the one-step
    error ratio err(dt)/err(dt/2), which is ~4 for a consistent first-order
    method (local error O(dt^2)).
    """
    a0 = np.asarray(m_A, float)
    b0 = np.asarray(m_B, float)

    def scheme_run(h, n):
        st = make_state(scheme, a0.reshape(3, 1), b0.reshape(3, 1), p, _CELL, h)
        out = [np.concatenate([a0, b0])]
        for _ in range(n):
            step(st)
            out.append(np.concatenate([st.m_A[:, 0], st.m_B[:, 0]]))
        return np.array(out)

    ref = rk4_uniform(a0, b0, p, dt / refine, nsteps * refine)[::refine]
    traj_err = float(np.max(np.abs(scheme_run(dt, nsteps) - ref)))
    one = []
    for h in (dt, dt / 2):
        exact = rk4_uniform(a0, b0, p, h / refine, refine)[-1]
        one.append(float(np.max(np.abs(scheme_run(h, 1)[-1] - exact))))
    return {"trajectory_error": traj_err, "one_step_errors": one, "ratio": one[0] / one[1]}
