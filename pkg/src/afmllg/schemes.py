"""The three Gauss-Seidel projection steppers for the coupled sublattice system.

Every scheme solves only constant-coefficient systems (I - c*Lap_h) x = b,
one scalar field at a time, and ends with a projection back onto spheres of
radius 1 (sublattice A) and s (sublattice B).  Per-step solve counts are 14
(``gspm``), 10 (``scheme-a``) and 6 (``scheme-b``).

Conventions for the quantities whose time level the update formulas leave
implicit:

* Within the A sweep the local field f_A is evaluated from (m_A^n, m_B^n);
  within the B sweep f_B is evaluated from (m_B^n, m_A^*).  ``scheme-b``
  instead refreshes component i of f with the freshly updated component i.
* An optional forcing provider ``forcing(t) -> (F_A, F_B)`` adds dt * F(t_n)
  to each component of m^* right after that component is updated.  This is
  how manufactured-solution runs inject the source term of
  dm/dt = -m x h - alpha m x (m x h) + F.
* An optional ``field_forcing(t) -> (G_A, G_B)`` is added to the local field
  f wherever f is evaluated, at time t_n.  Manufactured-solution runs use it
  for boundary flux that the homogeneous Neumann stencil cannot represent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from afmllg.core import DimensionlessParams, InvalidParameterError, Mesh
from afmllg.dynamics import HARD_MASK, DegenerateProjectionError, local_coupling_f, project
from afmllg.gridops import HelmholtzSolver

SOLVES_PER_STEP = {"gspm": 14, "scheme-a": 10, "scheme-b": 6}
SCHEMES = tuple(SOLVES_PER_STEP)
# kept for comparison only; not offered by the drivers
VARIANTS = SCHEMES + ("scheme-a-printed",)

Forcing = Callable[[float], tuple]


@dataclass
class SchemeState:
    scheme: str
    m_A: np.ndarray
    m_B: np.ndarray
    params: DimensionlessParams
    mesh: Mesh
    dt: float
    t: float = 0.0
    step_index: int = 0
    solves: int = 0
    forcing: Optional[Forcing] = None
    field_forcing: Optional[Forcing] = None
    backend: str = "dct"
    solvers: dict = field(default_factory=dict)
    # carried approximation set of scheme-b
    g_A: Optional[np.ndarray] = None
    g_B: Optional[np.ndarray] = None
    t0: float = 0.0

    def solver(self, c: float) -> HelmholtzSolver:
        key = float(c)
        if key not in self.solvers:
            self.solvers[key] = HelmholtzSolver(self.mesh, key, self.backend)
        return self.solvers[key]

    def total_solver_calls(self) -> int:
        return sum(s.count for s in self.solvers.values())

    def copy(self) -> "SchemeState":
        return SchemeState(
            self.scheme, self.m_A.copy(), self.m_B.copy(), self.params, self.mesh, self.dt,
            self.t, self.step_index, self.solves, self.forcing, self.field_forcing, self.backend, self.solvers,
            None if self.g_A is None else self.g_A.copy(),
            None if self.g_B is None else self.g_B.copy(), self.t0,
        )


def make_state(scheme: str, m_A, m_B, params: DimensionlessParams, mesh: Mesh, dt: float,
               t0: float = 0.0, forcing: Optional[Forcing] = None, field_forcing: Optional[Forcing] = None,
               backend: str = "dct") -> SchemeState:
    """Build a stepping state; inputs are projected onto their spheres first."""
    if scheme not in STEPPERS:
        raise InvalidParameterError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    if not dt > 0:
        raise InvalidParameterError(f"dt must be > 0, got {dt!r}")
    a = project(getattr(m_A, "values", m_A), 1.0).values
    b = project(getattr(m_B, "values", m_B), params.s).values
    if a.shape != mesh.field_shape() or b.shape != mesh.field_shape():
        raise InvalidParameterError(f"initial fields must have shape {mesh.field_shape()}")
    state = SchemeState(scheme, a, b, params, mesh, float(dt), float(t0), forcing=forcing,
                        field_forcing=field_forcing, backend=backend, t0=float(t0))
    if scheme == "scheme-b":
        _init_scheme_b(state)
    return state


def _forcing(state: SchemeState):
    if state.forcing is None:
        return None, None
    fa, fb = state.forcing(state.t)
    return state.dt * np.asarray(fa), state.dt * np.asarray(fb)


def _field_forcing(state: SchemeState):
    if state.field_forcing is None:
        return 0.0, 0.0
    ga, gb = state.field_forcing(state.t)
    return np.asarray(ga), np.asarray(gb)


def _finish(state: SchemeState, a_star, b_star, calls_before: int) -> SchemeState:
    step = state.step_index + 1
    state.m_A = project(a_star, 1.0, step=step).values
    state.m_B = project(b_star, state.params.s, step=step).values
    state.solves += state.total_solver_calls() - calls_before
    state.step_index = step
    # from the step count, so long runs do not accumulate rounding in t
    state.t = state.t0 + step * state.dt
    return state


def _gs_gyro(m, fhat, solve, dt, dF):
    """Gauss-Seidel sweep of m^* = m - m x g with g = (I - dt eps Lap)^-1 (m + dt fhat)."""
    g23 = solve(m[1:3] + dt * fhat[1:3])
    ms = np.empty_like(m)
    ms[0] = m[0] + (g23[0] * m[2] - g23[1] * m[1])
    if dF is not None:
        ms[0] += dF[0]
    g1 = solve(ms[0] + dt * fhat[0])
    ms[1] = m[1] + (g23[1] * ms[0] - g1 * m[2])
    if dF is not None:
        ms[1] += dF[1]
    g2 = solve(ms[1] + dt * fhat[1])
    ms[2] = m[2] + (g1 * ms[1] - g2 * ms[0])
    if dF is not None:
        ms[2] += dF[2]
    return ms


def step_gspm(state: SchemeState) -> SchemeState:
    """Gyromagnetic Gauss-Seidel stage, unconstrained heat flow, projection."""
    p, dt = state.params, state.dt
    A, B = state.m_A, state.m_B
    calls = state.total_solver_calls()
    dFA, dFB = _forcing(state)
    GA, GB = _field_forcing(state)
    solve = state.solver(dt * p.eps).solve
    with np.errstate(over="ignore", invalid="ignore"):
        a_star = _gs_gyro(A, local_coupling_f(A, B, p) + GA, solve, dt, dFA)
        b_star = _gs_gyro(B, local_coupling_f(B, a_star, p) + GB, solve, dt, dFB)
        ca = p.alpha * dt
        cb = p.alpha * dt * p.s**2
        a_2 = state.solver(ca * p.eps).solve(a_star + ca * (local_coupling_f(a_star, b_star, p) + GA))
        b_2 = state.solver(cb * p.eps).solve(b_star + cb * (local_coupling_f(b_star, a_star, p) + GB))
    return _finish(state, a_2, b_2, calls)


def _gs_full(m, fhat, solve, dt, alpha, s2, dF, literal=False):
    """Gauss-Seidel sweep treating precession and damping together.

    The damping torque is -alpha (m.g) m + alpha |m|^2 g, with both the dot
    product and |m|^2 taken over the partially updated components.  With
    ``literal=True`` |m|^2 is frozen at its target s2 instead; inside the sweep
    |m| drifts from the target by O(dt), and the frozen factor leaves an O(dt)
    per-step residual that does not cancel, so that variant converges to a
    perturbed vector field away from quasi-static states.
    """
    def w(a, b, c):
        return s2 if literal else a * a + b * b + c * c

    g = solve(m + dt * fhat)
    ms = np.empty_like(m)
    ms[0] = (m[0] - (m[1] * g[2] - m[2] * g[1])
             - alpha * (m[0] * g[0] + m[1] * g[1] + m[2] * g[2]) * m[0] + alpha * w(m[0], m[1], m[2]) * g[0])
    if dF is not None:
        ms[0] += dF[0]
    g1 = solve(ms[0] + dt * fhat[0])
    ms[1] = (m[1] - (m[2] * g1 - ms[0] * g[2])
             - alpha * (ms[0] * g1 + m[1] * g[1] + m[2] * g[2]) * m[1] + alpha * w(ms[0], m[1], m[2]) * g[1])
    if dF is not None:
        ms[1] += dF[1]
    g2 = solve(ms[1] + dt * fhat[1])
    ms[2] = (m[2] - (ms[0] * g2 - ms[1] * g1)
             - alpha * (ms[0] * g1 + ms[1] * g2 + m[2] * g[2]) * m[2] + alpha * w(ms[0], ms[1], m[2]) * g[2])
    if dF is not None:
        ms[2] += dF[2]
    return ms


def step_scheme_a(state: SchemeState, literal: bool = False) -> SchemeState:
    """Joint gyromagnetic+damping Gauss-Seidel stage, then projection."""
    p, dt = state.params, state.dt
    A, B = state.m_A, state.m_B
    calls = state.total_solver_calls()
    dFA, dFB = _forcing(state)
    GA, GB = _field_forcing(state)
    solve = state.solver(dt * p.eps).solve
    with np.errstate(over="ignore", invalid="ignore"):
        a_star = _gs_full(A, local_coupling_f(A, B, p) + GA, solve, dt, p.alpha, 1.0, dFA, literal)
        b_star = _gs_full(B, local_coupling_f(B, a_star, p) + GB, solve, dt, p.alpha, p.s**2, dFB, literal)
    return _finish(state, a_star, b_star, calls)


def step_scheme_a_printed(state: SchemeState) -> SchemeState:
    """Scheme A with the damping weight frozen at |m|^2 = 1 (s^2 for B); see ``_gs_full``."""
    return step_scheme_a(state, literal=True)


def _fhat_component(i: int, self_i, other_i, p: DimensionlessParams, G):
    f = -p.q * HARD_MASK[i] * self_i - p.delta * other_i + p.h_ext[i]
    return f if np.isscalar(G) else f + G[i]


def _init_scheme_b(state: SchemeState) -> None:
    # startup pass for the carried set; not part of the per-step budget
    p, dt = state.params, state.dt
    solve = state.solver(dt * p.eps).solve
    A, B = state.m_A, state.m_B
    GA, GB = _field_forcing(state)
    state.g_A = solve(A + dt * (local_coupling_f(A, B, p) + GA))
    state.g_B = solve(B + dt * (local_coupling_f(B, A, p) + GB))


def _gs_two_sets(m, g, other, p, solve, dt, dF, G):
    """Sweep using the carried g^n, refreshing g^{n+1}_i right after m^*_i."""
    alpha = p.alpha
    ms = np.empty_like(m)
    gn = np.empty_like(g)
    ms[0] = (m[0] - (m[1] * g[2] - m[2] * g[1])
             - alpha * (m[0] * g[0] + m[1] * g[1] + m[2] * g[2]) * m[0]
             + alpha * (m[0] ** 2 + m[1] ** 2 + m[2] ** 2) * g[0])
    if dF is not None:
        ms[0] += dF[0]
    gn[0] = solve(ms[0] + dt * _fhat_component(0, ms[0], other[0], p, G))
    ms[1] = (m[1] - (m[2] * gn[0] - ms[0] * g[2])
             - alpha * (ms[0] * gn[0] + m[1] * g[1] + m[2] * g[2]) * m[1]
             + alpha * (ms[0] ** 2 + m[1] ** 2 + m[2] ** 2) * g[1])
    if dF is not None:
        ms[1] += dF[1]
    gn[1] = solve(ms[1] + dt * _fhat_component(1, ms[1], other[1], p, G))
    ms[2] = (m[2] - (ms[0] * gn[1] - ms[1] * gn[0])
             - alpha * (ms[0] * gn[0] + ms[1] * gn[1] + m[2] * g[2]) * m[2]
             + alpha * (ms[0] ** 2 + ms[1] ** 2 + m[2] ** 2) * g[2])
    if dF is not None:
        ms[2] += dF[2]
    gn[2] = solve(ms[2] + dt * _fhat_component(2, ms[2], other[2], p, G))
    return ms, gn


def step_scheme_b(state: SchemeState) -> SchemeState:
    """Two approximation sets: g refreshed in the sweep, m refreshed by projection."""
    p, dt = state.params, state.dt
    if state.g_A is None or state.g_B is None:
        _init_scheme_b(state)
    A, B = state.m_A, state.m_B
    calls = state.total_solver_calls()
    dFA, dFB = _forcing(state)
    GA, GB = _field_forcing(state)
    solve = state.solver(dt * p.eps).solve
    with np.errstate(over="ignore", invalid="ignore"):
        a_star, gA = _gs_two_sets(A, state.g_A, B, p, solve, dt, dFA, GA)
        b_star, gB = _gs_two_sets(B, state.g_B, a_star, p, solve, dt, dFB, GB)
    state.g_A, state.g_B = gA, gB
    return _finish(state, a_star, b_star, calls)


STEPPERS = {"gspm": step_gspm, "scheme-a": step_scheme_a, "scheme-b": step_scheme_b,
            "scheme-a-printed": step_scheme_a_printed}


def step(state: SchemeState) -> SchemeState:
    return STEPPERS[state.scheme](state)


def advance(state: SchemeState, nsteps: int, callback=None) -> SchemeState:
    """Take ``nsteps`` steps; ``callback(state)`` runs after each one."""
    stepper = STEPPERS[state.scheme]
    for _ in range(nsteps):
        stepper(state)
        if callback is not None:
            callback(state)
    return state


__all__ = [
    "SCHEMES",
    "SOLVES_PER_STEP",
    "VARIANTS",
    "DegenerateProjectionError",
    "SchemeState",
    "advance",
    "make_state",
    "step",
    "step_gspm",
    "step_scheme_a",
    "step_scheme_a_printed",
    "step_scheme_b",
]
