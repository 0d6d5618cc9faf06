"""Thin-film experiments: phase relaxation, Neel walls and the field phase diagram.

All drivers take SI inputs (seconds, Tesla, metres), convert once through the
material's time unit, and report times back in seconds.  The film is
100 x 100 x 10 nm; ``FILM`` uses 2 nm cells and ``DESK_FILM`` a coarser
25 x 25 x 3 grid that keeps runs to minutes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import curve_fit

from afmllg.core import (TABLE6, InvalidParameterError, MaterialParams, Mesh, nondimensionalize,
                         random_field, uniform_field)
from afmllg.dynamics import DegenerateProjectionError, energy, order_parameters
from afmllg.schemes import SCHEMES, SchemeState, make_state, step


class BlowUpError(ArithmeticError):
    """A run produced a non-finite or degenerate state."""

    def __init__(self, step: int, t_seconds: float, last_energy: float, cause: Exception | None = None):
        self.step = step
        self.t_seconds = t_seconds
        self.last_energy = float(last_energy)
        self.cause = cause
        super().__init__(f"numerical blow-up at step {step} (t = {t_seconds:.3e} s); "
                         f"last finite energy {float(last_energy)!r}")


@dataclass(frozen=True)
class Film:
    """Box sample: cell counts, SI cell edges, and the length unit L (largest edge)."""

    dims: tuple = (50, 50, 5)
    cell_size: tuple = (2e-9, 2e-9, 2e-9)

    def __post_init__(self):
        if len(self.dims) != 3 or len(self.cell_size) != 3:
            raise InvalidParameterError("film grids are 3D")
        if any(d < 1 for d in self.dims) or any(not h > 0 for h in self.cell_size):
            raise InvalidParameterError(f"bad film grid {self.dims} / {self.cell_size}")

    @property
    def extent(self) -> tuple:
        return tuple(d * h for d, h in zip(self.dims, self.cell_size))

    @property
    def L(self) -> float:
        return max(self.extent)

    def mesh(self) -> Mesh:
        return Mesh.from_physical(self.dims, self.cell_size, self.L)


FILM = Film()
DESK_FILM = Film((25, 25, 3), (4e-9, 4e-9, 10e-9 / 3))

PRESETS = ("paper", "random", "antiparallel", "parallel", "ground")


def initial_state(preset, mesh: Mesh, s: float = 1.0, seed: int = 42):
    """Named initial data, or an explicit ``(m_A, m_B)`` pair of arrays.

    ``paper``: m_A = x, m_B = y.  ``random``: independent seeded directions.
    ``antiparallel``/``ground``: m_A = x, m_B = -x.  ``parallel``: both along x.
    """
    if not isinstance(preset, str):
        m_A, m_B = preset
        return np.array(m_A, dtype=float), np.array(m_B, dtype=float)
    if preset == "paper":
        return uniform_field(mesh, (1, 0, 0)).values, uniform_field(mesh, (0, 1, 0), s).values
    if preset == "random":
        return random_field(mesh, 1.0, seed).values, random_field(mesh, s, seed + 1).values
    if preset in ("antiparallel", "ground"):
        return uniform_field(mesh, (1, 0, 0)).values, uniform_field(mesh, (-1, 0, 0), s).values
    if preset == "parallel":
        return uniform_field(mesh, (1, 0, 0)).values, uniform_field(mesh, (1, 0, 0), s).values
    raise InvalidParameterError(f"unknown initial preset {preset!r}; choose from {PRESETS}")


@dataclass
class RelaxationRun:
    """One relaxation: SI times, a film, and an initial preset (or arrays)."""

    material: MaterialParams = TABLE6
    scheme: str = "scheme-a"
    initial: object = "paper"
    dt: float = 1e-15
    T: float = 20e-12
    cadence: int = 100
    film: Film = FILM
    s: float = 1.0
    B_ext: tuple = (0.0, 0.0, 0.0)
    seed: int = 42
    snapshots: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidParameterError(f"unknown scheme {self.scheme!r}")
        if not (self.dt > 0 and self.T >= 0):
            raise InvalidParameterError("dt must be > 0 and T >= 0")
        if self.cadence < 1:
            raise InvalidParameterError("cadence must be >= 1")

    @property
    def params(self):
        return nondimensionalize(self.material, self.film.L, self.s, self.B_ext)

    @property
    def mesh(self) -> Mesh:
        return self.film.mesh()

    @property
    def nsteps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass
class Trajectory:
    """Recorded history of a relaxation; times in seconds."""

    times: list = field(default_factory=list)
    energies: list = field(default_factory=list)   # EnergyBreakdown per record
    mean_m: list = field(default_factory=list)     # spatial mean of |m_A + m_B| / 2
    mean_l: list = field(default_factory=list)     # spatial mean of |m_A - m_B| / 2
    snapshots: list = field(default_factory=list)  # (t, m_A, m_B) when requested
    t1: Optional[float] = None
    t2: Optional[float] = None
    m_A: Optional[np.ndarray] = None
    m_B: Optional[np.ndarray] = None
    steps: int = 0
    extra: dict = field(default_factory=dict)

    def records(self) -> list:
        """Rows for the energy-trace CSV."""
        return [dict(t_fs=t * 1e15, W_total=e.total, W_aniso=e.anisotropy, W_exch=e.fm_exchange,
                     W_afm=e.afm_exchange, W_zeeman=e.zeeman, mean_m=m, mean_l=l)
                for t, e, m, l in zip(self.times, self.energies, self.mean_m, self.mean_l)]


def _means(m_A, m_B):
    m, l = order_parameters(m_A, m_B)
    return float(np.mean(np.sqrt(np.sum(m * m, axis=0)))), float(np.mean(np.sqrt(np.sum(l * l, axis=0))))


def _relative_change(w_new: float, w_old: float) -> float:
    return abs(w_new - w_old) / max(abs(w_new), 1e-12)


def relax(run: RelaxationRun, progress: Callable | None = None, state: SchemeState | None = None) -> Trajectory:
    """Step from t = 0 to T, recording energy and order parameters every ``cadence`` steps.

    t1 is the first time the mean |m| (delta > 0) or mean |l| (delta < 0)
    falls below 0.05; t2 is the first time the relative energy change over a
    single step falls below 1e-9.
    """
    p, mesh = run.params, run.mesh
    if state is None:
        a, b = initial_state(run.initial, mesh, run.s, run.seed)
        state = make_state(run.scheme, a, b, p, mesh, run.dt / p.time_unit)
    tu = p.time_unit
    traj = Trajectory()
    watch_l = p.delta < 0

    def record():
        w = energy(state.m_A, state.m_B, p, mesh)
        mm, ml = _means(state.m_A, state.m_B)
        traj.times.append(state.t * tu)
        traj.energies.append(w)
        traj.mean_m.append(mm)
        traj.mean_l.append(ml)
        if run.snapshots:
            traj.snapshots.append((state.t * tu, state.m_A.copy(), state.m_B.copy()))
        return w.total, mm, ml

    w_prev, mm, ml = record()
    if (ml if watch_l else mm) < 0.05:
        traj.t1 = 0.0
    for n in range(1, run.nsteps + 1):
        t_before = state.t
        try:
            step(state)
        except DegenerateProjectionError as exc:
            raise BlowUpError(exc.step if exc.step is not None else n, state.t * tu, w_prev, exc) from exc
        on_record = n % run.cadence == 0 or n == run.nsteps
        need_w = traj.t2 is None or on_record
        if need_w:
            w = energy(state.m_A, state.m_B, p, mesh).total
            if not math.isfinite(w):
                raise BlowUpError(n, state.t * tu, w_prev)
            if traj.t2 is None and _relative_change(w, w_prev) < 1e-9:
                traj.t2 = t_before * tu
            w_prev = w
        if on_record:
            _, mm, ml = record()
            if traj.t1 is None and (ml if watch_l else mm) < 0.05:
                traj.t1 = state.t * tu
            if progress is not None:
                progress(state, traj)
    traj.m_A, traj.m_B, traj.steps = state.m_A, state.m_B, state.step_index
    return traj


def neel_preset(mesh: Mesh, width_cells: float = 4.0, antiparallel: bool = False, s: float = 1.0):
    """180-degree in-plane wall along x: theta = pi (1 - tanh((x - xc)/w)) / 2.

    m_A = (cos theta, sin theta, 0); m_B = s m_A, or -s m_A when ``antiparallel``.
    ``width_cells = inf`` gives the uniform state theta = pi/2.
    """
    x = mesh.coordinates()[0]
    xc = 0.5 * mesh.extent[0]
    w = width_cells * mesh.spacing[0]
    theta = 0.5 * np.pi * (1.0 - np.tanh((x - xc) / w))
    m_A = np.stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)])
    return m_A, (-s if antiparallel else s) * m_A


def _tanh(x, xc, w, amp):
    return amp * np.tanh((x - xc) / w)


def fit_wall(profile: np.ndarray, x: np.ndarray) -> tuple:
    """Least-squares fit of amp * tanh((x - xc)/w); returns (xc, w)."""
    amp0 = float(np.sign(profile[-1] - profile[0])) or 1.0
    p0 = (0.5 * (x[0] + x[-1]), 0.1 * (x[-1] - x[0]), amp0)
    (xc, w, _), _ = curve_fit(_tanh, x, profile, p0=p0, maxfev=10000)
    return float(xc), float(abs(w))


def neel_wall(run: RelaxationRun, width_cells: float = 4.0, progress: Callable | None = None) -> Trajectory:
    """Relax a wall preset; ``extra`` carries the fitted wall centre/width in metres.

    The sublattices start parallel for delta < 0 and antiparallel otherwise;
    the fitted profile is m_1 (delta < 0) or l_1 (delta >= 0), averaged over y, z.
    """
    p, mesh = run.params, run.mesh
    anti = p.delta >= 0
    a, b = neel_preset(mesh, width_cells, antiparallel=anti, s=run.s)
    state = make_state(run.scheme, a, b, p, mesh, run.dt / p.time_unit)
    traj = relax(run, progress, state=state)
    m, l = order_parameters(traj.m_A, traj.m_B)
    prof = (l if anti else m)[0].mean(axis=(1, 2))
    x = mesh.centers(0)
    traj.extra["profile"] = prof
    traj.extra["max_sublattice_gap"] = float(np.max(np.abs(traj.m_A - traj.m_B)))
    traj.extra["max_abs_m"] = float(np.max(np.sqrt(np.sum(m * m, axis=0))))
    try:
        xc, w = fit_wall(prof, x)
        traj.extra["wall_center"] = xc * run.film.L
        traj.extra["wall_width"] = w * run.film.L
    except (RuntimeError, ValueError):
        traj.extra["wall_center"] = traj.extra["wall_width"] = float("nan")
    return traj


AXES = {"parallel": (1.0, 0.0, 0.0), "perpendicular": (0.0, 1.0, 0.0)}


@dataclass(frozen=True)
class PhaseDiagramSpec:
    """Quasi-static field sweep from 0 to ``B_max`` in steps of ``dB`` (Tesla).

    ``tilt`` rotates the applied field by a small angle (radians) about z.
    Antiparallel states along x are exact fixed points under a field along x,
    so some symmetry breaking is needed for the flop or flip to happen.
    """

    axis: str = "parallel"
    B_max: float = 300.0
    dB: float = 10.0
    threshold: float = 1e-9
    max_steps: int = 200_000
    check_every: int = 100
    dt: float = 1e-15
    scheme: str = "scheme-a"
    film: Film = DESK_FILM
    s: float = 1.0
    tilt: float = 0.01

    def __post_init__(self):
        if self.axis not in AXES:
            raise InvalidParameterError(f"axis must be one of {tuple(AXES)}, got {self.axis!r}")
        if not self.threshold > 0:
            raise InvalidParameterError("threshold must be > 0")
        if not self.dB > 0:
            raise InvalidParameterError("dB must be > 0")
        if not (self.B_max >= 0 and self.max_steps >= 1 and self.check_every >= 1 and self.dt > 0):
            raise InvalidParameterError("B_max, max_steps, check_every and dt must be positive")
        if self.scheme not in SCHEMES:
            raise InvalidParameterError(f"unknown scheme {self.scheme!r}")

    def fields(self) -> np.ndarray:
        n = int(math.floor(self.B_max / self.dB + 1e-9))
        return self.dB * np.arange(n + 1)

    def direction(self) -> np.ndarray:
        e = np.asarray(AXES[self.axis])
        c, sn = math.cos(self.tilt), math.sin(self.tilt)
        return np.array([c * e[0] - sn * e[1], sn * e[0] + c * e[1], e[2]])


@dataclass
class FieldPoint:
    B: float
    m_along: float
    steps: int
    converged: bool

    def record(self) -> dict:
        return dict(B_tesla=self.B, mean_m_along_field=self.m_along,
                    steps_to_converge=self.steps, converged_flag=int(self.converged))


def relax_at_field(m_A, m_B, B: float, spec: PhaseDiagramSpec, material: MaterialParams):
    """Relax one field value to steady state; returns (FieldPoint, m_A, m_B)."""
    e = spec.direction()
    p = nondimensionalize(material, spec.film.L, spec.s, tuple(B * e))
    mesh = spec.film.mesh()
    state = make_state(spec.scheme, m_A, m_B, p, mesh, spec.dt / p.time_unit)
    w_old = energy(state.m_A, state.m_B, p, mesh).total
    converged = False
    while state.step_index < spec.max_steps:
        n = min(spec.check_every, spec.max_steps - state.step_index)
        for _ in range(n):
            step(state)
        w = energy(state.m_A, state.m_B, p, mesh).total
        if _relative_change(w, w_old) < spec.threshold:
            converged = True
            break
        w_old = w
    m, _ = order_parameters(state.m_A, state.m_B)
    along = float(np.mean(np.tensordot(e, m, axes=(0, 0))))
    return FieldPoint(float(B), along, state.step_index, converged), state.m_A, state.m_B


def phase_diagram(spec: PhaseDiagramSpec, material: MaterialParams = TABLE6,
                  progress: Callable | None = None) -> list:
    """Warm-started sweep from the antiparallel state along x; one FieldPoint per field.

    A field that hits ``max_steps`` is flagged unconverged and the sweep continues.
    """
    mesh = spec.film.mesh()
    m_A, m_B = initial_state("antiparallel", mesh, spec.s)
    rows = []
    for B in spec.fields():
        try:
            point, m_A, m_B = relax_at_field(m_A, m_B, B, spec, material)
        except DegenerateProjectionError as exc:
            raise BlowUpError(exc.step or 0, float("nan"), float("nan"), exc) from exc
        rows.append(point)
        if progress is not None:
            progress(point)
    return rows


__all__ = [
    "BlowUpError",
    "DESK_FILM",
    "FILM",
    "Film",
    "FieldPoint",
    "PhaseDiagramSpec",
    "RelaxationRun",
    "Trajectory",
    "fit_wall",
    "initial_state",
    "neel_preset",
    "neel_wall",
    "phase_diagram",
    "relax",
    "relax_at_field",
]
