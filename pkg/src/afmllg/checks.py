"""Built-in invariant suite, run by ``afmllg check``.

Each check returns ``(ok, detail)``.  They use a seeded generator so a
failure is reproducible; the property-based versions live in the test suite.
"""

from __future__ import annotations

import time

import numpy as np

from afmllg.config import ConfigError, parse_config
from afmllg.core import DimensionlessParams, Mesh, random_field
from afmllg.dynamics import effective_field_terms, energy, project
from afmllg.gridops import HelmholtzSolver, assemble_matrix
from afmllg.schemes import SCHEMES, SOLVES_PER_STEP, make_state, step

ORACLE_MESHES = [
    Mesh((7,), (0.13,)),
    Mesh((1,), (1.0,)),
    Mesh((3, 4, 5), (0.2, 0.25, 0.1)),
    Mesh((6, 6, 6), (1 / 6,) * 3),
    Mesh((5, 1, 4), (0.3, 1.0, 0.2)),
]


def check_helmholtz_oracle(rng, tol=1e-11):
    worst = 0.0
    for mesh in ORACLE_MESHES:
        for c in (0.0, 1e-3, 0.37, 25.0):
            dense = assemble_matrix(mesh, c)
            rhs = rng.standard_normal(mesh.dims)
            ref = np.linalg.solve(dense, rhs.ravel()).reshape(mesh.dims)
            for backend in ("dct", "cg"):
                x = HelmholtzSolver(mesh, c, backend).solve(rhs)
                worst = max(worst, float(np.max(np.abs(x - ref)) / max(1.0, np.max(np.abs(ref)))))
    return worst < tol, f"max relative deviation from dense solve {worst:.2e}"


def _params(rng):
    return DimensionlessParams(q=float(rng.uniform(0, 2)), eps=float(rng.uniform(0, 1)),
                               delta=float(rng.uniform(-5, 5)), alpha=0.1, s=float(rng.uniform(0.5, 1)),
                               h_ext=tuple(rng.uniform(-1, 1, 3)))


def check_gradient(rng, tol=1e-6):
    """-dW/dm_A per unit cell volume equals 2(aniso + exchange) + coupling + Zeeman fields."""
    worst = 0.0
    for mesh in (Mesh((9,), (0.1,)), Mesh((4, 3, 3), (0.2, 0.3, 0.25))):
        p = _params(rng)
        a = random_field(mesh, 1.0, int(rng.integers(1 << 30))).values
        b = random_field(mesh, p.s, int(rng.integers(1 << 30))).values
        terms = effective_field_terms(a, b, p, mesh)
        expect = 2 * (terms.anisotropy + terms.fm_exchange) + terms.afm_coupling + terms.zeeman
        hstep = 1e-5
        for _ in range(6):
            idx = (int(rng.integers(3)),) + tuple(int(rng.integers(d)) for d in mesh.dims)
            ap, am = a.copy(), a.copy()
            ap[idx] += hstep
            am[idx] -= hstep
            dw = (energy(ap, b, p, mesh).total - energy(am, b, p, mesh).total) / (2 * hstep)
            got = -dw / mesh.cell_volume
            worst = max(worst, abs(got - expect[idx]) / max(1.0, abs(expect[idx])))
    return worst < tol, f"max relative gradient mismatch {worst:.2e}"


def check_energy_parts(rng, tol=1e-12):
    mesh = Mesh((4, 5, 3), (0.25, 0.2, 1 / 3))
    p = _params(rng)
    a = random_field(mesh, 1.0, 1).values
    b = random_field(mesh, p.s, 2).values
    w = energy(a, b, p, mesh)
    ok = abs(w.total - (w.anisotropy + w.fm_exchange + w.afm_exchange + w.zeeman)) < tol
    # uniform antiparallel state along the easy axis: only the coupling survives
    ua = np.zeros(mesh.field_shape())
    ua[0] = 1.0
    u = energy(ua, -p.s * ua, p.with_(h_ext=(0.0, 0.0, 0.0)), mesh)
    ok &= abs(u.anisotropy) < tol and abs(u.fm_exchange) < tol and abs(u.zeeman) < tol
    ok &= abs(u.afm_exchange + p.delta * p.s * mesh.volume) < tol * max(1.0, abs(p.delta))
    return bool(ok), f"parts sum {w.total:.6g}; uniform coupling {u.afm_exchange:.6g}"


def check_projection(rng, tol=1e-14):
    worst = 0.0
    for s in (1.0, 0.8, 0.37):
        v = rng.standard_normal((3, 6, 5, 4)) * rng.uniform(1e-3, 1e3)
        once = project(v, s)
        twice = project(once.values, s)
        worst = max(worst, once.max_norm_deviation(), float(np.max(np.abs(twice.values - once.values))))
    return worst < tol, f"max norm deviation / idempotence gap {worst:.2e}"


def check_solve_counts(rng):
    mesh = Mesh((5, 4, 3), (0.2, 0.25, 1 / 3))
    p = _params(rng)
    seen = {}
    for scheme in SCHEMES:
        st = make_state(scheme, random_field(mesh, 1.0, 3).values, random_field(mesh, p.s, 4).values, p, mesh, 1e-3)
        deltas = set()
        for _ in range(3):
            before = st.solves
            step(st)
            deltas.add(st.solves - before)
        seen[scheme] = deltas
    ok = all(seen[k] == {v} for k, v in SOLVES_PER_STEP.items())
    return ok, ", ".join(f"{k}: {sorted(v)}" for k, v in seen.items())


_TOKENS = ["[run]", "[material]", "[grid]", "[time]", "[field]", "[bogus]", "experiment", "scheme", "Ms", "A",
           "A_afm", "cells", "dt", "T", "=", ":", " ", "\n", "1", "-3e-12", "fs", "nm", "nan", "inf", "relax",
           "gspm", "#", ";", "[", "]", "\t", "\x00", "é", "0.5", "1 2 3", "scheme-a", "seed", "s"]


def check_config_fuzz(rng, n=400):
    crashes = []
    for _ in range(n):
        text = "".join(rng.choice(_TOKENS, size=int(rng.integers(0, 40))))
        try:
            parse_config(text)
        except ConfigError:
            pass
        except Exception as exc:  # noqa: BLE001 - any other exception is the failure being tested
            crashes.append(f"{type(exc).__name__}: {text!r}")
    return not crashes, f"{n} documents, {len(crashes)} crashes" + (f"; first {crashes[0]}" if crashes else "")


CHECKS = {
    "helmholtz-oracle": check_helmholtz_oracle,
    "gradient": check_gradient,
    "energy-parts": check_energy_parts,
    "projection": check_projection,
    "solve-counts": check_solve_counts,
    "config-fuzz": check_config_fuzz,
}


def run_checks(seed: int = 42) -> list:
    """Run every check; returns (name, ok, detail, seconds) tuples."""
    rows = []
    for name, fn in CHECKS.items():
        t0 = time.perf_counter()
        try:
            ok, detail = fn(np.random.default_rng(seed))
        except Exception as exc:  # noqa: BLE001
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        rows.append((name, bool(ok), detail, time.perf_counter() - t0))
    return rows
