"""Command-line driver: ``afmllg <subcommand> [--config PATH] [flags]``.

Exit codes: 0 success, 1 invalid input (bad config, flags or paths), 2 numerical
failure (blow-up, solver non-convergence, failed invariant).  Progress and
failures are reported as JSON lines on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from afmllg.checks import run_checks
from afmllg.config import ConfigError, RunConfig, parse_config, parse_time
from afmllg.core import InvalidParameterError
from afmllg.dynamics import DegenerateProjectionError
from afmllg.experiments import (BlowUpError, Film, PhaseDiagramSpec, RelaxationRun, neel_wall,
                                phase_diagram, relax)
from afmllg.gridops import SolverNotConvergedError
from afmllg.output import ENERGY_COLUMNS, PHASE_COLUMNS, OutputError, write_snapshot, write_trace
from afmllg.schemes import SCHEMES
from afmllg.verify import exchange_limit_trace, paper_study, run_convergence

SUBCOMMANDS = ("converge", "relax", "wall", "phase-diagram", "exchange-limit", "check")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="afmllg", description="Gauss-Seidel projection solvers for two-sublattice LLG dynamics.")
    ap.add_argument("command", choices=SUBCOMMANDS, metavar="command", help=" | ".join(SUBCOMMANDS))
    ap.add_argument("--config", type=Path, help="INI-style run configuration")
    ap.add_argument("--scheme", choices=SCHEMES)
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--dt", help="time step, e.g. '1 fs' (dimensionless for converge/exchange-limit)")
    ap.add_argument("--steps", type=int, help="number of steps; sets T = steps * dt")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--quiet", action="store_true", help="suppress progress records")
    return ap


class Diagnostics:
    def __init__(self, quiet: bool, stream=None):
        self.quiet = quiet
        self.stream = stream if stream is not None else sys.stderr

    def emit(self, event: str, force: bool = False, **fields):
        if self.quiet and not force:
            return
        rec = {"event": event}
        rec.update({k: _jsonable(v) for k, v in fields.items()})
        self.stream.write(json.dumps(rec) + "\n")
        self.stream.flush()


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not np.isfinite(v):
        return str(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    return v


def _load(args) -> RunConfig:
    if args.config is not None:
        try:
            text = args.config.read_text()
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read {args.config}: {getattr(exc, 'strerror', None) or exc}") from None
        cfg = parse_config(text, experiment=args.command if args.command != "check" else "relax")
        if args.command != "check" and cfg.experiment != args.command:
            raise ConfigError(f"config describes a {cfg.experiment!r} run, not {args.command!r}", key="experiment")
    else:
        cfg = RunConfig(experiment=args.command if args.command != "check" else "relax")
    if args.scheme:
        cfg.scheme = args.scheme
        cfg.given = cfg.given | {"run.scheme"}
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = str(args.out)
    if args.dt is not None:
        cfg.dt = parse_time(args.dt, cfg.dimensionless_time)
        if not cfg.dt > 0:
            raise ConfigError("--dt must be > 0", key="dt")
    if args.steps is not None:
        if args.steps < 0:
            raise ConfigError("--steps must be >= 0", key="steps")
        if cfg.dt is None:
            cfg.dt = 1e-4 if cfg.dimensionless_time else 1e-15
        cfg.T = args.steps * cfg.dt
    return cfg


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(out, exc.strerror or exc) from exc
    return out


def _film(cfg: RunConfig) -> Film:
    if len(cfg.cells) != 3:
        raise ConfigError("thin-film experiments need three cell counts", key="cells")
    return Film(tuple(cfg.cells), tuple(cfg.cell_size))


def _field_vector(cfg: RunConfig) -> tuple:
    if isinstance(cfg.direction, str):
        raise ConfigError("direction must be a 3-vector for this experiment", key="direction")
    d = np.asarray(cfg.direction, dtype=float)
    return tuple(cfg.magnitude * d / np.linalg.norm(d))


def _run(cfg: RunConfig) -> RelaxationRun:
    return RelaxationRun(material=cfg.material, scheme=cfg.scheme, initial=cfg.initial,
                         dt=cfg.dt if cfg.dt is not None else 1e-15,
                         T=cfg.T if cfg.T is not None else 20e-12, cadence=cfg.cadence,
                         film=_film(cfg), s=cfg.s, B_ext=_field_vector(cfg), seed=cfg.seed)


def cmd_converge(cfg: RunConfig, diag: Diagnostics, stdout) -> int:
    out = _outdir(cfg)
    schemes = (cfg.scheme,) if "run.scheme" in cfg.given else SCHEMES
    axes = ("time", "space") if cfg.study == "all" else (cfg.study,)
    failed = False
    for delta in cfg.delta:
        for axis in axes:
            study = paper_study(axis, cfg.dims, delta=delta)
            if cfg.T is not None:
                study.T = cfg.T
            if cfg.dt is not None and axis == "space":
                study.dt = cfg.dt
            table = run_convergence(study, schemes=schemes,
                                    log=lambda sch, s, h, e: diag.emit("row", scheme=sch, s=s, step=h, error=e))
            name = f"converge_{axis}_{cfg.dims}d" + (f"_delta{delta:g}" if len(cfg.delta) > 1 else "") + ".csv"
            path = out / name
            try:
                path.write_text(table.to_csv())
            except OSError as exc:
                raise OutputError(path, exc.strerror or exc) from exc
            for (sch, s), order in table.orders.items():
                print(f"{axis} {cfg.dims}D delta={delta:g} {sch} s={s:g}: order {order:.2f}", file=stdout)
                failed |= not np.isfinite(order)
            diag.emit("table", path=str(path))
    if failed:
        diag.emit("failure", force=True, reason="a convergence column blew up")
        return 2
    return 0


def _progress(diag: Diagnostics):
    def cb(state, traj):
        diag.emit("record", t_s=traj.times[-1], W_total=traj.energies[-1].total,
                  mean_m=traj.mean_m[-1], mean_l=traj.mean_l[-1])
    return cb


def _write_trajectory(cfg, run, traj, out: Path, stem: str, diag):
    trace = write_trace(traj.records(), out / f"{stem}_energy.csv", ENERGY_COLUMNS)
    mesh = run.mesh
    snap = write_snapshot(traj.m_A, traj.m_B, mesh, traj.times[-1], out / f"{stem}_final.vtk",
                          binary=cfg.binary, L=run.film.L)
    for t, a, b in traj.snapshots:
        write_snapshot(a, b, mesh, t, out / f"{stem}_{t * 1e15:012.1f}fs.vtk", binary=cfg.binary, L=run.film.L)
    diag.emit("summary", t1_s=traj.t1, t2_s=traj.t2, steps=traj.steps, trace=str(trace), snapshot=str(snap))


def cmd_relax(cfg: RunConfig, diag: Diagnostics, stdout) -> int:
    run = _run(cfg)
    run.snapshots = cfg.snapshots
    out = _outdir(cfg)
    traj = relax(run, progress=_progress(diag))
    _write_trajectory(cfg, run, traj, out, "relax", diag)
    print(f"t1 = {_fmt_time(traj.t1)}, t2 = {_fmt_time(traj.t2)}, final mean |m| = {traj.mean_m[-1]:.3e}, "
          f"final mean |l| = {traj.mean_l[-1]:.3e}", file=stdout)
    return 0


def cmd_wall(cfg: RunConfig, diag: Diagnostics, stdout) -> int:
    run = _run(cfg)
    run.snapshots = cfg.snapshots
    out = _outdir(cfg)
    traj = neel_wall(run, cfg.width_cells, progress=_progress(diag))
    _write_trajectory(cfg, run, traj, out, "wall", diag)
    summary = {k: v for k, v in traj.extra.items() if k != "profile"}
    summary["profile"] = [float(x) for x in traj.extra["profile"]]
    path = out / "wall_summary.json"
    try:
        path.write_text(json.dumps(summary, indent=1))
    except OSError as exc:
        raise OutputError(path, exc.strerror or exc) from exc
    print(f"wall centre {summary['wall_center'] * 1e9:.2f} nm, width {summary['wall_width'] * 1e9:.2f} nm", file=stdout)
    return 0


def cmd_phase_diagram(cfg: RunConfig, diag: Diagnostics, stdout) -> int:
    axis = cfg.direction if isinstance(cfg.direction, str) else "parallel"
    kw = dict(cfg.sweep)
    if cfg.dt is not None:
        kw["dt"] = cfg.dt
    spec = PhaseDiagramSpec(axis=axis, scheme=cfg.scheme, film=_film(cfg), s=cfg.s, **kw)
    out = _outdir(cfg)
    rows = phase_diagram(spec, cfg.material,
                         progress=lambda p: diag.emit("field", B_tesla=p.B, m=p.m_along, steps=p.steps,
                                                      converged=p.converged))
    path = write_trace([r.record() for r in rows], out / f"phase_{axis}.csv", PHASE_COLUMNS)
    for r in rows:
        print(f"{r.B:7.1f} T  m = {r.m_along:.6f}  steps = {r.steps}{'' if r.converged else '  (not converged)'}",
              file=stdout)
    diag.emit("table", path=str(path))
    return 0


def cmd_exchange_limit(cfg: RunConfig, diag: Diagnostics, stdout) -> int:
    out = _outdir(cfg)
    dt = cfg.dt if cfg.dt is not None else 1e-4
    alpha = cfg.material.alpha
    for delta in cfg.delta:
        T = cfg.T if cfg.T is not None else 3.0 / (alpha * abs(delta))
        t, num, exact = exchange_limit_trace((1, 0, 0), (0, 1, 0), alpha, delta, dt, T, scheme=cfg.scheme)
        dev = float(np.max(np.abs(num - exact)))
        recs = [dict(t=a, m_sq=b, m_sq_exact=c) for a, b, c in zip(t, num, exact)]
        path = write_trace(recs, out / f"exchange_limit_delta{delta:g}.csv")
        print(f"delta={delta:g}: max | |m|^2 - exact | = {dev:.3e} over alpha*delta*t in [0, {alpha * abs(delta) * T:g}]",
              file=stdout)
        diag.emit("table", path=str(path), max_deviation=dev)
    return 0


def cmd_check(cfg: RunConfig, diag: Diagnostics, stdout) -> int:
    rows = run_checks(cfg.seed)
    for name, ok, detail, secs in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<18} {detail}  ({secs:.2f} s)", file=stdout)
        diag.emit("check", name=name, ok=ok, detail=detail, seconds=secs)
    if all(r[1] for r in rows):
        return 0
    diag.emit("failure", force=True, reason="invariant check failed", checks=[r[0] for r in rows if not r[1]])
    return 2


def _fmt_time(t):
    return "not reached" if t is None else f"{t * 1e12:.3f} ps"


COMMANDS = {"converge": cmd_converge, "relax": cmd_relax, "wall": cmd_wall,
            "phase-diagram": cmd_phase_diagram, "exchange-limit": cmd_exchange_limit, "check": cmd_check}


def cli_main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write(str(exc) + "\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    diag = Diagnostics(args.quiet, stderr)
    try:
        cfg = _load(args)
        return COMMANDS[args.command](cfg, diag, stdout)
    except (ConfigError, InvalidParameterError) as exc:
        diag.emit("error", force=True, kind="validation", message=str(exc), key=getattr(exc, "key", None),
                  line=getattr(exc, "line", None))
        return 1
    except OutputError as exc:
        diag.emit("error", force=True, kind="io", message=str(exc), path=exc.path)
        return 1
    except BlowUpError as exc:
        diag.emit("error", force=True, kind="blowup", message=str(exc), step=exc.step, t_s=exc.t_seconds,
                  last_energy=exc.last_energy)
        return 2
    except (DegenerateProjectionError, SolverNotConvergedError, FloatingPointError) as exc:
        diag.emit("error", force=True, kind="numerical", message=str(exc))
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
