"""Relax Neel-wall presets in the antiferromagnetic (A_afm > 0) and ferromagnetic (A_afm < 0) phases."""

import json

from afmllg.core import TABLE6
from afmllg.experiments import RelaxationRun, neel_wall
from afmllg.output import ENERGY_COLUMNS, write_snapshot, write_trace

from _common import parser, setup

ap = parser(__doc__)
ap.add_argument("--T", type=float, default=20e-12)
ap.add_argument("--width-cells", type=float, default=4.0)
args = ap.parse_args()
film = setup(args)

for A_afm in (3e-12, -3e-12):
    tag = "afm" if A_afm > 0 else "fm"
    run = RelaxationRun(material=TABLE6.with_(A_afm=A_afm), scheme=args.scheme, T=args.T, cadence=500, film=film)
    traj = neel_wall(run, args.width_cells)
    write_trace(traj.records(), args.out / f"wall_{tag}_energy.csv", ENERGY_COLUMNS)
    write_snapshot(traj.m_A, traj.m_B, run.mesh, traj.times[-1], args.out / f"wall_{tag}_final.vtk", L=film.L)
    summary = {k: (v.tolist() if hasattr(v, "tolist") else v) for k, v in traj.extra.items()}
    (args.out / f"wall_{tag}_summary.json").write_text(json.dumps(summary, indent=1))
    print(f"{tag}: centre {summary['wall_center'] * 1e9:.2f} nm, width {summary['wall_width'] * 1e9:.2f} nm, "
          f"max |m_A - m_B| {summary['max_sublattice_gap']:.2e}, max |m| {summary['max_abs_m']:.2e}", flush=True)
