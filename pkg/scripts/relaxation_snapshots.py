"""Snapshots of the relaxation from m_A = x, m_B = y, for A_afm > 0 and A_afm < 0."""

from afmllg.core import TABLE6
from afmllg.experiments import RelaxationRun, relax
from afmllg.output import ENERGY_COLUMNS, write_snapshot, write_trace

from _common import parser, setup

ap = parser(__doc__)
ap.add_argument("--T", type=float, default=10e-12)
ap.add_argument("--every", type=int, default=500, help="snapshot cadence in steps")
args = ap.parse_args()
film = setup(args)

for A_afm in (3e-12, -3e-12):
    tag = "afm" if A_afm > 0 else "fm"
    run = RelaxationRun(material=TABLE6.with_(A_afm=A_afm), scheme=args.scheme, T=args.T, cadence=args.every,
                        film=film, snapshots=True)
    traj = relax(run)
    write_trace(traj.records(), args.out / f"relax_{tag}_energy.csv", ENERGY_COLUMNS)
    for t, a, b in traj.snapshots:
        write_snapshot(a, b, run.mesh, t, args.out / f"relax_{tag}_{t * 1e15:08.0f}fs.vtk", L=film.L)
    print(f"{tag}: {len(traj.snapshots)} snapshots, final mean |m| {traj.mean_m[-1]:.3e}, "
          f"mean |l| {traj.mean_l[-1]:.3e}", flush=True)
