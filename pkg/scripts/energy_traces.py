"""Energy against time from random initial data for positive, zero and negative A_afm."""

from afmllg.core import TABLE6
from afmllg.experiments import RelaxationRun, relax
from afmllg.output import ENERGY_COLUMNS, write_trace

from _common import parser, setup

ap = parser(__doc__)
ap.add_argument("--T", type=float, default=20e-12, help="final time in seconds")
ap.add_argument("--seed", type=int, default=42)
args = ap.parse_args()
film = setup(args)

for A_afm in (3e-12, 0.0, -3e-12):
    run = RelaxationRun(material=TABLE6.with_(A_afm=A_afm), scheme=args.scheme, initial="random", T=args.T,
                        cadence=100, film=film, seed=args.seed)
    traj = relax(run)
    path = write_trace(traj.records(), args.out / f"energy_random_Aafm{A_afm:+.0e}.csv", ENERGY_COLUMNS)
    t1 = "none" if traj.t1 is None else f"{traj.t1 * 1e12:.2f} ps"
    t2 = "none" if traj.t2 is None else f"{traj.t2 * 1e12:.2f} ps"
    print(f"A_afm={A_afm:+.1e}: t1 {t1}, t2 {t2}, W {traj.energies[0].total:.6g} -> {traj.energies[-1].total:.6g}"
          f"  [{path}]", flush=True)
