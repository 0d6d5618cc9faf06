"""Field sweeps: perpendicular and parallel (spin flop) with the thin-film A_afm, parallel with weak A_afm (spin flip)."""

from afmllg.core import TABLE6
from afmllg.experiments import PhaseDiagramSpec, phase_diagram
from afmllg.output import PHASE_COLUMNS, write_trace

from _common import parser, setup

ap = parser(__doc__)
ap.add_argument("--dB", type=float, default=25.0)
ap.add_argument("--B-max", type=float, default=300.0)
ap.add_argument("--max-steps", type=int, default=200_000)
args = ap.parse_args()
film = setup(args)

cases = [("perpendicular", TABLE6, "perpendicular"), ("parallel", TABLE6, "parallel_flop"),
         ("parallel", TABLE6.with_(A_afm=3e-15), "parallel_flip")]
for axis, material, tag in cases:
    spec = PhaseDiagramSpec(axis=axis, B_max=args.B_max, dB=args.dB, max_steps=args.max_steps,
                            scheme=args.scheme, film=film)
    rows = phase_diagram(spec, material, progress=lambda p: print(f"  {tag} {p.B:6.1f} T  m = {p.m_along:.4f}"
                                                                  f"  ({p.steps} steps)", flush=True))
    write_trace([r.record() for r in rows], args.out / f"phase_{tag}.csv", PHASE_COLUMNS)
