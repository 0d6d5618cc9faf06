"""Fitted temporal and spatial orders (1D) against the coupling delta for every scheme."""

from afmllg.verify import paper_study, run_convergence

from _common import parser

ap = parser(__doc__)
ap.add_argument("--deltas", default="0.1,-0.1,5,-5,100,-100")
ap.add_argument("--axes", default="time,space")
args = ap.parse_args()
args.out.mkdir(parents=True, exist_ok=True)

lines = ["delta,axis,scheme,s,order"]
for delta in (float(d) for d in args.deltas.split(",")):
    for axis in args.axes.split(","):
        table = run_convergence(paper_study(axis, 1, delta=delta))
        for (sch, s), order in table.orders.items():
            lines.append(f"{delta!r},{axis},{sch},{s},{order:.4f}")
            print(lines[-1], flush=True)
        (args.out / f"delta_scan_{axis}_delta{delta:g}.csv").write_text(table.to_csv())
(args.out / "delta_scan_orders.csv").write_text("\n".join(lines) + "\n")
