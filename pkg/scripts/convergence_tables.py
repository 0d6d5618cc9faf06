"""Temporal and spatial convergence tables in 1D and 3D (all schemes, s = 1 and 0.8).

Writes one CSV per table and prints the fitted orders.  The 3D temporal table
also gets a fine-reference column set, since its errors against the exact
solution sit on the mesh's spatial error floor.
"""

import time

from afmllg.verify import paper_study, reference_errors, run_convergence

from _common import parser

ap = parser(__doc__.splitlines()[0])
ap.add_argument("--tables", default="time1,space1,time3,space3")
args = ap.parse_args()
args.out.mkdir(parents=True, exist_ok=True)

for name in args.tables.split(","):
    axis, dims = name[:-1], int(name[-1])
    t0 = time.perf_counter()
    study = paper_study(axis, dims)
    table = run_convergence(study)
    path = args.out / f"convergence_{axis}_{dims}d.csv"
    path.write_text(table.to_csv())
    print(f"{path} ({time.perf_counter() - t0:.0f} s)")
    print(table.to_csv())
    if name == "time3":
        rows = ["dt," + ",".join(f"{sch}(s={s})" for sch in ("gspm", "scheme-a", "scheme-b") for s in (1.0, 0.8))]
        refs = {(sch, s): reference_errors(study, sch, s) for sch in ("gspm", "scheme-a", "scheme-b")
                for s in (1.0, 0.8)}
        for i, dt in enumerate(study.dts):
            rows.append(f"{dt!r}," + ",".join(f"{r['errors'][i]:.4e}" for r in refs.values()))
        rows.append("order," + ",".join(f"{r['order']:.2f}" for r in refs.values()))
        rows.append("floor," + ",".join(f"{r['floor']:.2e}" for r in refs.values()))
        ref_path = args.out / "convergence_time_3d_reference.csv"
        ref_path.write_text("\n".join(rows) + "\n")
        print(ref_path)
        print("\n".join(rows))
