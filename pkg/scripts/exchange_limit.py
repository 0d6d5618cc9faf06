"""|m|^2 against the Bernoulli law in the exchange limit, for each scheme and delta = +-5."""

import numpy as np

from afmllg.verify import exchange_limit_trace

from _common import parser

ap = parser(__doc__)
ap.add_argument("--dt", type=float, default=1e-4)
ap.add_argument("--alpha", type=float, default=0.1)
args = ap.parse_args()
args.out.mkdir(parents=True, exist_ok=True)

# scheme-a-printed freezes the damping weight at |m|^2 = 1 and drifts off the law
for scheme in ("gspm", "scheme-a", "scheme-b", "scheme-a-printed"):
    for delta in (5.0, -5.0):
        T = 3.0 / (args.alpha * abs(delta))
        t, num, exact = exchange_limit_trace((1, 0, 0), (0, 1, 0), args.alpha, delta, args.dt, T, scheme=scheme)
        np.savetxt(args.out / f"exchange_limit_{scheme}_delta{delta:+g}.csv", np.column_stack([t, num, exact]),
                   delimiter=",", header="t,m_sq,m_sq_exact", comments="")
        print(f"{scheme:17s} delta={delta:+g}: max deviation {np.max(np.abs(num - exact)):.2e}")
