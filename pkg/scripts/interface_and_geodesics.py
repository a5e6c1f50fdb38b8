"""Branch directions of a two-species interface and straightness of geodesics."""

import numpy as np
from _common import emit, parser

from fpplab.estimators import interface_census, straightness_census
from fpplab.geometry import SimWindow

p = parser(__doc__)
p.add_argument("--half-width", type=float, default=100.0)
a = p.parse_args()

window = SimWindow(a.half_width)
iface = interface_census(a.replicates, window=window, master_seed=a.seed, workers=a.workers, rotate=True)
straight = straightness_census(a.replicates, window=window, master_seed=a.seed, workers=a.workers)
theta = np.array([b["theta"] for b in iface["branches"]])
emit(
    {
        "partition_ok_fraction": float(np.mean(iface["partition_ok"])),
        "branch_negative_fraction": iface["negative_fraction"],
        "branches": len(iface["branches"]),
        "distinct_theta": int(len(np.unique(theta))),
        "max_rotation_error": max(r["max_theta_error"] for r in iface["rotation"]),
        "geodesics": straight.extra,
    },
    a.out,
)
