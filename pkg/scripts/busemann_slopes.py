"""Busemann slopes H(n e1, 0)/n against the band, plus the stabilization census."""

import numpy as np
from _common import emit, parser

from fpplab.busemann import slope_experiment, stabilization_census
from fpplab.fpp import PassageTimeLaw
from fpplab.geometry import SimWindow

p = parser(__doc__)
p.add_argument("--n", type=float, nargs="+", default=[25.0, 50.0, 100.0])
p.add_argument("--alphas", type=float, nargs="+", default=[0.0, np.pi / 8, np.pi / 4, 3 * np.pi / 8])
p.add_argument("--half-width", type=float, default=150.0)
a = p.parse_args()

window = SimWindow(a.half_width)
slopes = slope_experiment(PassageTimeLaw.exponential(), a.alphas, a.n, a.replicates, window, master_seed=a.seed, workers=a.workers)
census = stabilization_census(a.replicates, window=window, master_seed=a.seed, workers=a.workers)
census.pop("rows")
emit({"slopes": [s.to_dict() for s in slopes], "stabilization": census}, a.out)
