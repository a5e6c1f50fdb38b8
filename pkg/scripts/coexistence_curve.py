"""Probability of k-coexistence and of full sector coverage against the seed radius."""

import numpy as np
from _common import emit, parser

from fpplab.estimators import coexistence_curve
from fpplab.geometry import SimWindow

p = parser(__doc__)
p.add_argument("--k", type=int, default=3)
p.add_argument("--radii", type=float, nargs="+", default=[5.0, 10.0, 20.0, 40.0])
p.add_argument("--eps", type=float, default=np.pi / 8)
p.add_argument("--half-width", type=float, default=100.0)
a = p.parse_args()

c = coexistence_curve(a.k, a.radii, a.replicates, a.eps, window=SimWindow(a.half_width), master_seed=a.seed, workers=a.workers)
d = c.to_dict()
d.pop("raw")
emit(d, a.out)
