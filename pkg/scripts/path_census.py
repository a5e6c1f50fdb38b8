"""Lengths of the straight-line tile path and of the edge set E_n, with tails."""

from _common import emit, parser

from fpplab.estimators import fluctuation_diagnostics, path_census
from fpplab.fpp import PassageTimeLaw

p = parser(__doc__)
p.add_argument("--n", type=float, nargs="+", default=[20.0, 40.0, 80.0])
a = p.parse_args()

census = path_census(a.n, a.replicates, master_seed=a.seed, workers=a.workers)
census.pop("raw")
fluct = fluctuation_diagnostics(PassageTimeLaw.exponential(), a.n, a.replicates, master_seed=a.seed, workers=a.workers)
emit({"census": census, "fluctuations": fluct.to_dict()}, a.out)
