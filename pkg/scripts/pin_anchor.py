"""High-replicate time-constant run whose value is pinned in the tests."""

import time

from _common import emit, parser

from fpplab.estimators import estimate_mu
from fpplab.fpp import PassageTimeLaw
from fpplab.geometry import SimWindow

p = parser(__doc__)
p.set_defaults(seed=987654, replicates=2000)
a = p.parse_args()

t0 = time.perf_counter()
e = estimate_mu(PassageTimeLaw.exponential(), 50.0, replicates=a.replicates, window=SimWindow(75.0),
                master_seed=a.seed, workers=a.workers)
emit({"value": e.value, "stderr": e.stderr, "replicates": e.replicates, "seconds": time.perf_counter() - t0}, a.out)
