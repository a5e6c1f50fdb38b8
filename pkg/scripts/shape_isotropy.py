"""Time constant per direction, and the exact doubling under a doubled law."""

import numpy as np
from _common import emit, parser

from fpplab.estimators import estimate_mu_laws
from fpplab.fpp import PassageTimeLaw
from fpplab.geometry import SimWindow

p = parser(__doc__)
p.add_argument("--radius", type=float, default=100.0)
p.add_argument("--half-width", type=float, default=150.0)
a = p.parse_args()

law = PassageTimeLaw.exponential()
base, doubled = estimate_mu_laws(
    [law, law.scaled(2.0)], a.radius, replicates=a.replicates, window=SimWindow(a.half_width),
    master_seed=a.seed, workers=a.workers,
)
emit(
    {
        "mu": base.to_dict(),
        "isotropy_violations": base.isotropy_violations(),
        "doubling_exact": bool(np.array_equal(doubled.samples, 2 * base.samples)),
    },
    a.out,
)
