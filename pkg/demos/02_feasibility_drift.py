"""How far do curves drift off the manifold for long steps?

The expm-based curves are exact in exact arithmetic, but for large t the
exponentials grow like exp(c t) and the constraint U^+ U = I is lost to
rounding. The Cayley retraction only needs a 2k x 2k solve and stays
feasible. This script runs the same experiment the CLI's ``feasibility``
command runs, at a size that takes a few seconds.
"""

import numpy as np

from sympman import experiments as ex

cfg = ex.ExperimentConfig("feasibility", n=100, k=10, seed=0, runs=3, t_samples=13)
res = ex.run_feasibility(cfg)

names = res.header[1:]
print("t         " + "".join(f"{name:>17s}" for name in names))
for row in res.rows:
    print(f"{row[0]:<10.3g}" + "".join(f"{v:17.2e}" for v in row[1:]))

print()
print(ex.format_summary(res))

cay = np.array([row[names.index("cayley") + 1] for row in res.rows])
print(f"\nworst Cayley residual over the whole range: {cay.max():.1e}")
