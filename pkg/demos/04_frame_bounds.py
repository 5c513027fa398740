# %% [markdown]
# # Stability: extreme eigenvalues of Gram sections
#
# The exponentials on the lattice form a Riesz basis of L^2(E) exactly when
# the Gram matrix is bounded above and below.  Finite sections approach the
# bounds quickly; duplicated shifts destroy the lower one.

# %%
import numpy as np

from rieszcubes import build, demo_union, frame_bounds
from rieszcubes.shifts import ShiftVector

for name in ("d1p2", "d1p3"):
    ks = build(demo_union(name), seed=0)
    rows = [frame_bounds(ks.E, ks.K, ks.E.beta, N) for N in (2, 4, 8, 16)]
    print(name, [(r.N, round(r.lambda_min, 5), round(r.lambda_max, 3)) for r in rows])

E = demo_union("d1p2")
bad = ShiftVector(np.array([[0.4], [0.4]]), 0.0)
print("duplicated shifts, lambda_min:", frame_bounds(E, bad, 1.0, 8).lambda_min)
