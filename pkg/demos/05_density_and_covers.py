# %% [markdown]
# # Density and covers of general boxes
#
# The lattice has p points per period cell, which is exactly the critical
# rate |E| / (2 pi)^d.  Large windows see that rate from above and below.

# %%
import numpy as np

from rieszcubes import approximate_cover, beurling_density, build, demo_union, lattice_points
from rieszcubes.geometry import Rect

for name in ("d1p3", "d2p3"):
    ks = build(demo_union(name), seed=0)
    lat, _ = lattice_points(ks.K, ks.E.beta, 27)
    rep = beurling_density(lat, 50 * ks.W)
    print(f"{name}: upper {rep.upper:.5f} lower {rep.lower:.5f} critical {rep.nyquist:.5f}")

# %% [markdown]
# A union of boxes that are not equal cubes is squeezed between two unions of
# equal cubes whose measures differ from it by less than eps.  Each of them
# can then be fed to the construction.

# %%
boxes = [Rect((0.0, 0.0), (1.0, 1.0)), Rect((2.0, 0.0), (3.3, 1.0))]
for eps in (0.5, 0.2, 0.05):
    cover = approximate_cover(boxes, eps)
    a = cover.audit()
    print(f"eps {eps}: side {cover.beta:.4f}, inner {a['measure_inner']:.4f}, "
          f"boxes {a['measure_boxes']:.4f}, outer {a['measure_outer']:.4f}")
