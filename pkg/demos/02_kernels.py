# %% [markdown]
# # Interpolation kernels in closed form
#
# Each kernel is a finite sum of box transforms, so it can be evaluated
# anywhere without quadrature.  The defining property is that S_l vanishes on
# every lattice point except its own.

# %%
import numpy as np

from rieszcubes import build, check_interpolation, demo_union, eval_kernel, eval_kernels, validate_union

ks = build(demo_union("d2p2"), seed=0)
W = ks.W
for l in range(ks.p):
    for s in range(ks.p):
        n = np.array([[0, 0], [1, 0], [0, -2], [3, 1]])
        vals = eval_kernels(ks, W * n + ks.shifts[s] - ks.shifts[l])[:, l]
        print(f"S_{l}(Wn + k_{s} - k_{l}) for n in {n.tolist()}:", np.round(np.abs(vals), 12))

print("worst deviation over |n| <= 5:", check_interpolation(ks, 5))

# %% [markdown]
# With one cube of side 2 pi the construction collapses to the classical
# cardinal series on the integers.

# %%
one = build(validate_union(1, 2 * np.pi, [[0.0]]))
t = np.linspace(-3, 3, 7)[:, None] + 0.25
shifted = t[:, 0] - one.shifts[0, 0]
ref = np.exp(1j * np.pi * shifted) * np.sinc(shifted)
print("max |S - e^{i pi t} sinc t|:", np.abs(eval_kernel(one, 0, t - one.shifts[0]) - ref).max())
