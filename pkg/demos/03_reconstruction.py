# %% [markdown]
# # Recovering a band-limited signal from its samples
#
# The signal below has a smooth bump spectrum inside the first cube.  We
# sample it on the lattice, sum the series with more and more terms and
# watch the error fall.

# %%
import numpy as np

from rieszcubes import SampleSet, build, bump_oracle, demo_union, lattice_points, reconstruct_at, sample, synth_from_coeffs

ks = build(demo_union("d1p2"), seed=0)
F = bump_oracle(ks.E, 0)
t = np.linspace(-25, 25, 201)[:, None]
ref = F(t)
for N in (4, 8, 16, 32):
    lat, _ = lattice_points(ks.K, ks.E.beta, N)
    err = np.abs(reconstruct_at(ks, sample(F, lat), t) - ref).max() / abs(F([0.0]))
    print(f"N = {N:2d}: {len(lat):4d} samples, relative error {err:.1e}")

# %% [markdown]
# A function built from finitely many kernels is reproduced exactly once the
# sampling window covers its coefficients.

# %%
rng = np.random.default_rng(1)
lat, _ = lattice_points(ks.K, ks.E.beta, 6)
vals = rng.standard_normal((ks.p, len(lat.indices))) * (np.abs(lat.indices[:, 0]) <= 3)
G = synth_from_coeffs(ks, SampleSet(lat, vals.astype(complex)))
back = reconstruct_at(ks, sample(G, lat), t)
print("synthesised signal, relative error:", np.abs(back - G(t)).max() / np.abs(G(t)).max())
