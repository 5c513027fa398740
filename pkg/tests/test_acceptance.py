"""Acceptance gate: one test and one printed PASS/FAIL line per criterion."""
import time

import numpy as np
import pytest

from rieszcubes import (
    SampleSet,
    approximate_cover,
    beurling_density,
    bump_oracle,
    check_interpolation,
    check_poisson_residual,
    eval_kernel,
    frame_bounds,
    lattice_points,
    load_basis,
    reconstruct_at,
    sample,
    save_basis,
    synth_from_coeffs,
)
from rieszcubes.basisfile import dumps_basis
from rieszcubes.geometry import Rect
from rieszcubes.shifts import ShiftVector
from rieszcubes import build, demo_union

from conftest import DEMOS, LOW_DIM, ONE_DIM, shannon_set
from test_kernels import gl_kernel
from test_reconstruct import random_alpha


@pytest.fixture
def report(capsys):
    def emit(tag, ok, detail, elapsed=None):
        line = f"ACCEPTANCE {tag}: {'PASS' if ok else 'FAIL'} {detail}"
        if elapsed is not None:
            line += f" ({elapsed:.2f} s)"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def test_c1_biorthogonality(report):
    start = time.perf_counter()
    devs = {n: check_interpolation(build(demo_union(n), seed=0), 5) for n in DEMOS}
    elapsed = time.perf_counter() - start
    worst = max(devs.values())
    ok = worst <= 1e-8 and elapsed < 10
    report("1 biorthogonality N=5", ok, f"max deviation {worst:.2e} <= 1e-8, runtime < 10 s", elapsed)


def test_c2_residuals(report):
    sets = {n: build(demo_union(n), seed=0) for n in DEMOS}
    start = time.perf_counter()
    sys_res = max(ks.coeffs.max_residual for ks in sets.values())
    pois = max(check_poisson_residual(ks, trials=100) for ks in sets.values())
    elapsed = time.perf_counter() - start
    ok = sys_res <= 1e-10 and pois <= 1e-9 and elapsed < 1
    report("2 system/Poisson residuals", ok,
           f"system {sys_res:.2e} <= 1e-10, Poisson {pois:.2e} <= 1e-9, runtime < 1 s", elapsed)


def test_c3_exact_reconstruction(demo_sets, report):
    start = time.perf_counter()
    worst = 0.0
    N = 8
    for name in LOW_DIM:
        ks = demo_sets[name]
        rng = np.random.default_rng(2024)
        lat, _ = lattice_points(ks.K, ks.E.beta, N)
        for _ in range(20):
            alpha = random_alpha(lat, N // 2, rng)
            F = synth_from_coeffs(ks, alpha)
            S = sample(F, lat)
            t = rng.uniform(-3 * N * ks.W / 2, 3 * N * ks.W / 2, (100, ks.dim))
            ref = F(t)
            err = np.abs(reconstruct_at(ks, S, t) - ref).max() / np.abs(ref).max()
            worst = max(worst, err)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 30
    report("3 exact reconstruction (d<=2)", ok, f"max relative error {worst:.2e} <= 1e-8, runtime < 30 s", elapsed)


def test_c4_shannon(report):
    ks = shannon_set()
    t = np.random.default_rng(7).uniform(-50, 50, 1000)
    expected = np.exp(1j * np.pi * t) * np.sinc(t)
    err = np.abs(eval_kernel(ks, 0, t[:, None]) - expected).max()
    rep = frame_bounds(ks.E, ks.K, 2 * np.pi, 8)
    gap = max(abs(rep.lambda_min - 1), abs(rep.lambda_max - 1))
    ok = err <= 1e-12 and gap <= 1e-8
    report("4 Shannon degeneration", ok, f"kernel error {err:.2e} <= 1e-12, |lambda - 1| {gap:.2e} <= 1e-8")


def test_c5_frame_stability(demo_sets, two_cube, report):
    start = time.perf_counter()
    ok = True
    parts = []
    for name in ONE_DIM:
        ks = demo_sets[name]
        lams = [frame_bounds(ks.E, ks.K, ks.E.beta, N).lambda_min for N in (2, 4, 8, 16)]
        ratios = [b / a for a, b in zip(lams, lams[1:])]
        ok &= min(lams) > 0 and min(ratios) >= 0.9
        parts.append(f"{name} min ratio {min(ratios):.3f}")
    forged = ShiftVector(np.array([[0.4], [0.4]]), 0.0)
    neg = frame_bounds(two_cube, forged, 1.0, 8).lambda_min
    elapsed = time.perf_counter() - start
    ok &= neg <= 1e-8 and elapsed < 60
    report("5 frame-bound stability (d=1)", ok,
           f"{', '.join(parts)} >= 0.9; duplicated shifts lambda_min {neg:.1e} <= 1e-8", elapsed)


def test_c6_truncation_decay(demo_sets, report):
    start = time.perf_counter()
    ks = demo_sets["d1p2"]
    F = bump_oracle(ks.E, 0)
    t = np.random.default_rng(6).uniform(-25, 25, (20, 1))
    ref = F(t)
    peak = abs(F([0.0]))  # the bump transform peaks at the origin
    errs = []
    for N in (8, 16, 32):
        lat, _ = lattice_points(ks.K, ks.E.beta, N)
        errs.append(np.abs(reconstruct_at(ks, sample(F, lat), t) - ref).max() / peak)
    elapsed = time.perf_counter() - start
    ok = errs[0] > errs[1] > errs[2] and errs[2] <= 1e-3 and elapsed < 60
    report("6 truncation decay", ok, "errors " + ", ".join(f"{e:.1e}" for e in errs) + " decreasing, last <= 1e-3",
           elapsed)


def test_c7_density_and_cover(demo_sets, report):
    worst = 0.0
    for ks in demo_sets.values():
        h = 50 * ks.W
        lat, _ = lattice_points(ks.K, ks.E.beta, 27)
        rep = beurling_density(lat, h)
        rate = ks.E.measure / (2 * np.pi) ** ks.dim
        worst = max(worst, abs(rep.upper - rate) / rate, abs(rep.lower - rate) / rate)
    eps = 0.2
    cover = approximate_cover([Rect((0.0, 0.0), (1.0, 1.0)), Rect((2.0, 0.0), (3.3, 1.0))], eps)
    a = cover.audit()
    ok = worst <= 0.05 and a["ordered"] and a["gap_inner"] < eps and a["gap_outer"] < eps
    report("7 density and cover", ok,
           f"density deviation {worst:.3f} <= 0.05; cover gaps {a['gap_inner']:.3f}, {a['gap_outer']:.3f} < {eps}")


def test_c8_oracle_equivalence(demo_sets, report):
    worst = 0.0
    for name in LOW_DIM:
        ks = demo_sets[name]
        t = np.random.default_rng(8).uniform(-20, 20, (50, ks.dim))
        for l in range(ks.p):
            worst = max(worst, np.abs(eval_kernel(ks, l, t) - gl_kernel(ks, l, t)).max())
    report("8 oracle equivalence (d<=2)", worst <= 1e-5, f"max |kernel - quadrature| {worst:.2e} <= 1e-5")


def test_c9_determinism(demo_sets, tmp_path, report):
    ok = True
    for name in DEMOS:
        first = dumps_basis(build(demo_union(name), seed=0))
        ok &= first == dumps_basis(build(demo_union(name), seed=0))
        ks = demo_sets[name]
        save_basis(ks, tmp_path / f"{name}.json")
        back = load_basis(tmp_path / f"{name}.json")
        ok &= np.array_equal(back.coeffs.x, ks.coeffs.x) and np.array_equal(back.shifts, ks.shifts)
        ok &= back.K.min_norm_det == ks.K.min_norm_det and back.E == ks.E
    report("9 determinism and round-trip", ok, "byte-identical rebuilds and bit-exact save/load on all demos")
