import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszcubes import (
    ShiftSearchExhausted,
    build_partition,
    choose_shifts,
    demo_union,
    min_normalized_det,
    validate_union,
)
from rieszcubes.shifts import lu_det, system_matrix

from test_geometry import cube_unions

K_HAND = np.array([[0.0], [np.pi / 2]])


@pytest.fixture
def two_part(two_cube):
    return build_partition(two_cube)


def test_one_by_one_matrix():
    E = validate_union(1, 1.0, [[0.0]])
    P = build_partition(E)
    assert system_matrix(P, [[0.7]], 0, 0, 1.0).tolist() == [[1.0]]


def test_hand_matrix(two_part):
    # cell s=1 carries the translation set {0, 2}
    B = system_matrix(two_part, K_HAND, 0, 1, 1.0)
    assert np.allclose(B, [[1, 1], [1, -1]], atol=1e-15)


def test_repeated_shift_gives_zero_det(two_part):
    B = system_matrix(two_part, [[0.3], [0.3]], 0, 0, 1.0)
    assert abs(lu_det(B)) < 1e-15


def test_lu_det_matches_numpy():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    assert np.isclose(lu_det(a), np.linalg.det(a), rtol=1e-12)


def test_certificate_single_cube():
    E = validate_union(2, 1.0, [[0.0, 0.0]])
    assert min_normalized_det(build_partition(E), [[0.4, 1.1]], 1.0) == 1.0


def test_certificate_hand_value(two_part):
    assert np.isclose(min_normalized_det(two_part, K_HAND, 1.0), np.sqrt(2) / 2, rtol=1e-14)


def test_certificate_duplicate_shifts(two_part):
    assert min_normalized_det(two_part, [[1.0], [1.0]], 1.0) < 1e-15


def test_choose_single_cube_first_try():
    E = validate_union(1, 1.0, [[0.0]])
    K = choose_shifts(build_partition(E), 1.0, seed=7)
    assert K.tries == 1
    assert K.min_norm_det == 1.0


def test_choose_two_cube(two_part):
    K = choose_shifts(two_part, 1.0, seed=0, tau=1e-3, max_tries=64)
    assert K.min_norm_det > 1e-3
    assert np.all((K.shifts >= 0) & (K.shifts < 2 * np.pi))


def test_choose_is_seeded(two_part):
    a = choose_shifts(two_part, 1.0, seed=11)
    b = choose_shifts(two_part, 1.0, seed=11)
    assert np.array_equal(a.shifts, b.shifts)


def test_tau_one_exhausts(two_part):
    with pytest.raises(ShiftSearchExhausted) as info:
        choose_shifts(two_part, 1.0, tau=1.0, max_tries=8)
    assert info.value.tries == 8
    assert 0 < info.value.best < 1


@pytest.mark.parametrize("tau", [0.0, -1e-3])
def test_tau_must_be_positive(two_part, tau):
    with pytest.raises(ValueError):
        choose_shifts(two_part, 1.0, tau=tau)


@pytest.mark.parametrize("name", ["d1p2", "d2p3"])
def test_first_draw_rarely_fails(name):
    E = demo_union(name)
    P = build_partition(E)
    fails = sum(choose_shifts(P, E.beta, seed=s, tau=1e-6).tries > 1 for s in range(200))
    assert fails / 200 < 0.05


@settings(max_examples=40, deadline=None)
@given(cube_unions(), st.integers(0, 2 ** 32 - 1))
def test_certificate_in_unit_interval(E, seed):
    P = build_partition(E)
    k = np.random.default_rng(seed).uniform(0, 2 * np.pi / E.beta, (E.p, E.dim))
    c = min_normalized_det(P, k, E.beta)
    # Hadamard's inequality for unimodular entries
    assert 0.0 <= c <= 1.0 + 1e-12
