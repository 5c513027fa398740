import json

import numpy as np
import pytest

from rieszcubes import FormatError, build, demo_union, load_basis, save_basis
from rieszcubes.basisfile import FORMAT_VERSION, basis_to_dict, dumps_basis

from conftest import DEMOS


@pytest.mark.parametrize("name", DEMOS)
def test_round_trip_bit_exact(demo_sets, tmp_path, name):
    ks = demo_sets[name]
    path = tmp_path / "b.json"
    save_basis(ks, path)
    back = load_basis(path)
    assert np.array_equal(back.coeffs.x, ks.coeffs.x)
    assert np.array_equal(back.shifts, ks.shifts)
    assert back.K.min_norm_det == ks.K.min_norm_det
    assert back.E == ks.E
    assert dumps_basis(back) == dumps_basis(ks)


def test_rebuild_is_byte_identical():
    a = dumps_basis(build(demo_union("d2p3"), seed=3))
    b = dumps_basis(build(demo_union("d2p3"), seed=3))
    assert a == b


def test_layout(demo_sets):
    d = basis_to_dict(demo_sets["d1p2"])
    assert d["format_version"] == FORMAT_VERSION == 1
    assert d["geometry"] == {"dim": 1, "beta": 1.0, "corners": [[0.0], [2.5]]}
    assert set(d["shifts"]) == {"k", "seed", "tau", "tries", "certificate"}
    # rows l, j, s are one-based
    assert d["coefficients"][0][:3] == [1, 1, 1]
    assert len(d["coefficients"]) == 2 * 2 * 2


def test_wrong_version(demo_sets, tmp_path):
    d = basis_to_dict(demo_sets["d1p2"])
    d["format_version"] = 2
    (tmp_path / "b.json").write_text(json.dumps(d))
    with pytest.raises(FormatError):
        load_basis(tmp_path / "b.json")


def test_missing_rows(demo_sets, tmp_path):
    d = basis_to_dict(demo_sets["d1p2"])
    d["coefficients"].pop()
    (tmp_path / "b.json").write_text(json.dumps(d))
    with pytest.raises(FormatError):
        load_basis(tmp_path / "b.json")


def test_not_json(tmp_path):
    (tmp_path / "b.json").write_text("{oops")
    with pytest.raises(FormatError):
        load_basis(tmp_path / "b.json")
