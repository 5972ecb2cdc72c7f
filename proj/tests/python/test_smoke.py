"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import hpq


def test_ordering_round_trip():
    assert hpq.rectangle_at(0) == (0, 0, 0, 0)
    assert hpq.ordering_index(1, 0, 0, 0) == 1
    for n in range(hpq.rectangle_count(3)):
        kx, jx, ky, jy = hpq.rectangle_at(n)
        assert hpq.ordering_index(kx, jx, ky, jy) == n


def test_mixed_norm_normalization():
    # ||h_{I x J}|| = |I|^(1/p) |J|^(1/q)
    terms = [((1, 0, 2, 3), 1.0)]
    for p in (1.0, 1.5, 2.0, 3.0):
        for q in (1.0, 1.5, 2.0, 3.0):
            expected = 0.5 ** (1.0 / p) * 0.25 ** (1.0 / q)
            assert hpq.mixed_norm(terms, p=p, q=q) == pytest.approx(expected, rel=1e-12)


def test_pipeline_small():
    op = hpq.gen_test_operator(
        "diagonal-plus-decaying-offdiagonal", depth=4, seed=3, delta=0.8, epsilon=0.02
    )
    assert op.delta() >= 0.8
    family, diag = hpq.build_blocks(op, delta=0.8, depth=4, steps=9, seed=5)
    assert diag["clean"]
    assert len(family) == 9

    report = family.capon_check()
    assert report["ok"]
    assert report["c_x_is_one"] and report["c_y_is_one"]

    result = hpq.factor(op, family, p=2.0, q=2.0)
    eta = 0.8 / 9.0
    assert result["residual"] <= eta / (0.8 - eta)
    assert result["conditioning"] > 1e-8


def test_operator_json_round_trip():
    op = hpq.gen_test_operator("pure-diagonal", depth=2, seed=1, delta=1.0, spread=0.0)
    clone = hpq.Operator.from_json(op.to_json())
    assert clone.entries == op.entries
    assert clone.norm_l2() == pytest.approx(1.0, rel=1e-12)


def test_fredholm():
    rng = np.random.default_rng(7)
    m = rng.standard_normal((12, 12))
    u, s, vt = np.linalg.svd(m)
    s[-2:] = 0.0
    m = (u * s) @ vt
    out = hpq.fredholm(m)
    assert out["feasible"]
    assert out["nullity"] == 2
    total = out["S1"] @ m @ out["R1"] + out["S2"] @ m @ out["R2"]
    assert np.abs(total - np.eye(12)).max() <= 1e-8

    bad = np.zeros((4, 4))
    bad[0, 0] = 1.0
    out = hpq.fredholm(bad)
    assert not out["feasible"]
    assert "nullity" in out["reason"]


def test_capon_check_json_trivial():
    family = {
        "depth": 1,
        "blocks": [
            {
                "index": {"kx": 0, "jx": 0, "ky": 0, "jy": 0},
                "members": [{"rect": {"kx": 0, "jx": 0, "ky": 0, "jy": 0}, "weight": 1.0}],
            }
        ],
    }
    import json

    report = hpq.capon_check_json(json.dumps(family))
    assert report["ok"]
    assert math.isclose(report["c_x"], 1.0)
