import math

import pytest

import bubblewalk as bw

CANON = bw.ScalingRule.canonical()


def test_rules():
    assert bw.ScalingRule("canonical").alpha(1) == CANON.alpha(1)
    fig1 = bw.ScalingRule.explicit([2, 3, 4])
    assert [fig1.alpha(k) for k in (1, 2, 3)] == [2, 3, 4]
    assert "explicit" in repr(fig1)


def test_confinement_probability():
    assert bw.confine_prob_exact(2, 1) == 0.875
    assert bw.confine_prob_exact(1, 1) == 1.0
    assert bw.confine_rate(100) * 100**2 == pytest.approx(math.pi**2 / 16, rel=0.02)


def test_graph():
    fig1 = bw.ScalingRule.explicit([2, 3, 4])
    x, y = bw.parse_address(fig1, ":1"), bw.parse_address(fig1, ":3")
    assert bw.tree_distance(fig1, x, y) == 2
    root = bw.Vertex()
    for r in (0, 3, 10):
        assert len(bw.ball(CANON, root, r)) == bw.ball_count(CANON, r)
    assert bw.apply_word(CANON, root, "bbb") == root
    assert bw.apply_word(CANON, root, "aA") == root


def test_inverted_orbit_matches_direct_evaluation():
    inverse = {"a": "A", "A": "a", "b": "B", "B": "b"}
    word = "abBaabAbbaBab"
    points = bw.inverted_orbit(CANON, word)
    assert len(points) == len(word) + 1
    for k, u in enumerate(points):
        prefix_inverse = "".join(inverse[c] for c in reversed(word[:k]))
        assert u == bw.apply_word(CANON, bw.Vertex(), prefix_inverse)


def test_group_and_wreath():
    assert bw.elements_equal(CANON, "bbb", "")
    assert not bw.elements_equal(CANON, "ab", "ba")
    x = "lamps=:0,:1;base=abB"
    product = bw.wreath_multiply(CANON, x, bw.wreath_inverse(CANON, x))
    assert bw.wreath_equal(CANON, product, "lamps=;base=")
    assert not bw.wreath_equal(CANON, x, "lamps=:0;base=abB")
    run = bw.simulate_sws(CANON, 200, seed=3)
    assert len(run["walk"]) == 200
    assert run["final_support"] == len(run["final_lamps"])
    assert run == bw.simulate_sws(CANON, 200, seed=3)


def test_analysis():
    e = bw.flow_energy(bw.ScalingRule.explicit([2, 3, 4]), 3)
    assert e["partial_sums"][-1] == pytest.approx(3.125)
    assert bw.flow_energy(CANON, 60)["converges"]
    assert bw.kirchhoff_check(CANON, 6)
    assert bw.volume_exponent_fit(bw.ScalingRule.geometric(4.0), 1000, 10**6, 31) == pytest.approx(1.5, abs=0.05)
    g = bw.green_function_estimate(CANON, 1000, 50, seed=2)
    assert g["g"][0] <= g["g"][1] <= g["g"][2]
    table = bw.bound_pipeline(CANON, [1000, 10**5])
    assert [row[0] for row in table["rows"]] == [1000, 10**5]


def test_harmonic_identity_is_fair():
    p, se = bw.harmonic_estimate(CANON, "lamps=;base=", 500, 4000, seed=5)
    assert abs(p - 0.5) < 4 * max(se, math.sqrt(0.25 / 4000))


def test_errors():
    with pytest.raises(bw.LevelCapError):
        bw.green_function_estimate(bw.ScalingRule.constant(3), 10**6, 1)
    with pytest.raises(bw.ResourceGuardError):
        bw.ball(CANON, bw.Vertex(), 100000)
    with pytest.raises(ValueError):
        bw.ScalingRule("weird")
