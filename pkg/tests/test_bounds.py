import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projkit.bounds import (
    MIN_THETA,
    DegenerateBoundWarning,
    branch_threshold,
    closed_form_I,
    closed_form_II,
    compare,
    default_grid,
    disjoint_sum_bounds,
    maximin_cap_distance,
    oracle_min_I,
    oracle_min_II,
    sharpness_witness,
)

angles = st.floats(0.0, 0.45)


def test_default_grid_shape():
    g = default_grid()
    assert len(g) == 27 and len(set(g)) == 27


@pytest.mark.parametrize("theta,t1,t2", [(0.8, 0.15, 0.3), (1.2, 0.0, 0.3), (0.4, 0.15, 0.15)])
def test_case_I_oracle_agrees(theta, t1, t2):
    r = compare("I", theta, t1, t2)
    assert r.gap <= 1e-4, r.row()


@pytest.mark.parametrize("theta,t1,t2", [(0.8, 0.15, 0.3), (1.2, 0.0, 0.3), (0.4, 0.3, 0.0), (1.55, 0.3, 0.3)])
def test_case_II_oracle_agrees(theta, t1, t2):
    r = compare("II", theta, t1, t2)
    assert r.gap <= 1e-4, r.row()


def test_degenerate_case_I():
    with pytest.warns(DegenerateBoundWarning):
        assert closed_form_I(0.4, 0.3, 0.3) == 0.0
    assert oracle_min_I(0.4, 0.3, 0.3, resolution=24).value == pytest.approx(0.0, abs=1e-6)
    assert compare("I", 0.4, 0.3, 0.3).branch == "I-degenerate"


@given(t1=angles, t2=angles)
def test_right_angle_specializations(t1, t2):
    c1, c2 = np.cos(t1) ** 2, np.cos(t2) ** 2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBoundWarning)
        assert closed_form_I(np.pi / 2, t1, t2) == pytest.approx(c1 + c2 - 1, abs=1e-12)
    val, branch = closed_form_II(np.pi / 2, t1, t2)
    assert branch == "a"
    assert val == pytest.approx(min(c1, c2), abs=1e-12)


@given(t1=st.floats(0.05, 1.2), t2=st.floats(0.05, 1.2))
def test_case_II_branches_meet(t1, t2):
    c = branch_threshold(t1, t2)
    theta = float(np.arccos(c))
    a, ba = closed_form_II(theta + 1e-12, t1, t2)
    b, bb = closed_form_II(theta - 1e-12, t1, t2)
    assert (ba, bb) == ("a", "b")
    assert abs(a - b) <= 1e-8


@settings(max_examples=50)
@given(theta=st.floats(0.3, 1.5), t1=st.floats(0, 1.4), t2=st.floats(0, 1.4))
def test_case_II_dominates_case_I(theta, t1, t2):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBoundWarning)
        lo = closed_form_I(theta, t1, t2)
    val, _ = closed_form_II(theta, t1, t2)
    assert val >= lo - 1e-12
    assert val <= min(np.cos(t1), np.cos(t2)) ** 2 + 1e-12


def test_angle_validation():
    for bad in ((MIN_THETA / 2, 0.1, 0.1), (2.0, 0.1, 0.1), (1.0, np.pi / 2, 0.1), (1.0, -0.1, 0.0)):
        with pytest.raises(ValueError):
            closed_form_II(*bad)
    with pytest.raises(ValueError):
        compare("III", 1.0, 0.1, 0.1)


def test_oracle_result_fields():
    r = oracle_min_II(1.0, 0.2, 0.1, resolution=16)
    assert r.resolution == 16 and r.value == max(r.raw, 0.0)
    assert r.grid_value >= r.raw - 1e-12


TRIPLES = [(t, a, b) for t in (0.7, 1.0, 1.3) for a, b in ((0.1, 0.1), (0.2, 0.1), (0.25, 0.3))]


@pytest.mark.parametrize("case", ["I", "II"])
@pytest.mark.parametrize("theta,t1,t2", TRIPLES)
def test_sharpness_witness(case, theta, t1, t2):
    m = sharpness_witness(case, theta, t1, t2).measured
    assert m["join_state_limit"] == pytest.approx(m["closed_form"], abs=1e-6)
    assert 1 / m["join_alpha_lower"] == pytest.approx(m["closed_form"], abs=1e-6)
    assert m["angle"] >= theta - 1e-8
    assert m["alpha_p1"] == pytest.approx(1 / np.cos(t1) ** 2, rel=1e-10)
    assert m["alpha_p2"] == pytest.approx(1 / np.cos(t2) ** 2, rel=1e-10)
    assert m["phi_norm"] == pytest.approx(m["closed_form"], abs=1e-8)


def test_sharpness_witness_interleaved():
    m = sharpness_witness("II", 1.0, 0.2, 0.1).measured
    assert 1 / m["interleaved_join_alpha_lower"] == pytest.approx(m["closed_form"], abs=1e-6)
    with pytest.raises(ValueError):
        sharpness_witness("I", 0.3, 0.2, 0.2)


def test_sharpness_witness_branch_a():
    m = sharpness_witness("II", 1.55, 0.3, 0.3).measured
    assert closed_form_II(1.55, 0.3, 0.3)[1] == "a"
    assert m["join_state_limit"] == pytest.approx(m["closed_form"], abs=1e-6)


def test_disjoint_sum_bounds():
    r = disjoint_sum_bounds(2.0, 2.0)
    assert r["lower_inverse"] == 0.0 and r["alpha_upper"] == np.inf and r["exact"] is None
    r = disjoint_sum_bounds(1.25, 2.0, closed_sigma_unital=True)
    assert r["lower_inverse"] == pytest.approx(0.3)
    assert r["alpha_upper"] == pytest.approx(1 / 0.3)
    assert r["exact"] == 2.0
    assert disjoint_sum_bounds(np.inf, 1.0)["lower_inverse"] == 0.0
    with pytest.raises(ValueError):
        disjoint_sum_bounds(0.5, 1.0)


def unit(rng, n=4):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def test_maximin_matches_recipe():
    rng = np.random.default_rng(11)
    for _ in range(50):
        r = maximin_cap_distance(unit(rng))
        assert r["disagreement"] <= 1e-8
        assert r["dist"] == pytest.approx(np.sin(r["d_a"]))


def test_maximin_boundary_facts():
    r = maximin_cap_distance([0, 1, 0])
    assert abs(r["dist"] - np.sqrt(2 / 3)) <= 1e-10
    for c in (2**-0.5, 0.9, 1.0):
        u = np.array([c, np.sqrt(1 - c * c), 0.0])
        assert abs(maximin_cap_distance(u)["dist"] - 2**-0.5) <= 1e-10
    with pytest.raises(ValueError):
        maximin_cap_distance([1.0, 1.0])
