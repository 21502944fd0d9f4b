"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

The lines are printed outside pytest's capture so they show up in a plain
``pytest`` run as well as under ``-v``.
"""

import time
import warnings

import numpy as np
import pytest

from projkit import bounds, catalog, nearest
from projkit.cli import main
from projkit.pairgeom import d_a, pair_norm_distance
from projkit.seqmodel import formula_4_11

from conftest import random_projection, random_unitary


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, detail

    return emit


def test_1_distance_formula(report):
    lines, ok = [], True
    for theta in (np.pi / 6, np.pi / 4, np.pi / 3):
        t0 = time.perf_counter()
        entry = catalog.build_example("3.5", {"theta": theta})
        alpha = 1 / np.cos(theta) ** 2
        target = nearest.dist_from_alpha(alpha)
        sweep = nearest.epsilon_sweep(entry.projections["p"], entry.witnesses["a"])
        inf_dist = min(c.distance for c in sweep)
        lower_ok = all(target <= c.distance + 1e-6 for c in sweep)
        within_bound = all(c.distance <= c.bound + 1e-8 for c in sweep)
        elapsed = time.perf_counter() - t0
        good = abs(inf_dist - target) <= 0.02 and lower_ok and within_bound and elapsed < 10
        ok &= good
        lines.append(f"theta={theta:.4f} inf={inf_dist:.6f} target={target:.6f} {elapsed:.1f}s")
    report(1, "distance formula", ok, "; ".join(lines))


@pytest.mark.parametrize("case", ["I", "II"])
def test_2_oracle_agreement(report, case):
    t0 = time.perf_counter()
    rows = [bounds.compare(case, *triple) for triple in bounds.default_grid()]
    elapsed = time.perf_counter() - t0
    worst = max(rows, key=lambda r: r.gap)
    ok = worst.gap <= 1e-4 and elapsed < 60 and len(rows) == 27
    detail = f"case {case} max gap {worst.gap:.2e} over {len(rows)} triples in {elapsed:.1f}s"
    if worst.gap > 1e-4:
        detail += f"; transcription diagnostic at (theta, theta1, theta2) = {(worst.theta, worst.theta1, worst.theta2)}"
    report(2, "oracle agreement", ok, detail)


def test_3_right_angle_and_continuity(report):
    grid = np.linspace(0.0, 1.5, 16)
    err_I = err_II = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", bounds.DegenerateBoundWarning)
        for t1 in grid:
            for t2 in grid:
                c1, c2 = np.cos(t1) ** 2, np.cos(t2) ** 2
                if t1 + t2 < np.pi / 2:
                    err_I = max(err_I, abs(bounds.closed_form_I(np.pi / 2, t1, t2) - (c1 + c2 - 1)))
                val, branch = bounds.closed_form_II(np.pi / 2, t1, t2)
                err_II = max(err_II, abs(val - min(c1, c2)) if branch == "a" else np.inf)
    jump = 0.0
    for t1 in grid[1:]:
        for t2 in grid[1:]:
            theta = float(np.arccos(bounds.branch_threshold(t1, t2)))
            a, _ = bounds.closed_form_II(theta + 1e-12, t1, t2)
            b, _ = bounds.closed_form_II(theta - 1e-12, t1, t2)
            jump = max(jump, abs(a - b))
    ok = err_I <= 1e-12 and err_II <= 1e-12 and jump <= 1e-8
    report(3, "right-angle values and branch continuity", ok, f"case I err {err_I:.1e}, case II err {err_II:.1e}, branch jump {jump:.1e}")


SHARP_TRIPLES = [(t, a, b) for t in (0.7, 1.0, 1.3) for a, b in ((0.1, 0.1), (0.2, 0.1), (0.25, 0.3))]


@pytest.mark.parametrize("case", ["I", "II"])
def test_4_sharpness_witnesses(report, case):
    worst_val, worst_angle = 0.0, np.inf
    for theta, t1, t2 in SHARP_TRIPLES:
        m = bounds.sharpness_witness(case, theta, t1, t2).measured
        worst_val = max(worst_val, abs(m["join_state_limit"] - m["closed_form"]))
        worst_angle = min(worst_angle, m["angle"] - theta)
    ok = worst_val <= 1e-6 and worst_angle >= -1e-8
    report(4, "sharpness witnesses", ok, f"case {case}: {len(SHARP_TRIPLES)} triples, max value gap {worst_val:.1e}, min angle excess {worst_angle:.1e}")


# (entry, claim name, expected value) for the alpha values named in the criterion
NAMED_CLAIMS = [
    ("3.5", "alpha_p", 2.0),
    ("3.5", "alpha_q", 2.0),
    ("3.7", "alpha_p", 1.0),
    ("3.8", "alpha_p", 1.0),
    ("3.8", "alpha_closure", 3.0),
    ("3.9", "alpha_p", 1.5),
    ("3.9", "alpha_closure", 4.0),
    ("5.2", "alpha_q", 2.0),
    ("6.3b", "alpha_p1", 4.0),
    ("6.3b", "alpha_p2", 4.0 / 3.0),
    ("6.3b", "alpha_join", np.inf),
    ("7.2a", "alpha_p", 2.0),
    ("7.2b", "alpha_p", 2.0),
    ("8.5", "alpha_p", 2.0),
]


def test_5_catalog_regression(report):
    t0 = time.perf_counter()
    entries = {eid: catalog.build_example(eid) for eid in catalog.CATALOG}
    elapsed = time.perf_counter() - t0
    failed = [eid for eid, e in entries.items() if not e.passed]
    bad_named = []
    for eid, name, value in NAMED_CLAIMS:
        m = entries[eid].measured[name]
        if np.isinf(value):
            good = np.isinf(m["lower"])
        else:
            good = m["lower"] - 1e-6 <= value <= m["upper"] + 1e-6 and m["upper"] - m["lower"] <= 0.1
        if not good:
            bad_named.append(f"{eid}.{name}")
    norm = entries["5.2"].measured["norm_p_minus_q"]
    if abs(norm - 2**-0.5) > 1e-8:
        bad_named.append("5.2.norm_p_minus_q")
    ok = not failed and not bad_named and elapsed < 300
    report(5, "catalog regression", ok, f"{len(entries)} entries in {elapsed:.1f}s, failed {failed or 'none'}, named claims off {bad_named or 'none'}")


def test_6_property_suites(report):
    rng = np.random.default_rng(6)
    counts = {}
    # compression inequality: random contraction a, projection p with pap bounded below
    fails = n = 0
    while n < 1000:
        dim = int(rng.integers(1, 9))
        U = random_unitary(rng, dim)
        a = (U * rng.uniform(0, 1, dim)) @ U.conj().T
        res = nearest.lemma_2_5_check(random_projection(rng, dim), a)
        if res is None:
            continue
        n += 1
        fails += not res
    counts["compression inequality"] = fails
    r37 = [catalog.lemma_3_7_check(1 + rng.exponential(2.0) + 1e-3, rng.uniform(1e-3, 1 - 1e-3)) for _ in range(500)]
    counts["rank-one majorant"] = sum(not r["pass"] for r in r37)
    spec = catalog.spectral_inequality_suite(trials=500, seed=6)
    counts["spectral witnesses"] = spec["witness_failures"] + spec["majorization_failures"] + (not spec["pass"])
    fails = 0
    for _ in range(1000):
        dim = int(rng.integers(2, 7))
        p, q = random_projection(rng, dim), random_projection(rng, dim)
        fails += abs(pair_norm_distance(p, q) - np.linalg.norm(p - q, 2)) > 1e-8
    counts["pair norm"] = fails
    fails = 0
    for _ in range(1000):
        dim = int(rng.integers(2, 6))
        k = int(rng.integers(1, dim))
        p, q, r = (random_projection(rng, dim, k) for _ in range(3))
        fails += d_a(p, r) > d_a(p, q) + d_a(q, r) + 1e-9
    counts["d_a triangle"] = fails
    ok = all(v == 0 for v in counts.values())
    report(6, "property suites", ok, ", ".join(f"{k} failures {v}" for k, v in counts.items()))


def test_7_regularity_numerics(report):
    b = catalog.build_example("4.10b")
    sqrt_s = np.sqrt(b.measured["alpha_p"]["lower"])
    kb = b.measured["quasi_regular_constant"]
    ok_b = sqrt_s - 0.02 <= kb <= sqrt_s + 1e-6
    d = catalog.build_example("4.10d")
    kd = d.measured["quasi_regular_constant"]
    ok_d = np.sqrt(2) - 0.02 <= kd <= np.sqrt(2) + 1e-6 and d.measured["zero_regular_witness_fails"]
    a = catalog.build_example("4.13a")
    s = 2.0
    ka = a.measured["quasi_regular_constant"]
    ok_a = abs(ka - np.sqrt(s / (s - 1))) <= 0.02
    c = catalog.build_example("4.13c", {"s": 1.5, "t": 4.0})
    t_formula = formula_4_11(1.5, np.sqrt(c.measured["K_squared"]))
    ok_c = abs(t_formula - 4.0) <= 1e-12
    ok = ok_b and ok_d and ok_a and ok_c
    report(
        7,
        "regularity numerics",
        ok,
        f"4.10b K={kb:.6f} (sqrt s={sqrt_s:.6f}), 4.10d K={kd:.6f} with 0-regular counterexample, 4.13a K={ka:.6f}, 4.13c t={float(t_formula)!r}",
    )


def test_8_maximin(report):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(50):
        u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        worst = max(worst, bounds.maximin_cap_distance(u / np.linalg.norm(u))["disagreement"])
    orth = abs(bounds.maximin_cap_distance([0.0, 1.0, 0.0])["dist"] - np.sqrt(2 / 3))
    near = 0.0
    for c in np.linspace(2**-0.5, 1.0, 11):
        u = np.array([c, np.sqrt(max(0.0, 1 - c * c)), 0.0])
        near = max(near, abs(bounds.maximin_cap_distance(u)["dist"] - 2**-0.5))
    ok = worst <= 1e-8 and orth <= 1e-10 and near <= 1e-10
    report(8, "maximin", ok, f"50 samples max disagreement {worst:.1e}; orthogonal boundary err {orth:.1e}; aligned boundary err {near:.1e}")


def test_9_determinism(report, tmp_path, capsys):
    times = []
    for name in ("a.json", "b.json"):
        t0 = time.perf_counter()
        code = main(["suite", "all", "--seed", "5", "--json", str(tmp_path / name)])
        times.append(time.perf_counter() - t0)
        assert code == 0
    capsys.readouterr()
    same = (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    ok = same and max(times) < 300
    report(9, "determinism", ok, f"byte-identical={same}, runs {times[0]:.1f}s and {times[1]:.1f}s")
