"""Acceptance suite: one PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v -s`` to see the lines
inline; they are also collected in the terminal summary.
"""

import itertools
import json
import math
import subprocess
import sys
from fractions import Fraction
from statistics import NormalDist

import numpy as np
import pytest

from successodds import worked_examples
from successodds.effects import count_pairs, count_pairs_fast, effects_from_distributions, effects_from_samples
from successodds.inference import DegenerateError, brunner_munzel, ci_theta_logit, estimate_theta_ranks
from successodds.values import NumericScale, Sample

SCALE0 = NumericScale(0)


def near(x, target, tol):
    return abs(float(x) - target) <= tol


def random_tied_pairs(count, seed, max_n=50, support=10):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n1, n2 = rng.integers(1, max_n + 1, size=2)
        a = rng.integers(0, support, size=n1).tolist()
        b = rng.integers(0, support, size=n2).tolist()
        out.append((Sample(tuple(a), SCALE0), Sample(tuple(b), SCALE0)))
    return out


@pytest.fixture(scope="module")
def corpus():
    return random_tied_pairs(1000, seed=20240607)


def test_criterion_1_treatments(acceptance):
    rows = dict(worked_examples.treatment_comparisons())
    expected = {"B, A": (0.595, 1.47, None), "C, B": (0.900, 9.00, 81), "C, A": (0.955, 21.22, None)}
    checks = []
    for lbl, (th, so, wr) in expected.items():
        e = rows[lbl]
        checks.append((f"{lbl} theta {float(e.theta):.4f} ~ {th}", near(e.theta, th, 0.005)))
        checks.append((f"{lbl} lambda_so {float(e.lambda_so):.4f} ~ {so}", near(e.lambda_so, so, 0.005)))
        if wr is None:
            checks.append((f"{lbl} lambda_wr is inf", e.lambda_wr.is_inf))
        else:
            checks.append((f"{lbl} lambda_wr ~ {wr}", e.lambda_wr.is_finite and near(e.lambda_wr, wr, 0.005)))
    acceptance(1, "three-treatment comparisons", checks)


def test_criterion_2_coarsening(acceptance):
    rows = worked_examples.coarsening_effects()
    p0 = [Fraction(0), Fraction(4, 25), Fraction(6, 25), Fraction(16, 25)]
    wr = [Fraction(17, 8), Fraction(5, 2), Fraction(14, 5), None]
    checks = []
    for (case, e, _), z, w in zip(rows, p0, wr):
        checks.append((f"case {case} p0 = {z}", e.p_zero == z))
        checks.append((f"case {case} theta = 17/25", e.theta == Fraction(17, 25)))
        checks.append((f"case {case} lambda_so = 17/8", e.lambda_so.is_finite and e.lambda_so.value == Fraction(17, 8)))
        if w is None:
            checks.append((f"case {case} lambda_wr is inf", e.lambda_wr.is_inf))
        else:
            checks.append((f"case {case} lambda_wr = {w}", e.lambda_wr.is_finite and e.lambda_wr.value == w))
    acceptance(2, "coarsened measurements", checks)


def test_criterion_3_merged_categories(acceptance):
    s, m = worked_examples.scores(), worked_examples.merged_scores()
    e1 = effects_from_distributions(s["A"], s["B"])
    e2 = effects_from_distributions(m["A"], m["B"])
    checks = [
        (f"p0 before {float(e1.p_zero):.4f} ~ 0.13", near(e1.p_zero, 0.13, 0.005)),
        (f"p0 after {float(e2.p_zero):.4f} ~ 0.31", near(e2.p_zero, 0.31, 0.005)),
        ("theta unchanged ~ 0.805", near(e1.theta, 0.805, 0.005) and e1.theta == e2.theta),
        ("lambda_so unchanged ~ 4.13", near(e1.lambda_so, 4.13, 0.005) and e1.lambda_so == e2.lambda_so),
        (f"lambda_wr before {float(e1.lambda_wr):.4f} ~ 5.69", near(e1.lambda_wr, 5.69, 0.005)),
        (f"lambda_wr after {float(e2.lambda_wr):.4f} ~ 16.25", near(e2.lambda_wr, 16.25, 0.005)),
    ]
    acceptance(3, "merged score categories", checks)


def test_criterion_4_binary(acceptance):
    printed = {
        ("0.9", "0.5"): (9.0, 2.3),
        ("0.95", "0.5"): (19.0, 2.6),
        ("0.9", "0.6"): (6.0, 1.9),
        ("0.95", "0.6"): (12.7, 2.1),
        ("0.9", "0.7"): (3.9, 1.5),
        ("0.95", "0.7"): (8.1, 1.7),
    }
    checks = []
    for qa, qb, e in worked_examples.binary_table():
        key = (str(float(qa)), str(float(qb)))
        wr, so = printed[key]
        checks.append((f"q=({key[0]}, {key[1]}) lambda_wr {float(e.lambda_wr):.3f} ~ {wr}", near(e.lambda_wr, wr, 0.05)))
        checks.append((f"q=({key[0]}, {key[1]}) lambda_so {float(e.lambda_so):.3f} ~ {so}", near(e.lambda_so, so, 0.05)))
    (_, _, f1), (_, _, f2) = worked_examples.equal_odds_rates()
    checks += [
        (f"(0.821, 0.6) lambda_wr {float(f1.lambda_wr):.4f} ~ 3.06", near(f1.lambda_wr, 3.06, 0.005)),
        (f"(0.821, 0.6) lambda_so {float(f1.lambda_so):.4f} ~ 1.57", near(f1.lambda_so, 1.57, 0.005)),
        (f"(0.99, 0.97) lambda_wr {float(f2.lambda_wr):.4f} ~ 3.06", near(f2.lambda_wr, 3.06, 0.005)),
        (f"(0.99, 0.97) lambda_so {float(f2.lambda_so):.4f} ~ 1.04", near(f2.lambda_so, 1.04, 0.005)),
        (f"(0.99, 0.97) p0 {float(f2.p_zero):.4f} ~ 0.961", near(f2.p_zero, 0.961, 0.005)),
    ]
    acceptance(4, "binary outcomes", checks)


def test_criterion_5_dice(acceptance):
    m, t, mix = worked_examples.dice_analysis()
    wr = {("D1", "D2"): Fraction(19, 14), ("D2", "D3"): Fraction(20, 15), ("D3", "D1"): Fraction(20, 15)}
    checks = []
    for (x, y), w in wr.items():
        checks.append((f"{x}/{y} theta = 20.5/36", m[x, y].theta == Fraction(41, 72)))
        checks.append((f"{x}/{y} lambda_wr = {w}", m[x, y].lambda_wr.is_finite and m[x, y].lambda_wr.value == w))
    checks.append(("single cycle D1 -> D2 -> D3 -> D1", t.cycles == (("D1", "D2", "D3"),)))
    checks.append(("each die against the mixture has theta = 1/2", all(e.theta == Fraction(1, 2) for e in mix)))
    acceptance(5, "non-transitive dice", checks)


def test_criterion_6_strata(acceptance):
    s = worked_examples.dice_strata()
    checks = [
        ("per-stratum theta = 20.5/36", all(x.effects.theta == Fraction(41, 72) for x in s.per_stratum)),
        (f"mean theta {float(s.mean_theta):.4f} ~ 0.569", near(s.mean_theta, 0.569, 0.005)),
        (f"mean lambda_so {float(s.mean_lambda_so):.4f} ~ 1.32", near(s.mean_lambda_so, 1.32, 0.005)),
        (f"mean lambda_wr {float(s.mean_lambda_wr):.4f} ~ 1.34", near(s.mean_lambda_wr, 1.34, 0.005)),
        ("pooled theta = 1/2", s.pooled.theta == Fraction(1, 2)),
        ("pooled lambda_so = 1", s.pooled.lambda_so.is_finite and s.pooled.lambda_so.value == 1),
        ("pooled lambda_wr = 1", s.pooled.lambda_wr.is_finite and s.pooled.lambda_wr.value == 1),
    ]
    acceptance(6, "stratified dice", checks)


def test_criterion_7_oracles(acceptance, corpus):
    fast_ok = rank_ok = 0
    for a, b in corpus:
        brute = count_pairs(a, b)
        if count_pairs_fast(a, b) == brute:
            fast_ok += 1
        if estimate_theta_ranks(a, b) == Fraction(2 * brute.wins + brute.ties, 2 * brute.n_pairs):
            rank_ok += 1
    n = len(corpus)
    acceptance(7, "fast counting and rank estimate against brute force", [
        (f"count_pairs_fast == count_pairs on {fast_ok}/{n} datasets", fast_ok == n),
        (f"estimate_theta_ranks exact on {rank_ok}/{n} datasets", rank_ok == n),
    ])


def permutation_p_value(a, b):
    """Exhaustive relabeling p-value of |T| >= |T_obs| over all C(N, n1) splits."""
    pooled = list(a) + list(b)
    n1 = len(a)

    def abs_t(x, y):
        r = brunner_munzel(Sample(tuple(x), SCALE0), Sample(tuple(y), SCALE0))
        return math.inf if r.degenerate else abs(r.statistic)

    t_obs = abs_t(a, b)
    hits = total = 0
    for idx in itertools.combinations(range(len(pooled)), n1):
        chosen = set(idx)
        x = [pooled[i] for i in idx]
        y = [pooled[i] for i in range(len(pooled)) if i not in chosen]
        total += 1
        hits += abs_t(x, y) >= t_obs - 1e-12
    return Fraction(hits, total), total


def coverage(sims=1000, n=30, theta=0.66, level=0.95, seed=7):
    delta = math.sqrt(2) * NormalDist().inv_cdf(theta)
    scale = NumericScale(6)
    covered = 0
    for i in range(sims):
        rng = np.random.default_rng([seed, i])
        x = np.rint(rng.normal(delta, 1.0, n) * 1e6).astype(np.int64)
        y = np.rint(rng.normal(0.0, 1.0, n) * 1e6).astype(np.int64)
        ci = ci_theta_logit(Sample(tuple(x.tolist()), scale), Sample(tuple(y.tolist()), scale), level)
        covered += theta in ci
    return covered / sims


def test_criterion_8_inference(acceptance, corpus):
    same = Sample.of([1, 2, 2, 3, 5])
    r0 = brunner_munzel(same, same)

    swap_ok = 0
    swap_set = random_tied_pairs(200, seed=99, max_n=30)
    for a, b in swap_set:
        if len(a) < 2 or len(b) < 2:
            a, b = Sample(a.keys * 2, SCALE0), Sample(b.keys * 2, SCALE0)
        f, g = brunner_munzel(a, b), brunner_munzel(b, a)
        if f.degenerate:
            swap_ok += g.degenerate and f.theta_hat + g.theta_hat == 1
        else:
            swap_ok += (
                math.isclose(f.statistic, -g.statistic, rel_tol=1e-12, abs_tol=1e-12)
                and math.isclose(f.p_value, g.p_value, rel_tol=1e-12, abs_tol=1e-15)
                and f.df == g.df
            )

    a, b = [1, 2, 3, 4], [2, 3, 4, 5]
    p_bm = brunner_munzel(Sample(tuple(a), SCALE0), Sample(tuple(b), SCALE0)).p_value
    p_perm, nperm = permutation_p_value(a, b)

    cov = coverage()

    bounds_ok, n_ci = True, 0
    for x, y in corpus:
        if len(x) < 2 or len(y) < 2:
            continue
        try:
            ci = ci_theta_logit(x, y)
        except DegenerateError:
            continue
        n_ci += 1
        bounds_ok &= 0.0 < ci.lower <= ci.upper < 1.0

    acceptance(8, "inference properties", [
        (f"identical samples: T = {r0.statistic}, p = {r0.p_value}", r0.statistic == 0.0 and r0.p_value == 1.0),
        (f"swap antisymmetry on {swap_ok}/{len(swap_set)} datasets", swap_ok == len(swap_set)),
        (f"p = {p_bm:.5f} vs {nperm}-relabeling permutation p = {float(p_perm):.5f} (tol 0.02)",
         nperm == 70 and abs(p_bm - float(p_perm)) <= 0.02),
        (f"95% theta coverage {cov:.3f} in [0.90, 0.99]", 0.90 <= cov <= 0.99),
        (f"theta bounds inside (0, 1) for {n_ci} corpus intervals", bounds_ok and n_ci > 0),
    ])


def test_criterion_9_inequality(acceptance, corpus):
    applicable = violations = 0
    for a, b in corpus:
        e = effects_from_samples(a, b)
        if e.p_plus < e.p_minus or not e.lambda_wr.is_finite:
            continue
        applicable += 1
        wr, so = e.lambda_wr.value, e.lambda_so.value
        equal_expected = e.p_zero == 0 or e.p_plus == e.p_minus
        if wr < so or (wr == so) != equal_expected:
            violations += 1
    acceptance(9, "win ratio dominates success odds", [
        (f"{applicable} applicable datasets, {violations} violations", violations == 0 and applicable > 0),
    ])


def _cli(*args):
    r = subprocess.run([sys.executable, "-m", "successodds", *args], capture_output=True, check=False)
    return r.returncode, r.stdout


def test_criterion_10_determinism(acceptance, tmp_path):
    rows = ["group,value"]
    rng = np.random.default_rng(5)
    for g, shift in (("A", 0), ("B", 2), ("C", 1)):
        rows += [f"{g},{v}" for v in rng.integers(0, 10, 25) + shift]
    path = tmp_path / "groups.csv"
    path.write_text("\n".join(rows) + "\n")
    test_args = ["test", "--input", str(path), "--groups", "A", "B", "--seed", "42", "--reps", "2000", "--format", "json"]
    pw_args = ["pairwise", "--input", str(path), "--format", "json"]
    t1, t2 = _cli(*test_args), _cli(*test_args)
    p1, p2 = _cli(*pw_args), _cli(*pw_args)
    parsed = json.loads(t1[1])
    acceptance(10, "deterministic JSON output", [
        ("test runs exit 0", t1[0] == 0 and t2[0] == 0),
        ("test JSON byte-identical", t1[1] == t2[1] and len(t1[1]) > 0),
        ("bootstrap seed recorded", parsed["intervals"]["lambda_wr"]["seed"] == 42),
        ("pairwise runs exit 0", p1[0] == 0 and p2[0] == 0),
        ("pairwise JSON byte-identical", p1[1] == p2[1] and len(p1[1]) > 0),
    ])
