"""Acceptance criteria, one test each.

Every test appends a ``[PASS]``/``[FAIL]`` line that is printed in the
terminal summary (see conftest), then asserts.
"""

import numpy as np

from conftest import ACCEPTANCE_LINES, acceptance_cones

from conekit import (
    Cone,
    InducedMetric,
    RationalDecay,
    ScalarComparison,
    Scalarizer,
    Scale,
    SelfMap,
    VectorialComparison,
    WeightedLine,
    check_lemma1,
    check_lemma2,
    check_oracle,
    check_transfer,
    picard_solve,
    random_condition_C_instance,
    random_contraction_instance,
    remark23_implication,
    theorem21_implication,
    transfer_psi,
    validate_cone,
    verify_induced_metric,
    verify_uniqueness,
    verify_vector_contraction,
)
from conekit.instances import random_valid_space

SAMPLES = 10_000
LOG_GRID = np.logspace(-3, 3, 50)


def record(n, title, ok, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] AC{n:<2} {title}" + (f": {detail}" if detail else ""))
    return ok


def failures(reports):
    return [f"{r.name}:{i.item} ({i.failures})" for r in reports for i in r.items if not i.passed]


def test_ac01_oracle_equivalence():
    reps = [check_oracle(Scalarizer(c), SAMPLES, seed=1) for c in acceptance_cones().values()]
    bad = failures(reps)
    n = sum(r["xi_vs_oracle"].trials for r in reps)
    assert record(1, "closed-form xi matches bisection oracle", not bad, f"{n} vectors, failures {bad or 0}")


def test_ac02_lemma1_suite():
    reps = [check_lemma1(Scalarizer(c), SAMPLES, seed=2) for c in acceptance_cones().values()]
    bad = failures(reps)
    skipped = sum(r.extra.get("ambiguous_skipped", 0) for r in reps)
    assert record(2, "scalarization order/algebra properties", not bad, f"failures {bad or 0}, tie-band skips {skipped}")


def test_ac03_lemma2_suite():
    reps = [check_lemma2(Scalarizer(c), SAMPLES, seed=3) for c in acceptance_cones().values()]
    bad = failures(reps)
    assert record(3, "embedding and strict-order properties", not bad, f"failures {bad or 0}")


def test_ac04_induced_metric_on_random_tables():
    rng = np.random.default_rng(4)
    cones = list(acceptance_cones().values())
    bad, sizes = [], []
    for k in range(50):
        space = random_valid_space(cones[k % 4], int(rng.integers(2, 21)), rng)
        sizes.append(len(space))
        rep = verify_induced_metric(InducedMetric(space))
        if not (rep.passed and rep.extra["exhaustive"]):
            bad.append((k, rep.failed_items()))
    assert record(4, "induced scalar distance is a metric", not bad, f"50 tables, sizes {min(sizes)}..{max(sizes)}, bad {bad or 0}")


def _transfer_ok(vc, s, lam=None):
    psi = transfer_psi(vc, s)
    v = np.asarray(psi(LOG_GRID))
    ok = bool(np.all(v >= 0) and np.all(v <= LOG_GRID) and np.all(v < LOG_GRID) and np.all(np.diff(v) > 0))
    if lam is not None:
        ok &= bool(np.all(np.abs(v - lam * LOG_GRID) <= 1e-9 * (1 + LOG_GRID)))
    return ok and check_transfer(vc, s, LOG_GRID).passed


def test_ac05_transfer():
    cone = Cone.orthant(2)
    s = Scalarizer(cone)
    results = {f"linear({lam})": _transfer_ok(VectorialComparison.linear(cone, lam), s, lam) for lam in (0.1, 0.5, 0.9)}
    cw = VectorialComparison.componentwise(cone, [Scale(0.5), RationalDecay()])
    results["componentwise(t/2, t/(1+t))"] = _transfer_ok(cw, s)
    bad = [k for k, v in results.items() if not v]
    assert record(5, "transferred psi is a comparison function", not bad, f"{len(results)} cases, bad {bad or 0}")


def test_ac06_vector_implies_scalar_contraction():
    rng = np.random.default_rng(6)
    cones = list(acceptance_cones().values())
    discordant, vec_pass = 0, 0
    for k in range(50):
        cone = cones[k % 4]
        _, f, vc = random_contraction_instance(cone, rng)
        rep = theorem21_implication(f, vc, Scalarizer(cone))
        discordant += rep.extra["crosstab"]["vector_pass/scalar_fail"]
        vec_pass += rep.extra["crosstab"]["vector_pass/scalar_pass"]
    O2 = Cone.orthant(2)
    line = WeightedLine(O2, [1, 2])
    rep = theorem21_implication(SelfMap.affine(line, 0.5, 1.0), VectorialComparison.linear(O2, 0.5), Scalarizer(O2), SAMPLES)
    discordant += rep.extra["crosstab"]["vector_pass/scalar_fail"]
    line_ok = rep.extra["crosstab"]["vector_pass/scalar_pass"] == SAMPLES
    ok = discordant == 0 and line_ok and vec_pass > 0
    assert record(6, "vector contraction implies scalar contraction", ok, f"{vec_pass} finite pairs + line, discordant {discordant}")


def test_ac07_picard_and_uniqueness():
    O2 = Cone.orthant(2)
    line = WeightedLine(O2, [1, 2])
    f = SelfMap.affine(line, 0.5, 1.0)
    m = InducedMetric(line)
    runs = [picard_solve(f, m, x0, tol=1e-10) for x0 in (-100, 0, 100)]
    ok = all(r.converged and abs(r.fixed_point - 2) <= 1e-8 and r.iterations <= 60 for r in runs)
    ok &= verify_uniqueness(f, m, [-100, 0, 100], tol=1e-10).passed
    detail = ", ".join(f"{r.orbit[0]:g}->{r.fixed_point:.12g} in {r.iterations}" for r in runs)
    assert record(7, "Picard iteration finds the unique fixed point", ok, detail)


def test_ac08_slow_decay():
    psi = ScalarComparison.rational_decay()
    v, first, exact = 1.0, None, True
    for n in range(1, 1001):
        v = psi(v)
        # closed form 1/(1+n); relative drift stays at rounding level
        exact &= abs(v - 1 / (1 + n)) <= 1e-12 / (1 + n)
        if first is None and v <= 1e-3:
            first = n
    ok = first is not None and first <= 1000 and exact
    assert record(8, "t/(1+t) orbit decays like 1/(1+n)", ok, f"first n with value <= 1e-3: {first}")


def test_ac09_condition_transfer():
    rng = np.random.default_rng(9)
    cones = list(acceptance_cones().values())
    bad, pairs = [], 0
    for k in range(50):
        cone = cones[k % 4]
        _, f, g, vc = random_condition_C_instance(cone, rng)
        rep = remark23_implication(f, g, vc, Scalarizer(cone))
        pairs += rep["C_implies_C1"].trials
        if not (rep.passed and rep.extra["C_holds"]):
            bad.append(k)
    assert record(9, "condition (C) transfers case-wise to (C1)", not bad and pairs > 0, f"{pairs} pairs, counterexamples {bad or 0}")


def test_ac10_negative_controls():
    O2 = Cone.orthant(2)
    line = WeightedLine(O2, [1, 2])
    results = {}

    rep = verify_vector_contraction(SelfMap.identity(line), VectorialComparison.linear(O2, 0.9), 1000)
    w = rep["contraction"].witness
    results["identity map"] = not rep.passed and w is not None and w["x"] != w["y"]

    rep = verify_vector_contraction(SelfMap.affine(line, 0.5, 1.0), VectorialComparison.linear(O2, 0.4), 1000)
    results["lambda=0.4 vs 0.5-Lipschitz"] = not rep.passed and rep["contraction"].witness is not None

    results["boundary point"] = O2.in_interior([1, 0]) is False and Cone.lorentz(3).in_interior([3, 4, 5]) is False

    A = [[1, 0], [-1, 0]]
    rep = validate_cone(Cone.halfspace(A, strict=False), 1000, seed=10)
    y = np.asarray(rep["pointedness"].witness["y"]) if rep["pointedness"].witness else None
    results["line cone pointedness"] = (
        not rep["pointedness"].passed and y is not None and y[1] != 0 and np.all(np.asarray(A) @ y >= 0) and np.all(np.asarray(A) @ -y >= 0)
    )
    bad = [k for k, v in results.items() if not v]
    assert record(10, "negative controls are rejected with witnesses", not bad, f"{len(results)} controls, missed {bad or 0}")

