"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS criterion N`` or ``FAIL criterion N`` line;
the lines are repeated in the terminal summary.  Run on its own with
``pytest tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``.
"""

import json
import sys
import time

import numpy as np
import pytest

from cstarmod import AlgebraElement, AlgebraShape, alg_norm, vector_norm
from cstarmod.orthogonality import (
    bj_orthogonal_minimize,
    bj_orthogonal_witness,
    reversed_action_condition,
    strong_bj_orthogonal,
)
from cstarmod.suites import SUITES, example_2_1_data, run_suite

RESULTS: list[str] = []


def report(n: int, ok: bool, elapsed: float, limit: float | None, note: str) -> bool:
    within = limit is None or elapsed < limit
    ok = ok and within
    budget = f" (limit {limit:.0f}s)" if limit is not None else ""
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {note}; {elapsed:.1f}s{budget}"
    RESULTS.append(line)
    print(line)
    return ok


def criterion_1() -> bool:
    start = time.perf_counter()
    x, y = example_2_1_data()
    sbj = strong_bj_orthogonal(x, y)
    rev = reversed_action_condition(x, y)
    A = rev.witness["a"]
    Y = y.entries[0]
    a_plus_y = alg_norm(A + Y)
    xa_plus_y = vector_norm(x @ A + y)
    xa = vector_norm(x @ A)
    ok = (sbj.holds and abs(sbj.value - 1.0) <= 1e-6 and not rev.holds
          and a_plus_y <= 1e-6 and xa_plus_y <= 1e-6 and abs(xa - 1.0) <= 1e-6)
    note = (f"strong BJ min {sbj.value:.9f}, ||A+Y|| {a_plus_y:.1e}, "
            f"||XA+Y|| {xa_plus_y:.1e}, ||XA|| {xa:.9f}")
    return report(1, ok, time.perf_counter() - start, 5, note)


def criterion_2() -> bool:
    start = time.perf_counter()
    failures, runs = 0, []
    for dims in [(1,), (2,), (1, 1), (3,)]:
        for k in (1, 2):
            rep = run_suite("theorem-2-4", dims, k, trials=200, seed=0)
            failures += len(rep.failures)
            runs.append(f"{dims}k{k}:{len(rep.failures)}")
    note = f"{failures} disagreements over 8x200 trials [{' '.join(runs)}]"
    return report(2, failures == 0, time.perf_counter() - start, 300, note)


def criterion_3() -> bool:
    start = time.perf_counter()
    ok, parts = True, []
    for dims in [(1,), (2,), (2, 3)]:
        rep = run_suite("lemma-2-2", dims, 1, trials=500, seed=0)
        d = rep.details
        ok &= rep.passed and d["max_state_error_xx"] <= 1e-6 and d["max_state_error_xy"] <= 1e-6
        parts.append(f"{dims}: {len(rep.failures)} fail, {d['holds']} holds, "
                     f"state err {max(d['max_state_error_xx'], d['max_state_error_xy']):.1e}")
    return report(3, ok, time.perf_counter() - start, 180, "; ".join(parts))


def criterion_4() -> bool:
    start = time.perf_counter()
    ok, parts = True, []
    for dims, n in [((2,), 1), ((1, 1), 2), ((1, 1, 1, 1), 2), ((1, 1), 3), ((1, 1, 1, 1), 3)]:
        rep = run_suite("factorization", dims, 2, trials=100, seed=0, n=n)
        d = rep.details
        ok &= (rep.passed and d["c_error"] <= 1e-7 and d["h_variation"] <= 1e-7
               and d["bound_ratio"] <= 1 + 1e-6)
        parts.append(f"n={n} {dims}: c err {d['c_error']:.1e}, h var {d['h_variation']:.1e}")
    return report(4, ok, time.perf_counter() - start, 120, "; ".join(parts))


def criterion_5() -> bool:
    start = time.perf_counter()
    ok, parts = True, []
    for dims in [(1, 1, 1), (2,)]:
        rep = run_suite("kernel", dims, 2, trials=200, seed=0)
        r = rep.details["max_relative_residual"]
        ok &= rep.passed and r <= 1e-10
        parts.append(f"{dims}: max relative residual {r:.1e}")
    return report(5, ok, time.perf_counter() - start, None, "; ".join(parts))


def criterion_6() -> bool:
    start = time.perf_counter()
    scalar = run_suite("theorem-4-2", (1,), 1, trials=500, seed=0)
    ok = scalar.passed and scalar.details["counterexamples"] == 0
    parts = [f"(1): {scalar.details['counterexamples']} counterexamples in "
             f"{scalar.details['tested']}"]
    for dims in [(2,), (1, 1)]:
        rep = run_suite("theorem-4-2", dims, 1, trials=2000, seed=0)
        verified = False
        if rep.witnesses:
            w = rep.witnesses[0]
            x, y = w["x"], w["y"]
            verified = (bj_orthogonal_minimize(x, y).holds and bj_orthogonal_witness(x, y).holds
                        and vector_norm(x + y) <= vector_norm(y) - 0.1)
        ok &= rep.passed and verified
        parts.append(f"{dims}: verified counterexample={verified} after {rep.details['tested']}")
    return report(6, ok, time.perf_counter() - start, 120, "; ".join(parts))


def criterion_7() -> bool:
    start = time.perf_counter()
    rep = run_suite("polarization", (2,), 2, trials=50, seed=0)
    worst = max(v["max_similarity_residual"] for key, v in rep.details.items()
                if key.startswith("gamma="))
    note = f"max relative residual {worst:.1e} over gamma in (0.5, 1, 2)"
    return report(7, rep.passed and worst <= 1e-8, time.perf_counter() - start, None, note)


def criterion_8() -> bool:
    start = time.perf_counter()
    rep = run_suite("invertibility", (1, 1), 2, trials=100, seed=0)
    inv, sing = rep.details["invertible"], rep.details["singular"]
    ok = (rep.passed and inv["F_invertible_count"] == 100 and inv["samples_checked"] == 100
          and len(rep.witnesses) == 1)
    note = (f"invertible c: {inv['F_invertible_count']}/{inv['samples_checked']}; "
            f"singular c: witness reported={bool(rep.witnesses)} "
            f"({sing['F_invertible_count']}/{sing['samples_checked']} invertible)")
    return report(8, ok, time.perf_counter() - start, None, note)


SMALL_RUNS = {
    "example-2-1": {},
    "theorem-2-4": {"shape": (2,), "k": 2, "trials": 20},
    "section-2-list": {"trials": 4},
    "lemma-2-2": {"trials": 50},
    "theorem-4-2": {"shape": (1, 1), "k": 1, "trials": 500},
    "factorization": {"shape": (1, 1), "k": 2, "trials": 10, "n": 3},
    "kernel": {"trials": 50},
    "invertibility": {"trials": 20},
    "preservation-maps": {"trials": 10},
    "polarization": {"trials": 5},
}


def criterion_9() -> bool:
    start = time.perf_counter()
    mismatched = []
    for suite_id in SUITES:
        kw = SMALL_RUNS[suite_id]
        a, b = (json.dumps(run_suite(suite_id, seed=7, **kw).to_dict(timing=False),
                           sort_keys=True) for _ in range(2))
        if a != b:
            mismatched.append(suite_id)
    note = f"{len(SUITES) - len(mismatched)}/{len(SUITES)} suites reproduce byte-for-byte"
    return report(9, not mismatched, time.perf_counter() - start, None, note)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_criterion(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
