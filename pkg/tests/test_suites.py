import json

import numpy as np
import pytest

from cstarmod import vector_norm
from cstarmod.fixtures import vector_from_json
from cstarmod.forms import MultiForm, preservation_check
from cstarmod.orthogonality import (
    OrthogonalityVerdict,
    Relation,
    bj_orthogonal_minimize,
    bj_orthogonal_witness,
)
from cstarmod.suites import COVERAGE, SUITES, run_suite


def roundtrip(rep):
    return json.loads(json.dumps(rep.to_dict(timing=False)))


def test_example_suite():
    rep = run_suite("example-2-1")
    assert rep.passed
    assert rep.details["strong_bj"]["min_value"] == pytest.approx(1.0, abs=1e-6)
    assert rep.witnesses[0]["A"] is not None


@pytest.mark.parametrize("dims,k", [((1,), 2), ((2,), 2), ((1, 1), 1)])
def test_theorem_2_4_small(dims, k):
    rep = run_suite("theorem-2-4", dims, k, trials=10, seed=3)
    assert rep.passed, rep.failures
    assert rep.details["orthogonal"] >= 5


def test_theorem_2_4_planted_violation_detected():
    always = lambda x, y, cfg: OrthogonalityVerdict(Relation.MODULUS, True, 1.0)
    rep = run_suite("theorem-2-4", (2,), 1, trials=6, seed=0, conditions={"ii": always})
    assert not rep.passed
    # only the non-orthogonal (odd) trials can disagree
    assert {f["trial"] % 2 for f in rep.failures} == {1}


def test_section_2_list_small():
    rep = run_suite("section-2-list", (2,), 1, trials=4, seed=1)
    assert rep.passed, rep.failures
    assert rep.witnesses


def test_lemma_2_2_small():
    assert run_suite("lemma-2-2", (2, 3), 1, trials=30, seed=2).passed


def test_theorem_4_2_dichotomy():
    scalar = run_suite("theorem-4-2", (1,), 1, trials=100, seed=0)
    assert scalar.passed and scalar.details["counterexamples"] == 0
    assert scalar.details["algebra_isomorphic_to_C"]
    for dims in [(2,), (1, 1)]:
        rep = run_suite("theorem-4-2", dims, 1, trials=2000, seed=0)
        assert rep.passed and rep.witnesses
        assert not rep.details["algebra_isomorphic_to_C"]


def test_counterexample_replays_from_json():
    rep = run_suite("theorem-4-2", (1, 1), 1, trials=2000, seed=1)
    w = roundtrip(rep)["witnesses"][0]
    x, y = vector_from_json(w["x"]), vector_from_json(w["y"])
    assert bj_orthogonal_minimize(x, y).holds
    assert bj_orthogonal_witness(x, y).holds
    assert vector_norm(x + y) <= vector_norm(y) - 0.1


def test_preservation_failure_replays_from_json():
    rng = np.random.default_rng(0)
    E = MultiForm.random((1, 1), 2, 2, rng)
    F = MultiForm.random((1, 1), 2, 2, rng)
    rep = preservation_check(E, F, trials=4, seed=0)
    f = roundtrip(rep)["failures"][0]
    args = [vector_from_json(a) for a in f["args"]]
    norms = np.prod([vector_norm(a) for a in args])
    assert E(*args).norm() <= 1e-8 * E.upper_bound() * norms
    assert F(*args).norm() / (F.upper_bound() * norms) == pytest.approx(f["f_value"])


@pytest.mark.parametrize("dims,n", [((2,), 1), ((1, 1, 1), 2), ((1, 1), 3)])
def test_factorization_suite(dims, n):
    rep = run_suite("factorization", dims, 2, trials=3, seed=4, n=n)
    assert rep.passed, rep.failures


def test_kernel_invertibility_polarization_maps():
    assert run_suite("kernel", (1, 1, 1), 2, trials=20, seed=5).passed
    assert run_suite("kernel", (2,), 2, trials=20, seed=5).passed
    inv = run_suite("invertibility", (1, 1), 2, trials=20, seed=6)
    assert inv.passed and inv.witnesses
    assert run_suite("polarization", (2,), 2, trials=3, seed=7).passed
    assert run_suite("preservation-maps", (1, 1), 2, trials=5, seed=8).passed
    with pytest.raises(ValueError):
        run_suite("preservation-maps", (2,), 2, trials=5)


@pytest.mark.parametrize("suite_id", sorted(SUITES))
def test_deterministic(suite_id):
    small = {"example-2-1": {}, "theorem-2-4": {"trials": 4}, "section-2-list": {"trials": 2},
             "lemma-2-2": {"trials": 10}, "theorem-4-2": {"trials": 200},
             "factorization": {"trials": 2}, "kernel": {"trials": 10},
             "invertibility": {"trials": 10}, "preservation-maps": {"trials": 4},
             "polarization": {"trials": 2}}[suite_id]
    a = json.dumps(run_suite(suite_id, seed=11, **small).to_dict(timing=False), sort_keys=True)
    b = json.dumps(run_suite(suite_id, seed=11, **small).to_dict(timing=False), sort_keys=True)
    assert a == b
    assert "elapsed" not in json.loads(a)


def test_coverage_map_is_total():
    assert set(COVERAGE.values()) == set(SUITES)


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")
