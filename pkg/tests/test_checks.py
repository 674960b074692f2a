"""The inequality checks: wiring against independently recomputed quantities,
trivial-case handling, and the sandwich/roadmap structure."""

import math

import numpy as np
import pytest

from idsup.checks import (
    CHECKS,
    LABEL_LEVELS,
    PURPOSE,
    CheckResult,
    check_bernoulli_b2,
    check_concentration,
    check_example_ex,
    check_exp_moment,
    check_gine_zinn,
    check_joty_global,
    check_joty_local,
    check_pois1,
    check_sandwich,
    check_symmetrization,
    concentration_triples,
    mixing_cases,
    probe_measure,
    roadmap_values,
    run_sandwich,
    run_scenario_checks,
)
from idsup.mc import replication_ensemble
from idsup.measures import diameter_label, raw_label_matrix, uniform_measure
from idsup.metrics import INF, PhiFamily, compute_d2
from idsup.scenario import FunctionFamily, MeasureSpace, ScenarioConfig, random_scenario


def test_results_respect_the_convention():
    scen = random_scenario(19, n_atoms=5, n_points=4)
    results, _ = run_scenario_checks(scen, list(CHECKS), reps=500, seed=1)
    assert results, "registry produced no results"
    for r in results:
        assert isinstance(r, CheckResult)
        assert r.passed == (r.lhs <= r.rhs)
        assert np.isfinite(r.lhs)


def test_unknown_check_name():
    scen = random_scenario(19, n_atoms=5, n_points=4)
    with pytest.raises(KeyError):
        run_scenario_checks(scen, ["no_such_check"], reps=100, seed=0)


def test_gine_zinn_wiring_matches_streams():
    # the check must use exactly its declared purpose stream; recompute
    # every quantity from the same ensemble and match to the last bit
    scen = random_scenario(8, n_atoms=5, n_points=4)
    r = check_gine_zinn(scen, reps=400, seed=9)
    ens = replication_ensemble(scen, 400, 9, PURPOSE["gine_zinn"])
    V = scen.family.values
    absproc = ens.abs_process_values(V).max(axis=1)
    abs_sup = np.abs(ens.process_values(V)).max(axis=1)
    integral = float((np.abs(V) @ scen.measure.masses).max())
    d = absproc - 4.0 * abs_sup
    margin = 4.0 * float(d.std(ddof=1) / math.sqrt(400))
    assert r.lhs == absproc.mean()
    assert r.rhs == integral + 4.0 * abs_sup.mean() + margin
    assert r.std_errors_used == 4.0


def test_exp_moment_small_reps_uses_sigma_guard():
    scen = random_scenario(24, n_atoms=5, n_points=4)  # a seed that needs it
    r = check_exp_moment(scen, reps=300, seed=3)
    assert r.passed
    assert r.rhs >= 0.05
    big = check_exp_moment(scen, reps=100_000, seed=3)
    assert big.rhs == pytest.approx(0.05)
    assert big.passed


def test_pois1_trivial_when_scale_is_infinite():
    # saturation below 4 makes the pair scale infinite: nothing is truncated
    scen = ScenarioConfig(
        MeasureSpace(("a",), np.array([2.0])),
        FunctionFamily(("zero", "t"), np.array([[0.0], [1.0]]), 0),
    )
    r = check_pois1(scen, reps=200, seed=0)
    assert r.passed and r.lhs == 0.0 and r.rhs == 0.0


def test_pois1_nontrivial():
    scen = random_scenario(6, n_atoms=8, n_points=4, scale=2.0)
    r = check_pois1(scen, reps=2000, seed=4)
    assert r.passed
    phi = PhiFamily(scen)
    t = int(np.argmax(np.abs(scen.family.values).max(axis=1)))
    if not math.isinf(phi.jstar(scen.family.zero_index, t, 4.0)):
        assert r.lhs > 0.0


def test_concentration_triples_in_band():
    scen = random_scenario(3, n_atoms=5, n_points=4)
    phi = PhiFamily(scen)
    triples = concentration_triples(phi)
    assert triples
    for s, t, j, v in triples:
        assert 0.5 <= v <= 20.0
        assert v == pytest.approx(phi.phi(j, s, t))
    results = check_concentration(scen, reps=500, seed=0)
    assert len(results) == len(triples)


def test_symmetrization_pair():
    scen = random_scenario(15, n_atoms=6, n_points=4)
    up, lo = check_symmetrization(scen, reps=3000, seed=2)
    assert up.name == "symmetrization_upper" and up.passed
    assert lo.name == "symmetrization_lower" and lo.passed


def test_joty_global_trivial_single_pair():
    scen = ScenarioConfig(
        MeasureSpace(("a",), np.array([1.0])),
        FunctionFamily(("zero", "t"), np.array([[0.0], [0.5]]), 0),
    )
    r = check_joty_global(scen, reps=300, seed=0)
    # saturation 1 <= 4 means j0 = inf, so the frequency is 1
    assert r.passed and r.rhs >= 1.0


def test_probe_measure_makes_labels_finite():
    scen = random_scenario(101, n_atoms=12, n_points=5, scale=1.0)
    phi = PhiFamily(scen)
    finite_uniform = finite_probe = 0
    for t in range(5):
        raw_u = raw_label_matrix(phi, uniform_measure(5), LABEL_LEVELS)
        raw_p = raw_label_matrix(phi, probe_measure(5, t), LABEL_LEVELS)
        finite_uniform += int(np.isfinite(raw_u[3, t]))
        finite_probe += int(np.isfinite(raw_p[3, t]))
    assert finite_uniform == 0  # uniform mass keeps every ball heavy forever
    assert finite_probe > 0
    r = check_joty_local(scen, reps=400, seed=7)
    assert r.passed
    assert r.lhs == 0.5  # a finite label was actually tested


def test_bernoulli_b2_two_point_hand_case():
    c = 0.7
    scen = ScenarioConfig(
        MeasureSpace(("a", "b"), np.array([1.0, 1.0])),
        FunctionFamily(("zero", "t"), np.array([[0.0, 0.0], [c, 0.0]]), 0),
    )
    r = check_bernoulli_b2(scen, reps=100, seed=0)
    assert r.passed
    # with unit masses the derived family is the family itself, and the
    # diameter scale brackets c
    k = diameter_label(4.0, c)
    assert 4.0**-k >= c > 4.0 ** -(k + 1)


def test_bernoulli_b2_uses_unit_mass_embedding():
    scen = random_scenario(42, n_atoms=5, n_points=4)
    r = check_bernoulli_b2(scen, reps=100, seed=0)
    assert r.passed
    assert r.replications == 0  # fully deterministic check


def test_roadmap_values_structure():
    scen = random_scenario(33, n_atoms=5, n_points=4)
    vals = roadmap_values(scen, reps=600, seed=5)
    assert vals["beta_tree"] >= 0.0
    assert vals["beta_prime"] >= 0.0
    assert vals["beta_second"] >= 0.0
    assert vals["tree"].n_levels >= 3
    assert abs(vals["mu0"].weights.sum() - 1.0) < 1e-9


def test_sandwich_structure_and_determinism():
    scen = random_scenario(27, n_atoms=5, n_points=4)
    rep1 = run_sandwich(scen, reps=800, seed=3)
    rep2 = run_sandwich(scen, reps=800, seed=3)
    assert rep1 == rep2
    up = rep1.upper_parts
    total = up["gamma2_t1"] + up["gamma1_t1"] + up["esup_abs_t2"]
    assert rep1.esup_mc.mean <= total  # the chosen clip dominates
    assert 0.0 <= rep1.measured_ratio_up <= 1.0
    assert "clip" in rep1.decomposition
    results, reports = check_sandwich(scen, reps=800, seed=3)
    assert [r.passed for r in results] == [True, True, True]
    assert reports == rep1


def test_sandwich_zero_clip_always_feasible():
    # even for a family whose clipped parts are all identical (c = 0), the
    # report must come back with upper >= esup
    scen = ScenarioConfig(
        MeasureSpace(("a",), np.array([6.0])),
        FunctionFamily(("zero", "t", "s"), np.array([[0.0], [1.0], [-1.0]]), 0),
    )
    rep = run_sandwich(scen, reps=500, seed=1)
    total = sum(v for k, v in rep.upper_parts.items() if k != "clip_c")
    assert rep.esup_mc.mean <= total + 1e-12


def test_example_ex_deterministic_values():
    tail, slope, mass = check_example_ex(None, reps=100, seed=0, full=False)
    assert tail.name == "example_ex_tail" and tail.passed
    assert slope.name == "example_ex_slope" and slope.passed
    assert slope.slack_or_constant == pytest.approx(0.5, abs=0.05)
    assert mass.name == "example_ex_mass" and mass.passed
    assert mass.lhs == pytest.approx(1.0, rel=0.01)


def test_mixing_cases_deterministic():
    scen = random_scenario(2, n_atoms=4, n_points=3)
    a = mixing_cases(scen, 3, seed=5)
    b = mixing_cases(scen, 3, seed=5)
    for (al1, mus1), (al2, mus2) in zip(a, b):
        assert np.array_equal(al1, al2)
        for m1, m2 in zip(mus1, mus2):
            assert np.array_equal(m1.weights, m2.weights)
