"""Label profiles and measure functionals: labels against a brute ball scan,
the refinement recursion, mixing, and the minimax search."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idsup.measures import (
    J_mu,
    J_values,
    MeasureOnT,
    cardinality_cap,
    compute_j0,
    compute_jn,
    diameter_label,
    find_mu0,
    floored_measure,
    k_label_samples,
    label_profile,
    measure_search,
    mix_measures,
    r_negpow,
    raw_label_matrix,
    refine_labels,
    uniform_measure,
)
from idsup.metrics import INF, PhiFamily, RandomPhi
from idsup.mc import replication_ensemble
from idsup.scenario import random_scenario


def brute_jn(phi, mu, t, n, lo=-60, hi=60):
    """sup{j : mu(B_j(t, 2^n)) >= 1/N_n} by scanning the phi-balls directly."""
    theta = 1.0 / cardinality_cap(n)
    eps = float(2**n)
    if float(mu.weights @ phi.ball_mask(t, hi, eps)) >= theta - 1e-12:
        # the ball keeps enough mass at every scale (it has saturated)
        sat_mass = float(
            mu.weights @ np.array([phi.saturation(s, t) <= eps for s in range(phi.n_points)])
        )
        if sat_mass >= theta - 1e-12:
            return INF
    best = -INF
    for j in range(lo, hi + 1):
        if float(mu.weights @ phi.ball_mask(t, j, eps)) >= theta - 1e-12:
            best = j
    return best


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_jn_matches_brute_ball_scan(seed, n):
    scen = random_scenario(seed, n_atoms=6, n_points=5)
    phi = PhiFamily(scen)
    rng = np.random.default_rng(seed)
    w = rng.random(5) + 0.02
    mu = MeasureOnT(w / w.sum())
    for t in range(5):
        assert compute_jn(phi, mu, t, n) == brute_jn(phi, mu, t, n)


def test_j0_is_global_scale():
    scen = random_scenario(3, n_atoms=5, n_points=4)
    phi = PhiFamily(scen)
    assert compute_j0(phi) == phi.global_jstar(4.0)


def test_small_saturation_means_infinite_scale():
    # total mass 3 never exceeds the level-0 threshold 4
    from idsup.scenario import FunctionFamily, MeasureSpace, ScenarioConfig

    scen = ScenarioConfig(
        MeasureSpace(("a", "b"), np.array([1.0, 2.0])),
        FunctionFamily(("zero", "t"), np.array([[0.0, 0.0], [0.5, 10.0]]), 0),
    )
    phi = PhiFamily(scen)
    assert compute_j0(phi) == INF
    assert J_mu(phi, uniform_measure(2), 0, 3) == 0.0  # all labels infinite


def test_refine_labels_clamps_growth():
    slots = np.array([[0.0, 0.0], [5.0, 1.0], [5.0, 2.0], [9.0, 2.0]])
    refined = refine_labels(slots)
    assert refined[0].tolist() == [0.0, 0.0]
    assert refined[1].tolist() == [1.0, 1.0]  # 5 clamped to j0 + 1
    assert refined[2].tolist() == [2.0, 2.0]
    assert refined[3].tolist() == [3.0, 2.0]  # column 2 pinned by its own slot
    for n in range(1, 4):
        assert np.array_equal(refined[n], np.minimum(refined[n - 1] + 1, slots[n]))
    # on monotone slots (the only kind label_profile produces), growth is
    # by at most one and never decreases
    steps = np.diff(refined, axis=0)
    assert np.all((steps == 0) | (steps == 1))


def test_label_profile_root_is_safe():
    # the root slot never exceeds any level-1 label, so every level-1 cell
    # label stays in {root, root + 1} after refinement
    for seed in range(12):
        scen = random_scenario(seed, n_atoms=7, n_points=5)
        phi = PhiFamily(scen)
        prof = label_profile(phi, uniform_measure(5), 4)
        finite = np.isfinite(prof.slots[1])
        if finite.any():
            assert prof.root <= prof.slots[1][finite].min()
        assert prof.root <= prof.raw[0, 0]


def test_J_values_sum_matches_percomponent():
    scen = random_scenario(11, n_atoms=6, n_points=4)
    phi = PhiFamily(scen)
    mu = uniform_measure(4)
    vals = J_values(phi, mu, 3)
    for t in range(4):
        raw = raw_label_matrix(phi, mu, 3)
        want = sum(2.0**n * r_negpow(phi.r, [raw[n, t]])[0] for n in range(4))
        assert vals[t] == pytest.approx(want)
        assert J_mu(phi, mu, t, 3) == pytest.approx(want)


def test_r_negpow_sentinels():
    out = r_negpow(4.0, [INF, -INF, 0.0, 2.0])
    assert out[0] == 0.0
    assert out[1] == INF
    assert out[2] == 1.0
    assert out[3] == pytest.approx(4.0**-2)


def test_diameter_label():
    assert diameter_label(4.0, 0.0) == INF
    assert diameter_label(4.0, 1.0) == 0
    assert diameter_label(4.0, 0.25) == 1
    assert diameter_label(4.0, 0.3) == 0  # 4^-1 = 0.25 < 0.3 <= 1 = 4^0
    assert diameter_label(4.0, 17.0) == -3
    with pytest.raises(ValueError):
        diameter_label(4.0, -1.0)
    k = diameter_label(4.0, 0.7)
    assert 4.0**-k >= 0.7 > 4.0 ** -(k + 1)


def test_measure_validation():
    with pytest.raises(ValueError):
        MeasureOnT(np.array([0.5, 0.4]))  # does not sum to 1
    with pytest.raises(ValueError):
        MeasureOnT(np.array([1.5, -0.5]))
    m = floored_measure(np.array([1.0, 0.0, 0.0]))
    assert m.weights.min() >= 1.0 / 6 - 1e-12  # floor 1/(2P)
    assert m.weights.sum() == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# mixing


def test_mixture_of_identical_measures_is_identity():
    scen = random_scenario(2, n_atoms=6, n_points=4)
    phi = PhiFamily(scen)
    mu = uniform_measure(4)
    raw = raw_label_matrix(phi, mu, 3)
    for t in range(4):
        labels, record = mix_measures(np.array([0.5, 0.5]), [mu, mu], phi, t, 3)
        assert np.array_equal(labels, raw[:, t])
        assert all(rec["ok"] for rec in record)


def test_mixture_bracket_and_ball_mass():
    for seed in range(8):
        scen = random_scenario(seed + 50, n_atoms=6, n_points=5)
        phi = PhiFamily(scen)
        rng = np.random.default_rng(seed)
        mus = [uniform_measure(5), floored_measure(rng.random(5)), floored_measure(rng.random(5))]
        alphas = rng.random(3) + 0.1
        alphas /= alphas.sum()
        raws = [raw_label_matrix(phi, mu, 3) for mu in mus]
        for t in range(5):
            labels, record = mix_measures(alphas, mus, phi, t, 3)
            for n in range(4):
                S = sum(a * r_negpow(phi.r, [raw[n, t]])[0] for a, raw in zip(alphas, raws))
                if S == 0.0:
                    assert labels[n] == INF
                else:
                    j = labels[n]
                    assert phi.r ** -(j + 1) < S <= phi.r**-j
            assert all(rec["ok"] for rec in record)


# ---------------------------------------------------------------------------
# the minimax search


def test_find_mu0_respects_floor_and_symmetry():
    # a two-point family whose only non-zero functions are mirror images:
    # no point is special, so the near-minimax measure is close to uniform
    from idsup.scenario import FunctionFamily, MeasureSpace, ScenarioConfig

    vals = np.array([[0.0, 0.0], [2.0, -1.0], [-1.0, 2.0]])
    scen = ScenarioConfig(
        MeasureSpace(("a", "b"), np.array([3.0, 3.0])),
        FunctionFamily(("zero", "s", "t"), vals, 0),
    )
    phi = PhiFamily(scen)
    mu0, info = find_mu0(phi, 3)
    assert mu0.weights.min() >= 1.0 / 6 - 1e-9
    assert abs(mu0.weights[1] - mu0.weights[2]) <= 0.2
    assert info["iterations"] >= 1


def test_measure_search_contract():
    scen = random_scenario(23, n_atoms=6, n_points=5)
    phi = PhiFamily(scen)
    out = measure_search(phi, 3)
    assert set(out) >= {"beta_prime", "mu0", "beta_second", "witness", "search_info"}
    # beta_prime is the sup over t of J for mu0
    assert out["beta_prime"] == pytest.approx(float(J_values(phi, out["mu0"], 3).max()))
    # beta_second is attained by the reported witness measure
    wit = out["witness"]
    assert out["beta_second"] == pytest.approx(float(J_values(phi, wit, 3) @ wit.weights))
    # the average never beats the sup for the same measure
    assert out["beta_second"] >= float(J_values(phi, wit, 3) @ wit.weights) - 1e-12


def test_measure_search_deterministic():
    scen = random_scenario(23, n_atoms=6, n_points=5)
    a = measure_search(PhiFamily(scen), 3)
    b = measure_search(PhiFamily(scen), 3)
    assert np.array_equal(a["mu0"].weights, b["mu0"].weights)
    assert a["beta_prime"] == b["beta_prime"]
    assert a["beta_second"] == b["beta_second"]


# ---------------------------------------------------------------------------
# random labels


def test_k_label_samples_level0_is_global():
    scen = random_scenario(31, n_atoms=8, n_points=4)
    phi = PhiFamily(scen)
    ens = replication_ensemble(scen, 300, seed=1, purpose=5, with_signs=False)
    rphi = RandomPhi(phi, ens)
    mu = uniform_measure(4)
    k0 = k_label_samples(rphi, mu, 0, 0)
    want = np.full(300, INF)
    for s in range(4):
        for u in range(s + 1, 4):
            want = np.minimum(want, rphi.kstar_samples(s, u, 1.0))
    assert np.array_equal(k0, want)


def test_k_label_samples_level_n_quantile():
    scen = random_scenario(31, n_atoms=8, n_points=4)
    phi = PhiFamily(scen)
    ens = replication_ensemble(scen, 200, seed=2, purpose=6, with_signs=False)
    rphi = RandomPhi(phi, ens)
    mu = uniform_measure(4)
    ks = k_label_samples(rphi, mu, 1, 1)
    # per replication: largest j whose random ball at t=1 keeps mass >= 1/4
    cols = np.stack([rphi.kstar_samples(s, 1, 2.0) for s in range(4)], axis=1)
    for rep in range(0, 200, 11):
        vals = np.sort(cols[rep])[::-1]
        cum = np.cumsum(np.full(4, 0.25))
        want = vals[np.searchsorted(cum, 0.25 - 1e-12)]
        assert ks[rep] == want
