"""Measure-indexed label profiles and chaining functionals.

A probability measure mu on the index set T assigns to every t and level n
an integer scale

    j_n(t) = sup{ j : mu(B_j(t, 2^n)) >= 1/N_n },      n >= 1,

where B_j(t, eps) is a phi_j-ball and N_n = 2^(2^n) is the admissible
cardinality cap.  Level 0 uses the single global scale j0 = sup{j : all
pairs have phi_j <= 4}.  Summing 2^n r^(-j_n(t)) gives the functional
J_mu(t); minimizing its sup over mu (and maximizing its mu-average) gives
the two measure-based functionals that sandwich the partition functional.

Because mu-ball masses are monotone in j, each j_n(t) is a weighted
top-quantile of the per-pair crossing scales jstar(s, t, 2^n), so label
computation reduces to the exact crossings from the metrics module.  The
random labels k_n (counts in place of masses) work the same way on the
replication ensembles.
"""

import math
from dataclasses import dataclass

import numpy as np

from .metrics import INF, PhiFamily, RandomPhi

__all__ = [
    "MeasureOnT",
    "LabelProfile",
    "cardinality_cap",
    "uniform_measure",
    "floored_measure",
    "compute_j0",
    "compute_jn",
    "diameter_label",
    "raw_label_matrix",
    "refine_labels",
    "label_profile",
    "J_values",
    "J_mu",
    "compute_kn_random",
    "I_mu_random",
    "k_label_samples",
    "mix_measures",
    "find_mu0",
    "measure_search",
]


def cardinality_cap(n):
    """N_0 = 1 and N_n = 2^(2^n) for n >= 1."""
    if n < 0:
        raise ValueError("level must be >= 0")
    return 1.0 if n == 0 else 2.0 ** (2**n)


def r_negpow(r, labels):
    """r^(-label) with the conventions r^(-inf) = 0."""
    labels = np.asarray(labels, dtype=np.float64)
    out = np.zeros_like(labels)
    finite = np.isfinite(labels)
    out[finite] = float(r) ** (-labels[finite])
    out[np.isneginf(labels)] = INF
    return out


@dataclass(frozen=True)
class MeasureOnT:
    """Probability weights over the index set."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n_points(self):
        return len(self.weights)


def uniform_measure(n_points):
    return MeasureOnT(np.full(n_points, 1.0 / n_points))


def floored_measure(weights):
    """Half the given weights, half uniform: keeps every atom >= 1/(2|T|)."""
    w = np.asarray(weights, dtype=np.float64)
    return MeasureOnT(0.5 * w / w.sum() + 0.5 / len(w))


def _top_quantile_rows(values, weights, theta):
    """Per row of `values`: the largest v such that the total weight of
    entries >= v is at least theta (weights sum to 1, theta <= 1)."""
    values = np.atleast_2d(values)
    order = np.argsort(-values, axis=1, kind="stable")
    v = np.take_along_axis(values, order, axis=1)
    cum = np.cumsum(np.asarray(weights)[order], axis=1)
    idx = (cum < theta - 1e-12).sum(axis=1)
    return v[np.arange(values.shape[0]), idx]


def compute_j0(phi):
    """Largest j with phi_j(s,t) <= 4 for every pair (+inf if that is all j)."""
    return phi.global_jstar(4.0)


def compute_jn(phi, mu, t, n):
    """Largest j with mu(B_j(t, 2^n)) >= 1/N_n."""
    if n < 1:
        raise ValueError("per-point labels start at level 1; level 0 is global")
    stars = phi.jstar_column(t, float(2**n))
    return float(_top_quantile_rows(stars, mu.weights, 1.0 / cardinality_cap(n))[0])


def raw_label_matrix(phi, mu, n_max, level0=None):
    """(n_max+1, P) matrix: row 0 = global j0 everywhere (or the supplied
    level-0 scale, e.g. a diameter-based one), row n = j_n(t)."""
    P = phi.n_points
    out = np.empty((n_max + 1, P))
    out[0] = compute_j0(phi) if level0 is None else float(level0)
    for n in range(1, n_max + 1):
        stars = np.vstack([phi.jstar_column(t, float(2**n)) for t in range(P)])
        out[n] = _top_quantile_rows(stars, mu.weights, 1.0 / cardinality_cap(n))
    return out


def diameter_label(r, diam):
    """Largest integer k with diam <= r^(-k); +inf for a zero diameter."""
    if diam < 0:
        raise ValueError("diameter must be nonnegative")
    if diam == 0.0:
        return INF
    k = math.floor(math.log(1.0 / diam) / math.log(r) + 1e-12)
    while float(r) ** (-k) < diam:
        k -= 1
    while float(r) ** (-(k + 1)) >= diam:
        k += 1
    return float(k)


def refine_labels(slots):
    """Running-minimum smoothing of a label matrix:

        refined_n(t) = min over p <= n of (slots_p(t) + n - p).

    The result moves up by at most one per level and never exceeds the raw
    slot, and the sum 2^n r^(-refined_n) is at most twice the sum over the
    slots themselves (each refined term is dominated by a geometric tail).
    """
    slots = np.asarray(slots, dtype=np.float64)
    out = np.empty_like(slots)
    out[0] = slots[0]
    for n in range(1, slots.shape[0]):
        out[n] = np.minimum(out[n - 1] + 1.0, slots[n])
    return out


@dataclass(frozen=True)
class LabelProfile:
    """Raw and refined label matrices for one measure.

    ``raw[0]`` is the global j0.  ``slots`` equals ``raw`` except that its
    row 0 is the root scale actually safe for tree building: the running
    minimum in `refine_labels` needs a level-0 value no larger than any
    j_1(t), and the global j0 does not always satisfy that (a point can sit
    in a 4-neighborhood of everything while its 2-ball at j0 is too light).
    """

    mu: MeasureOnT
    j0: float
    raw: np.ndarray
    slots: np.ndarray
    refined: np.ndarray
    r: int

    @property
    def n_levels(self):
        return self.raw.shape[0]

    @property
    def root(self):
        return float(self.slots[0, 0])


def label_profile(phi, mu, n_max):
    raw = raw_label_matrix(phi, mu, n_max)
    slots = raw.copy()
    if n_max >= 1:
        slots[0] = min(raw[0, 0], float(raw[1].min()))
    return LabelProfile(
        mu=mu,
        j0=float(raw[0, 0]),
        raw=raw,
        slots=slots,
        refined=refine_labels(slots),
        r=phi.r,
    )


def J_values(phi, mu, n_max, level0=None):
    """(P,) array of J_mu(t) = sum_{n <= n_max} 2^n r^(-j_n(t)), row 0 = j0."""
    raw = raw_label_matrix(phi, mu, n_max, level0=level0)
    scales = 2.0 ** np.arange(n_max + 1)
    return scales @ r_negpow(phi.r, raw)


def J_mu(phi, mu, t, n_max):
    return float(J_values(phi, mu, n_max)[t])


def profile_sums(profile, which="refined"):
    """(P,) array of sum_n 2^n r^(-label_n(t)) for the chosen label matrix."""
    mat = getattr(profile, which)
    scales = 2.0 ** np.arange(mat.shape[0])
    return scales @ r_negpow(profile.r, mat)


# ---------------------------------------------------------------------------
# random labels


class _SingleConfig:
    """Adapter presenting one PointConfiguration as a 1-replication ensemble."""

    def __init__(self, config):
        self.counts = np.asarray(config.counts, dtype=np.float64)
        self.reps = 1

    def weighted_counts(self, weights):
        return np.array([self.counts @ np.asarray(weights, dtype=np.float64)])


def k_label_samples(rphi, mu, t, n):
    """(reps,) array of the level-n random label at t.

    Level 0 is the global threshold-1 scale (same for every t); levels
    n >= 1 use mu-ball masses against 1/N_n, threshold 2^n.
    """
    P = rphi.phi.n_points
    if n == 0:
        out = np.full(rphi.ens.reps, INF)
        for s in range(P):
            for u in range(s + 1, P):
                out = np.minimum(out, rphi.kstar_samples(s, u, 1.0))
        return out
    stars = np.stack([rphi.kstar_samples(s, t, float(2**n)) for s in range(P)], axis=1)
    return _top_quantile_rows(stars, mu.weights, 1.0 / cardinality_cap(n))


def compute_kn_random(config, scenario, mu, t, n):
    """Random label of one realized configuration (counts in place of masses)."""
    rphi = RandomPhi(PhiFamily(scenario), _SingleConfig(config))
    return float(k_label_samples(rphi, mu, t, n)[0])


def I_mu_random(config, scenario, mu, t, n_max):
    """I_mu(t) = sum_n 2^n r^(-k_n(t)) for one realized configuration."""
    rphi = RandomPhi(PhiFamily(scenario), _SingleConfig(config))
    total = 0.0
    for n in range(n_max + 1):
        k = k_label_samples(rphi, mu, t, n)[0]
        total += float(2**n * r_negpow(scenario.r, [k])[0])
    return total


# ---------------------------------------------------------------------------
# mixing and measure search


def mix_measures(alphas, mus, phi, t, n_max):
    """Labels of a mixture mu = sum_i alpha_i mu_i, defined per level by the
    geometric-mean-like bracket  r^(-j_n-1) < sum_i alpha_i r^(-j_n^(i)) <= r^(-j_n),
    together with the verification record that every finite mixed label still
    captures mixture ball mass >= (2/3)/N_n.
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    if np.any(alphas < 0) or abs(alphas.sum() - 1.0) > 1e-12:
        raise ValueError("alphas must be nonnegative and sum to 1")
    if len(alphas) != len(mus):
        raise ValueError("one alpha per measure")
    r = phi.r
    profiles = [raw_label_matrix(phi, mu, n_max) for mu in mus]
    mixed_w = sum(a * mu.weights for a, mu in zip(alphas, mus))
    labels = np.empty(n_max + 1)
    record = []
    for n in range(n_max + 1):
        S = float(sum(a * r_negpow(r, [prof[n, t]])[0] for a, prof in zip(alphas, profiles)))
        if S == 0.0:
            labels[n] = INF
            continue
        j = math.floor(math.log(1.0 / S) / math.log(r) + 1e-12)
        while r ** (-j) < S:
            j -= 1
        while r ** (-(j + 1)) >= S:
            j += 1
        labels[n] = j
        if n >= 1:
            ball = float(mixed_w @ (phi.jstar_column(t, float(2**n)) >= j))
            record.append(
                {
                    "n": n,
                    "label": j,
                    "ball_mass": ball,
                    "required": (2.0 / 3.0) / cardinality_cap(n),
                    "ok": ball >= (2.0 / 3.0) / cardinality_cap(n) - 1e-12,
                }
            )
    return labels, record


def find_mu0(phi, n_max, tol=1e-3, max_iters=200):
    """Near-minimax measure: iteratively mixes toward the point where J is
    largest, keeping every weight >= 1/(2|T|).  Returns (measure, info).
    """
    P = phi.n_points
    uniform = np.full(P, 1.0 / P)
    w = uniform.copy()
    best_w, best_sup = w.copy(), INF
    history = []
    stable = 0
    prev = None
    iterates = [w.copy()]
    for it in range(max_iters):
        Jv = J_values(phi, MeasureOnT(w), n_max)
        sup = float(Jv.max())
        history.append(sup)
        if sup < best_sup:
            best_sup, best_w = sup, w.copy()
        if prev is not None and abs(sup - prev) <= tol * max(abs(prev), 1e-300):
            stable += 1
            if stable >= 3:
                break
        else:
            stable = 0
        prev = sup
        t_star = int(np.argmax(Jv))
        target = np.full(P, 0.5 / P)
        target[t_star] += 0.5
        alpha = 2.0 / (it + 2.0)
        w = (1.0 - alpha) * w + alpha * target
        iterates.append(w.copy())
    converged = stable >= 3 or best_sup == 0.0
    info = {
        "converged": bool(converged),
        "iterations": len(history),
        "sup_history": history,
        "iterates": iterates,
    }
    return MeasureOnT(best_w), info


def measure_search(phi, n_max, tol=1e-3, max_iters=200, perturbations=8, seed=7):
    """Both measure functionals at desk scale.

    beta_prime  : sup_t J_{mu0}(t) for the minimax-search measure (an upper
                  bound on inf_mu sup_t J_mu).
    beta_second : max over a documented candidate family of the mu-average
                  of J_mu (a lower bound witness for sup_mu of that average).
    """
    P = phi.n_points
    mu0, info = find_mu0(phi, n_max, tol=tol, max_iters=max_iters)
    beta_prime = float(J_values(phi, mu0, n_max).max()) if P else 0.0

    candidates = [np.full(P, 1.0 / P), mu0.weights.copy()]
    for t in range(P):
        point = np.zeros(P)
        point[t] = 1.0
        candidates.append(0.5 * point + 0.5 / P)
    step = max(1, len(info["iterates"]) // 8)
    candidates.extend(info["iterates"][::step])
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=int(seed), spawn_key=(97,))))
    for _ in range(perturbations):
        bump = mu0.weights * np.exp(rng.normal(0.0, 0.5, size=P))
        candidates.append(0.5 * bump / bump.sum() + 0.5 / P)

    beta_second = 0.0
    witness = MeasureOnT(np.full(P, 1.0 / P))
    for w in candidates:
        mu = MeasureOnT(w / w.sum())
        avg = float(J_values(phi, mu, n_max) @ mu.weights)
        if avg > beta_second:
            beta_second, witness = avg, mu
    return {
        "beta_prime": beta_prime,
        "mu0": mu0,
        "beta_second": beta_second,
        "witness": witness,
        "search_info": info,
    }
