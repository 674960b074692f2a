"""Poisson point process sampling and Monte Carlo estimation.

The process under study is X_t = sum_i eps_i * t(Z_i) where (Z_i) is a
Poisson point process whose intensity is the scenario's atomic measure and
the eps_i are independent fair signs.  On an atomic measure the PPP is just
an independent Poisson count per atom, so a replication is a vector of
counts plus signs, and a sum of n fair signs can be drawn in one shot as
2*Binomial(n, 1/2) - n.

Random streams are counter-based (Philox) and derived from
(seed, purpose, block): every consumer owns a purpose id, replications are
laid out in fixed-size blocks, and results are reduced in block order, so
any estimate is a pure function of (scenario, purpose, reps).
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PointConfiguration",
    "McEstimate",
    "sample_ppp",
    "eval_process",
    "eval_abs_process",
    "replication_ensemble",
    "sup_samples",
    "mc_estimate",
    "estimate_esup",
    "estimate_point_sum",
    "estimate_exp_moment",
    "empirical_tail",
]

BLOCK_SIZE = 4096
# above this many atoms, drawing a dense (reps x atoms) count matrix is
# wasteful; sample total point counts and atom indices instead.
DENSE_ATOM_LIMIT = 1024


def stream(seed, purpose, block=0):
    """Independent Generator for (seed, purpose, block)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(purpose), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def _block_sizes(reps):
    out = []
    done = 0
    while done < reps:
        size = min(BLOCK_SIZE, reps - done)
        out.append(size)
        done += size
    return out


@dataclass(frozen=True)
class PointConfiguration:
    """One realized point process: per-atom multiplicities and, for each of
    the sum(counts) points (grouped by atom, in atom order), a sign.
    """

    counts: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        signs = np.asarray(self.signs, dtype=np.int64)
        if counts.ndim != 1 or np.any(counts < 0):
            raise ValueError("counts must be a 1-d array of nonnegative integers")
        if signs.ndim != 1 or len(signs) != counts.sum():
            raise ValueError("need exactly one sign per realized point")
        if signs.size and not np.all(np.abs(signs) == 1):
            raise ValueError("signs must be +-1")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "signs", signs)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    replications: int


def sample_ppp(scenario, rng):
    """Draw one PointConfiguration: counts[k] ~ Poisson(mass_k) independent,
    signs i.i.d. uniform on {-1, +1}."""
    counts = rng.poisson(scenario.measure.masses)
    signs = rng.integers(0, 2, size=int(counts.sum())) * 2 - 1
    return PointConfiguration(counts, signs)


def _signed_atom_sums(config, n_atoms):
    if len(config.counts) != n_atoms:
        raise ValueError("configuration does not match the measure space")
    atom_of_point = np.repeat(np.arange(n_atoms), config.counts)
    return np.bincount(atom_of_point, weights=config.signs, minlength=n_atoms)


def eval_process(config, family):
    """X_t = sum over realized points of sign * t(atom), for every t."""
    s = _signed_atom_sums(config, family.values.shape[1])
    return family.values @ s


def eval_abs_process(config, family):
    """|X|_t = sum over realized points of |t(atom)| (signs ignored)."""
    if len(config.counts) != family.values.shape[1]:
        raise ValueError("configuration does not match the measure space")
    return np.abs(family.values) @ config.counts.astype(np.float64)


# ---------------------------------------------------------------------------
# replication ensembles


class _DenseEnsemble:
    """All replications as a (reps x atoms) count matrix plus per-atom signed
    sums (sum of the signs attached to each atom's points)."""

    def __init__(self, masses, seed, purpose, reps, with_signs):
        K = len(masses)
        self.reps = reps
        counts_blocks = []
        signed_blocks = []
        for b, size in enumerate(_block_sizes(reps)):
            rng = stream(seed, purpose, b)
            counts = rng.poisson(masses, size=(size, K))
            counts_blocks.append(counts)
            if with_signs:
                signed_blocks.append(2 * rng.binomial(counts, 0.5) - counts)
        self.counts = np.vstack(counts_blocks) if counts_blocks else np.zeros((0, K), dtype=np.int64)
        self.signed = np.vstack(signed_blocks) if signed_blocks else None

    def process_values(self, values):
        return self.signed.astype(np.float64) @ values.T

    def abs_process_values(self, values):
        return self.counts.astype(np.float64) @ np.abs(values).T

    def weighted_counts(self, weights):
        return self.counts.astype(np.float64) @ weights


class _SparseEnsemble:
    """All replications as a flat point list (replication index, atom index,
    sign per point); totals per replication are Poisson(total mass) and atoms
    are drawn by inverse CDF, which is the same point process."""

    def __init__(self, masses, seed, purpose, reps, with_signs):
        total = float(masses.sum())
        cdf = np.cumsum(masses) / total
        cdf[-1] = 1.0
        self.reps = reps
        rep_blocks, atom_blocks, sign_blocks = [], [], []
        offset = 0
        for b, size in enumerate(_block_sizes(reps)):
            rng = stream(seed, purpose, b)
            n = rng.poisson(total, size=size)
            m = int(n.sum())
            rep_blocks.append(offset + np.repeat(np.arange(size), n))
            atom_blocks.append(np.searchsorted(cdf, rng.random(m), side="right"))
            sign_blocks.append(rng.integers(0, 2, size=m) * 2 - 1 if with_signs else np.empty(0, np.int64))
            offset += size
        self.rep_idx = np.concatenate(rep_blocks) if rep_blocks else np.zeros(0, np.int64)
        self.atom_idx = np.concatenate(atom_blocks) if atom_blocks else np.zeros(0, np.int64)
        self.signs = np.concatenate(sign_blocks) if with_signs else None

    def _reduce(self, per_point):
        return np.bincount(self.rep_idx, weights=per_point, minlength=self.reps)

    def process_values(self, values):
        out = np.empty((self.reps, values.shape[0]))
        for i, row in enumerate(values):
            out[:, i] = self._reduce(self.signs * row[self.atom_idx])
        return out

    def abs_process_values(self, values):
        out = np.empty((self.reps, values.shape[0]))
        for i, row in enumerate(values):
            out[:, i] = self._reduce(np.abs(row)[self.atom_idx])
        return out

    def weighted_counts(self, weights):
        return self._reduce(np.asarray(weights)[self.atom_idx])


def replication_ensemble(scenario, reps=None, seed=None, purpose=0, with_signs=True):
    """Materialize `reps` independent point-process replications.

    The returned object evaluates, for any value matrix aligned with the
    atoms, the signed process, the no-cancellation process and count
    functionals, all as (reps,) or (reps, points) arrays.
    """
    reps = scenario.replications if reps is None else int(reps)
    seed = scenario.rng_seed if seed is None else int(seed)
    masses = scenario.measure.masses
    if len(masses) == 0:
        raise ValueError("cannot sample from an empty measure space")
    cls = _DenseEnsemble if len(masses) <= DENSE_ATOM_LIMIT else _SparseEnsemble
    return cls(masses, seed, purpose, reps, with_signs)


def sup_samples(ensemble, values, mode):
    """Per-replication supremum over the rows of `values`.

    mode 'signed'            -> sup_t X_t
    mode 'absolute_process'  -> sup_t |X|_t  (sum of |t| over points)
    mode 'abs_of_sup'        -> sup_t |X_t|
    """
    if mode == "signed":
        return ensemble.process_values(values).max(axis=1)
    if mode == "absolute_process":
        return ensemble.abs_process_values(values).max(axis=1)
    if mode == "abs_of_sup":
        return np.abs(ensemble.process_values(values)).max(axis=1)
    raise ValueError(f"unknown mode {mode!r}")


def mc_estimate(samples):
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if n < 2:
        raise ValueError("need at least 2 replications for a standard error")
    return McEstimate(
        mean=float(samples.mean()),
        std_error=float(samples.std(ddof=1) / math.sqrt(n)),
        replications=n,
    )


def estimate_esup(scenario, mode="signed", reps=None, seed=None, purpose=0):
    """Monte Carlo estimate of E sup_t of the chosen process functional."""
    ens = replication_ensemble(scenario, reps, seed, purpose, with_signs=mode != "absolute_process")
    return mc_estimate(sup_samples(ens, scenario.family.values, mode))


def estimate_point_sum(scenario, f_values, reps=None, seed=None, purpose=0):
    """MC estimate of E sum_i f(Z_i) for f given by its per-atom values.
    The exact answer is the atomic sum sum_k mass_k f(atom_k)."""
    ens = replication_ensemble(scenario, reps, seed, purpose, with_signs=False)
    return mc_estimate(ens.weighted_counts(np.asarray(f_values, dtype=np.float64)))


def estimate_exp_moment(scenario, t_index, lam, reps=None, seed=None, purpose=0):
    """MC estimate of E exp(lam * X_t); exactly exp(sum_k mass_k*(cosh(lam*t_k)-1))."""
    ens = replication_ensemble(scenario, reps, seed, purpose)
    x = ens.process_values(scenario.family.values[[t_index]])[:, 0]
    return mc_estimate(np.exp(lam * x))


def empirical_tail(scenario, s, t, v, reps=None, seed=None, purpose=0):
    """MC estimate of P(|X_s - X_t| >= v)."""
    if s == t:
        raise ValueError("need two distinct indices")
    ens = replication_ensemble(scenario, reps, seed, purpose)
    diff = scenario.family.values[[s]] - scenario.family.values[[t]]
    x = ens.process_values(diff)[:, 0]
    return float(np.mean(np.abs(x) >= v))
