"""Distance families on the index set.

Alongside the two classical metrics (L2 against the measure, and sup over
atoms) the central object is the one-parameter family of squared distances

    phi_j(s, t) = sum_k mass_k * min(r^(2j) * (s_k - t_k)^2, 1),

indexed by an integer scale j, together with its random counterpart where
the masses are replaced by realized point counts.  phi_j is nondecreasing
in j, vanishes as j -> -inf and saturates at the measure of {s != t} as
j -> +inf, so any threshold crossing

    jstar(s, t, eps) = sup{ j : phi_j(s, t) <= eps }

is computed exactly: outside an explicit integer window the family is
either in its quadratic regime (phi_j = r^(2j) * d2^2, no term clipped) or
saturated, and inside the window we bisect.  Sentinels +-inf stand for
crossings that never happen.
"""

import math

import numpy as np

__all__ = [
    "DistanceMatrix",
    "d2_matrix",
    "dinf_matrix",
    "compute_d2",
    "compute_dinf",
    "PhiFamily",
    "RandomPhi",
]

INF = math.inf


class DistanceMatrix:
    """Symmetric nonnegative matrix of pairwise distances with a kind tag."""

    def __init__(self, values, kind):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.allclose(values, values.T) or np.any(values < 0) or np.any(np.diag(values) != 0):
            raise ValueError("distance matrix must be symmetric, nonnegative, zero on the diagonal")
        self.values = values
        self.kind = kind

    @property
    def n_points(self):
        return self.values.shape[0]

    def diameter(self, subset=None):
        if subset is None:
            return float(self.values.max()) if self.n_points else 0.0
        subset = np.asarray(subset)
        if len(subset) <= 1:
            return 0.0
        return float(self.values[np.ix_(subset, subset)].max())


def d2_matrix(values, masses):
    """d2(s,t) = sqrt(sum_k mass_k (s_k - t_k)^2) for an arbitrary row family
    (rows may coincide, e.g. after clipping)."""
    V = np.asarray(values, dtype=np.float64)
    m = np.asarray(masses, dtype=np.float64)
    G = (V * m) @ V.T
    q = np.diag(G)
    sq = np.maximum(q[:, None] + q[None, :] - 2 * G, 0.0)
    d = np.sqrt(sq)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d, "d2")


def dinf_matrix(values):
    """dinf(s,t) = max_k |s_k - t_k| (every atom carries positive mass)."""
    V = np.asarray(values, dtype=np.float64)
    P = V.shape[0]
    d = np.zeros((P, P))
    for s in range(P):
        d[s] = np.abs(V - V[s]).max(axis=1) if V.shape[1] else 0.0
    d = np.maximum(d, d.T)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d, "dinf")


def compute_d2(scenario):
    return d2_matrix(scenario.family.values, scenario.measure.masses)


def compute_dinf(scenario):
    return dinf_matrix(scenario.family.values)


class _PairScales:
    """Per-pair constants of the phi family.

    Window bounds: below j_lo no term of phi is clipped (so phi is exactly
    r^(2j)*d2sq), at and above j_hi every nonzero term is clipped (so phi
    equals its saturation value, the measure of the support of s-t).
    """

    __slots__ = ("d2sq", "sat", "j_lo", "j_hi", "degenerate")

    def __init__(self, absdiff, masses, log_r):
        nz = absdiff > 0
        self.degenerate = not bool(nz.any())
        if self.degenerate:
            self.d2sq = 0.0
            self.sat = 0.0
            self.j_lo = 0
            self.j_hi = 0
            return
        self.d2sq = float(masses @ absdiff**2)
        self.sat = float(masses[nz].sum())
        max_diff = float(absdiff.max())
        min_nz = float(absdiff[nz].min())
        self.j_lo = math.floor(-math.log(max_diff) / log_r) - 2
        self.j_hi = math.ceil(-math.log(min_nz) / log_r) + 2


class PhiFamily:
    def __init__(self, scenario):
        self.scenario = scenario
        self.r = float(scenario.r)
        self._log_r = math.log(self.r)
        self.n_points = scenario.family.n_points
        self._V = scenario.family.values
        self._m = scenario.measure.masses
        self._pairs = {}
        self._phi_memo = {}
        self._jstar_memo = {}

    # -- per-pair plumbing ---------------------------------------------------

    def pair_diff(self, s, t):
        return np.abs(self._V[s] - self._V[t])

    def pair(self, s, t):
        key = (s, t) if s <= t else (t, s)
        got = self._pairs.get(key)
        if got is None:
            got = _PairScales(self.pair_diff(*key), self._m, self._log_r)
            self._pairs[key] = got
        return got

    def clipped_weights(self, j, s, t):
        """Per-atom vector min(r^(2j)(s_k-t_k)^2, 1); phi_j = masses @ this.

        Powers are taken in float64 so an out-of-range scale saturates (the
        clip absorbs it) instead of raising."""
        d = self.pair_diff(s, t)
        with np.errstate(over="ignore", invalid="ignore"):
            a = np.float64(self.r) ** np.float64(j) * d
            w = np.minimum(a * a, 1.0)
        return np.where(d > 0.0, w, 0.0)

    # -- the family -----------------------------------------------------------

    def phi(self, j, s, t):
        """phi_j(s,t); accepts j = +-inf with the limit values."""
        if s == t:
            return 0.0
        p = self.pair(s, t)
        if p.degenerate:
            return 0.0
        if j == INF:
            return p.sat
        if j == -INF:
            return 0.0
        key = (int(j), s, t) if s <= t else (int(j), t, s)
        got = self._phi_memo.get(key)
        if got is None:
            j = int(j)
            if j <= p.j_lo:
                got = 0.0 if p.d2sq == 0.0 else min(self._quadratic(j, p.d2sq), p.sat)
            elif j >= p.j_hi:
                got = p.sat
            else:
                got = float(self._m @ self.clipped_weights(j, s, t))
            self._phi_memo[key] = got
        return got

    def _quadratic(self, j, d2sq):
        """r^(2j) * d2sq, saturating instead of raising out of float range."""
        with np.errstate(over="ignore"):
            return float(np.float64(self.r) ** np.float64(2 * j) * d2sq)

    def saturation(self, s, t):
        return 0.0 if s == t else self.pair(s, t).sat

    def jstar(self, s, t, eps):
        """Largest integer j with phi_j(s,t) <= eps (+inf if that is all j,
        -inf if none, which needs eps <= 0)."""
        if eps <= 0.0:
            return INF if s == t else -INF
        if s == t:
            return INF
        p = self.pair(s, t)
        if p.degenerate or p.sat <= eps:
            return INF
        key = (float(eps), s, t) if s <= t else (float(eps), t, s)
        got = self._jstar_memo.get(key)
        if got is None:
            got = self._jstar_scan(p, s, t, eps)
            self._jstar_memo[key] = got
        return got

    def _jstar_scan(self, p, s, t, eps):
        if self.phi(p.j_lo, s, t) > eps:
            # crossing happens in the exact quadratic regime below the window
            j = math.floor((math.log(eps) - math.log(p.d2sq)) / (2 * self._log_r) + 1e-12)
            while self._quadratic(j, p.d2sq) > eps:
                j -= 1
            while j + 1 <= p.j_lo and self._quadratic(j + 1, p.d2sq) <= eps:
                j += 1
            return j
        # phi(j_lo) <= eps < sat = phi(j_hi): bisect the crossing
        lo, hi = p.j_lo, p.j_hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.phi(mid, s, t) <= eps:
                lo = mid
            else:
                hi = mid
        return lo

    def jstar_column(self, t, eps):
        """Array over s of jstar(s, t, eps)."""
        return np.array([self.jstar(s, t, eps) for s in range(self.n_points)])

    def global_jstar(self, eps):
        """Largest j with phi_j(s,t) <= eps simultaneously for all pairs."""
        best = INF
        for s in range(self.n_points):
            for t in range(s + 1, self.n_points):
                best = min(best, self.jstar(s, t, eps))
        return best

    def ball_mask(self, t, j, eps):
        """Boolean membership of {s : phi_j(s,t) <= eps}."""
        return np.array([self.phi(j, s, t) <= eps for s in range(self.n_points)])


class RandomPhi:
    """The random distance family of one replication ensemble:

        phi~_j(s,t) = sum over realized points of min(r^(2j)(s-t)(Z)^2, 1),

    evaluated for all replications at once.  Its mean is phi_j(s,t).
    """

    def __init__(self, phi, ensemble):
        self.phi = phi
        self.ens = ensemble

    def samples(self, j, s, t):
        """(reps,) array of phi~_j(s,t)."""
        if s == t:
            return np.zeros(self.ens.reps)
        return self.ens.weighted_counts(self.phi.clipped_weights(j, s, t))

    def kstar_samples(self, s, t, eps):
        """(reps,) array of sup{j : phi~_j(s,t) <= eps} with +-inf sentinels."""
        if eps <= 0.0:
            raise ValueError("eps must be positive")
        R = self.ens.reps
        if s == t:
            return np.full(R, INF)
        p = self.phi.pair(s, t)
        if p.degenerate:
            return np.full(R, INF)
        absdiff = self.phi.pair_diff(s, t)
        # realized L2 mass and realized saturation per replication
        q = self.ens.weighted_counts(absdiff**2)
        sat = self.ens.weighted_counts((absdiff > 0).astype(np.float64))
        window = np.arange(p.j_lo, p.j_hi + 1)
        cols = np.empty((R, len(window)))
        for i, j in enumerate(window):
            cols[:, i] = self.samples(int(j), s, t)
        below = cols[:, 0] > eps
        n_ok = (cols <= eps).sum(axis=1)
        out = np.where(n_ok > 0, p.j_lo + n_ok - 1.0, -INF)
        out[sat <= eps] = INF
        if below.any():
            out[below] = self._below_window(q[below], eps, p.j_lo)
        return out

    def _below_window(self, q, eps, j_lo):
        # exact quadratic regime: phi~_j = r^(2j) * q, q > eps/r^(2 j_lo) > 0
        r = self.phi.r
        with np.errstate(over="ignore"):
            j = np.floor((math.log(eps) - np.log(q)) / (2 * math.log(r)) + 1e-12)
            for _ in range(64):
                over = r ** (2 * j) * q > eps
                if not over.any():
                    break
                j[over] -= 1
            for _ in range(64):
                under = (j + 1 <= j_lo) & (r ** (2 * (j + 1)) * q <= eps)
                if not under.any():
                    break
                j[under] += 1
        return j
