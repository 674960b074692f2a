"""Admissible partition sequences and partition-based functionals.

An admissible sequence refines one cell at level 0 into at most
N_n = 2^(2^n) cells at level n.  Three computations live here:

* gamma_alpha = inf sup_t sum_n 2^(n/alpha) diam(A_n(t)) over admissible
  sequences, with an exhaustive oracle for tiny index sets and a
  farthest-point greedy upper bound in general;
* the greedy covering step: split a group of points into few cells, each
  contained in a phi-ball of radius 2^(n+2) around its center, with the
  centers' 2^n-balls pairwise disjoint (which is what caps the cell count);
* the label-carrying partition tree whose cells control phi at scale
  2^(n+2) per level, built by recursive covering from a refined label
  profile, and its functional beta = sup_t sum_n 2^n r^(-j_n(A_n(t))).
"""

import math
from dataclasses import dataclass

import numpy as np

from .measures import r_negpow

__all__ = [
    "CoverFailure",
    "InvalidTreeError",
    "SizeCapError",
    "Cell",
    "PartitionTree",
    "GammaValue",
    "set_partitions",
    "sequence_value",
    "gamma_exact",
    "gamma_greedy",
    "greedy_cover",
    "build_partition_tree",
    "validate_tree",
    "beta_functional",
    "tree_report_lines",
]

INF = math.inf


class CoverFailure(RuntimeError):
    """Greedy covering produced more centers than the admissible cap; the
    supplied labels cannot all satisfy their ball-mass guarantee."""


class InvalidTreeError(ValueError):
    """A partition tree violates one of its structural invariants."""


class SizeCapError(ValueError):
    """Exhaustive enumeration requested beyond its size cap."""


def cap_int(n):
    """Integer cardinality cap: 1 at level 0, else 2^(2^n)."""
    return 1 if n == 0 else 2 ** (2**n)


@dataclass(frozen=True)
class Cell:
    members: tuple
    label: float = INF

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))
        if not self.members:
            raise InvalidTreeError("empty cell")
        lab = float(self.label)
        if not (lab == INF or (math.isfinite(lab) and lab == math.floor(lab))):
            raise InvalidTreeError("labels must be integers or +inf")
        object.__setattr__(self, "label", lab)


class PartitionTree:
    """Nested partitions with one integer scale label per cell."""

    def __init__(self, levels, r):
        self.levels = [list(cells) for cells in levels]
        self.r = int(r)
        self._cell_of = []
        for cells in self.levels:
            lookup = {}
            for cell in cells:
                for t in cell.members:
                    lookup[t] = cell
            self._cell_of.append(lookup)

    @property
    def n_levels(self):
        return len(self.levels)

    @property
    def n_points(self):
        return len(self._cell_of[0])

    def cell_of(self, n, t):
        return self._cell_of[n][t]

    def label_path(self, t):
        return np.array([self.cell_of(n, t).label for n in range(self.n_levels)])


@dataclass(frozen=True)
class GammaValue:
    value: float
    alpha: int
    witness: tuple


# ---------------------------------------------------------------------------
# gamma functionals on a plain distance matrix


def set_partitions(items, max_blocks):
    """All set partitions of `items` into at most max_blocks blocks
    (restricted-growth enumeration; blocks ordered by first element)."""
    items = list(items)
    if not items:
        yield ()
        return

    def rec(i, blocks):
        if i == len(items):
            yield tuple(tuple(b) for b in blocks)
            return
        x = items[i]
        for b in blocks:
            b.append(x)
            yield from rec(i + 1, blocks)
            b.pop()
        if len(blocks) < max_blocks:
            blocks.append([x])
            yield from rec(i + 1, blocks)
            blocks.pop()

    yield from rec(1, [[items[0]]])


def sequence_value(distance, levels, alpha):
    """sup_t sum_n 2^(n/alpha) diam(A_n(t)) for an explicit nested sequence.
    Levels beyond the last are read as the last one repeated, so the value
    is exact once the final level is all singletons."""
    P = distance.n_points
    best = 0.0
    for t in range(P):
        total = 0.0
        for n, cells in enumerate(levels):
            cell = next(c for c in cells if t in c)
            total += 2.0 ** (n / alpha) * distance.diameter(list(cell))
        best = max(best, total)
    return best


def gamma_exact(distance, alpha, size_cap=6):
    """Exact gamma_alpha for small index sets by exhaustive enumeration.

    Depth 2 suffices under the cap: with |T| <= 6 <= N_2 = 16 the level-2
    partition may always be all singletons, which zeroes every later
    diameter simultaneously and is nested below any level-1 choice, so only
    the level-1 partition (at most N_1 = 4 blocks) is genuinely searched.
    """
    P = distance.n_points
    if P > size_cap or P > 6:
        raise SizeCapError(f"gamma_exact supports at most 6 points, got {P}")
    if P <= 1:
        return GammaValue(0.0, alpha, (((0,),),) if P else ((),))
    points = tuple(range(P))
    singletons = tuple((t,) for t in points)
    best_val, best_seq = INF, None
    for p1 in set_partitions(points, cap_int(1)):
        seq = ((points,), p1, singletons)
        val = sequence_value(distance, seq, alpha)
        if val < best_val - 1e-15:
            best_val, best_seq = val, seq
    return GammaValue(best_val, alpha, best_seq)


def _split_cell(distance, cell):
    """Split a cell at its farthest pair; everyone joins the nearer end."""
    pairs = [(a, b) for i, a in enumerate(cell) for b in cell[i + 1 :]]
    d = distance.values
    diam = max(d[a, b] for a, b in pairs)
    a, b = min((p for p in pairs if d[p] == diam))
    left = tuple(x for x in cell if d[x, a] <= d[x, b])
    right = tuple(x for x in cell if x not in left)
    return left, right


def gamma_greedy(distance, alpha, n_max=6):
    """Upper bound on gamma_alpha: at each level, repeatedly bisect the
    worst-diameter cell (farthest-pair split) within the cardinality cap."""
    P = distance.n_points
    if P == 0:
        return GammaValue(0.0, alpha, ((),))
    levels = [(tuple(range(P)),)]
    n = 0
    while n < n_max and any(len(c) > 1 for c in levels[-1]):
        n += 1
        cells = list(levels[-1])
        budget = cap_int(n)
        while len(cells) < budget:
            splittable = [c for c in cells if len(c) > 1 and distance.diameter(list(c)) > 0]
            if not splittable:
                break
            worst = max(splittable, key=lambda c: (distance.diameter(list(c)), [-x for x in c]))
            cells.remove(worst)
            cells.extend(_split_cell(distance, worst))
        cells.sort(key=lambda c: c[0])
        levels.append(tuple(cells))
    seq = tuple(tuple(cells) for cells in levels)
    return GammaValue(sequence_value(distance, seq, alpha), alpha, seq)


# ---------------------------------------------------------------------------
# label-driven covering and the partition tree


def greedy_cover(phi, members, n, labels):
    """Cover `members` by cells D_1, D_2, ... carved sequentially: the next
    center is the uncovered point with the smallest label (then smallest
    index), and its cell is everything still uncovered within
    phi_{label(center)}(center, .) <= 2^(n+2).

    Taking centers in nondecreasing label order makes every pair of centers
    separated by more than 2^(n+2) at the smaller of their labels, so their
    2^n-balls are disjoint; when each such ball holds measure >= 1/N_n the
    cell count cannot exceed N_n, and exceeding it raises CoverFailure.
    """
    members = sorted(members)
    radius = float(2 ** (n + 2))
    cap = cap_int(n)
    remaining = list(sorted(members, key=lambda t: (labels[t], t)))
    cells = []
    while remaining:
        center = remaining[0]
        taken = [t for t in remaining if phi.phi(labels[center], center, t) <= radius]
        cells.append(Cell(taken, labels[center]))
        if len(cells) > cap:
            raise CoverFailure(
                f"covering produced more than {cap} cells at level {n}; "
                "label ball-mass guarantee violated"
            )
        taken_set = set(taken)
        remaining = [t for t in remaining if t not in taken_set]
    return cells


def build_partition_tree(phi, profile, n_max=None):
    """Nested labeled partitions from a refined label profile.

    Levels 0..2 are the whole set at the root scale.  Each later level
    splits a cell by the next refined label (the cell's scale or one more),
    then covers each part at the previous level's radius; a level-(n+1)
    cell therefore carries the common refined level-(n-1) label of its
    members, keeping the one-step label growth and the 2^(n+2) diameter
    control at every level.
    """
    P = phi.n_points
    refined = profile.refined
    hard_cap = 6
    target = hard_cap if n_max is None else int(n_max)
    if target < 2:
        raise ValueError("a tree has at least levels 0..2")
    if target - 1 > refined.shape[0] - 1:
        raise ValueError("label profile too shallow for the requested depth")
    root = Cell(tuple(range(P)), profile.root)
    levels = [[root], [root], [root]]
    stop_at = None
    while len(levels) <= target:
        n = len(levels) - 1  # building level n+1 from level n
        new_cells = []
        for cell in levels[n]:
            if math.isinf(cell.label):
                groups = [list(cell.members)]
            else:
                want = refined[n - 1, list(cell.members)]
                lo = [t for t in cell.members if refined[n - 1, t] == cell.label]
                hi = [t for t in cell.members if refined[n - 1, t] == cell.label + 1]
                if len(lo) + len(hi) != len(cell.members):
                    raise InvalidTreeError(
                        f"refined labels {sorted(set(want))} not within one step "
                        f"of the cell label {cell.label}"
                    )
                groups = [g for g in (lo, hi) if g]
            for group in groups:
                new_cells.extend(greedy_cover(phi, group, n - 1, refined[n - 1]))
        new_cells.sort(key=lambda c: c.members[0])
        levels.append(new_cells)
        if n_max is None and stop_at is None and all(len(c.members) == 1 for c in new_cells):
            stop_at = min(len(levels), hard_cap)  # one level past all-singleton
        if n_max is None and stop_at is not None and len(levels) > stop_at:
            break
    return PartitionTree(levels[: (target + 1) if n_max is not None else None], phi.r)


def validate_tree(tree, phi):
    """All structural invariants; returns a list of violation strings."""
    bad = []
    P = tree.n_points
    all_points = set(range(P))
    for n, cells in enumerate(tree.levels):
        seen = []
        for c in cells:
            seen.extend(c.members)
        if sorted(seen) != sorted(all_points):
            bad.append(f"level {n} is not a partition of the index set")
        if len(cells) > cap_int(n):
            bad.append(f"level {n} has {len(cells)} cells > cap {cap_int(n)}")
    for n in range(1, tree.n_levels):
        for c in tree.levels[n]:
            parent = tree.cell_of(n - 1, c.members[0])
            if not set(c.members) <= set(parent.members):
                bad.append(f"level {n} cell {c.members} not nested in a parent")
            if not (parent.label <= c.label <= parent.label + 1):
                bad.append(
                    f"level {n} label {c.label} outside "
                    f"[{parent.label}, {parent.label}+1]"
                )
    for n, cells in enumerate(tree.levels):
        bound = float(2 ** (n + 2))
        for c in cells:
            for i, s in enumerate(c.members):
                for t in c.members[i + 1 :]:
                    val = phi.phi(c.label, s, t)
                    if val > bound + 1e-9:
                        bad.append(
                            f"level {n} cell {c.members}: phi_{c.label}({s},{t})"
                            f" = {val} > 2^(n+2) = {bound}"
                        )
    return bad


def beta_functional(phi, tree, validate=True):
    """sup_t sum_n 2^n r^(-j_n(A_n(t))) over the tree's levels."""
    if validate:
        bad = validate_tree(tree, phi)
        if bad:
            raise InvalidTreeError("; ".join(bad))
    scales = 2.0 ** np.arange(tree.n_levels)
    return float(
        max(scales @ r_negpow(tree.r, tree.label_path(t)) for t in range(tree.n_points))
    )


def tree_report_lines(tree, point_ids=None):
    """One line per cell: level, label, member ids."""
    lines = []
    for n, cells in enumerate(tree.levels):
        for c in cells:
            label = "inf" if math.isinf(c.label) else str(int(c.label))
            names = (
                ",".join(str(point_ids[t]) for t in c.members)
                if point_ids is not None
                else ",".join(str(t) for t in c.members)
            )
            lines.append(f"level={n} label={label} members={names}")
    return lines
