"""Scenario data model: an atomic measure space, a finite family of index
functions evaluated on the atoms, and run parameters.

Scenarios are the single input object for everything else in the package.
The measure is a finite sum of point masses, so every integral downstream
becomes an exact finite sum.  Continuous intensities are handled by
discretizing onto a grid and recording how in ``truncation_note``.
"""

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScenarioError",
    "MeasureSpace",
    "FunctionFamily",
    "ScenarioConfig",
    "load_scenario",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "make_example_ex",
    "random_scenario",
]


class ScenarioError(ValueError):
    """Raised when a scenario file or constructor argument is invalid."""


def _as_readonly(a, dtype=np.float64):
    arr = np.ascontiguousarray(np.asarray(a, dtype=dtype))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MeasureSpace:
    """Finite atomic measure: atom labels and strictly positive masses."""

    atom_ids: tuple
    masses: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "atom_ids", tuple(str(a) for a in self.atom_ids))
        masses = _as_readonly(self.masses)
        if masses.ndim != 1 or len(masses) != len(self.atom_ids):
            raise ScenarioError("masses must be a 1-d array aligned with atom_ids")
        if len(set(self.atom_ids)) != len(self.atom_ids):
            raise ScenarioError("atom ids must be distinct")
        if masses.size and (not np.all(np.isfinite(masses)) or np.any(masses <= 0)):
            raise ScenarioError("every atom mass must be finite and > 0")
        object.__setattr__(self, "masses", masses)

    @property
    def n_atoms(self):
        return len(self.atom_ids)

    @property
    def total_mass(self):
        return float(self.masses.sum())


@dataclass(frozen=True)
class FunctionFamily:
    """Index set T as a matrix: values[i, k] = t_i(atom k).

    One row is the distinguished zero function; rows must be pairwise
    distinct so that partition cardinalities are unambiguous.
    """

    point_ids: tuple
    values: np.ndarray
    zero_index: int

    def __post_init__(self):
        object.__setattr__(self, "point_ids", tuple(str(p) for p in self.point_ids))
        values = _as_readonly(self.values)
        if values.ndim != 2 or values.shape[0] != len(self.point_ids):
            raise ScenarioError("values must be a 2-d matrix with one row per point id")
        if len(set(self.point_ids)) != len(self.point_ids):
            raise ScenarioError("point ids must be distinct")
        if not np.all(np.isfinite(values)):
            raise ScenarioError("function values must be finite")
        if not (0 <= self.zero_index < len(self.point_ids)):
            raise ScenarioError("zero_index out of range")
        if values.size and np.any(values[self.zero_index] != 0.0):
            raise ScenarioError("the row at zero_index must be identically zero")
        seen = set()
        for row in values:
            key = row.tobytes()
            if key in seen:
                raise ScenarioError("duplicate rows in the function family")
            seen.add(key)
        object.__setattr__(self, "values", values)

    @property
    def n_points(self):
        return len(self.point_ids)


@dataclass(frozen=True)
class ScenarioConfig:
    """Measure space + function family + run parameters."""

    measure: MeasureSpace
    family: FunctionFamily
    r: int = 4
    rng_seed: int = 0
    replications: int = 10_000
    truncation_note: str = ""

    def __post_init__(self):
        if self.family.values.shape[1] != self.measure.n_atoms:
            raise ScenarioError("function values not aligned with atoms")
        if int(self.r) != self.r or self.r < 4:
            raise ScenarioError("r must be an integer >= 4")
        object.__setattr__(self, "r", int(self.r))
        if self.rng_seed < 0 or int(self.rng_seed) != self.rng_seed:
            raise ScenarioError("rng_seed must be a nonnegative integer")
        object.__setattr__(self, "rng_seed", int(self.rng_seed))
        if self.replications < 1 or int(self.replications) != self.replications:
            raise ScenarioError("replications must be a positive integer")
        object.__setattr__(self, "replications", int(self.replications))
        # finiteness of sum(mass * min(t^2, 1)) per row; always finite here,
        # asserted to catch overflow from absurd inputs early.
        v2 = np.minimum(self.family.values**2, 1.0)
        sums = v2 @ self.measure.masses if self.measure.n_atoms else np.zeros(self.family.n_points)
        if not np.all(np.isfinite(sums)):
            raise ScenarioError("sum of mass*(t^2 and 1) must be finite for every row")

    @property
    def n_atoms(self):
        return self.measure.n_atoms

    @property
    def n_points(self):
        return self.family.n_points


# ---------------------------------------------------------------------------
# file format


def scenario_to_dict(config):
    """Plain-dict form of a scenario, matching the file schema."""
    return {
        "atoms": [
            {"id": aid, "mass": float(m)}
            for aid, m in zip(config.measure.atom_ids, config.measure.masses)
        ],
        "functions": [
            {"id": pid, "values": [float(x) for x in row]}
            for pid, row in zip(config.family.point_ids, config.family.values)
        ],
        "zero_id": config.family.point_ids[config.family.zero_index],
        "r": config.r,
        "seed": config.rng_seed,
        "replications": config.replications,
        **({"truncation_note": config.truncation_note} if config.truncation_note else {}),
    }


def scenario_from_dict(doc):
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be an object")
    required = {"atoms", "functions", "zero_id", "r", "seed", "replications"}
    missing = required - set(doc)
    if missing:
        raise ScenarioError(f"scenario document missing keys: {sorted(missing)}")
    try:
        atom_ids = [a["id"] for a in doc["atoms"]]
        masses = [a["mass"] for a in doc["atoms"]]
        point_ids = [f["id"] for f in doc["functions"]]
        values = [f["values"] for f in doc["functions"]]
    except (TypeError, KeyError) as exc:
        raise ScenarioError(f"malformed atoms/functions entries: {exc}") from exc
    rows = {len(v) for v in values}
    if values and rows != {len(atom_ids)}:
        raise ScenarioError("every functions.values list must align with atoms")
    zero_id = doc["zero_id"]
    if zero_id not in point_ids:
        raise ScenarioError(f"zero_id {zero_id!r} not among function ids")
    measure = MeasureSpace(atom_ids, masses)
    family = FunctionFamily(point_ids, np.asarray(values, dtype=np.float64), point_ids.index(zero_id))
    return ScenarioConfig(
        measure=measure,
        family=family,
        r=doc["r"],
        rng_seed=doc["seed"],
        replications=doc["replications"],
        truncation_note=str(doc.get("truncation_note", "")),
    )


def load_scenario(path):
    """Read and validate a scenario file (UTF-8 JSON, fixed key names)."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def save_scenario(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# generators


def make_example_ex(x_min, x_max, n_atoms, r=4, seed=0, replications=10_000):
    """Power-tail scenario: Lebesgue measure on [x_min, x_max] discretized
    into equal-width cells (one atom per cell midpoint, mass = cell width),
    with family {0, t, -t} for t(x) = x^(-2).

    The interesting regime is x_min -> 0: the tail function u*nu(|t| >= u)
    grows like sqrt(u), while sum(mass * min(t^2, 1)) stays bounded.
    """
    if x_min <= 0:
        raise ScenarioError("x_min must be > 0")
    if not (x_min < x_max):
        raise ScenarioError("need x_min < x_max")
    if n_atoms < 2:
        raise ScenarioError("need n_atoms >= 2")
    edges = np.linspace(x_min, x_max, n_atoms + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)
    t = mids**-2.0
    values = np.vstack([np.zeros(n_atoms), t, -t])
    family = FunctionFamily(("zero", "t", "neg_t"), values, 0)
    note = (
        f"midpoint discretization of Lebesgue measure on [{x_min!r}, {x_max!r}] "
        f"into {n_atoms} equal cells; t(x) = x**-2"
    )
    return ScenarioConfig(
        measure=MeasureSpace([f"x{k}" for k in range(n_atoms)], widths),
        family=family,
        r=r,
        rng_seed=seed,
        replications=replications,
        truncation_note=note,
    )


def random_scenario(seed, n_atoms=6, n_points=5, scale=1.0):
    """Reproducible random scenario with 0 in T.

    Masses are log-uniform on [0.1, 10].  Values mix a narrow and a wide
    centered normal component (per entry, equal odds) so that both the
    aggregate-small-jump and the single-big-jump regimes show up.
    """
    if n_points < 2:
        raise ScenarioError("need n_points >= 2")
    if n_atoms < 1:
        raise ScenarioError("need n_atoms >= 1")
    if scale <= 0:
        raise ScenarioError("scale must be > 0")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=int(seed), spawn_key=(0,))))
    masses = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=n_atoms))
    narrow = rng.normal(0.0, 0.1 * scale, size=(n_points - 1, n_atoms))
    wide = rng.normal(0.0, 3.0 * scale, size=(n_points - 1, n_atoms))
    pick = rng.random(size=(n_points - 1, n_atoms)) < 0.5
    values = np.vstack([np.zeros(n_atoms), np.where(pick, narrow, wide)])
    family = FunctionFamily(
        ["zero"] + [f"t{i}" for i in range(1, n_points)], values, 0
    )
    return ScenarioConfig(
        measure=MeasureSpace([f"a{k}" for k in range(n_atoms)], masses),
        family=family,
        r=4,
        rng_seed=int(seed),
        replications=10_000,
    )
