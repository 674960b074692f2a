"""Scenario schema: validation, (de)serialization round trips, generators."""

import json

import numpy as np
import pytest

from idsup.scenario import (
    FunctionFamily,
    MeasureSpace,
    ScenarioConfig,
    ScenarioError,
    load_scenario,
    make_example_ex,
    random_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)


def small():
    return ScenarioConfig(
        measure=MeasureSpace(("a", "b"), np.array([1.0, 2.5])),
        family=FunctionFamily(("zero", "t"), np.array([[0.0, 0.0], [1.0, -2.0]]), 0),
        r=4,
        rng_seed=3,
        replications=500,
    )


def test_round_trip(tmp_path):
    path = tmp_path / "scen.json"
    scen = small()
    save_scenario(scen, path)
    back = load_scenario(path)
    assert back.measure.atom_ids == scen.measure.atom_ids
    assert np.array_equal(back.measure.masses, scen.measure.masses)
    assert np.array_equal(back.family.values, scen.family.values)
    assert back.family.zero_index == 0
    assert back.r == 4 and back.rng_seed == 3 and back.replications == 500
    # a second dump is byte-stable
    assert json.dumps(scenario_to_dict(back), sort_keys=True) == json.dumps(
        scenario_to_dict(scen), sort_keys=True
    )


def test_schema_keys():
    doc = scenario_to_dict(small())
    required = {"atoms", "functions", "zero_id", "r", "seed", "replications"}
    assert required <= set(doc) <= required | {"truncation_note"}
    assert doc["atoms"][0] == {"id": "a", "mass": 1.0}
    assert doc["functions"][0]["id"] == "zero"
    noted = scenario_to_dict(make_example_ex(0.5, 2.0, 10))
    assert "truncation_note" in noted and noted["truncation_note"]


def test_validation_errors():
    with pytest.raises(ScenarioError):
        MeasureSpace(("a", "a"), np.array([1.0, 1.0]))  # duplicate ids
    with pytest.raises(ScenarioError):
        MeasureSpace(("a",), np.array([-1.0]))  # negative mass
    with pytest.raises(ScenarioError):
        MeasureSpace(("a",), np.array([np.inf]))
    with pytest.raises(ScenarioError):
        FunctionFamily(("zero", "t"), np.array([[0.0], [0.0]]), 0)  # duplicate rows
    with pytest.raises(ScenarioError):
        FunctionFamily(("t",), np.array([[1.0]]), 0)  # zero row is not zero
    with pytest.raises(ScenarioError):
        ScenarioConfig(
            MeasureSpace(("a",), np.array([1.0])),
            FunctionFamily(("zero", "t"), np.array([[0.0], [2.0]]), 0),
            r=3,  # r must be at least 4
        )


def test_malformed_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"nope": 1}')
    with pytest.raises(ScenarioError):
        load_scenario(p)
    p.write_text("{{{")
    with pytest.raises(ScenarioError):
        load_scenario(p)


def test_arrays_are_readonly():
    scen = small()
    with pytest.raises(ValueError):
        scen.measure.masses[0] = 9.0
    with pytest.raises(ValueError):
        scen.family.values[1, 0] = 9.0


def test_example_ex_construction():
    scen = make_example_ex(0.5, 2.0, 100)
    widths = scen.measure.masses
    assert widths.sum() == pytest.approx(1.5)
    t = scen.family.values[1]
    mids = np.linspace(0.5, 2.0, 101)
    mids = 0.5 * (mids[1:] + mids[:-1])
    assert np.allclose(t, mids**-2.0)
    assert np.array_equal(scen.family.values[2], -t)
    assert scen.family.values[0].sum() == 0.0
    assert scen.family.point_ids == ("zero", "t", "neg_t")


def test_random_scenario_shape():
    scen = random_scenario(4, n_atoms=7, n_points=5, scale=2.0)
    assert scen.family.values.shape == (5, 7)
    assert scen.family.zero_index == 0
    assert np.all(scen.measure.masses > 0)
    again = random_scenario(4, n_atoms=7, n_points=5, scale=2.0)
    assert np.array_equal(scen.family.values, again.family.values)
    other = random_scenario(5, n_atoms=7, n_points=5, scale=2.0)
    assert not np.array_equal(scen.family.values, other.family.values)
