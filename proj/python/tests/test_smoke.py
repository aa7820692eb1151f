import json
import math
from pathlib import Path

import numpy as np
import pytest

import castro

DATA = Path(__file__).resolve().parents[2] / "data"


def test_discrepancy_closed_forms():
    assert castro.centered_l2_discrepancy(np.array([[0.5]])) == pytest.approx(math.sqrt(1 / 12), abs=1e-12)
    assert castro.wraparound_l2_discrepancy(np.array([[0.3]])) == pytest.approx(math.sqrt(1 / 6), abs=1e-12)


def test_outside_unit_cube_raises():
    with pytest.raises(castro.DomainError):
        castro.centered_l2_discrepancy(np.array([[1.5, 0.2]]))


def test_latin_hypercube_strata():
    design = castro.latin_hypercube(10, 3, seed=4, engine="lhsmdu")
    assert design.shape == (10, 3)
    for col in design.T:
        assert sorted(np.floor(col * 10).astype(int)) == list(range(10))


def test_selection_and_rounding():
    cand = np.array([[0.0], [0.5], [1.0]])
    assert castro.farthest_from_data(cand, np.array([[0.0]]), 2) == [2, 1]
    rows, flagged = castro.round_and_renormalize(np.array([[0.3333, 0.3333, 0.3334]]), 2)
    assert rows.sum() == pytest.approx(1.0)
    assert flagged == []


def test_sample_four_components():
    problem = castro.Problem.load(str(DATA / "case4d.json"))
    assert problem.dimension == 4
    out = castro.sample(problem, data=str(DATA / "case4d_experiments.csv"), seed=3, engines=["lhs"])
    rec = out["recommendations"]["lhs"]
    assert rec["rows"].shape == (problem.budget, 4)
    np.testing.assert_allclose(rec["rows"].sum(axis=1), 1.0, atol=1e-9)
    assert rec["metrics"]["selected"]["cd"] > 0
    manifest = json.loads(out["manifest"])
    assert manifest["seed"] == 3
    again = castro.sample(problem, data=str(DATA / "case4d_experiments.csv"), seed=3, engines=["lhs"], threads=1)
    assert again["manifest"] == out["manifest"]


def test_bad_config():
    with pytest.raises(castro.ConfigError):
        castro.Problem.from_json('{"components": []}')
