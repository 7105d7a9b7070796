import json
import math
from pathlib import Path

import numpy as np
import pytest

import rssd

ROOT = Path(__file__).resolve().parents[2]


def first_order(k, a, label=""):
    return rssd.Plant([[a]], [[1.0]], [[k]], [[0.0]], label)


def test_static_gap_closed_form():
    p1 = rssd.Plant.static_gain(np.array([[1.0]]))
    p2 = rssd.Plant.static_gain(np.array([[2.0]]))
    r = rssd.nu_gap(p1, p2)
    assert r["condition_met"]
    assert r["value"] == pytest.approx(1.0 / math.sqrt(10.0), rel=1e-9)


def test_central_plant_of_trio():
    plants, trim = rssd.load_plant_set(ROOT / "data" / "static_trio.json")
    r = rssd.central_plant(plants)
    assert r["index"] == 1
    assert r["gap_matrix"].shape == (3, 3)
    assert len(trim) == 3


def test_plant_set_round_trip():
    text = (ROOT / "data" / "synthetic_family.json").read_text()
    plants, trim = rssd.load_plant_set(ROOT / "data" / "synthetic_family.json")
    assert rssd.dump_plant_set(plants, trim) == text


def test_margins_for_integrator():
    p = first_order(1.0, 0.0)
    k = np.array([[-1.0]])
    assert rssd.is_internally_stable(p, k)
    assert rssd.closed_loop_matrix(p, k)[0, 0] == pytest.approx(-1.0)
    assert rssd.gsm(p, k) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-6)
    m = rssd.disk_margin(p, k)
    assert m["disk_alpha"] > 1.0
    norm, _ = rssd.linf_norm(first_order(2.0, -1.0))
    assert norm == pytest.approx(2.0, rel=1e-6)


def test_errors_carry_codes():
    p = first_order(1.0, -1.0)
    with pytest.raises(rssd.RssdError) as info:
        rssd.gsm(p, np.zeros((2, 2)))
    assert info.value.code == "DimensionMismatch"


def test_simulate_step():
    p = first_order(1.0, -1.0)
    scenario = {"name": "step", "duration": 2.0, "dt": 1e-3,
                "reference": [{"kind": "step", "magnitude": 1.0}]}
    tr = rssd.simulate(p, np.array([[-1.0]]), scenario)
    assert not tr["diverged"]
    assert tr["output"][-1, 0] == pytest.approx(0.5 * (1 - math.exp(-4.0)), rel=1e-8)


def test_synthesize_is_deterministic():
    plants, _ = rssd.load_plant_set(ROOT / "data" / "synthetic_family.json")
    config = json.loads((ROOT / "configs" / "synthetic.json").read_text())
    a = rssd.synthesize(plants, config)
    b = rssd.synthesize(plants, config, seed=config["seed"])
    assert a["feasible"]
    assert a == b
    config["ga_scp"]["max_generations"] = 0
    assert rssd.synthesize(plants, config)["feasible"] is False
