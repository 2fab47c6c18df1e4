import json
import os

import numpy as np
import pytest

import boundselect as bs

CALIBRATED = np.array([0.08, 0.001, 0.001, 0.073, 0.139, 0.473])
DATA = os.environ.get("BOUNDSELECT_DATA", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def toy():
    rows = np.loadtxt(os.path.join(DATA, "toy.csv"), delimiter=",", skiprows=1, dtype=int)
    return bs.estimate_reduced_form(rows[:, 0].tolist(), rows[:, 1].tolist(), rows[:, 2].tolist())


def test_catalog_balke_pearl_interval():
    spec = bs.catalog_spec("balke-pearl")
    assert spec.L(0, CALIBRATED) == pytest.approx(0.391, abs=1e-12)
    assert spec.U(0, CALIBRATED) == pytest.approx(0.781, abs=1e-12)


def test_reduced_form_from_records():
    rf = toy()
    assert rf.n == 400
    assert rf.p_hat.shape == (6,)
    assert np.allclose(rf.sigma_hat, rf.sigma_hat.T)


def test_intervals_for_max_lower_selection():
    spec = bs.catalog_spec("manski-binary")
    rf = toy()
    sel = bs.rule_weighted(spec, rf, 1.0, 0.0)
    assert sel.poly_L.contains(rf.p_hat, 1e-9)
    cis = bs.intervals(spec, rf, sel, draws=20000)
    est = bs.estimate_bounds(spec, rf.p_hat)
    for kind, ci in cis.items():
        assert ci.lower <= est["L_hat"][sel.d_hat] <= est["U_hat"][sel.d_hat] <= ci.upper, kind
    assert cis["hybrid"].projection_contained
    assert json.loads(cis["hybrid"].to_json())["kind"] == "hybrid"


def test_lp_conversion_matches_catalog():
    lp = json.load(open(os.path.join(DATA, "balke_pearl_latent.json")))
    spec = bs.lp_to_bounds_spec(np.array(lp["A"], float), np.array(lp["B"], float))
    closed = bs.catalog_spec("balke-pearl")
    assert spec.L(0, CALIBRATED) == pytest.approx(closed.L(0, CALIBRATED), abs=1e-9)
    assert spec.U(0, CALIBRATED) == pytest.approx(closed.U(0, CALIBRATED), abs=1e-9)


def test_gauss_round_trip():
    target = bs.tn_cdf(0.4, 0.1, 1.0, -1.0, 2.0)
    mu = bs.solve_location(0.4, target, 1.0, -1.0, 2.0)
    assert mu == pytest.approx(0.1, abs=1e-6)
    assert bs.norm_quantile(0.975) == pytest.approx(1.959963984540054)


def test_errors_carry_codes():
    with pytest.raises(bs.BoundselectError) as info:
        bs.estimate_reduced_form([1, 0], [0, 1], [0, 1])
    assert info.value.args[0] == "STRATUM_MIN"
    with pytest.raises(bs.BoundselectError) as info:
        bs.catalog_spec("unknown")
    assert info.value.args[0] == "CONFIG_INVALID"


def test_simulate_is_deterministic():
    config = {
        "spec": "manski-binary", "rule": {"type": "maxlower"}, "reps": 30, "seed": 5,
        "draws": 2000, "dgps": [{"label": "cal", "p": CALIBRATED.tolist()}],
    }
    a = bs.simulate(config, threads=1)
    b = bs.simulate(config, threads=2)
    assert a["csv"] == b["csv"]
    assert json.loads(a["json"])["provenance"]["seed"] == 5
