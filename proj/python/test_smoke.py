"""Smoke tests for the sldlab python module (run with PYTHONPATH set to the
build output directory)."""

import json
import math
import sys
import tempfile

import sldlab


def approx(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def test_constants():
    assert approx(sldlab.poincare_flow(1.0, 1.0, sldlab.inf), 1.0)
    assert sldlab.logsobolev_flow(2.0, sldlab.inf) == 1.0
    assert sldlab.t2_constant(2.0, sldlab.inf) == 1.0
    assert approx(sldlab.superconvex_Kbeta(2.0, 1), 1.0)
    profile = [(0.01 + 0.05 * i, 1.0) for i in range(2000)]
    rate = sldlab.eberle_rate(profile)
    assert abs(rate["lambda"] - 0.25) < 1e-6
    assert not rate["no_rate"]


def test_model():
    fams = sldlab.potential_families()
    assert "quadratic" in fams and "perturbed_convex" in fams
    sc = sldlab.semiconvexity("quadratic", 1, {"lambda": 1.0})
    assert sc["mode"] == "analytic" and approx(sc["K"], 2.0)
    cert = sldlab.certify_superconvex("power", 1, {"beta": 2.0}, 2.0, 1.0,
                                      pairs=50000, seed=3)
    assert cert["holds"] and cert["violations"] == 0


def test_simulate_and_couple():
    out = sldlab.simulate("quadratic", 1, {"lambda": 1.0}, [0.0], h=1e-3,
                          T=1.0, n_paths=200, seed=9, observe=[1.0])
    assert out["times"] == [1.0]
    assert len(out["data"][0]) == 200
    assert sum(out["blown"]) == 0
    rep = sldlab.simulate("quadratic", 1, {"lambda": 1.0}, [0.0], h=1e-3,
                          T=1.0, n_paths=200, seed=9, observe=[1.0], workers=3)
    assert rep["data"] == out["data"], "worker count changed the trajectories"

    cp = sldlab.couple("quadratic", 1, {"lambda": 1.0}, "reflection",
                       [1.0], [-1.0], h=1e-3, T=2.0, n_paths=200, seed=4,
                       observe=[1.0, 2.0])
    assert cp["coupled_fraction"][1] >= cp["coupled_fraction"][0]
    assert cp["coupled_fraction"][1] > 0.5
    assert approx(cp["merge_threshold"], math.sqrt(1e-3))


def test_transport():
    a = [0.0, 1.0, 2.0]
    b = [0.5, 1.5, 2.5]
    assert approx(sldlab.wasserstein(a, b, d=1, p=2.0), 0.5)
    assert approx(sldlab.wasserstein(a, b, d=1, p=2.0, paper_half=True),
                  0.5 / math.sqrt(2.0))


def test_checks():
    res = sldlab.check_w_contraction("quadratic", 1, {"lambda": 1.0}, [2.0],
                                     [-1.0], [0.25, 0.5], p=2.0, h=1e-3,
                                     T=0.5, n_paths=200, seed=5)
    assert res["passed"]
    assert len(res["series"]) == 2
    t2 = sldlab.check_t2(2.0, sldlab.inf, [0.1, 1.0, 3.0])
    assert t2["passed"] and t2["stderr"] == 0.0


def test_run_config():
    config = {
        "kind": "check",
        "seed": 11,
        "spec": {"family": "quadratic", "d": 1, "params": {"lambda": 1.0}},
        "integrator": {"h": 1e-3, "T": 0.5, "n_paths": 200},
        "check": {"op": "w_contraction", "x": [2.0], "y": [-1.0],
                  "times": [0.25, 0.5]},
    }
    with tempfile.TemporaryDirectory() as tmp:
        out = sldlab.run_config(json.dumps(config), tmp)
        assert out["exit_code"] == 0
        assert "records.json" in out["files"]
        with open(f"{tmp}/records.json", encoding="utf-8") as fh:
            records = json.load(fh)
        assert records[0]["passed"] is True


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok: {t.__name__}")
    print(f"smoke: {len(tests)} tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
