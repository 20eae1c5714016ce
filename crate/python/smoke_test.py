#!/usr/bin/env python3
"""Smoke test for the resifront_py extension module.

Builds nothing itself: run `cargo build --release -p resifront-python`
first, then `python3 python/smoke_test.py`. The script copies the cdylib
next to a temp directory under the importable name and checks a few
known values end to end.
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    so = REPO / "target" / "release" / "libresifront_py.so"
    if not so.exists():
        sys.exit(f"{so} not found; run `cargo build --release -p resifront-python` first")
    tmp = Path(tempfile.mkdtemp(prefix="resifront_py_"))
    shutil.copy2(so, tmp / "resifront_py.so")
    sys.path.insert(0, str(tmp))
    import resifront_py

    return resifront_py


def approx(a, b, rtol):
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


def main():
    m = load_module()
    base = {
        "nonlinearity": {"kind": "logistic", "r": 1.0},
        "alpha": 0.4,
        "h0": 1.0,
        "sigma": 2.0,
        "n": 160,
        "x_max": 30.0,
        "t_horizon": 40.0,
    }
    checks = 0

    # Stationary classification: alpha0 = sqrt(2 sup F) = sqrt(1/3) for
    # the logistic, and the arch peak B solves alpha^2 = 2 F(B).
    sc = json.loads(m.stationary(json.dumps(base)))
    case = sc["case"]
    assert case["case"] == "compact_support", sc
    assert approx(sc["critical_alpha"], math.sqrt(1.0 / 3.0), 1e-12), sc
    assert approx(case["peak"], 0.48666350392324398, 1e-8), sc
    assert approx(case["half_width"], 2.0574069661654421, 1e-8), sc
    checks += 1

    # Sampled profile hits the peak at the midpoint and 0 at the ends.
    prof = json.loads(m.profile(json.dumps(base), 200))
    assert len(prof["xs"]) == 201 and len(prof["vs"]) == 201
    assert prof["vs"][0] == 0.0 and prof["vs"][-1] == 0.0
    assert approx(max(prof["vs"]), case["peak"], 1e-6)
    checks += 1

    # Semi-wave speed against the frozen shooting value.
    wave = json.loads(m.solve_cstar(json.dumps(base)))
    assert approx(wave["c_star"], 0.109230298529, 1e-6), wave["c_star"]
    assert wave["bracket"][1] - wave["bracket"][0] <= 1e-9
    checks += 1

    # A sigma = 2 cosine hump under this resistance dies; classify agrees.
    out = json.loads(m.classify(json.dumps(base)))
    assert out["verdict"] == "vanishing", out
    assert out["t_star"] < base["t_horizon"]
    traj = json.loads(m.simulate(json.dumps(base)))
    assert traj["termination"]["kind"] == "shrink_vanish", traj["termination"]
    assert approx(out["t_star"], traj["termination"]["t_star"], 1e-12)
    checks += 1

    # Supercritical resistance fires the a-priori certificate; the
    # moderate run above does not.
    hot = dict(base, alpha=0.9)
    cert = json.loads(m.vanishing_certificate(json.dumps(hot)))
    assert cert is not None and cert["reason"] == "alpha_above_critical", cert
    assert json.loads(m.vanishing_certificate(json.dumps(base))) is None
    checks += 1

    # Threshold bracket on a coarse budget: sigma* for this family sits
    # between the vanishing run at 2 and the spreading run at 8.
    opts = {"tol": 0.05, "sigma_cap": 64.0, "sigma_floor": 1e-3, "max_doublings": 2}
    thr = json.loads(m.find_sigma_star(json.dumps(dict(base, t_horizon=50.0)), json.dumps(opts)))
    assert not thr["sigma_star_infinite"] and not thr["inconclusive"], thr
    assert 2.0 < thr["sigma_lo"] < thr["sigma_hi"] < 8.0, (thr["sigma_lo"], thr["sigma_hi"])
    rel = (thr["sigma_hi"] - thr["bracket_lo"]) / (0.5 * (thr["sigma_hi"] + thr["bracket_lo"]))
    assert rel <= 0.05, rel
    checks += 1

    # Bad input surfaces as ValueError, not a crash.
    try:
        m.simulate('{"alpha": -1}')
    except ValueError:
        checks += 1
    else:
        raise AssertionError("invalid config should raise ValueError")

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
