#!/usr/bin/env python3
"""Smoke test for the pfr_py extension module.

Builds nothing itself: run `cargo build -p pfr-py` (or --release) first,
then `python3 python/smoke_test.py`. The script locates the cdylib in the
workspace target directory, imports it, and exercises the main types and
operations end to end.
"""

import json
import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load_module():
    candidates = [
        os.path.join(ROOT, "target", profile, name)
        for profile in ("release", "debug")
        for name in ("libpfr_py.so", "pfr_py.so", "libpfr_py.dylib")
    ]
    built = next((c for c in candidates if os.path.exists(c)), None)
    if built is None:
        sys.exit("pfr_py cdylib not found; run `cargo build -p pfr-py` first")
    stage = tempfile.mkdtemp(prefix="pfr-py-")
    shutil.copy(built, os.path.join(stage, "pfr_py.so"))
    sys.path.insert(0, stage)
    import pfr_py

    return pfr_py


CHECKS = []


def check(name, ok, detail=""):
    CHECKS.append(ok)
    print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))


def main():
    pfr = load_module()

    # grid and curve basics
    grid = pfr.Grid()
    check("default grid", grid.n_points == 2048 and abs(grid.t_end - 2 * math.pi) < 1e-12)
    c1 = grid.cosine(1)
    c2 = grid.cosine(2)
    check("cosine orthogonality", abs(c1.l2_inner(c2)) < 1e-6)
    check("cosine norm", abs(c1.l2_norm() - math.sqrt(math.pi)) < 1e-6)

    # dataset and the closed-form response
    curves, responses, xi = pfr.make_dataset(30, seed=1)
    check("dataset size", len(curves) == 30 and len(responses) == 30 and len(xi[0]) == 6)
    oracle_gap = max(abs(pfr.response_oracle(row) - y) for row, y in zip(xi, responses))
    check("responses match oracle", oracle_gap < 1e-6, f"max gap {oracle_gap:.2e}")

    # coefficient recovery at lambda = 1e-9, q = 4 (N = 30 is past the
    # 28-dimensional identifiability threshold)
    model = pfr.fit_iterated(curves, responses, 1e-9, 2, q=4)
    check("intercept recovered", abs(model.b0 - 2.0) < 1e-4, f"b0 = {model.b0:.8f}")
    u1 = [model.cosine_projection(1, [k]) for k in range(6)]
    u1_target = [1.0, 1.0, 0.0, 0.0, 0.0, 1.0]
    u1_gap = max(abs(a - b) for a, b in zip(u1, u1_target))
    check("degree-1 coefficients recovered", u1_gap < 1e-4, f"max gap {u1_gap:.2e}")
    u2_22 = model.cosine_projection(2, [2, 2])
    check("degree-2 (2,2) coefficient recovered", abs(u2_22 - 1.0) < 1e-4, f"{u2_22:.8f}")
    betas = [abs(model.cosine_projection(2, [k, k])) for k in (1, 3, 4, 5)]
    check("off-target diagonal coefficients tiny", max(betas) < 1e-6, f"max {max(betas):.2e}")

    # truth error and prediction on held-out data
    truth = pfr.Truth.standard_quadratic()
    err = model.truth_error(truth)
    check("exact L2 error small", err < 1e-4, f"{err:.2e}")
    held_curves, held_responses, _ = pfr.make_dataset(3, seed=999)
    pred_gap = max(abs(model.predict(c) - y) for c, y in zip(held_curves, held_responses))
    check("held-out prediction", pred_gap < 1e-3, f"max gap {pred_gap:.2e}")

    # spectral path agrees with the recurrence
    spectral = pfr.fit_spectral(curves, responses, 1e-3, 2, scheme="iterated_tikhonov",
                                iterations=4, min_norm=False)
    recurrence = pfr.fit_iterated(curves, responses, 1e-3, 2, q=4)
    path_gap = max(abs(a - b) for a, b in zip(spectral.b, recurrence.b))
    check("spectral vs recurrence", path_gap < 1e-10, f"max gap {path_gap:.2e}")

    # serialization round trip
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "model.json")
        model.save(path)
        back = pfr.Model.load(path)
        check("save/load round trip", back.b0 == model.b0 and back.b == model.b)

    # diagnostics
    spectrum = model.spectrum()
    check("spectrum sorted", all(a >= b for a, b in zip(spectrum, spectrum[1:])))
    eff = pfr.effective_dimension(spectrum, 1e-3)
    check("effective dimension bounded", 0.0 < eff <= len(spectrum), f"{eff:.3f}")
    ls = pfr.lambda_star(spectrum, 30)
    check("resolution limit inequality", 30 * ls >= 0.5 - 1e-9, f"lambda* = {ls:.4e}")
    check("rate exponents", pfr.rate_exponent(1.0, 1.0) == (-0.25, -0.75, -0.25))
    rep = pfr.qualification_report("iterated_tikhonov", 1e-2, 4.0, iterations=4)
    check("iterated qualification holds", rep["gamma_q"] <= 1.0 + 1e-12,
          f"gamma_q = {rep['gamma_q']:.6f}")
    rep2 = pfr.qualification_report("tikhonov", 1e-2, 2.0)
    check("tikhonov q=2 flagged", rep2["exceeds_qualification"],
          f"gamma_q = {rep2['gamma_q']:.1f}")

    # sweep runner through the config JSON interface
    config = json.dumps({
        "seeds": [1, 2],
        "n_range": {"start": 2, "end": 8},
        "mc_samples": 16,
        "grid": {"t_start": 0.0, "t_end": 2 * math.pi, "n_points": 256},
    })
    csv = pfr.error_curve_csv(config)
    lines = csv.strip().splitlines()
    check("sweep CSV schema", lines[0] == "seed,N,lambda,q,p,l2_error,excess_risk,wall_ms")
    check("sweep CSV rows", len(lines) - 1 == 2 * 7 * 3, f"{len(lines) - 1} rows")

    failed = CHECKS.count(False)
    print(f"\n{len(CHECKS) - failed}/{len(CHECKS)} checks passed")
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
