"""The ten acceptance criteria at their stated tolerances and runtime budgets.

Each test prints one ``criterion N: PASS|FAIL`` line (also collected into the
terminal summary) and then asserts the same verdict.
"""
import time

import numpy as np

from tractorlab.experiments import emit_report, run_experiment
from tractorlab.homogeneous import ModelSpace, line_monodromy, model_loop, quadric_tractor_holonomy

from conftest import ACCEPTANCE_LINES


def _timed(ids):
    t = time.perf_counter()
    recs = [run_experiment(i) for i in ids]
    return recs, time.perf_counter() - t


def _verdict(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _failures(recs):
    return [f"{r.experiment} [{r.invariant}: {r.measured} vs {r.tolerance}]" for r in recs if not r.passed]


def test_criterion_1_metric_preservation():
    ids = ["metric-preservation-flat-2-3", "metric-preservation-sphere-5",
           "metric-preservation-product_sphere-2-3", "metric-preservation-generic_poly-2-3"]
    recs, dt = _timed(ids)
    drift = max(c["measured"] for r in recs for c in r.checks if c["name"].startswith("h(U, U)"))
    shrink = min(c["measured"] for r in recs for c in r.checks if c["name"].startswith("drift shrink"))
    ok = all(r.passed for r in recs) and dt < 30
    _verdict(1, ok, f"max drift {drift:.2e} (< 1e-7), min shrink {shrink:.3g} (>= 8), {dt:.1f} s (< 30 s)"
             + (f"; failing: {_failures(recs)}" if _failures(recs) else ""))


def test_criterion_2_conformal_invariance():
    recs, dt = _timed(["conformal-invariance-generic_poly-2-3"])
    r = recs[0]
    _verdict(2, r.passed and dt < 30, f"worst {r.measured:.2e} (< 1e-6) over 10 pairs, {dt:.1f} s (< 30 s)")


def test_criterion_3_flatness():
    recs, dt = _timed([f"sphere-flatness-{n}" for n in (3, 4, 5)])
    worst = {c["name"]: 0.0 for c in recs[0].checks}
    for r in recs:
        for c in r.checks:
            worst[c["name"]] = max(worst[c["name"]], c["measured"])
    _verdict(3, all(r.passed for r in recs),
             f"curvature {worst['tractor curvature vanishes']:.2e}, "
             f"holonomy {worst['contractible-loop holonomy is I']:.2e} (< 1e-6), {dt:.1f} s")


def test_criterion_4_quadric_holonomy():
    errs = {}
    for pq in ((1, 2), (2, 3)):
        H = quadric_tractor_holonomy(*pq)
        errs[pq] = float(np.max(np.abs(H + np.eye(sum(pq) + 2))))
    _verdict(4, all(e < 1e-5 for e in errs.values()),
             ", ".join(f"{pq}: |H + I| = {e:.2e}" for pq, e in errs.items()) + " (< 1e-5)")


def test_criterion_5_trivial_associated_holonomy():
    ids = [f"{kind}-{pq}" for pq in ("(1,2)", "(2,3)") for kind in ("mc-trivial-holonomy", "quadric-holonomy")]
    recs, dt = _timed(ids)
    report = emit_report(recs)
    mc = [r for r in recs if r.experiment.startswith("mc-")]
    tr = [r for r in recs if r.experiment.startswith("quadric-")]
    worst = max(c["measured"] for r in mc for c in r.checks if c["name"].endswith("is I"))
    ok = all(r.passed for r in recs) and report.count("\n{") + report.startswith("{") == 4
    _verdict(5, ok, f"associated holonomy |H - I| <= {worst:.2e} (< 1e-6) beside tractor holonomy -I "
                    f"({', '.join(r.status for r in tr)}) in one report")


def test_criterion_6_line_monodromy():
    got = {}
    for pq in ((1, 2), (2, 3)):
        m = ModelSpace("quadric", *pq)
        got[pq] = tuple(line_monodromy(model_loop(m, i)) for i in ("antipodal", "control-arc", "control-backtrack"))
    _verdict(6, all(v == (-1, 1, 1) for v in got.values()),
             "; ".join(f"{pq}: antipodal {v[0]:+d}, controls {v[1]:+d} {v[2]:+d}" for pq, v in got.items()))


def test_criterion_7_ambient():
    recs, dt = _timed(["ambient-vs-beg-flat-2-3", "ambient-vs-beg-sphere-4"])
    ric = max(r.checks[0]["measured"] for r in recs)
    conn = max(r.checks[1]["measured"] for r in recs)
    _verdict(7, all(r.passed for r in recs) and dt < 60,
             f"tangential Ricci {ric:.2e}, connection {conn:.2e} (< 1e-6), {dt:.1f} s (< 60 s)")


def test_criterion_8_group_suite():
    recs, dt = _timed(["group-suite-(1,2)", "group-suite-(2,2)", "group-suite-(2,3)"])
    _verdict(8, all(r.passed for r in recs) and dt < 10,
             f"3 signatures x 1000 trials, {dt:.1f} s (< 10 s)"
             + (f"; failing: {_failures(recs)}" if _failures(recs) else ""))


def test_criterion_9_compatibility():
    r = run_experiment("compatibility-tau")
    _verdict(9, r.passed, f"worst residual {r.measured:.2e} (< 1e-8) over all registered charts")


def test_criterion_10_curvature_structure():
    recs, dt = _timed(["curvature-structure-product_sphere-2-2", "curvature-structure-generic_poly-2-3",
                       "curvature-structure-riemannian_product_sphere-2-2"])
    worst = {}
    for r in recs:
        for c in r.checks:
            worst[c["name"]] = max(worst.get(c["name"], 0.0), c["measured"])
    _verdict(10, all(r.passed for r in recs),
             ", ".join(f"{short} {v:.1e}" for short, v in zip(("zero blocks", "Weyl", "top Cotton", "right Cotton"),
                                                               worst.values())) + " (< 1e-7 / 1e-6)")
