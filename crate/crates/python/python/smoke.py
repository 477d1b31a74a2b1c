"""Smoke test for the pyoptcs extension.

Build and run from the repository root:

    cargo build -p optcs-python --features extension-module --release
    cp target/release/libpyoptcs.so crates/python/python/pyoptcs.so
    python3 crates/python/python/smoke.py
"""

import json
import math

import pyoptcs


def main():
    assert pyoptcs.bh([0.01, 0.02, 0.5], 0.1) == [0, 1]
    assert pyoptcs.conformal_pvalue([1.0, 2.0, 3.0], 2.0) == 0.75

    sel = pyoptcs.optcs_select([0.01, 0.02, 0.9], [2.0, 2.0, 5.0], 0.3, "dtm")
    assert sel.selected == [0, 1] and sel.r_star == 2

    x, y = pyoptcs.sample_dgp("jin_cls_2", 120, seed=4)
    assert len(x) == 120 and len(x[0]) == 10
    assert set(y) <= {0.0, 1.0}
    x_test, y_test = pyoptcs.sample_dgp("jin_cls_2", 20, seed=5)
    problem = pyoptcs.Problem(x, y, x_test, n1=40, y_test=y_test)
    assert (problem.n1, problem.n2, problem.m, problem.dim) == (40, 80, 20, 10)

    ridge = {"trainer": {"family": "ridge", "lambda": 1.0}, "score": {"kind": "clipped_mean"}}
    const = {"trainer": {"family": "constant_mean"}, "score": {"kind": "clipped_mean"}}
    for kind in ["scs", "optcs_msel", "optcs_full"]:
        spec = json.dumps({"kind": kind, "candidates": [ridge, const]})
        out = pyoptcs.run_procedure(spec, problem, 0.3, "homo", 1)
        assert len(out.pvalues) == 20
        assert all(0.0 < p <= 1.0 for p in out.pvalues)
        assert set(out.selected) <= set(pyoptcs.bh(out.pvalues, 0.3))

    config = {
        "dgp": {"family": "jin_cls_1"},
        "split": {"n1": 20, "n2": 30, "m": 10},
        "procedures": [{"kind": "scs", "candidates": [ridge]}],
        "q_grid": [0.3],
        "reps": 3,
        "seed": 2,
    }
    summaries = json.loads(pyoptcs.simulate(json.dumps(config)))
    assert len(summaries) == 1 and math.isfinite(summaries[0]["mean_fdr"])

    try:
        pyoptcs.bh([0.1], 0.2) and pyoptcs.optcs_select([0.1], [1.0], 1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("q outside (0,1) must raise")

    print("pyoptcs", pyoptcs.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
