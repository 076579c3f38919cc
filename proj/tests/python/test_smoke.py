"""Smoke tests for the python bindings: math primitives, the config-driven
run/verify front end, and trace determinism."""

import numpy as np
import pytest

import opsplit


def d1_config(output, max_iter=5000):
    return {
        "problem": {
            "kind": "inclusion",
            "dim": 1,
            "epsilon": 0.25,
            "operator_a": {
                "type": "normal_cone",
                "set": {"type": "box", "lower": [-1.0], "upper": [1.0]},
            },
            "operator_b": {"type": "identity"},
            "constraints": [{"type": "trivial"}],
        },
        "schedules": {
            "gamma": {"type": "constant", "value": 0.5},
            "errors": {"type": "summable", "coeff": 0.1, "power": 2.0},
        },
        "stop": {"max_iter": max_iter, "tol": 1e-8, "feas_tol": 1e-8},
        "x0": [2.0],
        "reference": [0.0],
        "output": str(output),
        "seed": 20260810,
    }


def test_projections():
    out = opsplit.project_box([-1.0, -1.0], [1.0, 1.0], [2.0, 0.5])
    assert np.allclose(out, [1.0, 0.5])

    out = opsplit.project_halfspace([1.0, 0.0], 0.0, [2.0, 3.0])
    assert np.allclose(out, [0.0, 3.0])

    out = opsplit.project_ball([0.0, 0.0], 1.0, [2.0, 0.0])
    assert np.allclose(out, [1.0, 0.0])

    assert opsplit.inner([1.0, 2.0], [3.0, 4.0]) == pytest.approx(11.0)


def test_prox_and_resolvents():
    assert opsplit.prox_abs(1.0, 2.0) == 1.0
    assert opsplit.prox_abs(1.0, 0.5) == 0.0

    skew = np.array([[0.0, -1.0], [1.0, 0.0]])
    q = opsplit.resolvent_affine(skew, [0.0, 0.0], 1.0, [1.0, 1.0])
    assert np.allclose(q, [1.0, 0.0])

    q = opsplit.resolvent_box([-1.0], [1.0], 7.0, [3.0])
    assert np.allclose(q, [1.0])

    assert opsplit.cyclic_index(3, 3) == 1


def test_oracles():
    sol = opsplit.solve_affine_kkt(
        np.eye(1), [0.0], [-1.0], [1.0])
    assert abs(sol["point"][0]) < 1e-12

    grid = opsplit.solve_vi_grid(
        [-1.0], [1.0], lambda x: x, resolution=101)
    assert abs(grid["point"][0]) < 1e-6


def test_run_converges(tmp_path):
    trace = tmp_path / "trace.csv"
    summary = opsplit.run(d1_config(trace))
    assert summary["status"] == "converged"
    assert abs(summary["solution"][0]) < 1e-4
    assert summary["trace_rows"] == summary["iterations"]
    header = trace.read_text().splitlines()[0]
    assert header == "n,residual,outer_gap,error_bound,dist_to_ref,feasibility_max"


def test_run_is_deterministic(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    opsplit.run(d1_config(first))
    opsplit.run(d1_config(second))
    assert first.read_bytes() == second.read_bytes()


def test_run_max_iter_status(tmp_path):
    summary = opsplit.run(d1_config(tmp_path / "t.csv", max_iter=1))
    assert summary["status"] == "max_iter"


def test_verify_reports(tmp_path):
    report = opsplit.verify(d1_config(tmp_path / "unused.csv"))
    assert report["all_pass"]
    assert any(c["check"] == "firmly-nonexpansive" for c in report["checks"])

    bad = d1_config(tmp_path / "unused2.csv")
    bad["problem"]["dim"] = 2
    bad["problem"]["operator_a"]["set"] = {
        "type": "box", "lower": [-1.0, -1.0], "upper": [1.0, 1.0]}
    bad["problem"]["operator_b"] = {
        "type": "linear", "matrix": [0.0, -1.0, 1.0, 0.0], "lipschitz": 0.5}
    bad["problem"]["constraints"] = [
        {"type": "affine", "normal": [1.0, 1.0], "offset": 0.0}]
    bad["x0"] = [2.0, 2.0]
    bad["reference"] = [0.0, 0.0]
    report = opsplit.verify(bad)
    assert not report["all_pass"]


def test_config_errors_raise():
    with pytest.raises(ValueError):
        opsplit.run({"problem": {"kind": "inclusion"}, "seed": 1})
