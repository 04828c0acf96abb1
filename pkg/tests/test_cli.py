"""Command line front end, driven in process through cli.main."""

from __future__ import annotations

import json
import os

import pytest

from cat0flow import checks, cli
from cat0flow.errors import SolverError


def _cfg(tmp_path, obj, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf8")
    return str(path)


def _run(capsys, argv):
    rc = cli.main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def _flow_config():
    return {
        "space": {"kind": "euclidean", "dim": 1},
        "functional": {"kind": "linear_drift"},
        "x0": [2.0],
        "horizon": 0.5,
        "scheme": {"euler_proximal": {"h": 0.01}},
    }


def _pursue_config(keyframes, x0, horizon, h, capture_eps):
    return {
        "space": {"kind": "euclidean", "dim": 2},
        "target": {"kind": "point", "keyframes": keyframes},
        "x0": x0,
        "horizon": horizon,
        "scheme": {"euler_proximal": {"h": h}},
        "capture_eps": capture_eps,
    }


def test_flow_writes_trajectory_and_report(tmp_path, capsys):
    cfg = _cfg(tmp_path, _flow_config())
    rc, out, err = _run(capsys, ["flow", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 0 and err == ""
    assert "flow: completed" in out

    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,x,F,grad_norm"
    assert len(lines) >= 50
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["scheme"] == "euler_proximal"
    assert report["termination"]["kind"] == "completed"
    assert report["outputs"] == {"trajectory_csv": "trajectory.csv"}


def test_flow_dyadic_reports_error_bound(tmp_path, capsys):
    obj = _flow_config()
    obj["scheme"] = {"dyadic": {"n": 3, "m": 2}}
    cfg = _cfg(tmp_path, obj)
    rc, out, _ = _run(capsys, ["flow", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["scheme"] == "dyadic" and report["n"] == 3
    assert report["error_bound"] > 0.0
    assert report["constants"]["Bprime"] >= report["constants"]["B"]


def test_flow_reruns_are_byte_identical(tmp_path, capsys):
    cfg = _cfg(tmp_path, _flow_config())
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run(capsys, ["flow", "--config", cfg, "--out", str(a)])[0] == 0
    assert _run(capsys, ["flow", "--config", cfg, "--out", str(b)])[0] == 0
    for name in ("trajectory.csv", "report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize(
    "mutate,fragment",
    [
        (lambda c: c.update(bogus=1), "config.bogus: unknown field"),
        (lambda c: c.pop("horizon"), "config.horizon: required field is missing"),
        (lambda c: c.update(horizon=-1.0), "config.horizon: must be positive"),
        (lambda c: c.update(t0="0"), "config.t0: expected a number, got str"),
        (lambda c: c.update(record_every=0), "config.record_every: must be >= 1"),
        (lambda c: c.update(scheme={}), "scheme: expected exactly one of"),
        (lambda c: c.update(scheme={"euler_proximal": {}}), "scheme.euler_proximal.h: required"),
        (lambda c: c.update(scheme={"dyadic": {"n": -1}}), "scheme.dyadic.n"),
        (lambda c: c.update(functional={"kind": "zippy"}), "functional.kind: unknown functional kind"),
        (lambda c: c.update(space={"kind": "torus"}), "space.kind"),
        (lambda c: c.update(x0=[1.0, 2.0]), "x0"),
    ],
)
def test_flow_config_rejections_name_the_field(tmp_path, capsys, mutate, fragment):
    obj = _flow_config()
    mutate(obj)
    cfg = _cfg(tmp_path, obj)
    rc, _, err = _run(capsys, ["flow", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 2
    assert fragment in err


def test_config_file_problems(tmp_path, capsys):
    rc, _, err = _run(capsys, ["flow", "--config", str(tmp_path / "nope.json")])
    assert rc == 2 and "cannot read" in err

    bad = tmp_path / "bad.json"
    bad.write_text("{oops", encoding="utf8")
    rc, _, err = _run(capsys, ["flow", "--config", str(bad)])
    assert rc == 2 and "invalid JSON" in err


def test_pursue_captures_static_point(tmp_path, capsys):
    frames = [[0.0, [0.0, 0.0]], [4.0, [0.0, 0.0]]]
    cfg = _cfg(tmp_path, _pursue_config(frames, [2.0, 0.0], 4.0, 0.01, 0.05))
    rc, out, err = _run(capsys, ["pursue", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 0 and err == ""
    assert "pursue: captured" in out

    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,x,y,gap"
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["capture_eps"] == 0.05
    assert abs(report["initial_gap"] - 2.0) < 1e-12
    assert report["termination"]["kind"] == "captured"


def test_pursue_rejects_overdriven_keyframes(tmp_path, capsys):
    # keyframe speed 5 is caught while the target is built
    frames = [[0.0, [0.0, 0.0]], [1.0, [5.0, 0.0]]]
    cfg = _cfg(tmp_path, _pursue_config(frames, [3.0, 0.0], 1.0, 0.01, 0.01))
    rc, _, err = _run(capsys, ["pursue", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 2
    assert "faster than unit speed" in err


def test_pursue_contract_violation_exit_3(tmp_path, capsys):
    # Swapped segment endpoints have Hausdorff distance zero, so the
    # keyframes pass, but the interpolant pinches to a point mid-interval
    # and the sampled gap outruns unit speed.
    obj = {
        "space": {"kind": "euclidean", "dim": 2},
        "target": {
            "kind": "segment",
            "keyframes": [
                [0.0, [[-1.0, 0.0], [1.0, 0.0]]],
                [0.1, [[1.0, 0.0], [-1.0, 0.0]]],
            ],
        },
        "x0": [3.0, 0.0],
        "horizon": 0.1,
        "scheme": {"euler_proximal": {"h": 0.01}},
        "capture_eps": 0.01,
    }
    cfg = _cfg(tmp_path, obj)
    rc, _, err = _run(capsys, ["pursue", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 3
    assert "contract violation" in err and "unit speed" in err


def test_pursue_bad_target_kind(tmp_path, capsys):
    obj = _pursue_config([[0.0, [0.0, 0.0]]], [1.0, 0.0], 1.0, 0.01, 0.01)
    obj["target"] = {"kind": "ghost"}
    cfg = _cfg(tmp_path, obj)
    rc, _, err = _run(capsys, ["pursue", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 2
    assert "target.kind" in err


def test_barycenter_subcommand(tmp_path, capsys):
    obj = {
        "space": {"kind": "euclidean", "dim": 2},
        "evaders": [
            {"kind": "point", "keyframes": [[0.0, [0.0, 0.0]], [2.0, [0.0, 0.0]]]},
            {"kind": "point", "keyframes": [[0.0, [2.0, 0.0]], [2.0, [2.0, 0.0]]]},
        ],
        "x0": [1.0, 1.0],
        "horizon": 2.0,
        "scheme": {"euler_proximal": {"h": 0.02}},
        "capture_eps": 0.05,
    }
    cfg = _cfg(tmp_path, obj)
    rc, out, err = _run(capsys, ["barycenter", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 0 and err == ""
    assert "barycenter: captured" in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert abs(report["initial_gap"] - 1.0) < 1e-12


def test_barycenter_rejects_non_point_evaders(tmp_path, capsys):
    obj = {
        "space": {"kind": "euclidean", "dim": 2},
        "evaders": [{"kind": "ball", "keyframes": [[0.0, {"center": [0.0, 0.0], "radius": 1.0}]]}],
        "x0": [3.0, 0.0],
        "horizon": 1.0,
        "scheme": {"euler_proximal": {"h": 0.01}},
        "capture_eps": 0.01,
    }
    cfg = _cfg(tmp_path, obj)
    rc, _, err = _run(capsys, ["barycenter", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 2
    assert "evaders[0].kind" in err


def test_check_list_names_every_suite(capsys):
    rc, out, err = _run(capsys, ["check", "--list"])
    assert rc == 0 and err == ""
    assert out.splitlines() == list(checks.SUITES)


def test_check_all_suites_small_samples(tmp_path, capsys):
    rc, out, err = _run(capsys, ["check", "--samples", "5", "--seed", "3", "--jobs", "2"])
    assert rc == 0 and err == ""
    report = json.loads(out)
    assert report["seed"] == 3 and report["suites"] == ["all"]
    assert report["failures"] == 0
    assert report["results"] and all(r["pass"] for r in report["results"])


def test_check_single_suite_writes_report(tmp_path, capsys):
    rc, out, _ = _run(
        capsys, ["check", "contraction", "--samples", "5", "--out", str(tmp_path)]
    )
    assert rc == 0
    on_disk = json.loads((tmp_path / "check_report.json").read_text())
    assert on_disk == json.loads(out)
    assert on_disk["suites"] == ["contraction"]
    assert all(r["invariant"].startswith("contraction") for r in on_disk["results"])


def test_check_unknown_suite(capsys):
    rc, _, err = _run(capsys, ["check", "nonsense"])
    assert rc == 2
    assert "unknown suite 'nonsense'" in err


def test_check_failures_exit_3(capsys, monkeypatch):
    def doomed(seed=0, samples=2):
        return [{"invariant": "doom:never", "samples": samples, "worst_slack": -0.5, "pass": False}]

    monkeypatch.setitem(checks.SUITES, "doom", doomed)
    rc, out, err = _run(capsys, ["check", "doom"])
    assert rc == 3
    assert json.loads(out)["failures"] == 1
    assert "1 invariant(s) failed" in err and "doom:never" in err


def test_convergence_table_and_fitted_order(tmp_path, capsys):
    obj = {
        "space": {"kind": "euclidean", "dim": 1},
        "functional": {"kind": "linear_drift"},
        "x0": [1.0],
        "horizon": 0.5,
        "levels": [2, 3, 4],
        "m": 2,
    }
    cfg = _cfg(tmp_path, obj)
    rc, out, err = _run(capsys, ["convergence", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 0 and err == ""

    lines = (tmp_path / "convergence.csv").read_text().splitlines()
    assert lines[0] == "n,measured,predicted,ratio"
    assert len(lines) == 4
    assert lines[1].split(",")[3] == "nan"  # no ratio for the first level

    report = json.loads((tmp_path / "report.json").read_text())
    assert report["within_bound"] is True
    assert report["fitted_order"] is None or report["fitted_order"] > 0.5
    assert "fitted order" in out


def test_convergence_rejects_bad_levels(tmp_path, capsys):
    obj = {
        "space": {"kind": "euclidean", "dim": 1},
        "functional": {"kind": "linear_drift"},
        "x0": [1.0],
        "horizon": 0.5,
        "levels": [2, -3],
    }
    cfg = _cfg(tmp_path, obj)
    rc, _, err = _run(capsys, ["convergence", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 2
    assert "config.levels" in err


def test_resolve_reports_step_and_oracle(tmp_path, capsys):
    obj = {
        "space": {"kind": "euclidean", "dim": 2},
        "functional": {"kind": "sum_squared", "anchors": [[0.0, 0.0], [2.0, 0.0]]},
        "x0": [1.0, 1.0],
        "h": 0.25,
        "oracle_pitch": 2e-3,
    }
    cfg = _cfg(tmp_path, obj)
    rc, out, err = _run(capsys, ["resolve", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 0 and err == ""
    report = json.loads(out)
    # mean anchor is (1, 0); the analytic step is (x + 2 h m) / (1 + 2 h)
    assert abs(report["moved"] - 1.0 / 3.0) < 1e-12
    assert report["value_after"] < report["value_before"]
    assert report["oracle"]["gap"] <= 5e-3
    assert json.loads((tmp_path / "resolve_report.json").read_text()) == report


def test_resolve_without_oracle_block(tmp_path, capsys):
    obj = {
        "space": {"kind": "euclidean", "dim": 2},
        "functional": {"kind": "sum_squared", "anchors": [[0.0, 0.0]]},
        "x0": [1.0, 1.0],
        "h": 0.5,
    }
    cfg = _cfg(tmp_path, obj)
    rc, out, _ = _run(capsys, ["resolve", "--config", cfg])
    assert rc == 0
    assert "oracle" not in json.loads(out)


def test_resolve_solver_failure_exit_4(tmp_path, capsys, monkeypatch):
    def explode(f, t0, x0, h):
        raise SolverError("forced failure")

    monkeypatch.setattr(cli, "resolve", explode)
    obj = {
        "space": {"kind": "euclidean", "dim": 1},
        "functional": {"kind": "linear_drift"},
        "x0": [1.0],
        "h": 0.1,
    }
    cfg = _cfg(tmp_path, obj)
    rc, _, err = _run(capsys, ["resolve", "--config", cfg])
    assert rc == 4
    assert "solver failure: forced failure" in err


def test_resolve_rejects_nonpositive_h(tmp_path, capsys):
    obj = {
        "space": {"kind": "euclidean", "dim": 1},
        "functional": {"kind": "linear_drift"},
        "x0": [1.0],
        "h": -0.1,
    }
    cfg = _cfg(tmp_path, obj)
    rc, _, err = _run(capsys, ["resolve", "--config", cfg])
    assert rc == 2
    assert "config.h: must be positive" in err
