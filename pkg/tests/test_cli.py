import json

import numpy as np
import pytest

from forcedcoag import ExampleParams, exact_c1, exact_c2
from forcedcoag.cli import main
from forcedcoag.config import load_config, parse_config
from forcedcoag.errors import ConfigError
from forcedcoag.io import (read_equilibrium_csv, read_trajectory_csv, write_equilibrium_csv,
                           write_trajectory_csv)

EXAMPLE = {
    "schema_version": 1,
    "kernel": {"family": "constant-monomer", "A": 1.0},
    "removal": {"family": "power-law", "R": 1.0, "gamma": 1.0},
    "source": {"family": "finite-support", "entries": [[1, 1.0], [2, 0.5]]},
    "N": 16,
    "initial": {"type": "zero"},
    "integrator": {"t_end": 10.0, "rel_tol": 1e-11, "abs_tol": 1e-13, "n_samples": 41},
}


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_simulate_example_matches_oracle(tmp_path):
    out = tmp_path / "out"
    assert main(["simulate", "--config", _write(tmp_path, EXAMPLE), "--out", str(out)]) == 0
    cfg = load_config(tmp_path / "cfg.json")
    traj = read_trajectory_csv(out / "trajectory.csv", cfg.system)
    p = ExampleParams()
    for s in traj.samples[1:]:
        assert s.c[0] == pytest.approx(exact_c1(p, s.t), rel=1e-8)
        assert s.c[1] == pytest.approx(exact_c2(p, s.t), rel=1e-8)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["all_bounds_ok"] and summary["bounds_enabled"]
    assert summary["bound_checks"]["general"]["checked"] > 0
    assert (out / "moments.csv").exists()


def test_simulate_zero_source_zero_data(tmp_path, capsys):
    cfg = dict(EXAMPLE, source={"family": "monomer-only", "s1": 0.0})
    out = tmp_path / "out"
    assert main(["simulate", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 0
    assert "warning" in capsys.readouterr().err
    traj = read_trajectory_csv(out / "trajectory.csv", load_config(tmp_path / "cfg.json").system)
    assert not traj.values.any()
    assert json.loads((out / "summary.json").read_text())["bound_checks"] is None


def test_malformed_config_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"schema_version": 1,\n "N": 4,,}')
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().err


@pytest.mark.parametrize("patch, field", [
    ({"N": 0}, "N"),
    ({"kernel": {"family": "brownian", "typo": 1}}, "kernel"),
    ({"kernel": {"family": "nope"}}, "kernel.family"),
    ({"schema_version": 2}, "schema_version"),
    ({"extra": 1}, "extra"),
    ({"initial": {"type": "monomer"}}, "initial"),
])
def test_config_errors_name_the_field(patch, field):
    with pytest.raises(ConfigError, match=field):
        parse_config({**EXAMPLE, **patch})


def test_assumption_violation_is_a_warning():
    cfg = parse_config({**EXAMPLE, "kernel": {"family": "shear"},
                        "removal": {"family": "power-law", "R": 1.0, "gamma": 0.0}})
    assert cfg.warnings and not cfg.bounds_enabled


def test_csv_round_trip_is_bitwise(tmp_path):
    cfg = parse_config({**EXAMPLE, "kernel": {"family": "brownian"}, "N": 12,
                        "initial": {"type": "random", "mass": 1.0}, "seed": 7})
    from forcedcoag import integrate
    traj = integrate(cfg.system, cfg.initial, cfg.integrator)
    for layout in ("long", "wide"):
        path = tmp_path / f"{layout}.csv"
        write_trajectory_csv(path, traj, layout)
        back = read_trajectory_csv(path, cfg.system)
        assert np.array_equal(back.values, traj.values)
        assert np.array_equal(back.times, traj.times)
    write_equilibrium_csv(tmp_path / "q.csv", traj.samples[-1])
    assert np.array_equal(read_equilibrium_csv(tmp_path / "q.csv"), traj.samples[-1].c)


def test_seeded_runs_are_deterministic(tmp_path):
    cfg = {**EXAMPLE, "kernel": {"family": "brownian"}, "initial": {"type": "random", "mass": 2.0}}
    path = _write(tmp_path, cfg)
    for name in ("a", "b"):
        assert main(["simulate", "--config", path, "--out", str(tmp_path / name), "--seed", "11"]) == 0
    assert ((tmp_path / "a" / "trajectory.csv").read_bytes()
            == (tmp_path / "b" / "trajectory.csv").read_bytes())
    main(["simulate", "--config", path, "--out", str(tmp_path / "c"), "--seed", "12"])
    assert ((tmp_path / "a" / "trajectory.csv").read_bytes()
            != (tmp_path / "c" / "trajectory.csv").read_bytes())


def test_wide_format(tmp_path):
    out = tmp_path / "out"
    main(["simulate", "--config", _write(tmp_path, EXAMPLE), "--out", str(out), "--format", "wide"])
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t," + ",".join(f"c_{k}" for k in range(1, 17))


def test_equilibrium_command(tmp_path):
    out = tmp_path / "out"
    path = _write(tmp_path, EXAMPLE)
    assert main(["equilibrium", "--config", path, "--out", str(out)]) == 0
    assert not (out / "convergence.json").exists()
    Q = read_equilibrium_csv(out / "equilibrium.csv")
    assert Q[0] == pytest.approx((5**0.5 - 1) / 2, abs=1e-9)
    main(["simulate", "--config", path, "--out", str(out)])
    assert main(["equilibrium", "--config", path, "--out", str(out)]) == 0
    rep = json.loads((out / "convergence.json").read_text())
    assert rep["fitted_rate"] >= 0.95


def test_equilibrium_zero_source(tmp_path):
    cfg = {**EXAMPLE, "source": {"family": "monomer-only", "s1": 0.0}}
    out = tmp_path / "out"
    assert main(["equilibrium", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 0
    assert json.loads((out / "equilibrium.json").read_text())["residual"] == 0.0


def test_equilibrium_failure_exit_code(tmp_path):
    cfg = {**EXAMPLE, "kernel": {"family": "brownian"},
           "equilibrium": {"tol": 1e-300, "max_iter": 3}}
    assert main(["equilibrium", "--config", _write(tmp_path, cfg), "--out", str(tmp_path)]) == 4


SMALL = {**EXAMPLE, "kernel": {"family": "brownian"},
         "removal": {"family": "power-law", "R": 50.0, "gamma": 2.0 / 3.0},
         "source": {"family": "monomer-only", "s1": 0.5}}


def test_check_smallness_outcomes(tmp_path, capsys):
    assert main(["check-smallness", "--config", _write(tmp_path, SMALL), "--mu", "1.7"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True

    gap = {**EXAMPLE, "source": {"family": "monomer-only", "s1": 4.0}}
    assert main(["check-smallness", "--config", _write(tmp_path, gap, "gap.json")]) == 1
    cert = json.loads(capsys.readouterr().out)
    assert not cert["passed"]
    assert any("converge" in n for n in cert["notes"])

    assert main(["check-smallness", "--config", str(tmp_path / "gap.json"), "--mu", "0.5"]) == 2


def test_check_smallness_scan(tmp_path, capsys):
    code = main(["check-smallness", "--config", _write(tmp_path, SMALL), "--mu", "1.7", "2", "3"])
    certs = json.loads(capsys.readouterr().out)
    assert [c["mu"] for c in certs] == [1.7, 2.0, 3.0]
    assert code == 0


def test_verify_example(capsys):
    assert main(["verify-example"]) == 0
    assert "FAIL" not in capsys.readouterr().out
    assert main(["verify-example", "--rel-tol", "1e-2", "--abs-tol", "1e-2"]) == 1
    assert main(["verify-example", "--A-star", "0"]) == 0


def test_audit(tmp_path):
    out = tmp_path / "out"
    path = _write(tmp_path, EXAMPLE)
    main(["simulate", "--config", path, "--out", str(out)])
    assert main(["audit", "--config", path, "--trajectory", str(out / "trajectory.csv")]) == 0
    # a trajectory far above every bound
    lines = (out / "trajectory.csv").read_text().splitlines()
    bad = [lines[0]] + [f"{t},{k},1e6" for t, k, _ in (ln.split(",") for ln in lines[1:])]
    (tmp_path / "bad.csv").write_text("\n".join(bad) + "\n")
    assert main(["audit", "--config", path, "--trajectory", str(tmp_path / "bad.csv"),
                 "--out", str(tmp_path / "audit")]) == 1
    assert (tmp_path / "audit" / "moments.csv").exists()


def test_grid_fan_out(tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps([{"source": {"entries": [[1, s]]}} for s in (0.5, 1.0, 2.0)]))
    out = tmp_path / "out"
    assert main(["simulate", "--config", _write(tmp_path, EXAMPLE), "--out", str(out),
                 "--grid", str(grid)]) == 0
    summary = json.loads((out / "grid_summary.json").read_text())
    assert [s["index"] for s in summary] == [0, 1, 2]
    m1 = [json.loads((out / f"grid_{i:03d}" / "summary.json").read_text())["final_m1"]
          for i in range(3)]
    assert m1 == sorted(m1)


def test_grid_bad_override(tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps([{"bogus": 1}]))
    assert main(["simulate", "--config", _write(tmp_path, EXAMPLE), "--out", str(tmp_path),
                 "--grid", str(grid)]) == 2
