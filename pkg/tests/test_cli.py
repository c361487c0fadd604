import json

import numpy as np
import pytest
from click.testing import CliRunner

from spectral_forge.cli import main
from spectral_forge.dirac import build_bundle
from spectral_forge.models import podles_model
from spectral_forge.reporting import read_artifact, read_operator_bin


@pytest.fixture()
def runner():
    return CliRunner()


def test_version_banner(runner):
    res = runner.invoke(main, ["--version"])
    assert res.exit_code == 0
    assert "spectral-forge" in res.stdout


# ---------------------------------------------------------------------------
# configuration resolution
# ---------------------------------------------------------------------------


def test_malformed_config_is_usage_error(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json", encoding="utf-8")
    out = tmp_path / "art"
    res = runner.invoke(main, ["spectrum", "--model", "two_point",
                               "--config", str(cfg), "--out", str(out)])
    assert res.exit_code == 2
    assert "malformed JSON config" in res.stderr
    assert not out.exists()  # nothing may be written on a config error


def test_config_must_be_an_object(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]", encoding="utf-8")
    res = runner.invoke(main, ["spectrum", "--model", "two_point",
                               "--config", str(cfg)])
    assert res.exit_code == 2
    assert "JSON object" in res.stderr


def test_unknown_config_keys_are_rejected(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "circle", "windows": 4}), encoding="utf-8")
    res = runner.invoke(main, ["spectrum", "--config", str(cfg)])
    assert res.exit_code == 2
    assert "unknown config keys: windows" in res.stderr


def test_cli_flags_override_config(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "circle", "W": 3}), encoding="utf-8")
    from_config = runner.invoke(main, ["spectrum", "--config", str(cfg),
                                       "--operator", "dirac"])
    assert from_config.exit_code == 0
    assert "count 7 " in from_config.stdout  # config W=3 beats the default 64
    overridden = runner.invoke(main, ["spectrum", "--config", str(cfg),
                                      "--operator", "dirac", "--W", "5"])
    assert overridden.exit_code == 0
    assert "count 11 " in overridden.stdout  # CLI flag beats the config


def test_bad_thread_env_is_usage_error(runner):
    res = runner.invoke(main, ["spectrum", "--model", "two_point"],
                        env={"SPECTRAL_FORGE_THREADS": "many"})
    assert res.exit_code == 2
    assert "SPECTRAL_FORGE_THREADS" in res.stderr


def test_missing_model_is_usage_error(runner):
    res = runner.invoke(main, ["spectrum"])
    assert res.exit_code == 2
    assert "--model is required" in res.stderr


def test_resource_guard_exits_with_usage_code(runner):
    res = runner.invoke(main, ["spectrum", "--model", "suq2",
                               "--N", "64", "--W", "64"])
    assert res.exit_code == 2
    assert res.stderr.startswith("error:")


# ---------------------------------------------------------------------------
# spectrum / dimension
# ---------------------------------------------------------------------------


def test_spectrum_of_two_point(runner):
    res = runner.invoke(main, ["spectrum", "--model", "two_point"])
    assert res.exit_code == 0
    assert res.stdout.startswith("count 2 range [-1, 1]")


def test_spectrum_text_table(runner):
    res = runner.invoke(main, ["spectrum", "--model", "two_point",
                               "--format", "text"])
    assert res.exit_code == 0
    lines = res.stdout.splitlines()
    assert lines[0].split() == ["eigenvalue", "multiplicity"]
    assert lines[2].split() == ["-1", "1"]
    assert lines[3].split() == ["1", "1"]


def test_structured_spectrum_counts(runner):
    res = runner.invoke(main, ["spectrum", "--model", "podles", "--N", "12",
                               "--structured", "--operator", "d1"])
    assert res.exit_code == 0
    assert res.stdout.startswith("count 92 ")


def test_dimension_finite_spectrum_path(runner, tmp_path):
    out = tmp_path / "art"
    res = runner.invoke(main, ["dimension", "--model", "circle", "--W", "10",
                               "--out", str(out)])
    assert res.exit_code == 0
    assert "s0 = 0 (finite spectrum, no counting window)" in res.stdout
    art = read_artifact(out / "dimension.json")
    assert art["payload"]["finite_spectrum"] is True
    assert art["payload"]["slope"] == 0.0


def test_dimension_of_deformed_sphere(runner, tmp_path):
    out = tmp_path / "art"
    res = runner.invoke(main, ["dimension", "--model", "suq2",
                               "--N", "32", "--W", "32", "--out", str(out)])
    assert res.exit_code == 0
    assert res.stdout.startswith("s0 = ")
    art = read_artifact(out / "dimension.json")
    assert abs(art["payload"]["slope"] - 2.0) <= 0.25
    assert art["payload"]["method"] == "structured"


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------


def test_verify_relations_passes_on_interior(runner):
    res = runner.invoke(main, ["verify", "--suite", "relations",
                               "--model", "podles", "--N", "8"])
    assert res.exit_code == 0
    assert "FAIL" not in res.stdout
    assert res.stdout.count("PASS") == 4


def test_verify_relations_fails_on_the_boundary(runner):
    res = runner.invoke(main, ["verify", "--suite", "relations",
                               "--model", "podles", "--N", "8", "--margin", "0"])
    assert res.exit_code == 1
    assert "relation sphere_unit_left" in res.stdout
    assert "FAIL" in res.stdout


def test_verify_eigs(runner, tmp_path):
    out = tmp_path / "art"
    res = runner.invoke(main, ["verify", "--suite", "eigs", "--model", "suq2",
                               "--N", "6", "--W", "6", "--out", str(out)])
    assert res.exit_code == 0
    assert res.stdout.count("PASS") == 2
    art = read_artifact(out / "verify_eigs.json")
    assert art["payload"]["d1"]["passed"] is True
    assert art["payload"]["di"]["passed"] is True


def test_verify_smoothness(runner):
    res = runner.invoke(main, ["verify", "--suite", "smoothness",
                               "--model", "circle", "--fiber", "two_point",
                               "--W", "6"])
    assert res.exit_code == 0
    assert "smoothness overall: PASS" in res.stdout


@pytest.mark.parametrize("suite,samples", [("bounds7", "6"), ("bounds3y", "4"),
                                           ("nondegeneracy", "8")])
def test_verify_sampled_suites(runner, suite, samples):
    res = runner.invoke(main, ["verify", "--suite", suite, "--model", "podles",
                               "--N", "6", "--samples", samples])
    assert res.exit_code == 0, res.stdout + res.stderr
    assert "PASS" in res.stdout


def test_verify_relations_needs_relations(runner):
    res = runner.invoke(main, ["verify", "--suite", "relations",
                               "--model", "circle", "--fiber", "two_point",
                               "--W", "4"])
    assert res.exit_code == 2
    assert "declares no algebra relations" in res.stderr


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def test_distance_between_the_two_points(runner):
    res = runner.invoke(main, ["distance", "--model", "two_point",
                               "--pair", "delta1,delta2"])
    assert res.exit_code == 0
    assert res.stdout == "1.000000000\n"


def test_distance_accepts_angle_grammar(runner):
    res = runner.invoke(main, ["distance", "--model", "circle", "--W", "8",
                               "--fourier-cap", "4",
                               "--pair", "theta:pi/2,theta:-pi/2",
                               "--pair", "theta:0,theta:1.5"])
    assert res.exit_code == 0
    vals = [float(line) for line in res.stdout.splitlines()]
    assert len(vals) == 2
    assert all(0.0 < v <= np.pi + 1e-9 for v in vals)


def test_distance_rejects_bad_pairs(runner):
    res = runner.invoke(main, ["distance", "--model", "two_point",
                               "--pair", "delta1"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["distance", "--model", "two_point",
                               "--pair", "delta1,theta:frog"])
    assert res.exit_code == 2


def test_distance_artifacts_are_deterministic(runner, tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    args = ["distance", "--model", "circle", "--W", "6", "--fourier-cap", "4",
            "--pair", "theta:0,theta:pi/2"]
    r1 = runner.invoke(main, args + ["--out", str(out1)])
    r2 = runner.invoke(main, args + ["--out", str(out2)])
    assert r1.exit_code == 0 and r2.exit_code == 0
    assert r1.stdout == r2.stdout
    a1 = read_artifact(out1 / "distance.json")
    a2 = read_artifact(out2 / "distance.json")
    assert a1["payload"] == a2["payload"]
    assert a1["header"]["payload_sha256"] == a2["header"]["payload_sha256"]
    t1 = (out1 / "distance.json").read_text().split('"payload":', 1)[1]
    t2 = (out2 / "distance.json").read_text().split('"payload":', 1)[1]
    assert t1 == t2


# ---------------------------------------------------------------------------
# sweeps and reports
# ---------------------------------------------------------------------------


def _run_sweep(runner, out):
    return runner.invoke(main, [
        "sweep-q", "--model", "podles", "--N", "4",
        "--from", "0.3", "--to", "0.5", "--step", "0.2",
        "--pair", "theta:0,theta:pi", "--fourier-cap", "2",
        "--degree-cap", "1", "--max-iter", "300", "--out", str(out)])


def test_sweep_q_writes_quoted_csv(runner, tmp_path):
    out = tmp_path / "sweep"
    res = _run_sweep(runner, out)
    assert res.exit_code == 0, res.stdout + res.stderr
    lines = (out / "sweep_q.csv").read_text().splitlines()
    assert lines[0] == "q,pair_id,distance,seminorm_at_witness,iterations,converged"
    assert len(lines) == 3  # header + one row per grid point
    for line in lines[1:]:
        assert '"theta:0,theta:pi"' in line  # comma inside the id stays quoted
    art = read_artifact(out / "sweep_q.json")
    assert art["payload"]["family"] == "podles"
    assert [r["q"] for r in art["payload"]["rows"]] == [0.3, 0.5]


def test_sweep_q_default_caps_stay_sane(runner, tmp_path):
    # with no explicit caps the Fourier ladder must clamp to the quotient
    # window; an over-truncated mode once snuck a seminorm-null direction
    # into the span here and "certified" distances in the billions
    out = tmp_path / "sweep"
    res = runner.invoke(main, [
        "sweep-q", "--model", "podles", "--N", "6",
        "--from", "0.5", "--to", "0.5", "--step", "0.1",
        "--pair", "theta:0,theta:pi", "--max-iter", "400", "--out", str(out)])
    assert res.exit_code == 0, res.stdout + res.stderr
    art = read_artifact(out / "sweep_q.json")
    (row,) = art["payload"]["rows"]
    assert row["error"] == ""
    assert 0.1 < row["distance"] < 2.0 * np.pi


def test_sweep_q_usage_errors(runner):
    res = runner.invoke(main, ["sweep-q", "--model", "circle", "--from", "0.3",
                               "--to", "0.5", "--step", "0.1",
                               "--pair", "theta:0,theta:pi"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["sweep-q", "--model", "podles", "--from", "0.5",
                               "--to", "0.3", "--step", "0.1",
                               "--pair", "theta:0,theta:pi"])
    assert res.exit_code == 2


def test_build_dumps_are_readable(runner, tmp_path):
    out = tmp_path / "ops"
    res = runner.invoke(main, ["build", "--model", "podles", "--N", "4",
                               "--out", str(out)])
    assert res.exit_code == 0
    manifest = read_artifact(out / "manifest.json")
    ops = manifest["payload"]["operators"]
    assert set(ops) == {"quotient_dirac", "fiber_dirac", "projection",
                        "d1", "di", "d"}
    bundle = build_bundle(podles_model(0.5, 4, 0.5))
    d1 = read_operator_bin(out / ops["d1"]["file"], ops["d1"]["dim"])
    assert np.array_equal(d1, bundle.d1.mat)
    assert manifest["payload"]["dims"]["total"] == bundle.d.space.dim


def test_report_merges_artifacts(runner, tmp_path):
    out = tmp_path / "run"
    assert runner.invoke(main, ["dimension", "--model", "suq2", "--N", "16",
                                "--W", "16", "--out", str(out)]).exit_code == 0
    assert _run_sweep(runner, out).exit_code == 0
    res = runner.invoke(main, ["report", "--out", str(out)])
    assert res.exit_code == 0
    assert (out / "report.txt").exists()
    report = read_artifact(out / "report.json")
    files = {row["file"]: row for row in report["payload"]["artifacts"]}
    assert files["dimension.json"]["status"] == "ok"
    assert files["dimension.json"]["kind"] == "dimension"
    assert files["sweep_q.json"]["status"] == "ok"
    # plot data: counting curve plus one curve per sweep pair
    assert (out / "plot_dimension.csv").read_text().startswith("x,y\n")
    plots = report["payload"]["plots"]
    assert any(p.startswith("plot_sweep_q_") for p in plots)
    for p in plots:
        assert (out / p).exists()


def test_report_marks_absent_inputs(runner, tmp_path):
    out = tmp_path / "run"
    out.mkdir()
    res = runner.invoke(main, ["report", "--out", str(out), "missing.json"])
    assert res.exit_code == 0
    assert "missing.json: ABSENT" in res.stdout
    assert "missing.json: ABSENT" in (out / "report.txt").read_text()
