import json

import click
import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from cli import EXIT_CONFIG, EXIT_RUNTIME, _run, main


@pytest.fixture
def runner():
    return CliRunner()


def _write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def _invoke(runner, *args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


def test_norms_hardy(runner, tmp_path):
    config_path = _write_json(tmp_path / "h2.json", {"space": {"kind": "h2", "horizon": 8}})
    out = tmp_path / "norms.csv"
    result = _invoke(runner, "--config", config_path, "--output", out, "norms")
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["n", "monomial_norm"]
    assert frame["n"].tolist() == list(range(9))
    assert np.allclose(frame["monomial_norm"], 1.0)


def test_norms_weighted_and_horizon_flag(runner, tmp_path):
    config_path = _write_json(tmp_path / "w.json", {"space": {"kind": "weighted", "exponent": 1.0}})
    out = tmp_path / "norms.csv"
    result = _invoke(runner, "--config", config_path, "--horizon", 5, "--output", out, "norms")
    assert result.exit_code == 0
    assert pd.read_csv(out)["monomial_norm"].tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]


def test_norms_hb(runner, tmp_path):
    config_path = _write_json(tmp_path / "hb.json", {"space": {"kind": "hb", "b": [[0, 0], [0.5, 0]], "horizon": 4}})
    out = tmp_path / "norms.csv"
    result = _invoke(runner, "--config", config_path, "--output", out, "norms")
    assert result.exit_code == 0
    assert np.allclose(pd.read_csv(out)["monomial_norm"], [1.0] + [np.sqrt(4.0 / 3.0)] * 4)


def test_lebesgue(runner, tmp_path):
    out = tmp_path / "lebesgue.csv"
    result = _invoke(runner, "--output", out, "lebesgue", "--n", 0, "--n", 1, "--n", 10)
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["n", "L_n"]
    assert frame["L_n"].iloc[0] == 1.0
    assert frame["L_n"].iloc[1] == pytest.approx(4.0 / np.pi, abs=1e-6)


def test_lebesgue_insufficient_quadrature_is_runtime_error(runner, tmp_path):
    result = _invoke(runner, "--output", tmp_path / "l.csv", "lebesgue", "--n", 10, "--quadrature", 100)
    assert result.exit_code == EXIT_RUNTIME


def test_embed_inclusion_constants(runner, tmp_path):
    data = {
        "spec": {"exponent": 1.0, "horizon": 256},
        "r_list": [0.5],
        "samples": 20,
        "membership": [{"name": "half", "R": 2.0, "q": 0.5}],
    }
    config_path = _write_json(tmp_path / "embed.json", data)
    out = tmp_path / "embed.csv"
    result = _invoke(runner, "--config", config_path, "--output", out, "embed")
    assert result.exit_code == 0
    frame = pd.read_csv(out).set_index("check")
    assert frame.loc["inclusion_constant", "value"] == pytest.approx(2 * np.log(2.0), abs=1e-10)
    assert frame.loc["inclusion_bound", "flag"] == "holds"
    assert frame.loc["isometry", "flag"] == "holds"
    assert frame.loc["injectivity", "flag"] == "holds"
    assert frame.loc["membership:half", "value"] == pytest.approx(4.0, abs=1e-10)


def test_embed_flags_uncontrolled_tail(runner, tmp_path):
    data = {"spec": {"exponent": 0.0, "horizon": 64}, "r_list": [0.999], "samples": 5}
    config_path = _write_json(tmp_path / "embed.json", data)
    out = tmp_path / "embed.csv"
    result = _invoke(runner, "--config", config_path, "--output", out, "embed")
    assert result.exit_code == 0
    frame = pd.read_csv(out).set_index("check")
    assert frame.loc["inclusion_constant", "flag"] == "TailNotControlled"


def test_scheme_run_is_deterministic(runner, tmp_path):
    data = {
        "space": {"kind": "sup", "horizon": 64},
        "scheme": "cesaro",
        "inputs": [{"kind": "random", "degree": 30}, {"kind": "fejer-block", "m": 8, "name": "fejer"}],
        "n_max": 40,
        "seed": 7,
        "opnorm_trials": 2,
    }
    config_path = _write_json(tmp_path / "run.json", data)
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _invoke(runner, "--config", config_path, "--output", first, "scheme-run").exit_code == 0
    assert _invoke(runner, "--config", config_path, "--output", second, "scheme-run").exit_code == 0
    assert first.read_bytes() == second.read_bytes()
    frame = pd.read_csv(first)
    assert set(frame["input"]) == {"random-0", "fejer"}
    assert (frame["upper_opnorm"] == 1.0).all()


def test_scheme_run_rejects_unknown_scheme(runner, tmp_path):
    data = {"space": {"kind": "h2", "horizon": 8}, "scheme": "nope", "inputs": [{"kind": "monomial", "degree": 1}], "n_max": 4}
    result = _invoke(runner, "--config", _write_json(tmp_path / "bad.json", data), "scheme-run")
    assert result.exit_code == EXIT_CONFIG


def test_invalid_config_exit_code(runner, tmp_path):
    config_path = _write_json(tmp_path / "bad.json", {"space": {"kind": "h2", "horizon": 8}, "n_max": 9})
    result = _invoke(runner, "--config", config_path, "norms")
    assert result.exit_code == EXIT_CONFIG


def test_missing_config_file(runner, tmp_path):
    result = runner.invoke(main, ["--config", str(tmp_path / "missing.json"), "norms"])
    assert result.exit_code == EXIT_CONFIG


def test_hb_gram(runner, tmp_path):
    config_path = _write_json(tmp_path / "hb.json", {"kind": "hb", "b": [[0, 0], [0.5, 0]], "horizon": 2})
    out = tmp_path / "gram.csv"
    result = _invoke(runner, "--config", config_path, "--output", out, "hb-gram")
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert len(frame) == 9
    G = frame.pivot(index="j", columns="k", values="re").to_numpy()
    assert np.allclose(G, np.diag([1.0, 4.0 / 3.0, 4.0 / 3.0]), atol=1e-12)
    assert np.allclose(frame["im"], 0.0, atol=1e-12)


def test_plot_script_for_known_csv(runner, tmp_path):
    out = tmp_path / "lebesgue.csv"
    _invoke(runner, "--output", out, "lebesgue", "--n", 1, "--n", 10)
    script = tmp_path / "plot.py"
    result = _invoke(runner, "--output", script, "plot-script", out)
    assert result.exit_code == 0
    text = script.read_text()
    assert "import matplotlib.pyplot as plt" in text
    assert "np.polyfit" in text


def test_plot_script_for_empty_csv(runner, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    script = tmp_path / "plot.py"
    result = _invoke(runner, "--output", script, "plot-script", empty)
    assert result.exit_code == 0
    assert "WARNING: the CSV file was empty" in script.read_text()


def test_plot_script_rejects_unknown_header(runner, tmp_path):
    unknown = tmp_path / "other.csv"
    unknown.write_text("a,b\n1,2\n")
    result = _invoke(runner, "plot-script", unknown)
    assert result.exit_code == EXIT_CONFIG


@pytest.mark.parametrize("command", ["norms", "hb-gram", "embed", "describe"])
def test_non_object_json_is_a_usage_error(runner, tmp_path, command):
    config_path = _write_json(tmp_path / "list.json", [1, 2])
    result = _invoke(runner, "--config", config_path, "--horizon", 4, command)
    assert result.exit_code == EXIT_CONFIG
    assert "JSON object" in result.output


def test_invalid_config_names_the_field(runner, tmp_path):
    config_path = _write_json(tmp_path / "bad.json", {"space": {"kind": "h2", "horizon": -1}})
    result = _invoke(runner, "--config", config_path, "norms")
    assert result.exit_code == EXIT_CONFIG
    assert "Invalid config at space.h2.horizon" in result.output


def test_linalg_failures_map_to_runtime_exit():
    ctx = click.Context(main)

    def action():
        raise np.linalg.LinAlgError("singular matrix")

    with pytest.raises(click.exceptions.Exit) as info:
        _run(ctx, action)
    assert info.value.exit_code == EXIT_RUNTIME


def test_scheme_run_projection_on_hb(runner, tmp_path):
    data = {
        "space": {"kind": "hb", "b": [[0.5, 0], [0.5, 0]], "horizon": 16},
        "scheme": "projection",
        "inputs": [{"kind": "random", "degree": 16, "name": "f"}],
        "n_max": 16,
        "opnorm_trials": 5,
    }
    out = tmp_path / "run.csv"
    result = _invoke(runner, "--config", _write_json(tmp_path / "run.json", data), "--output", out, "scheme-run")
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert (frame["tag"] == "bounded").all()
    assert frame["error_norm"].iloc[-1] == pytest.approx(0.0, abs=1e-10)
    assert np.allclose(frame["upper_opnorm"], 1.0, atol=1e-8)
    assert np.all(np.diff(frame["error_norm"]) <= 1e-10)


def test_scheme_run_partial_sums_on_gliding_hump(runner, tmp_path):
    data = {
        "space": {"kind": "sup", "horizon": 512},
        "scheme": "partial",
        "inputs": [{"kind": "gliding-hump", "blocks": 2, "base_degree": 8, "name": "hump"}],
        "n_max": 113,
    }
    out = tmp_path / "run.csv"
    result = _invoke(runner, "--config", _write_json(tmp_path / "run.json", data), "--output", out, "scheme-run")
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert frame["tag"].iloc[0] in ("log-like", "power-like")
    assert frame["lower_opnorm"].isna().all()


@pytest.mark.parametrize("space", [
    {"kind": "h2", "horizon": 6},
    {"kind": "weighted", "exponent": 1.0, "p": 1.0, "horizon": 6},
    {"kind": "hb", "b": [[0, 0], [0.5, 0]], "horizon": 6, "method": "polarization"},
    {"kind": "sup", "oversampling": 8, "horizon": 6},
])
def test_describe_round_trip_through_norms(runner, tmp_path, space):
    described = tmp_path / "space.json"
    config_path = _write_json(tmp_path / "in.json", {"space": space})
    assert _invoke(runner, "--config", config_path, "--output", described, "describe").exit_code == 0
    document = json.loads(described.read_text())
    assert document["kind"] == ("weighted" if space["kind"] == "h2" else space["kind"])

    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _invoke(runner, "--config", config_path, "--output", first, "norms").exit_code == 0
    rebuilt = _write_json(tmp_path / "again.json", {"space": document})
    assert _invoke(runner, "--config", rebuilt, "--output", second, "norms").exit_code == 0
    assert np.allclose(pd.read_csv(first)["monomial_norm"], pd.read_csv(second)["monomial_norm"], rtol=1e-12)
