"""Configuration schema, the command-line runner and SVG plots."""
import io
import json

import numpy as np
import pytest

from recurrence_lab import cli, default_config, load_config, parse_config, plotting
from recurrence_lab import pipelines
from recurrence_lab.exceptions import ConfigError
from recurrence_lab.recurrence import read_grids_csv

SMALL = {
    "system": {"kind": "circle_expanding", "degree": 2},
    "measure": {"kind": "lebesgue", "rng": "philox"},
    "orbit_length": 1 << 16,
    "sample_count": 12,
    "n_ladder": [4, 5, 6, 7, 8, 9, 10, 11, 12],
    "eps_ladder": [0.25, 0.125, 0.0625],
    "r_ladder": [0.125, 0.0625, 0.03125, 0.015625, 0.0078125],
    "seed": 99,
    "centers": 10,
    "katok_samples": 5000,
}


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def run_cli(*argv):
    out = io.StringIO()
    code = cli.run([str(a) for a in argv], stdout=out)
    return code, out.getvalue()


# -- schema ------------------------------------------------------------------

def test_shipped_config_parses():
    cfg = default_config()
    assert cfg.system_spec().kind == "circle_expanding"
    assert cfg.n_ladder == tuple(range(6, 19))
    assert cfg.eps_ladder == tuple(2.0 ** -i for i in range(2, 9))


def test_round_trip_is_field_by_field_identical():
    cfg = parse_config(SMALL)
    again = parse_config(json.loads(cfg.to_json()))
    assert again == cfg
    assert again.to_json() == cfg.to_json()


def test_default_config_round_trip():
    cfg = default_config()
    assert parse_config(json.loads(cfg.to_json())) == cfg


@pytest.mark.parametrize("where,key", [(None, "epsilon_ladder"), ("system", "degre"),
                                       ("measure", "sed"), ("tolerances", "entropyy")])
def test_unknown_keys_are_errors(where, key):
    data = json.loads(json.dumps(SMALL))
    target = data if where is None else data.setdefault(where, {})
    target[key] = 1
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(data)


@pytest.mark.parametrize("change", [
    {"eps_ladder": [0.0625, 0.125]},
    {"n_ladder": [5, 4]},
    {"r_ladder": [0.1, 0.1]},
    {"orbit_length": 20},
    {"sample_count": 0},
    {"seed": 2 ** 64},
    {"seed": -1},
    {"c": 1.0},
    {"eps_ladder": [0.5, -0.25]},
    {"measure": {"kind": "bernoulli", "probabilities": [0.5, 0.5]}},
    {"system": {"kind": "circle_expanding", "degree": 1}},
    {"potential": {"kind": "table", "table": []}},
    {"tolerances": {"entropy": -0.1}},
])
def test_invalid_values_are_errors(change):
    data = dict(SMALL, **change)
    with pytest.raises(ConfigError):
        parse_config(data)


def test_missing_required_key():
    data = dict(SMALL)
    del data["n_ladder"]
    with pytest.raises(ConfigError, match="missing"):
        parse_config(data)


def test_load_config_reports_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


# -- exit codes ----------------------------------------------------------------

def test_unknown_key_exits_with_two(tmp_path):
    path = write_config(tmp_path, dict(SMALL, bogus=1))
    code, _ = run_cli("entropy", "--config", path, "--out", tmp_path / "o")
    assert code == 2
    assert not (tmp_path / "o").exists()


def test_increasing_eps_exits_with_two(tmp_path, capsys):
    path = write_config(tmp_path, dict(SMALL, eps_ladder=[0.125, 0.25]))
    code, _ = run_cli("entropy", "--config", path)
    assert code == 2
    assert "eps_ladder must be strictly decreasing" in capsys.readouterr().err


def test_bad_flags_exit_with_two(tmp_path):
    assert run_cli("entropy", "--seed", "abc")[0] == 2
    assert run_cli("nonsense")[0] == 2
    assert run_cli("entropy", "--samples", "-3", "--out", tmp_path)[0] == 2


def test_thread_variable_is_validated(tmp_path, monkeypatch):
    path = write_config(tmp_path, SMALL)
    monkeypatch.setenv("RECURRENCE_LAB_THREADS", "zero")
    assert run_cli("entropy", "--config", path, "--out", tmp_path / "o")[0] == 2
    monkeypatch.setenv("RECURRENCE_LAB_THREADS", "0")
    assert run_cli("entropy", "--config", path, "--out", tmp_path / "o")[0] == 2
    monkeypatch.setenv("RECURRENCE_LAB_THREADS", "2")
    assert pipelines.thread_count() == 2


def test_fail_verdict_exits_with_one(tmp_path):
    path = write_config(tmp_path, dict(SMALL, tolerances={"entropy": 1e-6}))
    code, text = run_cli("entropy", "--config", path, "--out", tmp_path / "o")
    assert code == 1
    assert "FAIL" in text
    assert (tmp_path / "o" / "verdicts.json").exists()


def test_estimator_error_exits_with_three(tmp_path):
    # depths far beyond what 200 iterates can resolve: every cell censored
    data = dict(SMALL, orbit_length=200, n_ladder=[150, 160, 170, 180])
    path = write_config(tmp_path, data)
    code, _ = run_cli("entropy", "--config", path, "--out", tmp_path / "o")
    assert code == 3
    assert not (tmp_path / "o").exists()


# -- subcommands ---------------------------------------------------------------

@pytest.fixture(scope="module")
def entropy_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("entropy")
    path = write_config(tmp, SMALL)
    code, text = run_cli("entropy", "--config", path, "--out", tmp / "out", "--plot")
    return code, text, tmp / "out", path


def test_entropy_subcommand_writes_artifacts(entropy_run):
    code, text, out, _ = entropy_run
    assert code == 0, text
    for name in ("grids.csv", "reports.json", "verdicts.json", "plot.svg"):
        assert (out / name).exists(), name
    reports = json.loads((out / "reports.json").read_text())
    assert [r["quantity"] for r in reports][:2] == ["EntropyDynBall", "EntropyOW"]
    verdicts = json.loads((out / "verdicts.json").read_text())
    assert all(set(v) == {"relation", "lhs", "rhs", "tolerance", "status"} for v in verdicts)


def test_grids_csv_has_lf_endings_and_dot_decimals(entropy_run):
    _, _, out, _ = entropy_run
    raw = (out / "grids.csv").read_bytes()
    assert b"\r\n" not in raw
    assert raw.startswith(b"sample_id,n,eps,R,S,censored_R,censored_S\n")
    assert b",0.25," in raw


def test_plot_slopes_match_the_report(entropy_run):
    _, _, out, _ = entropy_run
    report = json.loads((out / "reports.json").read_text())[0]
    in_json = {f["eps"]: f["slope"] for f in report["per_eps_fits"]}
    in_svg = plotting.title_slopes((out / "plot.svg").read_text())
    assert set(in_svg) == set(in_json)
    for eps, slope in in_json.items():
        assert in_svg[eps] == pytest.approx(slope, abs=1e-9)


def test_plot_subcommand_from_a_prior_run(entropy_run, tmp_path):
    _, _, out, _ = entropy_run
    svg = tmp_path / "again.svg"
    code, _ = run_cli("plot", "--csv", out / "grids.csv", "--svg", svg)
    assert code == 0
    assert plotting.title_slopes(svg.read_text()) == \
        plotting.title_slopes((out / "plot.svg").read_text())


def test_seed_override_changes_the_run(entropy_run, tmp_path):
    _, _, out, path = entropy_run
    code, _ = run_cli("entropy", "--config", path, "--out", tmp_path, "--seed", "100")
    assert code in (0, 1)
    assert (tmp_path / "grids.csv").read_bytes() != (out / "grids.csv").read_bytes()


def test_same_seed_gives_byte_identical_json(entropy_run, tmp_path):
    _, _, out, path = entropy_run
    run_cli("entropy", "--config", path, "--out", tmp_path)
    for name in ("reports.json", "verdicts.json", "grids.csv"):
        assert (tmp_path / name).read_bytes() == (out / name).read_bytes()


def test_thread_count_does_not_change_results(entropy_run, tmp_path, monkeypatch):
    _, _, out, path = entropy_run
    monkeypatch.setenv("RECURRENCE_LAB_THREADS", "3")
    run_cli("entropy", "--config", path, "--out", tmp_path)
    assert (tmp_path / "reports.json").read_bytes() == (out / "reports.json").read_bytes()


def test_samples_override(entropy_run, tmp_path):
    _, _, _, path = entropy_run
    run_cli("entropy", "--config", path, "--out", tmp_path, "--samples", "3")
    grids = read_grids_csv(tmp_path / "grids.csv")
    assert len(grids) == 3


@pytest.mark.parametrize("sub", ["pressure", "minimal-return", "dimension", "inequalities"])
def test_other_subcommands_run(sub, tmp_path):
    path = write_config(tmp_path, dict(SMALL, potential={"kind": "constant", "value": 0.25}))
    code, text = run_cli(sub, "--config", path, "--out", tmp_path / "o")
    assert code in (0, 1), text
    assert json.loads((tmp_path / "o" / "verdicts.json").read_text())


def test_shift_config_runs_minimal_return_two_sided(tmp_path):
    data = dict(SMALL, system={"kind": "full_shift", "symbols": 2},
                measure={"kind": "bernoulli", "probabilities": [0.5, 0.5]},
                n_ladder=list(range(8, 17)))
    path = write_config(tmp_path, data)
    code, text = run_cli("minimal-return", "--config", path, "--out", tmp_path / "o")
    assert code == 0, text


# -- plot errors ---------------------------------------------------------------

def test_empty_csv_is_an_error_and_writes_nothing(tmp_path):
    csv = tmp_path / "empty.csv"
    csv.write_text("")
    svg = tmp_path / "out.svg"
    code, _ = run_cli("plot", "--csv", csv, "--svg", svg)
    assert code == 3
    assert not svg.exists()
    with pytest.raises(ValueError):
        plotting.plot(csv, svg)
    assert not svg.exists()


def test_two_eps_grid_draws_two_median_polylines(tmp_path):
    csv = tmp_path / "g.csv"
    rows = ["sample_id,n,eps,R,S,censored_R,censored_S"]
    for sid in range(3):
        for n in range(1, 6):
            for eps, base in ((0.5, 2), (0.25, 4)):
                rows.append(f"{sid},{n},{eps},{base ** n * (sid + 1)},1,0,0")
    csv.write_text("\n".join(rows) + "\n")
    text = plotting.plot(csv, tmp_path / "g.svg").read_text()
    assert text.count('class="median"') == 2
    assert text.count('class="fit"') == 2
    slopes = plotting.title_slopes(text)
    assert slopes[0.5] == pytest.approx(np.log(2), abs=1e-12)
    assert slopes[0.25] == pytest.approx(np.log(4), abs=1e-12)
