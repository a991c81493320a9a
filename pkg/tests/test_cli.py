"""Command-line surface: dispatch, exit codes, file handling."""

from __future__ import annotations

import json
import subprocess

import pytest

from starsat import (
    RngSeed,
    config_to_json,
    ExperimentConfig,
    format_edge_list,
    records_to_csv,
    run_grid,
    sample_gnp,
)
from starsat.cli import build_parser, main


@pytest.fixture()
def host_file(tmp_path):
    g = sample_gnp(8, 0.5, RngSeed(5))
    path = tmp_path / "g.txt"
    path.write_text(format_edge_list(g))
    return str(path)


def out_lines(capsys):
    return capsys.readouterr().out.splitlines()


# --------------------------------------------------------------- dispatch

def test_formula_star_prints_value(capsys):
    assert main(["formula", "star", "6", "3"]) == 0
    assert out_lines(capsys) == ["5"]


def test_formula_clique(capsys):
    assert main(["formula", "clique", "4", "3"]) == 0
    assert out_lines(capsys) == ["3"]


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["formula", "star", "6", "3", "--sideways"])
    assert exc.value.code == 2


def test_missing_required_flag_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "sample", "--n", "5", "--seed", "1",
              "--out", str(tmp_path / "g.txt")])  # no --p
    assert exc.value.code == 2


def test_domain_error_exits_one(capsys):
    assert main(["formula", "star", "3", "4"]) == 1
    assert "error" in capsys.readouterr().err.lower()


def test_missing_file_exits_one(capsys):
    assert main(["alpha", "--graph", "/nonexistent/g.txt", "--k", "0"]) == 1


# ------------------------------------------------------------ gen + alpha

def test_gen_sample_round_trips(tmp_path, capsys):
    path = tmp_path / "g.txt"
    assert main(["gen", "sample", "--n", "8", "--p", "0.5", "--seed", "5",
                 "--out", str(path)]) == 0
    expected = sample_gnp(8, 0.5, RngSeed(5))
    assert path.read_text() == format_edge_list(expected)


def test_gen_complete(tmp_path):
    path = tmp_path / "k4.txt"
    assert main(["gen", "complete", "--n", "4", "--out", str(path)]) == 0
    assert path.read_text().startswith("4 6\n")


def test_gen_regular(tmp_path):
    path = tmp_path / "c.txt"
    assert main(["gen", "regular", "--n", "6", "--d", "3", "--out", str(path)]) == 0
    assert path.read_text().startswith("6 9\n")


def test_gen_regular_parity_error(tmp_path, capsys):
    assert main(["gen", "regular", "--n", "5", "--d", "3",
                 "--out", str(tmp_path / "x.txt")]) == 1


def test_alpha_exact(host_file, capsys):
    assert main(["alpha", "--graph", host_file, "--k", "1", "--method", "exact"]) == 0
    assert out_lines(capsys) == ["4"]


def test_alpha_json_has_witness(host_file, capsys):
    assert main(["alpha", "--graph", host_file, "--k", "1", "--method", "exact",
                 "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["size"] == 4
    assert len(doc["vertices"]) == 4


def test_alpha_band(capsys):
    assert main(["alpha-band", "--n", "500", "--p", "0.5", "--k", "0"]) == 0
    lo, hi = (float(x) for x in out_lines(capsys))
    assert hi == pytest.approx(16.9316, abs=1e-3)
    assert lo < hi


# ------------------------------------------------------- saturation verbs

def test_sat_lower_plain(host_file, capsys):
    assert main(["sat-lower", "--graph", host_file, "--r", "3"]) == 0
    assert out_lines(capsys) == ["4.0"]


def test_sat_lower_json(host_file, capsys):
    assert main(["sat-lower", "--graph", host_file, "--r", "3",
                 "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["certified"] is True
    assert doc["ceiled"] == 4


def test_sat_upper_check_pipeline(host_file, tmp_path, capsys):
    cert_path = tmp_path / "c.json"
    assert main(["sat-upper", "--graph", host_file, "--r", "3",
                 "--cert-out", str(cert_path)]) == 0
    assert out_lines(capsys) == ["5"]
    assert main(["check", "--graph", host_file, "--cert", str(cert_path)]) == 0
    assert out_lines(capsys) == ["valid"]


def test_check_rejects_tampered_certificate(host_file, tmp_path, capsys):
    cert_path = tmp_path / "c.json"
    main(["sat-upper", "--graph", host_file, "--r", "3", "--cert-out", str(cert_path)])
    capsys.readouterr()
    doc = json.loads(cert_path.read_text())
    doc["edges"] = doc["edges"][:-1]  # drop one edge: no longer maximal
    cert_path.write_text(json.dumps(doc))
    assert main(["check", "--graph", host_file, "--cert", str(cert_path)]) == 1


def test_check_detects_host_mismatch(tmp_path, capsys):
    g_path = tmp_path / "g.txt"
    g_path.write_text(format_edge_list(sample_gnp(8, 0.5, RngSeed(5))))
    other = tmp_path / "other.txt"
    other.write_text(format_edge_list(sample_gnp(8, 0.5, RngSeed(6))))
    cert_path = tmp_path / "c.json"
    main(["sat-upper", "--graph", str(g_path), "--r", "3", "--cert-out", str(cert_path)])
    capsys.readouterr()
    assert main(["check", "--graph", str(other), "--cert", str(cert_path)]) == 1


def test_sat_greedy_and_exact(host_file, capsys):
    assert main(["sat-greedy", "--graph", host_file, "--r", "3"]) == 0
    greedy = int(out_lines(capsys)[0])
    assert main(["sat-exact", "--graph", host_file, "--r", "3"]) == 0
    exact = int(out_lines(capsys)[0])
    assert exact <= greedy


def test_sat_exact_budget_exhaustion_exits_one(host_file, capsys):
    assert main(["sat-exact", "--graph", host_file, "--r", "3", "--budget", "2"]) == 1


def test_formula_bands(capsys):
    assert main(["formula", "bands", "--n", "100", "--p", "0.5", "--r", "2"]) == 0
    lines = out_lines(capsys)
    assert float(lines[2]) == pytest.approx(44.356, abs=1e-3)
    assert float(lines[3]) == pytest.approx(46.678, abs=1e-3)


# ----------------------------------------------------- moment and factors

def test_moment_first(capsys):
    assert main(["moment", "first", "--n", "12", "--p", "0.5", "--k", "1", "--s", "4"]) == 0
    assert out_lines(capsys) == ["170.15625"]


def test_moment_tail(capsys):
    assert main(["moment", "tail", "--trials", "10", "--s", "2", "--p", "0.3"]) == 0
    assert float(out_lines(capsys)[0]) == pytest.approx(45 * 0.7**8, rel=1e-12)


def test_moment_cdf_exact_fraction(capsys):
    assert main(["moment", "cdf", "--trials", "8", "--s", "2", "--p", "7/10"]) == 0
    assert out_lines(capsys) == ["1129221/100000000"]


def test_factor_found(tmp_path, capsys):
    path = tmp_path / "c5.txt"
    main(["gen", "sample", "--n", "5", "--p", "0.5", "--seed", "1", "--out", str(path)])
    path.write_text("5 5\n0 1\n0 4\n1 2\n2 3\n3 4\n")
    capsys.readouterr()
    assert main(["factor", "--graph", str(path), "--d", "2"]) == 0
    assert len(out_lines(capsys)) == 5


def test_factor_not_found_exits_one(tmp_path, capsys):
    path = tmp_path / "star.txt"
    path.write_text("4 3\n0 1\n0 2\n0 3\n")
    assert main(["factor", "--graph", str(path), "--d", "1"]) == 1
    assert "no" in capsys.readouterr().err.lower()


def test_matching_output_is_a_matching(host_file, capsys):
    assert main(["matching", "--graph", host_file]) == 0
    seen = set()
    for line in out_lines(capsys):
        u, v = map(int, line.split())
        assert u not in seen and v not in seen
        seen.update((u, v))


# ------------------------------------------------------------- experiment

def test_experiment_run_matches_library(tmp_path, capsys):
    cfg = ExperimentConfig(
        n_values=[6], p_values=[0.5], r_values=[2], trials=2,
        master_seed=RngSeed(21), methods=["lower", "upper-greedy"],
    )
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(config_to_json(cfg))
    out_path = tmp_path / "records.csv"
    assert main(["experiment", "run", "--config", str(cfg_path),
                 "--out", str(out_path)]) == 0
    assert out_path.read_text() == records_to_csv(run_grid(cfg))


def test_experiment_summarize(tmp_path, capsys):
    cfg = ExperimentConfig(
        n_values=[6], p_values=[0.5], r_values=[2], trials=2,
        master_seed=RngSeed(21), methods=["lower"],
    )
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(config_to_json(cfg))
    rec_path = tmp_path / "records.csv"
    main(["experiment", "run", "--config", str(cfg_path), "--out", str(rec_path)])
    summ_path = tmp_path / "summary.csv"
    assert main(["experiment", "summarize", "--records", str(rec_path),
                 "--out", str(summ_path)]) == 0
    header = summ_path.read_text().splitlines()[0]
    assert header.startswith("n,p_decimal,r,method,count,mean,stdev")


def test_experiment_verify_small(capsys):
    assert main(["experiment", "verify-small", "--max-n", "5", "--r", "2,3",
                 "--count", "5", "--seed", "3"]) == 0
    assert out_lines(capsys)[0] == "violations: 0"


# ------------------------------------------------------------ file safety

def test_no_partial_file_on_error(tmp_path):
    target = tmp_path / "missing-dir" / "out.txt"
    assert main(["gen", "complete", "--n", "4", "--out", str(target)]) == 1
    assert not target.exists()
    assert not list(tmp_path.glob("**/*.tmp*"))


# ---------------------------------------------------------------- surface

EXPECTED_COMMANDS = {
    "gen": {"sample", "regular", "complete", "empty"},
    "alpha": None,
    "alpha-band": None,
    "sat-lower": None,
    "sat-upper": None,
    "sat-greedy": None,
    "sat-exact": None,
    "check": None,
    "formula": {"star", "clique", "bands"},
    "experiment": {"run", "summarize", "verify-small"},
    "moment": {"first", "tail", "cdf"},
    "factor": None,
    "matching": None,
}


def subcommand_table(parser):
    action = parser._subparsers._group_actions[0]
    table = {}
    for name, sub in action.choices.items():
        nested = sub._subparsers._group_actions if sub._subparsers else []
        if nested:
            table[name] = set(nested[0].choices.keys())
        else:
            # positional choice argument (the gen family selector)
            choices = [set(a.choices) for a in sub._actions
                       if a.choices and a.option_strings == []]
            table[name] = choices[0] if choices else None
    return table


def test_every_operation_has_exactly_one_subcommand():
    table = subcommand_table(build_parser())
    assert set(table) == set(EXPECTED_COMMANDS)
    for name, subs in EXPECTED_COMMANDS.items():
        assert table[name] == subs, name


def test_installed_script_entry_point():
    proc = subprocess.run(
        ["starsat", "formula", "star", "6", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "5"
