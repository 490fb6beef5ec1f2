"""End-to-end tests for the command-line interface."""

import json

from hdta.cli import main
from hdta.hd import check_hd
from hdta.ta import is_deterministic, validate
from hdta.ta_format import parse_ta


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def test_check_hd_exit_codes(capsys, fixtures_dir):
    code, doc, _ = run_json(capsys, "check-hd", fixtures_dir / "fork.ta")
    assert code == 0 and doc["verdict"] is True
    assert doc["witness"]["acceptance"] == "reachability"

    code, doc, _ = run_json(capsys, "check-hd", fixtures_dir / "lucky_guess.ta")
    assert code == 1 and doc["verdict"] is False

    code, doc, _ = run_json(capsys, "check-hd", fixtures_dir / "unit_lasso.ta")
    assert code == 3 and doc["verdict"] == "unsupported"


def test_resolver_output(capsys, fixtures_dir):
    code, doc, _ = run_json(capsys, "resolver", fixtures_dir / "fork.ta")
    assert code == 0 and doc["verdict"] is True
    assert doc["witness"]["automaton"] == "last_reset_fork"
    assert doc["witness"]["choices"]

    code, doc, _ = run_json(capsys, "resolver", fixtures_dir / "lucky_guess.ta")
    assert code == 1 and doc["verdict"] is False


def test_determinize_artifact(capsys, fixtures_dir, tmp_path):
    out_file = tmp_path / "fork_det.ta"
    code, doc, _ = run_json(
        capsys, "determinize", fixtures_dir / "fork.ta", "-o", out_file
    )
    assert code == 0 and doc["verdict"] is True
    assert doc["witness"]["deterministic"] is True
    produced = parse_ta(doc["witness"]["ta"]).automaton
    assert is_deterministic(produced)
    assert parse_ta(out_file.read_text()).automaton == produced

    code, doc, _ = run_json(capsys, "determinize", fixtures_dir / "lucky_guess.ta")
    assert code == 1 and doc["verdict"] is False


def test_validate_reports_gaps(capsys, fixtures_dir):
    code, doc, _ = run_json(capsys, "validate", fixtures_dir / "fork.ta")
    assert code == 1 and doc["verdict"] is False
    assert doc["witness"]["gap_count"] > 0
    assert all("state" in g and "letter" in g for g in doc["witness"]["gaps"])

    code, doc, _ = run_json(capsys, "validate", fixtures_dir / "copy_spec.ta")
    assert code == 0 and doc["verdict"] is True


def test_regions_json_and_dot(capsys, fixtures_dir):
    code, doc, _ = run_json(capsys, "regions", fixtures_dir / "fork.ta")
    assert code == 0 and doc["verdict"] is True
    assert doc["witness"]["nodes"] > 0 and doc["witness"]["edges"] > 0

    code, out, _ = run(capsys, "regions", fixtures_dir / "fork.ta", "--dot")
    assert code == 0 and out.startswith("digraph")


def test_empty_and_member(capsys, fixtures_dir):
    code, doc, _ = run_json(capsys, "empty", fixtures_dir / "fork.ta")
    assert code == 1 and doc["verdict"] is False
    assert doc["witness"]["cycle"]  # an accepted lasso is the witness

    code, doc, _ = run_json(
        capsys,
        "member",
        fixtures_dir / "fork.ta",
        "--prefix",
        "0 b 1 c 0 a 0 a",
        "--cycle",
        "1 a",
    )
    assert code == 0 and doc["verdict"] is True

    code, doc, _ = run_json(
        capsys, "member", fixtures_dir / "fork.ta", "--cycle", "1 b"
    )
    assert code == 1 and doc["verdict"] is False


def test_include_and_witness(capsys, fixtures_dir):
    code, doc, _ = run_json(
        capsys, "include", fixtures_dir / "fork.ta", fixtures_dir / "fork.ta"
    )
    assert code == 0 and doc["verdict"] is True and doc["witness"] is None

    code, doc, _ = run_json(
        capsys, "include", fixtures_dir / "lucky_guess.ta", fixtures_dir / "fork.ta"
    )
    assert code == 1 and doc["verdict"] is False
    assert doc["witness"]["cycle"]  # a distinguishing play


def test_simulate_and_universal(capsys, fixtures_dir):
    code, doc, _ = run_json(
        capsys, "simulate", fixtures_dir / "fork.ta", fixtures_dir / "fork.ta"
    )
    assert code == 0 and doc["verdict"] is True

    code, doc, _ = run_json(capsys, "universal", fixtures_dir / "stay_safe.ta")
    assert code == 0 and doc["verdict"] is True

    code, doc, _ = run_json(capsys, "universal", fixtures_dir / "fork.ta")
    assert code == 1 and doc["verdict"] is False
    assert doc["witness"]["cycle"]  # a rejected word


def test_synth_fixtures(capsys, fixtures_dir):
    code, doc, _ = run_json(capsys, "synth", fixtures_dir / "copy_spec.ta")
    assert code == 0 and doc["verdict"] is True
    assert doc["witness"]["rules"]

    code, doc, _ = run_json(capsys, "synth", fixtures_dir / "predict_spec.ta")
    assert code == 1 and doc["verdict"] is False and doc["witness"] is None

    code, out, _ = run(capsys, "synth", fixtures_dir / "copy_spec.ta", "--dot")
    assert code == 0 and out.startswith("digraph")


def test_solve_game_and_compose(capsys, fixtures_dir):
    code, doc, _ = run_json(capsys, "solve-game", fixtures_dir / "chase.ta")
    assert code == 0 and doc["verdict"] is True
    assert doc["witness"]["winner"] == "P2"

    code, doc, _ = run_json(
        capsys,
        "solve-game",
        fixtures_dir / "chase.ta",
        "--condition",
        fixtures_dir / "alternate.ta",
    )
    assert code == 0 and doc["witness"]["winner"] == "P2"

    code, doc, _ = run_json(
        capsys, "compose", fixtures_dir / "chase.ta", fixtures_dir / "alternate.ta"
    )
    assert code == 0 and doc["verdict"] is True
    composed = parse_ta(doc["witness"]["ta"])
    assert composed.is_game
    assert len(composed.automaton.states) == doc["witness"]["states"]


def test_gen_countdown(capsys, tmp_path):
    out_a, out_b = tmp_path / "a.ta", tmp_path / "b.ta"
    code, doc, _ = run_json(
        capsys,
        "gen-countdown",
        "--transitions",
        "q 1 q",
        "--k",
        "3",
        "--out-a",
        out_a,
        "--out-b",
        out_b,
    )
    assert code == 0 and doc["verdict"] is True
    assert doc["witness"]["player1_wins"] is True
    proposer = parse_ta(out_a.read_text()).automaton
    responder = parse_ta(out_b.read_text()).automaton
    assert proposer.clocks == () and responder.clocks == ("x1", "x2")
    assert validate(responder).complete
    assert check_hd(proposer)  # deterministic up to trivial acceptance

    code, doc, _ = run_json(
        capsys, "gen-countdown", "--transitions", "q 2 q", "--k", "3"
    )
    assert doc["witness"]["player1_wins"] is False


def test_usage_and_semantic_errors(capsys, fixtures_dir, tmp_path):
    code, out, err = run(capsys, "check-hd", tmp_path / "missing.ta")
    assert code == 2 and "error:" in err

    bad = tmp_path / "bad.ta"
    bad.write_text("ta broken\nwobble\n")
    code, out, err = run(capsys, "validate", bad)
    assert code == 2 and "line 2" in err

    code, out, err = run(capsys, "member", fixtures_dir / "fork.ta", "--cycle", "x a")
    assert code == 2 and "bad delay" in err

    code, out, err = run(capsys, "gen-countdown", "--transitions", "q q", "--k", "3")
    assert code == 2

    code, out, err = run(capsys, "no-such-command")
    assert code == 2

    code, out, err = run(capsys, "--help")
    assert code == 0 and "subcommand" not in err


def test_outputs_deterministic(capsys, fixtures_dir):
    first = run(capsys, "determinize", fixtures_dir / "fork.ta")
    second = run(capsys, "determinize", fixtures_dir / "fork.ta")
    assert first == second
    d1 = run(capsys, "regions", fixtures_dir / "fork.ta", "--dot")
    d2 = run(capsys, "regions", fixtures_dir / "fork.ta", "--dot")
    assert d1 == d2
