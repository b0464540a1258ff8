import json

import pytest

from cursedeq.cli import cli_main
from cursedeq.games import bundled_game_text


@pytest.fixture
def seqtrading(tmp_path):
    p = tmp_path / "seqtrading.game"
    p.write_text(bundled_game_text("sequential-trading"), encoding="utf-8")
    return p


def test_validate_ok(seqtrading, capsys):
    assert cli_main(["validate", str(seqtrading)]) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_violation(tmp_path, capsys):
    doc = ('cursedgame 1 "bad"\nplayers 1\n'
           "node r - - nature x:0.7 y:0.7\n"
           "node rx r x terminal 0\nnode ry r y terminal 1\nend")
    p = tmp_path / "bad.game"
    p.write_text(doc, encoding="utf-8")
    assert cli_main(["validate", str(p)]) == 1


def test_usage_errors(tmp_path):
    assert cli_main(["validate", str(tmp_path / "missing.game")]) == 2
    assert cli_main(["nonsense"]) == 2
    bad = tmp_path / "junk.game"
    bad.write_text("not a game\n", encoding="utf-8")
    assert cli_main(["validate", str(bad)]) == 2


def test_partition(seqtrading, capsys):
    assert cli_main(["partition", str(seqtrading)]) == 0
    out = capsys.readouterr().out
    assert "w1,w2,w3" in out and "w1a,w2a,w3a" in out


def test_solve_sce_no_trade(seqtrading, capsys):
    assert cli_main(["solve", str(seqtrading), "--concept", "sce", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "2:hi\ta:0.0 d:1.0" in out


def test_solve_json_deterministic(seqtrading, capsys):
    assert cli_main(["solve", str(seqtrading), "--concept", "sce", "--seed", "7",
                     "--json"]) == 0
    first = capsys.readouterr().out
    assert cli_main(["solve", str(seqtrading), "--concept", "sce", "--seed", "7",
                     "--json"]) == 0
    second = capsys.readouterr().out
    assert first == second
    payload = json.loads(first)
    assert payload["concept"] == "sce"


def test_solve_nonconvergent_exit_three(seqtrading, tmp_path):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text("max_iters 1\nrestarts 0\npolish false\n", encoding="utf-8")
    mixing = tmp_path / "mixing.game"
    mixing.write_text(bundled_game_text("mixing"), encoding="utf-8")
    assert cli_main(["solve", str(mixing), "--concept", "sce",
                     "--config", str(cfg)]) == 3


def test_check_wpce_pass(tmp_path, capsys):
    game = tmp_path / "running.game"
    game.write_text(bundled_game_text("running-example"), encoding="utf-8")
    assessment = tmp_path / "farfetched.assess"
    assessment.write_text(
        "play 1:I x:1 y:0\n"
        "play 2:w1 l:1 r:0\n"
        "play 2:w2y l:1 r:0\n"
        "play 2:w3y l:0 r:1\n"
        "conjecture 1:I 2:w2y l:1 r:0\n"
        "conjecture 1:I 2:w3y l:1 r:0\n", encoding="utf-8")
    assert cli_main(["check", str(game), "--assessment", str(assessment),
                     "--concept", "wpce"]) == 0
    # the same profile fails the witness-based consistency test
    assert cli_main(["check", str(game), "--assessment", str(assessment),
                     "--concept", "sce-witness"]) == 1


def test_check_chi_zero_flags_deviation(tmp_path):
    game = tmp_path / "onlooker.game"
    game.write_text(bundled_game_text("pennies-onlooker"), encoding="utf-8")
    assessment = tmp_path / "onlooker.assess"
    assessment.write_text(
        "play I1 H:1/2 T:1/2\nplay I2 h:1/2 t:1/2\nplay I3 a:0 b:1\n",
        encoding="utf-8")
    assert cli_main(["check", str(game), "--assessment", str(assessment),
                     "--concept", "sce-witness"]) == 0
    assert cli_main(["check", str(game), "--assessment", str(assessment),
                     "--concept", "chi-sce", "--chi", "0"]) == 1


def test_conjecture_command(tmp_path, capsys):
    game = tmp_path / "running.game"
    game.write_text(bundled_game_text("running-example"), encoding="utf-8")
    prof = tmp_path / "profile.txt"
    prof.write_text(
        "play 1:I x:0 y:1\nplay 2:w1 l:1 r:0\n"
        "play 2:w2y l:1 r:0\nplay 2:w3y l:0 r:1\n", encoding="utf-8")
    assert cli_main(["conjecture", str(game), "--at", "1:I",
                     "--profile", str(prof)]) == 0
    out = capsys.readouterr().out
    assert "2:w2y" in out


def test_experiment_command(tmp_path, capsys):
    spec = tmp_path / "exp.spec"
    spec.write_text("experiment two-stage-auction\nconcept sce\n", encoding="utf-8")
    assert cli_main(["experiment", "--spec", str(spec)]) == 0
    out = capsys.readouterr().out
    assert "65/65" in out


def test_auction_and_orderings(tmp_path, capsys):
    model = tmp_path / "wallet.model"
    model.write_text("signalmodel wallet\nfamily wallet\nbidders 2\n",
                     encoding="utf-8")
    assert cli_main(["auction", "--model", str(model), "--format", "2p",
                     "--grid", "20", "--samples", "20000"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("x\tbid")
    assert len(out.strip().split("\n")) == 21
    assert cli_main(["orderings", "--model", str(model), "--grid", "50",
                     "--samples", "20000"]) == 0
