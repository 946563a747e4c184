import json
import subprocess
import sys

import pytest

from truestages import cli
from truestages.universe import Universe


@pytest.fixture(scope="module")
def quickwin_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "quickwin.json"
    path.write_text(json.dumps({
        "xi": "0",
        "W": {"level": "0", "generators": [[]]},
        "T0": {"full": True},
        "T1": {"pairs": [[[], []]]},
        "bounds": {"alphabet": 2, "depth": 3},
        "play": {"xs": [0, 1], "yzs": [[0, 0], [1, 0]]},
        "y": [0, 0, 0, 0],
        "v": [0, 0, 0, 0],
        "searchBound": 3,
    }))
    return str(path)


@pytest.fixture(scope="module")
def wadge_file(tmp_path_factory):
    uni = Universe(3, 3)
    path = tmp_path_factory.mktemp("cli") / "wadge.json"
    path.write_text(json.dumps({
        "lambda": "w",
        "maxLen": 3,
        "alphabet": 3,
        "W0": {"level": "w",
               "generators": sorted(list(s) for s in uni.all_seqs()
                                    if s and s[0] == 2)},
        "W1": {"level": "w",
               "generators": sorted(list(s) for s in uni.all_seqs()
                                    if s and s[0] in (0, 1))},
        "queries": [[0, 2, 1], [2, 0, 0]],
    }))
    return str(path)


@pytest.fixture(scope="module")
def hk_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "hk.json"
    path.write_text(json.dumps({
        "alpha": "1",
        "eta": "3",
        "upsets": [
            {"level": "1", "generators": [[0]]},
            {"level": "1", "generators": [[0], [1]]},
            {"level": "1", "generators": [[]]},
        ],
    }))
    return str(path)


def run_main(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- exit codes -----------------------------------------------------------


def test_verify_runs_clean(capsys):
    code, out, _ = run_main(capsys, "verify", "--max-len", "3",
                            "--alphabet", "2", "--levels", "0,1")
    assert code == 0
    assert "command: verify" in out
    assert "TS1: pass" in out


def test_missing_instance_exits_two(capsys):
    code, _, err = run_main(capsys, "lsr", "solve", "--instance", "missing.json")
    assert code == 2
    assert "cannot read instance file" in err


def test_malformed_json_exits_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run_main(capsys, "wadge", "eval", "--instance", str(bad))
    assert code == 2
    assert "not valid JSON" in err


def test_bad_level_notation_exits_two(capsys):
    code, _, err = run_main(capsys, "truestages", "--max-len", "2",
                            "--alphabet", "2", "--levels", "0,zz")
    assert code == 2
    assert "bad level notation" in err


def test_unknown_command_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_exit_one_when_a_check_fails(capsys, monkeypatch):
    def broken(args):
        return {}, [], [{"property": "demo", "detail": "planted"}], ["demo failed"]

    monkeypatch.setitem(cli._HANDLERS, ("verify", None), broken)
    code, out, _ = run_main(capsys, "verify")
    assert code == 1
    assert "failures: 1" in out


# -- report content -------------------------------------------------------


def test_json_envelope_keys(capsys):
    code, out, _ = run_main(capsys, "jump", "--max-len", "2",
                            "--alphabet", "2", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert set(report) == {"command", "config", "results", "failures"}
    assert report["command"] == "jump"
    assert report["failures"] == []
    assert {"sigma": "[]", "events": [], "p": 0} in report["results"]


def test_relation_dump_lines(capsys):
    code, out, _ = run_main(capsys, "truestages", "--max-len", "2",
                            "--alphabet", "2", "--levels", "0,1")
    assert code == 0
    lines = [l for l in out.splitlines() if "\t" in l]
    assert "0\t[]\t[]\t1" in lines
    for line in lines:
        parts = line.split("\t")
        assert len(parts) == 4
        assert parts[3] in ("0", "1")


def test_roundtrip_reports_no_mismatches(capsys):
    code, out, _ = run_main(capsys, "hk", "roundtrip", "--seed", "7",
                            "--max-len", "3", "--alphabet", "2",
                            "--alpha", "1", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert len(report["results"]) == 20
    assert all(r["mismatches"] == 0 for r in report["results"])


def test_convert_family_to_witness(capsys, hk_file):
    code, out, _ = run_main(capsys, "hk", "convert", "--instance", hk_file,
                            "--format", "json")
    assert code == 0
    result = json.loads(out)["results"][0]
    assert result["direction"] == "dsets-to-witness"
    assert result["witness"]["eta"] == "3"


def test_convert_approx_to_witness(capsys, tmp_path):
    uni = Universe(2, 2)
    table = {s: (1 if sum(s) % 2 else 0) for s in uni.all_seqs()}
    inst = tmp_path / "approx.json"
    inst.write_text(json.dumps({
        "approx": {
            "level": "1",
            "table": {"[" + ",".join(map(str, s)) + "]": v
                      for s, v in table.items()},
        },
    }))
    code, out, _ = run_main(capsys, "hk", "convert", "--instance", str(inst),
                            "--max-len", "2", "--alphabet", "2",
                            "--format", "json")
    assert code == 0
    result = json.loads(out)["results"][0]
    assert result["direction"] == "approx-to-witness"
    assert result["family"]


def test_wadge_eval_answers(capsys, wadge_file):
    code, out, _ = run_main(capsys, "wadge", "eval",
                            "--instance", wadge_file, "--format", "json")
    assert code == 0
    results = json.loads(out)["results"]
    assert {"x": "[0,2,1]", "value": 1} in results
    assert {"x": "[2,0,0]", "value": 0} in results


def test_wadge_decompose_reports_rank(capsys, wadge_file):
    code, out, _ = run_main(capsys, "wadge", "decompose",
                            "--instance", wadge_file, "--format", "json")
    assert code == 0
    result = json.loads(out)["results"][0]
    assert result["rank"] == 1
    assert result["tree"]["kind"] == "internal"


def test_lsr_solve_and_referee(capsys, quickwin_file):
    code, out, _ = run_main(capsys, "lsr", "solve",
                            "--instance", quickwin_file, "--format", "json")
    assert code == 0
    result = json.loads(out)["results"][0]
    assert result["status"] == "IWins"
    assert result["byTurn"] == 1

    code, out, _ = run_main(capsys, "lsr", "referee",
                            "--instance", quickwin_file, "--format", "json")
    assert code == 0
    verdict = json.loads(out)["results"][0]
    assert verdict["status"] == "IWon"
    assert verdict["F"] == [1, 2]


def test_lsr_separator_and_adversarial(capsys, quickwin_file):
    code, out, _ = run_main(capsys, "lsr", "separator",
                            "--instance", quickwin_file, "--format", "json")
    assert code == 0
    result = json.loads(out)["results"][0]
    assert result == {"status": "Evidence", "sigma": "[]"}

    code, out, _ = run_main(capsys, "lsr", "adversarial",
                            "--instance", quickwin_file, "--format", "json")
    assert code == 0
    transcript = json.loads(out)["results"][0]
    assert transcript["outcome"] == "PlayerIWon"
    assert transcript["failedExtension"] == [0]


# -- process-level behavior -----------------------------------------------


def run_process(*argv):
    return subprocess.run(
        [sys.executable, "-m", "truestages", *argv],
        capture_output=True,
    )


def test_module_runs_as_script():
    proc = run_process("verify", "--max-len", "2", "--alphabet", "2",
                       "--levels", "0,1")
    assert proc.returncode == 0
    assert b"TS1: pass" in proc.stdout


def test_repeat_runs_are_byte_identical(quickwin_file):
    argv = ("lsr", "solve", "--instance", quickwin_file, "--format", "json")
    first = run_process(*argv)
    second = run_process(*argv)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout
