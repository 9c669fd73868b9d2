import io
import json
import subprocess
import sys

import pytest

from rtflab import cli


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out)
    return code, out.getvalue()


def test_orbital_eval_example():
    assert run(["orbital", "eval", "--phi", "KcapS", "--x", "t^2", "--q", "5"]) == (0, "1\n")


def test_orbital_eval_series_and_quaternion_side():
    code, text = run(["orbital", "eval", "--phi", "KcapS", "--x", "t^2", "--q", "3", "--series"])
    assert code == 0 and "T^" in text
    assert run(["orbital", "eval", "--phi", "IntegralDetM_G(2)", "--x", "t^-2", "--q", "3"]) == (0, "xi^2 * 1\n")


def test_fl_example_passes():
    code, text = run(["fl", "--q", "3", "--m", "0,2", "--vx", "-4..4"])
    assert code == 0
    assert text.strip().endswith("passed 54/54")


def test_afl_example_passes():
    code, text = run(["afl", "--q", "3", "--m", "0", "--vx", "1,3,5", "--json"])
    rep = json.loads(text)
    assert code == 0
    assert rep["summary"] == {"total": 9, "passed": 9}
    assert rep["provenance"]["omega_convention"] == "restriction"
    assert rep["provenance"]["psi_conductor"] == 0
    assert "measure" in rep["provenance"]


def test_json_is_byte_deterministic():
    argv = ["fl", "--q", "2", "--m", "0,2", "--vx", "-2..2", "--json"]
    assert run(argv)[1] == run(argv)[1]


def test_json_independent_of_worker_count(monkeypatch):
    argv = ["fl", "--q", "3", "--m", "0", "--vx", "-2..2", "--json"]
    monkeypatch.delenv("RTF_LAB_THREADS", raising=False)
    serial = run(argv)[1]
    monkeypatch.setenv("RTF_LAB_THREADS", "2")
    assert run(argv)[1] == serial


def test_empty_grid_warns_and_succeeds(capsys):
    code, text = run(["fl", "--q", "3", "--m", "", "--json"])
    assert code == 0
    assert json.loads(text)["summary"] == {"total": 0, "passed": 0}
    assert "warning" in capsys.readouterr().err


def test_config_errors_exit_one():
    assert run(["fl", "--q", "6"])[0] == 1
    assert run(["fl", "--q", "3", "--m", "1"])[0] == 1
    assert run(["afl", "--q", "3", "--vx", "2"])[0] == 1
    assert run(["fl", "--nonsense"])[0] == 1
    assert run(["orbital", "eval", "--phi", "Nope", "--x", "t", "--q", "3"])[0] == 1


def test_mismatch_exits_two(monkeypatch):
    from rtflab.suites import CaseResult, VerificationReport

    def fake(args, out):
        rep = VerificationReport("fl", {"q": 3})
        rep.cases.append(CaseResult("forced", None, 1, 2, False))
        cli.emit(rep, args, out)
        return cli._status(rep)

    monkeypatch.setitem(cli.COMMANDS, "fl", fake)
    code, text = run(["fl", "--q", "3"])
    assert code == 2 and "FAIL" in text


def test_axioms_command():
    assert run(["axioms", "--q", "3"])[0] == 0
    assert run(["axioms", "--q", "3", "--candidate", "bad-det"])[0] == 2


def test_metric_and_split_match():
    assert run(["minf", "--q", "2", "--samples", "10"])[0] == 0
    assert run(["match", "--q", "2,3", "--flavor", "split", "--pairs", "6"])[0] == 0


def test_combination_match_passes():
    assert run(["match", "--q", "3", "--kind", "combination", "--m", "1"])[0] == 0


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rtflab.cli", "orbital", "eval", "--phi", "KcapS",
                           "--x", "t^2", "--q", "5"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1\n"


@pytest.mark.parametrize("cmd", ["fl", "afl", "match", "gauss", "orbital", "minf", "axioms"])
def test_help_for_every_subcommand(cmd):
    proc = subprocess.run([sys.executable, "-m", "rtflab.cli", cmd, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "usage" in proc.stdout
