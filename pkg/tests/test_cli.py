"""Command-line surface: subcommands, output formats, and exit codes."""

import json

from coclass3.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# -- build ---------------------------------------------------------------------

def test_build_text(capsys):
    code, out, _ = run(capsys, "build", "M[e=2,i=1]")
    assert code == 0
    assert "order 3^5 = 243" in out
    assert "type a.1" in out and "kappa (000;0)" in out
    assert "rho (2,2,3;3)" in out


def test_build_class2_text(capsys):
    code, out, _ = run(capsys, "build", "B[e=2]")
    assert code == 0
    assert "order 3^4 = 81" in out
    assert "class 2" in out
    assert "type" not in out          # no transfer pattern for the chain


def test_build_json_deterministic(capsys):
    code, out1, _ = run(capsys, "build", "MM[e=2,i=1]", "--format", "json")
    assert code == 0
    rep = json.loads(out1)
    assert rep["order"] == 729
    assert rep["type"] == "d.10" and rep["kappa"] == "(011;2)"
    code, out2, _ = run(capsys, "build", "MM[e=2,i=1]", "--format", "json")
    assert out1 == out2


# -- error paths ---------------------------------------------------------------

def test_bad_label_exits_2(capsys):
    code, _, err = run(capsys, "build", "M[e=2]")
    assert code == 2
    assert "error" in err


def test_unknown_command_exits_2(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2


def test_bad_flag_exits_2(capsys):
    code, _, err = run(capsys, "tree", "CF")     # missing required --e
    assert code == 2


def test_descendants_step_too_large_exits_2(capsys):
    code, _, err = run(capsys, "descendants", "M[e=2,i=1]", "--step", "3")
    assert code == 2
    assert "error" in err


# -- tree exports --------------------------------------------------------------

def test_tree_dot(capsys):
    code, out1, _ = run(capsys, "tree", "CF", "--e", "3", "--i-max", "2",
                        "--format", "dot")
    assert code == 0
    assert out1.startswith('digraph "CF_e3"')
    assert "style=bold" in out1
    code, out2, _ = run(capsys, "tree", "CF", "--e", "3", "--i-max", "2",
                        "--format", "dot")
    assert out1 == out2


def test_tree_json(capsys):
    code, out, _ = run(capsys, "tree", "BCF", "--e", "2", "--i-max", "2",
                       "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert len(rep["vertices"]) == 5 + 9
    assert all("kappa" in v for v in rep["vertices"])


def test_tree_text(capsys):
    code, out, _ = run(capsys, "tree", "CF", "--e", "3", "--i-max", "1",
                       "--format", "text")
    assert code == 0
    assert out.splitlines()[0].startswith("M[e=3,c=3]")
    assert sum(1 for ln in out.splitlines() if ln.strip()) == 7


# -- descendants ---------------------------------------------------------------

def test_descendants_first_branch(capsys):
    code, out, _ = run(capsys, "descendants", "M[e=2,i=1]")
    assert code == 0
    rep = json.loads(out)
    assert rep["classes"] == 7
    types = sorted(m["type"] for m in rep["members"])
    assert types == ["a.1"] * 5 + ["b.16", "b.3"]


def test_descendants_text(capsys):
    code, out, _ = run(capsys, "descendants", "M[e=2,i=1]", "--format", "text")
    assert code == 0
    assert "7 classes" in out


# -- export-gap ----------------------------------------------------------------

def test_export_gap(capsys):
    code, out, _ = run(capsys, "export-gap", "M[e=2,i=1]")
    assert code == 0
    assert "FreeGroup" in out
    assert "order 243" in out


# -- verify --------------------------------------------------------------------

def test_verify_consistency_small(capsys):
    code, out, _ = run(capsys, "verify", "consistency",
                       "--e-max", "3", "--i-max", "2")
    assert code == 0
    assert "VERIFY PASS" in out


def test_verify_quiet_and_jobs(capsys):
    code, out, _ = run(capsys, "verify", "patterns",
                       "--e-max", "2", "--i-max", "2", "--jobs", "2", "--quiet")
    assert code == 0
    assert "VERIFY PASS" in out
    assert "[pass]" not in out        # quiet prints failures only
