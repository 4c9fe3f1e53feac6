import json

import pytest

from treelogic import _corpus
from treelogic.cfg import Grammar, cfg_to_theory
from treelogic.cli import BUDGET, FAIL, OK, USAGE, main
from treelogic.syntax import print_theory

EX_A = "label A;\naxiom ex x. A(x);\n"
FALSE = "label A;\naxiom ex x. A(x) & !A(x);\n"
FSD = str(_corpus.path("gpsg_fsd_example.thy"))
GB = str(_corpus.path("gb_english_fragment.thy"))
CFG = str(_corpus.path("gb_english_fragment.json"))


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def corpus(name):
    return str(_corpus.path(name))


# -- check -------------------------------------------------------------------------


def test_check_holds(capsys):
    code, out, _ = run(capsys, "check", FSD, corpus("gpsg_id5.tree"))
    assert (code, out) == (OK, "holds\n")


def test_check_names_fsd_axiom(capsys):
    code, out, _ = run(capsys, "check", FSD, corpus("gpsg_inv_broken.tree"))
    assert code == FAIL
    assert out.startswith("fails: axiom 2 (FSD_not_INV): ")


def test_check_json_and_assignments(capsys):
    code, out, _ = run(capsys, "check", "--json", "--assignments", FSD, corpus("gpsg_inv_broken.tree"))
    data = json.loads(out)
    assert code == FAIL
    assert data["axiom"] == 2 and data["axiom_name"] == "FSD_not_INV" and data["holds"] is False
    assert data["assignments"] and all(set(a) == {"x"} for a in data["assignments"])
    code, out, _ = run(capsys, "check", "--assignments", FSD, corpus("gpsg_inv_broken.tree"))
    assert "counterexample:" in out


@pytest.mark.parametrize("theory,tree", [
    ("missing.thy", None),
    (EX_A.replace(";", ""), "({A})"),
    (EX_A, "({A} ({Z}))"),
    (EX_A, "({A}"),
    ("const c;\nlabel A;\naxiom A(c);\n", "({A})"),
])
def test_check_usage_errors(capsys, files, theory, tree):
    th = theory if theory == "missing.thy" else files("t.thy", theory)
    tr = files("t.tree", tree) if tree else files("t.tree", "({A})")
    code, _, err = run(capsys, "check", th, tr)
    assert code == USAGE and err.startswith("treelogic: ")


def test_parse_error_reports_span(capsys, files):
    code, _, err = run(capsys, "check", files("t.thy", "label A;\naxiom A(x) &;\n"), files("t.tree", "({A})"))
    assert code == USAGE
    assert "t.thy:2:" in err


def test_check_budget(capsys, files, monkeypatch):
    th = files("t.thy", "label A;\naxiom Ex X. all x. X(x);\n")
    tr = files("t.tree", "({A} ({A}) ({A}))")
    assert run(capsys, "check", "--node-budget", "2", th, tr)[0] == BUDGET
    monkeypatch.setenv("TREELOGIC_NODE_BUDGET", "2")
    assert run(capsys, "check", th, tr)[0] == BUDGET
    assert run(capsys, "check", "--node-budget", "5", th, tr)[0] == OK


# -- compile, empty, witness ---------------------------------------------------------


def test_compile_witness(capsys, files, tmp_path):
    aut = str(tmp_path / "a.json")
    assert run(capsys, "compile", files("t.thy", EX_A), "-o", aut) == (OK, "", "")
    assert run(capsys, "empty", aut) == (OK, "", "")
    assert run(capsys, "witness", aut)[:2] == (OK, "({A})\n")
    code, out, _ = run(capsys, "witness", "--json", aut)
    assert json.loads(out) == {"witness": "({A})", "nodes": 1}


def test_compile_to_stdout(capsys, files):
    code, out, _ = run(capsys, "compile", files("t.thy", EX_A))
    assert code == OK and json.loads(out)


def test_false_theory_is_empty(capsys, files, tmp_path):
    aut = str(tmp_path / "a.json")
    assert run(capsys, "compile", files("f.thy", FALSE), "-o", aut)[0] == OK
    assert run(capsys, "empty", aut)[:2] == (FAIL, "empty\n")
    assert run(capsys, "witness", aut)[0] == FAIL
    assert json.loads(run(capsys, "empty", "--json", aut)[1]) == {"empty": True}


def test_cfg_witness_rechecks(capsys, files, tmp_path):
    th = files("g.thy", print_theory(cfg_to_theory(Grammar.parse("S -> A B"))))
    aut = str(tmp_path / "g.json")
    assert run(capsys, "compile", th, "-o", aut)[0] == OK
    code, out, _ = run(capsys, "witness", aut)
    assert (code, out) == (OK, "({S} ({A}) ({B}))\n")
    assert run(capsys, "check", th, files("w.tree", out))[0] == OK


def test_state_cap(capsys, files):
    assert run(capsys, "compile", "--state-cap", "1", files("t.thy", EX_A))[0] == BUDGET


@pytest.mark.parametrize("text", ["{", "[]", '{"states": 2}'])
def test_malformed_automaton(capsys, files, text):
    assert run(capsys, "empty", files("a.json", text))[0] == USAGE
    assert run(capsys, "witness", files("a.json", text))[0] == USAGE


# -- enumerate ---------------------------------------------------------------------


def test_enumerate_cfg(capsys, files):
    th = files("g.thy", print_theory(cfg_to_theory(Grammar.parse("S -> A B"))))
    assert run(capsys, "enumerate", th, "--max-nodes", "3")[:2] == (OK, "({S} ({A}) ({B}))\n")


def test_enumerate_counts(capsys, files):
    assert run(capsys, "enumerate", files("f.thy", FALSE), "--max-nodes", "3", "--count")[:2] == (OK, "0\n")
    assert run(capsys, "enumerate", files("e.thy", ""), "--max-nodes", "2", "-k", "1")[:2] == (OK, "({})\n({} ({}))\n")
    code, out, _ = run(capsys, "enumerate", "--json", files("e.thy", ""), "--max-nodes", "2", "-k", "1")
    assert json.loads(out) == {"count": 2, "trees": ["({})", "({} ({}))"]}


def test_enumerate_usage(capsys, files):
    assert run(capsys, "enumerate", files("e.thy", ""), "--max-nodes", "0")[0] == USAGE
    assert run(capsys, "enumerate", files("e.thy", ""), "--max-nodes", "2", "-k", "0")[0] == USAGE
    assert run(capsys, "enumerate", files("c.thy", "const c;\n"), "--max-nodes", "2")[0] == USAGE


# -- chains ------------------------------------------------------------------------


def test_chains_wh(capsys):
    code, out, _ = run(capsys, "chains", GB, corpus("gb_wh.tree"), CFG)
    assert code == OK
    assert "Abar: 0 1.1.1.1.1\n" in out and out.endswith("max_overlap: 1\n")


def test_chains_no_movement(capsys):
    code, out, _ = run(capsys, "chains", GB, corpus("gb_no_movement.tree"), CFG)
    assert code == OK
    assert all(l.startswith(("trivial:", "max_overlap:")) for l in out.splitlines())


def test_chains_overlap(capsys):
    assert run(capsys, "chains", GB, corpus("gb_overlap.tree"), CFG)[0] == OK
    code, out, _ = run(capsys, "chains", GB, corpus("gb_overlap.tree"), CFG, "--max-overlap", "1")
    assert code == FAIL and "max_overlap: 2" in out
    code, out, _ = run(capsys, "chains", "--json", GB, corpus("gb_overlap.tree"), CFG, "--max-overlap", "1")
    data = json.loads(out)
    assert data["max_overlap"] == 2 and data["exceeds"] == 1
    assert [c["type"] for c in data["chains"] if c["type"]] == ["X0", "X0"]


def test_chains_partition_violation(capsys):
    code, out, _ = run(capsys, "chains", GB, corpus("gb_multi_trace.tree"), CFG)
    assert code == FAIL and out.startswith("partition violation: node 0 ")


def test_chains_bad_config(capsys, files):
    assert run(capsys, "chains", GB, corpus("gb_wh.tree"), files("c.json", '{"links": 3}'))[0] == USAGE


# -- expand and misc -------------------------------------------------------------------


def test_expand(capsys):
    code, out, _ = run(capsys, "expand", GB, "Intervenes")
    assert (code, out) == (OK, "Intervenes(z, x, y) := dom(z, y) & !z = y & !dom(z, x)\n")
    data = json.loads(run(capsys, "expand", "--json", GB, "Intervenes")[1])
    assert data["params"] == ["z", "x", "y"]
    assert run(capsys, "expand", GB, "Nope")[0] == USAGE


def test_bad_verb(capsys):
    assert run(capsys, "frobnicate")[0] == USAGE
    assert run(capsys)[0] == USAGE


def test_deterministic(capsys):
    argv = ["chains", "--json", GB, corpus("gb_overlap.tree"), CFG]
    assert run(capsys, *argv) == run(capsys, *argv)
    argv = ["check", "--assignments", FSD, corpus("gpsg_pas_violation.tree")]
    assert run(capsys, *argv) == run(capsys, *argv)
