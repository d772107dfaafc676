import io
import json

import pytest

from iqml.cli import run
from iqml.kripke import render_model


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path, two_index_model, ep_pair):
    m1, w1, m2, w2 = ep_pair
    paths = {}
    for name, m in (("two", two_index_model), ("m1", m1), ("m2", m2)):
        p = tmp_path / f"{name}.kmodel"
        p.write_text(render_model(m))
        paths[name] = str(p)
    return paths


def test_check(files):
    assert invoke("check", files["two"], "w", "[E]p") == (0, "true\n", "")
    code, out, _ = invoke("check", files["two"], "w", "[A]p")
    assert (code, out) == (1, "false\n")


def test_sat_and_valid():
    assert invoke("sat", "p & ~p")[:2] == (1, "UNSAT\n")
    code, out, _ = invoke("sat", "<E>p & [A]q")
    assert code == 0 and out.startswith("SAT\nworld w0")
    assert invoke("valid", "[A](p->q) -> (<A>p -> <A>q)")[:2] == (0, "VALID\n")
    code, out, _ = invoke("valid", "[E]p -> [A]p")
    assert code == 1 and out.startswith("NOT VALID\n")


def test_sat_json():
    code, out, _ = invoke("sat", "<E>p", "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["verdict"] == "sat" and obj["command"] == "sat"
    assert obj["model"].startswith("world w0") and obj["diagnostics"] == []


def test_oracle():
    code, out, _ = invoke("oracle", "<E>p & <A>~p", "--worlds", "3", "--indices", "2")
    assert code == 0 and out.startswith("FOUND\n")
    assert invoke("oracle", "p & ~p", "--worlds", "2", "--indices", "1")[:2] == (1, "NONE\n")


def test_bisim_commands(files):
    code, out, _ = invoke("bisim", files["m1"], "w1", files["m2"], "w2", "--explain")
    lines = out.splitlines()
    assert code == 1 and lines[0] == "NOT BISIMILAR" and len(lines) == 2
    assert invoke("bisim", files["m1"], "w1", files["m1"], "w1")[:2] == (0, "BISIMILAR\n")
    assert invoke("nbisim", files["m1"], "w1", files["m2"], "w2", "--n", "0")[:2] == (0, "0-BISIMILAR\n")
    assert invoke("nbisim", files["m1"], "w1", files["m2"], "w2", "--n", "1")[:2] == (1, "NOT 1-BISIMILAR\n")
    code, out, _ = invoke("distinguish", files["m1"], "w1", files["m2"], "w2", "--max-n", "2")
    assert code == 0 and out.strip() == lines[1]


def test_distinguished_formula_separates(files):
    _, out, _ = invoke("distinguish", files["m1"], "w1", files["m2"], "w2")
    f = out.strip()
    assert invoke("check", files["m1"], "w1", f)[0] == 0
    assert invoke("check", files["m2"], "w2", f)[0] == 1


def test_charform_translate_ef(files):
    assert invoke("charform", files["two"], "u", "--n", "0")[:2] == (0, "p\n")
    assert invoke("charform", files["two"], "v", "--n", "0", "--props", "p", "q")[1] == "(~p & ~q)\n"
    code, out, _ = invoke("translate", "[E]p")
    assert (code, out) == (0, "EXISTS-I t (FORALL-W y (R(x,t,y) -> Qp(y)))\n")
    assert invoke("ef", files["m1"], "w1", files["m2"], "w2", "--qx", "2", "--qt", "1")[:2] == (1, "Spoiler\n")
    assert invoke("ef", files["m1"], "w1", files["m1"], "w1", "--qx", "2", "--qt", "1")[:2] == (0, "Duplicator\n")


def test_prove(tmp_path):
    good = tmp_path / "good.proof"
    good.write_text("1: p -> p ; A0\n2: [E](p -> p) ; NecE 1\n")
    assert invoke("prove", str(good))[:2] == (0, "ACCEPTED\n")
    bad = tmp_path / "bad.proof"
    bad.write_text("1: p -> q ; A0\n")
    code, out, _ = invoke("prove", str(bad))
    assert code == 1 and out.startswith("REJECTED line 1:")


@pytest.mark.parametrize("argv", [
    ("sat", "p &"),
    ("check", "missing.kmodel", "w", "p"),
    ("frobnicate",),
    ("nbisim", "a", "b", "c", "d"),
])
def test_errors_exit_two(argv, capsys):
    code, out, err = invoke(*argv)
    assert code == 2
    capsys.readouterr()


def test_unknown_world_and_json_error(files):
    code, out, err = invoke("check", files["two"], "nowhere", "p", "--format", "json")
    assert code == 2 and "nowhere" in err
    assert json.loads(out)["verdict"] is None


def test_bad_model_file(tmp_path):
    p = tmp_path / "bad.kmodel"
    p.write_text("world a\nedge a i b\n")
    code, _, err = invoke("check", str(p), "a", "p")
    assert code == 2 and err


def test_deterministic(files):
    for argv in (("random-formula", "--seed", "7", "--depth", "3"),
                 ("random-model", "--seed", "7"),
                 ("sat", "<E>(p | q) & <A>~p & [E]q"),
                 ("bisim", files["m1"], "w1", files["m2"], "w2", "--explain")):
        assert invoke(*argv) == invoke(*argv)
    assert invoke("random-formula", "--seed", "1")[1] != invoke("random-formula", "--seed", "2")[1]
