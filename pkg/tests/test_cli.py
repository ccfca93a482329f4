import io
import json
from pathlib import Path

import pytest

from termgraph.cli import _show, main
from termgraph.cospan import equiv
from termgraph.formats import cospan_from_document
from termgraph.letlang import elaborate, parse_file

FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def fx(name):
    return FIXTURES / name


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_validate():
    code, out, _ = run("validate", fx("shared.tg"))
    assert code == 0
    assert out == "ok: acyclic, 0 inputs, 4 internal nodes, 1 outputs\n"
    code, out, _ = run("validate", fx("loop.tg"))
    assert out.startswith("ok: cyclic (cycle through b)")


def test_laws_violation_exits_1(tmp_path):
    doc = json.loads(fx("example_open.json").read_text(encoding="utf-8"))
    doc["s"] = {"1": "+_1([x],[y])", "2": "*_2([x],+_1([y],[y]))"}
    path = write(tmp_path, "bad.json", json.dumps(doc))
    code, out, _ = run("laws", path)
    assert code == 1
    assert out.splitlines()[0] == "counit: ok, comultiplication: FAIL, leaf: ok"


def test_eval_rat_and_env():
    code, out, _ = run("eval", fx("example_open.json"), "--algebra", "rat", "--env", "x=1/2", "--env", "y=1/3")
    assert code == 0
    assert out == "r = 5/12 (2 op applications)\n"


def test_eval_missing_env_is_usage_error():
    code, _, err = run("eval", fx("example_open.json"))
    assert code == 2 and "--env" in err


def test_eval_refuses_cyclic():
    code, _, err = run("eval", fx("loop.tg"))
    assert code == 2 and "solve" in err


def test_solve():
    code, out, _ = run("solve", fx("halve.tg"), "--algebra", "rat", "--op", "h=x/2+1")
    assert code == 0 and out.startswith("x = 1.99999999")
    code, out, _ = run("solve", fx("loop.tg"), "--max-iter", "100")
    assert code == 1 and out == "unsolvable: no fixpoint within 100 iterations\n"
    code, out, _ = run("solve", fx("shared.tg"), "--const", "α=2,β=3")
    assert (code, out) == (0, "w = 25\n")


def test_unfold_unknown_node():
    code, _, err = run("unfold", fx("loop.tg"), "--node", "q", "--depth", "1")
    assert code == 2 and "unknown node" in err


@pytest.mark.parametrize("fmt", ["let", "graph", "abstract", "dot"])
def test_convert(fmt, tmp_path):
    code, out, _ = run("convert", fx("example_closed.json"), "--to", fmt)
    assert code == 0
    if fmt == "let":
        assert out.splitlines()[0] == "inputs;"
        back = elaborate(parse_file(out)[1])
        original = cospan_from_document(fx("example_closed.json").read_text(encoding="utf-8"))
        assert back.target == original.target
    elif fmt == "dot":
        assert out.startswith("digraph")
    else:
        c = cospan_from_document(out)
        assert c.body.validate().ok
        if fmt == "abstract":
            assert json.loads(out)["s"]["5"] == "+_5(+_3(α_1(),β_2()),*_4(α_1(),β_2()))"


def test_convert_to_file(tmp_path):
    target = tmp_path / "out.tg"
    code, out, _ = run("convert", fx("shared.tg"), "--to", "let", "-o", target)
    assert code == 0 and out == ""
    assert target.read_text(encoding="utf-8").startswith("inputs;")


def test_compose_and_equiv(tmp_path):
    first = write(tmp_path, "t.tg", 'inputs a; let v = "+"(a, a); outputs b1 = v, b2 = a;')
    second = write(tmp_path, "u.tg", 'inputs b1, b2; let w = "*"(b1, b2); outputs c = w;')
    expected = write(tmp_path, "e.tg", 'inputs a; let p = "+"(a, a); let q = "*"(p, a); outputs c = q;')
    out_path = tmp_path / "composite.tg"
    code, _, err = run("compose", first, second, "-o", out_path)
    assert code == 0, err
    assert out_path.read_text(encoding="utf-8") == 'inputs a;\nlet n0 = "+"(a, a);\nlet n1 = "*"(n0, a);\noutputs c = n1;\n'
    code, out, _ = run("equiv", out_path, expected)
    assert code == 0 and out.splitlines()[0] == "equivalent"
    code, out, _ = run("equiv", first, expected)
    assert code == 1


def test_compose_json_output(tmp_path):
    first = write(tmp_path, "t.tg", 'inputs a; let v = "+"(a, a); outputs b = v;')
    second = write(tmp_path, "u.tg", 'inputs b; let w = "*"(b, b); outputs c = w;')
    out_path = tmp_path / "c.json"
    assert run("compose", first, second, "-o", out_path)[0] == 0
    assert cospan_from_document(out_path.read_text(encoding="utf-8")).target == {"c": "term"}


def test_compose_boundary_error(tmp_path):
    first = write(tmp_path, "t.tg", "inputs a; outputs b = a;")
    second = write(tmp_path, "u.tg", "inputs z; outputs z;")
    code, _, err = run("compose", first, second)
    assert code == 2 and "tg: error:" in err


def test_tensor(tmp_path):
    code, out, _ = run("tensor", fx("shared.tg"), fx("loop.tg"))
    assert code == 0
    assert out.splitlines()[0] == "inputs;"
    assert "letrec" in out


def test_sig_option(tmp_path):
    sig = write(tmp_path, "nat.sig", "sort nat;\nop zero : () -> nat;\nop succ : (nat) -> nat;\n")
    prog = write(tmp_path, "p.tg", "inputs; let z = zero(); let one = succ(z); outputs one;")
    code, out, _ = run("--sig", sig, "eval", prog, "--const", "zero=0")
    assert (code, out) == (0, "one = 1 (2 op applications)\n")
    code, _, err = run("--sig", sig, "eval", write(tmp_path, "q.tg", "inputs; let z = nope(); outputs z;"))
    assert code == 2 and "nope" in err


def test_parse_error_location(tmp_path):
    prog = write(tmp_path, "p.tg", "inputs x;\nlet y = f(q);\noutputs y;\n")
    code, _, err = run("validate", prog)
    assert code == 2 and "2:11:" in err


def test_usage_errors():
    assert run()[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("validate", "/nonexistent/file.tg")[0] == 2
    assert run("eval", fx("shared.tg"), "--const", "α")[0] == 2


def test_equiv_files_round_trip(tmp_path):
    for name in ("shared.tg", "unshared.tg", "irrelevant.tg", "loop.tg"):
        json_path = tmp_path / (name + ".json")
        run("convert", fx(name), "--to", "graph", "-o", json_path)
        code, out, _ = run("equiv", fx(name), json_path)
        assert code == 0, name


def test_show():
    from fractions import Fraction

    assert _show(Fraction(4, 2)) == "2"
    assert _show(Fraction(1, 3)) == "1/3"
    assert _show(Fraction(1, 3 * 10**7)) == "3.33333333333e-08"
    assert _show(7) == "7"


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "termgraph", "laws", str(fx("shared.tg"))], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "counit: ok, comultiplication: ok, leaf: ok\n"


def test_let_and_json_forms_agree():
    c1 = elaborate(*reversed(parse_file(fx("shared.tg").read_text(encoding="utf-8"))))
    code, out, _ = run("convert", fx("shared.tg"), "--to", "graph")
    assert equiv(c1, cospan_from_document(out)) is not None
