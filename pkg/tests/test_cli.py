import json
from pathlib import Path

import pytest

from pbclone import cli, dsl, verify
from pbclone.formula import evaluate

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_examples(capsys):
    assert run(capsys, "eval", SAMPLES / "h_gadget.pbf")[:2] == (0, "2 1 1 2\n")
    assert run(capsys, "eval", SAMPLES / "empty.pbf")[:2] == (0, "1\n")
    assert run(capsys, "eval", SAMPLES / "imp_path.pbf")[:2] == (0, "1001\n")


def test_eval_precision_and_json(capsys, tmp_path):
    f = tmp_path / "third.pbf"
    f.write_text("fn T arity 0 table 1/3\nformula A() := T()\n")
    assert run(capsys, "eval", f, "--precision", 4)[1] == "0.3333\n"
    code, out, _ = run(capsys, "eval", f, "--json")
    assert json.loads(out) == {"A": {"arity": 0, "values": ["1/3"]}}


def test_eval_resolves_formula_references(capsys, tmp_path):
    f = tmp_path / "nested.pbf"
    f.write_text("formula G(a, b) := sum m . IMP(a, m) * IMP(m, b)\n"
                 "formula P(x, y) := G(x, y) * G(y, x)\n")
    code, out, _ = run(capsys, "eval", f, "--target", "P")
    assert (code, out) == (0, "1 0 0 1\n")


def test_eval_with_env_file(capsys, tmp_path):
    (tmp_path / "env.pbf").write_text("fn U arity 1 table 2 1\n")
    (tmp_path / "main.pbf").write_text("formula H(x, z) := sum y . XOR3(x, y, z) * U(y)\n")
    code, out, _ = run(capsys, "eval", tmp_path / "main.pbf", "--env", tmp_path / "env.pbf")
    assert (code, out) == (0, "2 1 1 2\n")


def test_parse_errors_exit_2(capsys, tmp_path):
    f = tmp_path / "bad.pbf"
    f.write_text("fn F arity 1\ntable 1 2 3\n")
    code, _, err = run(capsys, "eval", f)
    assert code == 2 and "line 2" in err and "column" in err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["frobnicate"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["synth", "chi"])
    assert e.value.code == 2
    assert run(capsys, "eval", "/nonexistent.pbf")[0] == 2


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", SAMPLES / "eq_prime.pbf")
    assert code == 0 and json.loads(out)["inP"] is True
    assert json.loads(run(capsys, "analyze", SAMPLES / "oplus3.pbf")[1])["lsm"] is False
    ones = json.loads(run(capsys, "analyze", SAMPLES / "ones.pbf")[1])
    assert all(ones[k] for k in ("lsm", "productForm", "inP", "inC"))


def test_classify(capsys):
    assert run(capsys, "classify", SAMPLES / "product_form")[1].startswith("ProductForm_FPRAS")
    assert run(capsys, "classify", SAMPLES / "bis")[1].startswith("BISHard")
    code, out, _ = run(capsys, "classify", SAMPLES / "antiferro.pbf", "--json")
    report = json.loads(out)
    assert code == 0 and report["classification"]["class"] == "SATHard"
    assert report["classification"]["verified"] is True
    assert json.loads(run(capsys, "classify", "--json")[1]) == {}


def test_synth_or_universal(capsys, tmp_path):
    out = tmp_path / "or.pbf"
    assert run(capsys, "synth", "or-universal", SAMPLES / "target.pbf", "-o", out)[0] == 0
    ws = dsl.load(out)
    assert evaluate(ws.formulas["psi1"], ws.env()).values == (1, 2, 4, 8)
    assert "plan" in ws.schedules and not ws.schedules["plan"].exact


def test_synth_chi_and_ising(capsys, tmp_path):
    out = tmp_path / "chi.pbf"
    run(capsys, "synth", "chi", "--point", "11", "--c", "3", "-o", out)
    assert run(capsys, "eval", out)[1] == "1 1 1 3\n"
    code, out_text, _ = run(capsys, "synth", "ising", "--matrix", "11,11", "--y", "3", "--json")
    info = json.loads(out_text)
    assert code == 0 and info["scale"] == "16"
    ws = dsl.parse(info["dsl"])
    assert "ising" in ws.instances


@pytest.mark.parametrize("argv", [
    ["binary", SAMPLES / "antiferro.pbf"],
    ["binary", SAMPLES / "eq_prime.pbf"],
    ["lsm3", SAMPLES / "lsm3.pbf"],
    ["weights", "--g", "3/8,5/8"],
    ["weights", "--g", "1/4,3/4", "--base", "OR"],
    ["shift", "--h", "3,1", "--g", "2,1"],
])
def test_synth_outputs_reparse(capsys, argv):
    code, out, _ = run(capsys, "synth", *argv)
    assert code == 0
    ws = dsl.parse(out)
    assert ws.formulas


def test_synth_weights_value(capsys, tmp_path):
    out = tmp_path / "w.pbf"
    run(capsys, "synth", "weights", "--g", "3/8,5/8", "-o", out)
    assert run(capsys, "eval", out)[1] == "3/8 5/8\n"


def test_synth_precondition_failure_exits_2(capsys):
    assert run(capsys, "synth", "binary", SAMPLES / "ones.pbf")[0] == 2


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "lsm4-counterexample")
    assert code == 0 and "PASS" in out and "-1/8" in out
    code, out, _ = run(capsys, "verify", "convolution", "--n", 5, "--trials", 100)
    assert code == 0 and out.startswith("PASS convolution checked=100 seed=0")
    code, out, _ = run(capsys, "verify", "topkis", "--n", 3, "--seed", 4, "--json")
    assert code == 0 and json.loads(out)[0]["seed"] == 4


def test_verify_failure_exits_1(capsys, monkeypatch):
    def broken(seed=0):
        return verify.VerifyResult("broken", False, 1, seed, {"table": ["1"]})
    monkeypatch.setitem(verify.LEMMAS, "broken", broken)
    code, out, _ = run(capsys, "verify", "broken")
    assert code == 1 and out.startswith("FAIL broken") and "counterexample" in out


def test_threads_do_not_change_output(capsys):
    one = run(capsys, "verify", "evaluator", "--trials", 20, "--threads", 1)
    four = run(capsys, "verify", "evaluator", "--trials", 20, "--threads", 4)
    assert one == four


def test_arity_cap_flag(capsys, tmp_path):
    f = tmp_path / "big.pbf"
    f.write_text("fn B arity 3 table 1 1 1 1 1 1 1 1\n")
    assert run(capsys, "analyze", f, "--arity-cap", 2)[0] == 2
    assert run(capsys, "analyze", f)[0] == 0
