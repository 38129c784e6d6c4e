import json

import pytest

from tdmc.cli import main

C5 = "p tw 5 5\n1 2\n2 3\n3 4\n4 5\n5 1\n"
K4 = "p tw 4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n"


@pytest.fixture
def c5(tmp_path):
    p = tmp_path / "c5.gr"
    p.write_text(C5)
    return str(p)


@pytest.fixture
def k4(tmp_path):
    p = tmp_path / "k4.gr"
    p.write_text(K4)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_decompose(capsys, c5):
    code, out = run(capsys, "decompose", c5)
    assert code == 0
    assert out.startswith("s td ")


def test_nicify(capsys, c5):
    code, out = run(capsys, "nicify", c5)
    assert code == 0
    assert out.startswith("s vntd ")


def test_solve_sat_and_unsat(capsys, c5, k4):
    code, out = run(capsys, "solve", "3col", c5)
    assert code == 0
    payload = json.loads(out)
    assert payload["satisfiable"] is True
    code, out = run(capsys, "solve", "3col", k4)
    assert code == 1
    assert json.loads(out)["satisfiable"] is False


def test_solve_value_and_witness(capsys, c5):
    code, out = run(capsys, "solve", "vc", c5)
    payload = json.loads(out)
    assert payload["value"] == 3
    assert len(payload["witness"]["S"]) == 3
    assert payload["stats"]["max_states"] >= 1


def test_solve_with_td_file(capsys, c5, tmp_path):
    code, out = run(capsys, "decompose", c5)
    td_file = tmp_path / "c5.td"
    td_file.write_text(out)
    code, out = run(capsys, "solve", "vc", c5, "--td", str(td_file))
    assert code == 0
    assert json.loads(out)["value"] == 3


def test_solve_formula_from_file(capsys, c5, tmp_path):
    mso = tmp_path / "iso.mso"
    mso.write_text("free S;\nmaximize;\nforall x forall y edge -> (!S(x) | !S(y));\n")
    code, out = run(capsys, "solve", str(mso), c5)
    assert json.loads(out)["value"] == 2


def test_color3(capsys, c5, k4):
    code, out = run(capsys, "color3", c5, "--backend", "numpy")
    assert code == 0 and json.loads(out)["satisfiable"]
    code, out = run(capsys, "color3", k4, "--backend", "numpy")
    assert code == 1


def test_oracle(capsys, c5):
    code, out = run(capsys, "oracle", "vc", c5)
    assert code == 0
    assert json.loads(out)["value"] == 3


def test_weights_file(capsys, c5, tmp_path):
    w = tmp_path / "w.txt"
    w.write_text("S 1 5\n")
    code, out = run(capsys, "solve", "vc", c5, "--weights", str(w))
    payload = json.loads(out)
    assert payload["value"] == 3  # vertex 0 avoided: other optimum still costs 3
    assert 0 not in payload["witness"]["S"]


def test_bench_csv(capsys, c5, k4):
    code, out = run(capsys, "bench", "vc", c5, k4)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",")[:4] == ["instance", "n", "m", "width"]
    assert len(lines) == 3


def test_bad_input_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.gr"
    bad.write_text("p tw 2 1\n1 5\n")
    code, _ = run(capsys, "solve", "vc", str(bad))
    assert code == 2
    code, _ = run(capsys, "solve", "vc", str(tmp_path / "missing.gr"))
    assert code == 2


def test_dump_layout(capsys, c5):
    code = main(["solve", "vc", c5, "--dump-layout"])
    captured = capsys.readouterr()
    assert code == 0
    assert '"symmetric_bits"' in captured.err
