import io
import json
from pathlib import Path

from cupfix.cli import main
from cupfix.model import parse_instance

from corpus import INSTANCE_DIR

E1 = str(INSTANCE_DIR / "e1.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "-i", E1)
    assert code == 0 and out.strip() == "1/2"


def test_solve_modes(capsys):
    for mode in ("full", "reachable", "lowmem"):
        code, out, _ = run(capsys, "solve", "-i", E1, "--mode", mode)
        assert code == 0 and out.strip() == "1/2"


def test_decide_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "decide", "-i", E1)
    assert code == 0 and out.strip() == "yes"
    doc = json.loads(Path(E1).read_text())
    doc["threshold"] = "1"
    strict = tmp_path / "e1_t1.json"
    strict.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "decide", "-i", str(strict))
    assert code == 1 and out.strip() == "no"


def test_respond(capsys):
    code, out, _ = run(capsys, "respond", "-i", E1)
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] in ("c=PLAY", "c=THROW")  # both tie at the optimum
    assert lines[-1] == "value 1/2"


def test_cover(capsys, tmp_path):
    code, out, _ = run(capsys, "cover", "-i", E1)
    assert code == 0
    assert set(out.split()) <= {"e*", "a", "b", "c"}


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "-i", E1)
    assert code == 0 and out.strip() == "1/2"
    code, out, _ = run(capsys, "oracle", "-i", E1, "--nonadaptive")
    assert code == 0 and out.strip() == "1/2"


def test_mc(capsys):
    code, out, _ = run(capsys, "mc", "-i", E1, "--trials", "2000", "--seed", "9")
    assert code == 0
    lines = dict(line.split() for line in out.strip().splitlines())
    assert abs(float(lines["estimate"]) - 0.5) < 0.05
    code2, out2, _ = run(capsys, "mc", "-i", E1, "--trials", "2000", "--seed", "9")
    assert out2 == out  # deterministic per seed


def test_usage_error(capsys):
    assert main(["solve"]) == 2
    capsys.readouterr()
    assert main(["nonsense"]) == 2
    capsys.readouterr()


def test_missing_file(capsys):
    code, _, err = run(capsys, "solve", "-i", "/nonexistent.json")
    assert code == 2


def test_validation_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"players": ["a"], "tree": "a"}')
    code, _, err = run(capsys, "solve", "-i", str(bad))
    assert code == 3 and "error" in err


def test_gen_qbf_roundtrip(capsys, tmp_path):
    formula = tmp_path / "f.qdimacs"
    formula.write_text("e 1 0\n1 1 1 0\n")
    code, out, _ = run(capsys, "gen", "qbf", "-f", str(formula))
    assert code == 0
    inst = parse_instance(out)
    assert inst.threshold == 1

    code, out, _ = run(capsys, "gen", "qbf", "-f", str(formula), "--trim")
    assert code == 0
    trimmed = parse_instance(out)
    assert trimmed.n < inst.n


def test_gen_sat_and_mcc(capsys, tmp_path):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("1 2 3 0\n")
    code, out, _ = run(capsys, "gen", "sat", "-f", str(cnf))
    assert code == 0 and parse_instance(out).n == 128

    graph = tmp_path / "g.graph"
    graph.write_text("c 1 a\nc 1 b\nc 2 x\nc 2 y\ne a x\n")
    code, out, _ = run(capsys, "gen", "mcc", "-g", str(graph))
    assert code == 0
    inst = parse_instance(out)
    assert inst.name_of(inst.favorite) == "e*"


def test_gen_size_limit(capsys, tmp_path):
    # 6 variables over 3 alternating blocks blow the default size cap
    formula = tmp_path / "big.qdimacs"
    formula.write_text("e 1 2 0\na 3 4 0\ne 5 6 0\n1 3 5 0\n")
    code, _, err = run(capsys, "gen", "qbf", "-f", str(formula))
    assert code == 4


def test_oracle_size_limit_exit(capsys, tmp_path):
    formula = tmp_path / "f.qdimacs"
    formula.write_text("e 1 0\n1 1 1 0\n")
    code, out, _ = run(capsys, "gen", "qbf", "-f", str(formula), "--trim")
    inst_file = tmp_path / "inst.json"
    inst_file.write_text(out)
    code, _, err = run(capsys, "oracle", "-i", str(inst_file))
    assert code == 4


def test_advise_transcript(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("e*,b\ne*\n"))
    code = main(["advise", "-i", E1])
    out = capsys.readouterr().out
    assert code == 0
    assert "round 1" in out
    assert "pairings: e* vs a, c vs b" in out
    assert "value 1/2" in out
    assert out.strip().endswith("winner e*")


def test_advise_retries_bad_winners(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("e*\ne*,b\ne*\n"))
    code = main(["advise", "-i", E1])
    captured = capsys.readouterr()
    assert code == 0
    assert "error" in captured.err
    assert captured.out.strip().endswith("winner e*")
