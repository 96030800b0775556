import json

import pytest

from rosenspec.cli import main
from rosenspec.suites import SUITES


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spec_counts(capsys):
    for argv, count in [(("spec", "--ring", "zmod:12"), 2), (("spec", "--scheme", "p1:2", "--bound", "2"), 5),
                        (("spec", "--ring", "gf:7"), 1)]:
        code, out, _ = run(capsys, *argv, "--json")
        assert code == 0
        assert json.loads(out)["count"] == count


def test_spec_human_output(capsys):
    code, out, _ = run(capsys, "spec", "--ring", "zmod:12")
    assert code == 0 and "2 points" in out and "closed sets" in out


def test_reconstruct(capsys):
    code, out, _ = run(capsys, "reconstruct", "--scheme", "affine", "--ring", "zmod:6")
    assert code == 0 and "all matched" in out
    code, out, _ = run(capsys, "reconstruct", "--scheme", "p1:2", "--bound", "2")
    assert code == 0 and "all matched" in out
    code, out, _ = run(capsys, "reconstruct", "--scheme", "empty")
    assert code == 0 and "trivial match" in out


def test_query_examples(capsys):
    code, out, _ = run(capsys, "query", "precedes", "--ring", "zmod:4", "--m", "Z/4", "--n", "Z/2")
    assert code == 0 and out.strip() == "no (ann certificate)"
    code, out, _ = run(capsys, "query", "spectral", "--ring", "zmod:12", "--m", "R/(3)")
    assert code == 0 and out.startswith("yes")
    code, out, _ = run(capsys, "query", "center", "--ring", "zmod:6", "--open", "(2)")
    assert code == 0 and out.strip() == "Z/2"


def test_quothom(capsys):
    code, out, _ = run(capsys, "query", "quothom", "--ring", "zmod:6", "--open", "(2),(3)", "--m", "R", "--n", "R",
                       "--json")
    assert code == 0 and json.loads(out)["order"] == 6


@pytest.mark.parametrize("ring,m,n", [("zmod:4", "Z/4", "Z/2"), ("zmod:12", "R/(3)", "Z/12"),
                                      ("poly:gf:2:t", "R/(t^2)", "R/(t)"), ("poly:gf:2:t", "R/(t)", "R/(t^2+t)"),
                                      ("z4x2", "R/(2)", "R")])
def test_precedes_replay(capsys, tmp_path, ring, m, n):
    code, out, _ = run(capsys, "query", "precedes", "--ring", ring, "--m", m, "--n", n, "--json")
    assert code == 0
    path = tmp_path / "v.json"
    path.write_text(out)
    code, out, _ = run(capsys, "query", "precedes", "--ring", ring, "--replay", str(path))
    assert code == 0 and "verified" in out


def test_tampered_replay_fails(capsys, tmp_path):
    _, out, _ = run(capsys, "query", "precedes", "--ring", "zmod:12", "--m", "R/(3)", "--n", "Z/12", "--json")
    data = json.loads(out)
    data["verdict"]["witness"]["homs"] = [[[[3]]]]  # 3 generates Z/4, which does not map onto Z/3
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "query", "precedes", "--ring", "zmod:12", "--replay", str(path))
    assert code == 1 and "FAILED" in out


@pytest.mark.parametrize("ring,m", [("zmod:12", "R/(6)"), ("zmod:12", "R/(3)"), ("zmod:4", "R + R/(2)"),
                                    ("poly:gf:2:t", "R/(t^2+t)")])
def test_spectral_replay(capsys, tmp_path, ring, m):
    _, out, _ = run(capsys, "query", "spectral", "--ring", ring, "--m", m, "--json")
    path = tmp_path / "s.json"
    path.write_text(out)
    code, out, _ = run(capsys, "query", "spectral", "--ring", ring, "--replay", str(path))
    assert code == 0 and "verified" in out


def test_module_file_input(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"g": 2, "relations": [[2, 0], [0, 4]]}))
    code, out, _ = run(capsys, "query", "spectral", "--ring", "zmod:4", "--file", str(path), "--json")
    assert code == 0 and json.loads(out)["verdict"]["outcome"] == "No"


def test_json_is_deterministic(capsys):
    outs = [run(capsys, "verify", "--suite", "gabriel-product", "--ring", "zmod:12", "--json")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert "seconds" not in json.loads(outs[0])


@pytest.mark.parametrize("argv,code", [
    (("verify", "--suite", "nope"), 2),
    (("spec", "--ring", "zmod:x"), 2),
    (("spec", "--ring", "zmod:0"), 2),
    (("query", "precedes", "--ring", "zmod:4", "--m", "Z/3", "--n", "R"), 2),
    (("query", "precedes", "--ring", "zmod:4", "--m", "R^?", "--n", "R"), 2),
    (("bogus",), 2),
    (("spec", "--ring", "zmod:100000000"), 3),
    (("verify", "--suite", "toreq", "--ring", "zmod:6"), 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_passes_on_default_instance(capsys, name):
    code, out, _ = run(capsys, "verify", "--suite", name, "--strict", "--json")
    rep = json.loads(out)
    assert code == 0, [c for c in rep["checks"] if c["status"] != "pass"]
    assert rep["counts"]["pass"] > 0
