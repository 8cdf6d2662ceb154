import csv
import importlib
import io
import json

import pytest

from picodim import cache as cache_mod
from picodim.algebra import P1, algebra_to_file, build_W
from picodim.cache import ResultCache
from picodim.cli import main, parse_algebra_file
from picodim.verify import Verdict, check_structure, check_witnesses, verify_paper

verify_mod = importlib.import_module("picodim.verify")
W = build_W()


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def tampered(tmp_path):
    data = W.to_json()
    data["table"][2][2] = []  # e1 * e1 := 0
    path = tmp_path / "tampered.json"
    path.write_text(json.dumps(data))
    return path


def test_file_round_trip(tmp_path):
    path = tmp_path / "w.json"
    algebra_to_file(W, path)
    assert parse_algebra_file(path) == W


def test_cache_entries(tmp_path):
    c = ResultCache(tmp_path)
    key = {"op": "codim", "n": 3, "p": P1}
    assert c.get(W, key) is None
    path = c.put(W, key, {"rank": 11, "seconds": 0.5, "seeds": []})
    assert path.name == f"codim_n3_p{P1}.json"
    assert c.get(W, key) == {"rank": 11, "seconds": 0.5, "seeds": []}
    assert not [p for p in path.parent.iterdir() if p.name.startswith(".tmp")]
    assert ResultCache(tmp_path, force=True).get(W, key) is None


def test_cache_version_bump_invalidates(tmp_path, monkeypatch):
    c = ResultCache(tmp_path)
    key = {"op": "codim", "n": 2, "p": P1}
    c.put(W, key, {"rank": 2})
    monkeypatch.setattr(cache_mod, "CACHE_VERSION", cache_mod.CACHE_VERSION + 1)
    assert c.get(W, key) is None


def test_cache_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("PI_CODIM_CACHE", str(tmp_path / "elsewhere"))
    assert ResultCache().root == tmp_path / "elsewhere"


def test_algebra_verify(capsys):
    code, out, _ = run(capsys, "algebra", "verify", "--json")
    assert code == 0
    assert json.loads(out)["simple"] is True


def test_codim_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "codim", "--n", "1-4", "--csv", "--cache-dir", str(tmp_path))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "c_n", "prime1_rank", "prime2_rank", "seconds"]
    assert [r[1] for r in rows[1:]] == ["1", "2", "11", "65"]
    # second run hits the cache and reports the same timings
    _, again, _ = run(capsys, "codim", "--n", "1-4", "--csv", "--cache-dir", str(tmp_path))
    assert again == out


def test_codim_budget_is_usage_error(capsys):
    code, _, err = run(capsys, "codim", "--n", "8", "--no-cache")
    assert code == 2
    assert "budget" in err


def test_schema_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "basis": ["a", "b"], "table": [[[]], []]}')
    code, _, err = run(capsys, "algebra", "verify", "--file", str(bad))
    assert code == 2
    assert "table[0]" in err
    bad.write_text("{not json")
    code, _, err = run(capsys, "algebra", "verify", "--file", str(bad))
    assert code == 2 and "line 1" in err


def test_unknown_command():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_cochar(capsys):
    code, out, _ = run(capsys, "cochar", "--n", "3", "--csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["lambda", "m", "deg", "contribution"]
    assert sum(int(r[3]) for r in rows[1:]) == 11
    code, out, _ = run(capsys, "cochar", "--n", "3", "--json")
    rep = json.loads(out)
    assert rep["necessary_condition_ok"] and rep["sufficient_condition_ok"]


def test_witness(capsys):
    code, out, _ = run(capsys, "witness", "f1", "--json")
    assert code == 0 and json.loads(out)["coordinates"] == ["0", "-1", "0", "0"]
    code, out, _ = run(capsys, "witness", "--k", "1", "--l", "1", "--m", "2", "--t", "0", "--json")
    assert code == 0 and json.loads(out)["e0_coordinate"] == "1"
    code, _, err = run(capsys, "witness", "--k", "1", "--l", "0", "--m", "3", "--t", "0")
    assert code == 2 and "m <= 2k" in err


def test_phi_and_bounds(capsys):
    code, out, _ = run(capsys, "phi", "3,1,1,1", "--json")
    assert json.loads(out)["phi"].startswith("3.4641016")
    code, out, _ = run(capsys, "bounds", "--n", "100", "--check", "eq0")
    assert code == 0 and "0 violations" in out
    code, _, _ = run(capsys, "bounds", "--n", "100", "--check", "nonsense")
    assert code == 2


def test_sandwich_file(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sandwich", "--from", "6", "--to", "12", "--step", "3", "--out", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["n", "b_weight0", "a_upper", "argmax_b", "argmax_a"]
    assert [r[0] for r in rows[1:]] == ["6", "9", "12"]


def test_exponent_json_always_has_erratum(capsys):
    for method in ("all", "cubic", "lagrange", "numeric"):
        code, out, _ = run(capsys, "exponent", "--method", method, "--json", "--no-sandwich")
        rep = json.loads(out)
        assert code == 0
        assert rep["erratum"]["reference_beta4_equals_inverse_exponent"]
        assert rep["value"].startswith("3.6107186")


def test_tampered_table_fails_structure_only(tampered):
    A = parse_algebra_file(tampered)
    s = check_structure(A)
    assert not s.passed
    assert s.value["grading"] and s.value["mismatched_products"] == ["e1*e1"]
    # the witnesses happen not to depend on e1 * e1 in a way that changes f1
    assert check_witnesses(A).passed


def _stub(monkeypatch, boom=None):
    for name, crit in [("check_degree_bounds", 7), ("check_lemma7_family", 8), ("check_sandwich", 10)]:
        monkeypatch.setattr(verify_mod, name, lambda crit=crit: Verdict("stub", crit, True))
    if boom:
        def explode(*_):
            raise RuntimeError("kaboom")
        monkeypatch.setattr(verify_mod, boom, explode)


def test_verify_collects_failures(monkeypatch, tampered):
    _stub(monkeypatch)
    rep = verify_paper(parse_algebra_file(tampered))
    assert sorted(v.criterion for v in rep.checks) == list(range(1, 12))
    assert not rep.verdict(1).passed
    assert rep.verdict(2).passed
    assert rep.exit_code == 1


def test_verify_does_not_short_circuit(monkeypatch):
    _stub(monkeypatch, boom="check_witnesses")
    rep = verify_paper()
    assert not rep.verdict(2).passed and "kaboom" in rep.verdict(2).value
    assert all(rep.verdict(c).passed for c in (1, 3, 4, 5, 6, 9))
    assert len(rep.checks) == 11


def test_verify_paper_cli_on_tampered_file(monkeypatch, capsys, tampered):
    _stub(monkeypatch)
    code, out, _ = run(capsys, "verify-paper", "--file", str(tampered))
    assert code == 1
    assert "[FAIL]  1" in out
