import io
import json

import pytest

from abgrowth.cli import main

from conftest import GROUPS


@pytest.fixture
def gfile(tmp_path):
    def make(name):
        p = tmp_path / f"{name}.txt"
        p.write_text(GROUPS[name].replace("; ", "\n"))
        return str(p)
    return make


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_structure_text(gfile):
    code, out = run("structure", "--group", gfile("hex"))
    assert code == 0 and out.splitlines()[0] == "rank 2, torsion none"
    assert "mu = 7" in out
    code, out = run("structure", "--group", gfile("C5"))
    assert out.startswith("rank 0, torsion [5]")


def test_structure_json(gfile):
    code, out = run("structure", "--group", gfile("Z3"), "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["rank"] == 3 and doc["mu"] == 12 and doc["kappa"] == 2


def test_malformed_group(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("gens a,A\nrel ad\n")
    assert run("structure", "--group", str(p))[0] == 2
    assert run("structure", "--group", str(tmp_path / "missing.txt"))[0] == 2
    assert run("frobnicate")[0] == 2


def test_acceptor_exports(gfile):
    code, out = run("acceptor", "--group", gfile("Z"), "--gamma", "2", "--format", "text")
    assert code == 0 and "accept states = 5" in out
    code, out = run("acceptor", "--group", gfile("Z"), "--gamma", "2")
    assert out.startswith("digraph")
    code, out = run("acceptor", "--group", gfile("Z"), "--gamma", "2", "--format", "json")
    assert json.loads(out)["states"] == 5


def test_acceptor_gamma_too_small(gfile):
    assert run("acceptor", "--group", gfile("hex"), "--gamma", "7")[0] == 2


def test_growth_all_agrees(gfile):
    code, out = run("growth", "--group", gfile("Z3"), "--method", "all")
    assert code == 0
    assert "C(S,z) [exact] = (1 + 3z + 3z^2 + z^3) / (1 - z)^3" in out
    assert "methods agree" in out


def test_growth_oracle_only(gfile):
    code, out = run("growth", "--group", gfile("Z3"), "--path", "a", "--method", "oracle", "--max-n", "4")
    assert code == 0 and "coefficients: (0, 2, 10, 26, 50)" in out and "C(S,z)" not in out


def test_growth_latex(gfile):
    code, out = run("growth", "--group", gfile("hex"), "--format", "latex")
    assert out.strip() == r"C(S,z) = \frac{1 + 4z + z^{2}}{(1-z)^{2}}"


def test_growth_subgraph_file(gfile, tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"path": ["a", "b"]}))
    code, out = run("growth", "--group", gfile("Z3"), "--subgraph", str(p))
    assert code == 0 and "(z + 4z^2 + 3z^3) / (1 - z)^3" in out


def test_growth_bad_subgraph(gfile):
    assert run("growth", "--group", gfile("Z2"), "--subgraph", '{"vertices": ["e", "aa"]}')[0] == 2


def test_growth_resource_cap(gfile, monkeypatch):
    monkeypatch.setenv("ABGROWTH_MAX_ELEMENTS", "50")
    assert run("growth", "--group", gfile("Z3"))[0] == 3


def test_json_is_byte_identical(gfile):
    argv = ("growth", "--group", gfile("hex"), "--path", "a,b", "--method", "all", "--format", "json")
    a, b = run(*argv), run(*argv)
    assert a == b and a[0] == 0
    doc = json.loads(a[1])
    assert doc["agreement"] is True


def test_verify_passes(gfile):
    code, out = run("verify", "--group", gfile("torsionZ"), "--path", "a,b")
    assert code == 0 and "all checks passed" in out
    assert "(1 - z)" in out and "(1 - z)^" not in out


def test_verify_corrupted_acceptor(gfile):
    code, out = run("verify", "--group", gfile("Z2"), "--corrupt-acceptor")
    assert code == 1 and "first failure: language" in out


def test_verify_json(gfile):
    code, out = run("verify", "--group", gfile("Z"), "--format", "json", "--max-n", "6")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and [c["name"] for c in doc["checks"]] == [
        "language", "partition", "closed-form", "main-theorem"]
