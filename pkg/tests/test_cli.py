import json

import pytest

from heishecke.cli import main
from heishecke.exact_linalg import IntMatrix
from heishecke.gl_hecke import GlHeckeElement
from heishecke.heis_core import HeisDoubleCoset, HeisElement, HeisLocalParams
from heishecke.heis_hecke import HeisHeckeElement, verify_certificate


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_snf(capsys):
    code, doc, _ = run(capsys, "snf", "--matrix", "[[1,2],[3,4]]")
    assert code == 0 and doc["d"] == ["1", "2"]
    u, v = IntMatrix.from_json(doc["u"]), IntMatrix.from_json(doc["v"])
    assert u @ IntMatrix.of([[1, 2], [3, 4]]) @ v == IntMatrix.diag(1, 2)


def test_snf_bad_input(capsys):
    code, doc, _ = run(capsys, "snf", "--matrix", "[[1,2],[2,4]]")
    assert code == 2 and "error" in doc
    code, doc, _ = run(capsys, "snf", "--matrix", "not json")
    assert code == 2 and "error" in doc


def test_orbit(capsys):
    code, doc, _ = run(capsys, "orbit", "--p", "3", "--l", "2", "--k", "4", "--i", "2", "--j", "0")
    assert code == 0 and doc["fiber_count"] == "3" and doc["match"] is True


def test_orbit_invalid_and_budget(capsys, monkeypatch):
    code, _, _ = run(capsys, "orbit", "--p", "4", "--l", "1", "--k", "1", "--i", "0", "--j", "0")
    assert code == 2
    code, doc, _ = run(capsys, "--budget", "100", "orbit", "--p", "3", "--l", "2", "--k", "4", "--i", "2", "--j", "0")
    assert code == 3 and doc["kind"] == "SizeLimit"
    monkeypatch.setenv("HECKE_BUDGET", "100")
    code, _, _ = run(capsys, "orbit", "--p", "3", "--l", "2", "--k", "4", "--i", "2", "--j", "0")
    assert code == 3


@pytest.mark.parametrize("p,size", [("2", "2"), ("3", "3")])
def test_witness(capsys, p, size):
    code, doc, _ = run(capsys, "witness", "--p", p)
    assert code == 0 and doc["fiber_size"] == size
    assert verify_certificate(doc)
    assert set(doc) >= {"p", "params", "fiber", "fiber_size", "distinguished", "checks"}
    assert doc["checks"]["formula"] == "[U0 : ±Un]"


def test_noncommutative_witness(capsys):
    code, doc, _ = run(capsys, "witness", "--p", "2", "--kind", "noncommutative")
    assert code == 0 and doc["commute"] is False
    assert HeisHeckeElement.from_json(doc["uv"]) != HeisHeckeElement.from_json(doc["vu"])


def test_gl_commands(capsys):
    code, doc, _ = run(capsys, "gl-cosets", "--d1", "1", "--d2", "3", "--p", "3")
    assert code == 0 and doc["degree"] == "4"
    code, doc, _ = run(capsys, "gl-mul", "--a", "1,2", "--b", "1,2", "--p", "2")
    prod = GlHeckeElement.from_json(doc["product"])
    assert prod == GlHeckeElement.basis(1, 4, 2) + 3 * GlHeckeElement.basis(2, 2, 2)


def test_heis_canon(capsys):
    code, doc, _ = run(capsys, "heis-canon", "--matrix", "[[8,0],[0,512]]", "--vec", "1,24", "--p", "2")
    assert code == 0
    assert HeisLocalParams.from_json(doc["local"]) == HeisLocalParams(2, 3, 6, 3, 0)
    assert HeisDoubleCoset.from_json(doc["double"]).v == (1, 24)
    assert HeisElement.from_json(doc["left"]).vec == (1, 24)
    code, _, _ = run(capsys, "heis-canon", "--matrix", "[[2,0],[0,6]]", "--vec", "0,0", "--p", "2")
    assert code == 2


def test_heis_mul(capsys):
    code, doc, _ = run(capsys, "heis-mul", "--p", "2", "--a", "0,1,0,0", "--b", "0,1,1,0", "--check")
    assert code == 0 and doc["pairs_oracle_agrees"] is True
    code, doc, _ = run(capsys, "heis-mul", "--a", "1,2,0,0", "--b", "1,3,0,1")
    assert code == 0
    assert HeisHeckeElement.from_json(doc["product"]).degree() == int(doc["degree"])


def test_heis_cosets(capsys):
    code, doc, _ = run(capsys, "heis-cosets", "--params", "1,2,0,0")
    assert code == 0 and int(doc["degree"]) == len(doc["cosets"])


def test_fiber(capsys):
    code, doc, _ = run(capsys, "fiber", "--p", "2", "--l", "3", "--k", "6", "--i", "3", "--j", "0")
    assert code == 0 and doc["fiber_size"] == "2"
    code, doc, _ = run(capsys, "fiber", "--component", "3,2,4,2,0", "--component", "2,1,0,0,0")
    assert doc["fiber_size"] == "3"


def test_verify_suites(capsys):
    code, doc, _ = run(capsys, "verify", "--suite", "detsa", "--pset", "2,3", "--lmax", "2", "--kmax", "2")
    assert code == 0 and doc["pass"] is True and doc["total"] == "72"
    code, doc, _ = run(capsys, "verify", "--suite", "noncommute", "--p", "2")
    assert code == 0 and doc["pass"] is True


def test_output_is_byte_stable(capsys, tmp_path):
    argv = ["fiber", "--p", "3", "--l", "2", "--k", "4", "--i", "2", "--j", "0"]
    _, _, a = run(capsys, *argv)
    _, _, b = run(capsys, *argv)
    assert a == b
    out = tmp_path / "f.json"
    assert main(["--out", str(out), *argv]) == 0
    assert out.read_text() == a


def test_numbers_are_strings(capsys):
    _, doc, _ = run(capsys, "orbit", "--p", "2", "--l", "1", "--k", "1", "--i", "0", "--j", "0")

    def walk(x):
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
        else:
            assert not isinstance(x, (int, float)) or isinstance(x, bool)

    walk(doc)
