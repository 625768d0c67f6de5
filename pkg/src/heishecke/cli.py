"""Command-line front end. Every command prints one canonical JSON document.

Exit codes: 0 success, 1 verification mismatch, 2 invalid input, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from heishecke.errors import BudgetExhausted, FormulaMismatch, SizeLimit, WitnessNotFound
from heishecke.exact_linalg import IntMatrix, snf
from heishecke.gl_hecke import GlDoubleCoset, GlHeckeElement, gl_left_cosets
from heishecke.heis_core import (
    HeisDoubleCoset,
    HeisElement,
    HeisLocalParams,
    h_double_coset_canonical,
    h_degree,
    h_left_canonical,
    h_left_cosets,
    h_local_canonical,
)
from heishecke.heis_hecke import (
    AdelicCoset,
    HeisHeckeElement,
    eta_fiber,
    hecke_mul,
    hecke_mul_pairs,
    noncommutativity_witness,
    nonsurjectivity_witness,
    verify_certificate,
)
from heishecke.orbit_lab import DEFAULT_SCAN_BUDGET, fiber_count
from heishecke.suites import SUITES, run_suite

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    args: dict = field(default_factory=dict)
    budget: int | None = None
    out: str | None = None
    seed: int = 0


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2)


def _ints(text: str) -> list[int]:
    text = text.strip().strip("[]()")
    return [int(t) for t in text.replace(";", ",").split(",") if t.strip()]


def _matrix(text: str) -> IntMatrix:
    return IntMatrix.from_json(json.loads(text))


def _local(p: int, text: str) -> HeisLocalParams:
    l, k, i, j = _ints(text)
    return HeisLocalParams(p, l, k, i, j)


def _global(text: str) -> HeisDoubleCoset:
    d1, d2, v1, v2 = _ints(text)
    return HeisDoubleCoset.make(d1, d2, (v1, v2))


# ---------------------------------------------------------------------------
# commands; each returns (json document, exit code)


def cmd_snf(cfg: RunConfig):
    return snf(_matrix(cfg.args["matrix"])).to_json(), EXIT_OK


def cmd_gl_cosets(cfg: RunConfig):
    a = cfg.args
    c = GlDoubleCoset((a["d1"], a["d2"]), a.get("p"))
    reps = gl_left_cosets(c, cfg.budget or 10**6)
    return {"divisors": c.to_json(), "degree": str(len(reps)), "cosets": [m.to_json() for m in reps]}, EXIT_OK


def cmd_gl_mul(cfg: RunConfig):
    a = cfg.args
    p = a.get("p")
    x = GlHeckeElement.basis(*_ints(a["a"]), p)
    y = GlHeckeElement.basis(*_ints(a["b"]), p)
    return {"x": x.to_json(), "y": y.to_json(), "product": (x * y).to_json()}, EXIT_OK


def cmd_heis_canon(cfg: RunConfig):
    a = cfg.args
    x = HeisElement(_matrix(a["matrix"]), tuple(_ints(a["vec"])))
    doc = {
        "element": x.to_json(),
        "left": h_left_canonical(x).to_json(),
        "double": h_double_coset_canonical(x).to_json(),
    }
    if a.get("p") is not None:
        doc["local"] = h_local_canonical(x, a["p"]).to_json()
    return doc, EXIT_OK


def cmd_heis_mul(cfg: RunConfig):
    a = cfg.args
    p = a.get("p")
    parse = (lambda s: _local(p, s)) if p is not None else _global
    x = HeisHeckeElement.basis(parse(a["a"]))
    y = HeisHeckeElement.basis(parse(a["b"]))
    prod = hecke_mul(x, y)
    doc = {"x": x.to_json(), "y": y.to_json(), "product": prod.to_json(), "degree": str(prod.degree())}
    code = EXIT_OK
    if a.get("check"):
        agree = hecke_mul_pairs(x, y, shuffle_seed=cfg.seed) == prod
        doc["pairs_oracle_agrees"] = agree
        code = EXIT_OK if agree else EXIT_MISMATCH
    return doc, code


def cmd_cosets(cfg: RunConfig):
    a = cfg.args
    c = _local(a["p"], a["params"]) if a.get("p") is not None else _global(a["params"])
    reps = h_left_cosets(c)
    return {"coset": c.to_json(), "degree": str(h_degree(c)), "cosets": [r.to_json() for r in reps]}, EXIT_OK


def cmd_orbit(cfg: RunConfig):
    a = cfg.args
    r = fiber_count(a["p"], a["l"], a["k"], a["i"], a["j"], cfg.budget or DEFAULT_SCAN_BUDGET)
    return r.to_json(), EXIT_OK if r.match else EXIT_MISMATCH


def cmd_fiber(cfg: RunConfig):
    a = cfg.args
    comps = [HeisLocalParams(a["p"], a["l"], a["k"], a["i"], a["j"])] if a.get("p") is not None else []
    for text in a.get("component") or []:
        p, l, k, i, j = _ints(text)
        comps.append(HeisLocalParams(p, l, k, i, j))
    c = AdelicCoset.of(comps)
    fiber = eta_fiber(c)
    return {"coset": c.to_json(), "fiber": [g.to_json() for g in fiber], "fiber_size": str(len(fiber))}, EXIT_OK


def cmd_witness(cfg: RunConfig):
    a = cfg.args
    if a.get("kind") == "noncommutative":
        u, v, uv, vu = noncommutativity_witness(a["p"])
        doc = {"u": u.to_json(), "v": v.to_json(), "uv": uv.to_json(), "vu": vu.to_json(), "commute": uv == vu}
        return doc, EXIT_OK if uv != vu else EXIT_MISMATCH
    cert = nonsurjectivity_witness(a["p"])
    ok = cert["verified"] and verify_certificate(cert)
    return cert, EXIT_OK if ok else EXIT_MISMATCH


def cmd_verify(cfg: RunConfig):
    a = cfg.args
    name = a["suite"]
    kw: dict = {}
    if name in ("detsa", "cor47"):
        kw = {"pset": tuple(_ints(a["pset"])), "lmax": a["lmax"], "kmax": a["kmax"]}
        if cfg.budget:
            kw["budget"] = cfg.budget
    elif name == "surjectivity" and cfg.budget:
        kw["budget"] = cfg.budget
    elif name == "commute":
        kw = {"pset": tuple(_ints(a["pset"])), "max_exponent": a["max_exponent"]}
    elif name == "noncommute":
        kw = {"p": a.get("p") or 2, "max_exponent": a["max_exponent"], "shuffle_seed": cfg.seed}
    elif name == "eta-mult":
        kw = {"pset": tuple(_ints(a["pset"])), "seed": cfg.seed}
    elif name == "classical":
        kw = {"seed": cfg.seed}
    res = run_suite(name, **kw)
    return res.to_json(), EXIT_OK if res.ok else EXIT_MISMATCH


COMMANDS = {
    "snf": cmd_snf,
    "gl-cosets": cmd_gl_cosets,
    "gl-mul": cmd_gl_mul,
    "heis-canon": cmd_heis_canon,
    "heis-mul": cmd_heis_mul,
    "heis-cosets": cmd_cosets,
    "orbit": cmd_orbit,
    "fiber": cmd_fiber,
    "witness": cmd_witness,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heishecke", description=__doc__.splitlines()[0])
    ap.add_argument("--budget", type=int, default=None, help="cap on enumeration sizes (env HECKE_BUDGET)")
    ap.add_argument("--out", default=None, help="write JSON here instead of stdout")
    ap.add_argument("--seed", type=int, default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def params(sp, required=True):
        for name in ("p", "l", "k", "i", "j"):
            sp.add_argument(f"--{name}", type=int, required=required)

    sp = sub.add_parser("snf", help="Smith normal form of an integer matrix")
    sp.add_argument("--matrix", required=True, help='JSON, e.g. "[[1,2],[3,4]]"')

    sp = sub.add_parser("gl-cosets", help="left cosets in a GL2 double coset")
    sp.add_argument("--d1", type=int, required=True)
    sp.add_argument("--d2", type=int, required=True)
    sp.add_argument("--p", type=int)

    sp = sub.add_parser("gl-mul", help="product of two GL2 double cosets")
    sp.add_argument("--a", required=True, help="d1,d2")
    sp.add_argument("--b", required=True, help="d1,d2")
    sp.add_argument("--p", type=int)

    sp = sub.add_parser("heis-canon", help="left, global and local canonical forms of (A, a)")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--vec", required=True, help="v1,v2")
    sp.add_argument("--p", type=int)

    sp = sub.add_parser("heis-mul", help="product of two Heisenberg double cosets")
    sp.add_argument("--a", required=True, help="l,k,i,j with --p, else d1,d2,v1,v2")
    sp.add_argument("--b", required=True)
    sp.add_argument("--p", type=int)
    sp.add_argument("--check", action="store_true", help="recompute from all left-coset pairs")

    sp = sub.add_parser("heis-cosets", help="left cosets in a Heisenberg double coset")
    sp.add_argument("--params", required=True, help="l,k,i,j with --p, else d1,d2,v1,v2")
    sp.add_argument("--p", type=int)

    params(sub.add_parser("orbit", help="orbit, stabilizer and fiber count report"))

    sp = sub.add_parser("fiber", help="global double cosets over an adelic coset")
    params(sp, required=False)
    sp.add_argument("--component", action="append", help="p,l,k,i,j; repeatable")

    sp = sub.add_parser("witness", help="nonsurjectivity certificate or noncommuting pair")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--kind", choices=("nonsurjective", "noncommutative"), default="nonsurjective")

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", choices=SUITES, required=True)
    sp.add_argument("--pset", default="2,3")
    sp.add_argument("--lmax", type=int, default=3)
    sp.add_argument("--kmax", type=int, default=4)
    sp.add_argument("--max-exponent", dest="max_exponent", type=int, default=4)
    sp.add_argument("--p", type=int)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    budget = ns.budget
    if budget is None and os.environ.get("HECKE_BUDGET"):
        budget = int(os.environ["HECKE_BUDGET"])
    args = {k: v for k, v in vars(ns).items() if k not in ("command", "budget", "out", "seed")}
    return RunConfig(ns.command, args, budget, ns.out, ns.seed)


def dispatch(cfg: RunConfig) -> tuple[dict, int]:
    try:
        return COMMANDS[cfg.command](cfg)
    except (SizeLimit, BudgetExhausted) as e:
        return {"error": str(e), "kind": type(e).__name__}, EXIT_BUDGET
    except (FormulaMismatch, WitnessNotFound) as e:
        return {"error": str(e), "kind": type(e).__name__}, EXIT_MISMATCH
    except (ValueError, KeyError, TypeError) as e:
        return {"error": str(e), "kind": type(e).__name__}, EXIT_INPUT


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as e:
        doc, code = {"error": f"bad HECKE_BUDGET: {e}", "kind": "ValueError"}, EXIT_INPUT
    else:
        doc, code = dispatch(cfg)
    text = dumps(doc) + "\n"
    if ns.out:
        with open(ns.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
