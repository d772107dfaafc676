"""Command-line interface.

Exit codes: 0 for an affirmative verdict (true, SAT, VALID, bisimilar, accepted,
Duplicator), 1 for a negative one, 2 for usage, parse or validation errors.

FO formulas printed by ``translate`` use ``Qp(x)`` for the proposition ``p`` at
``x``, ``R(x,t,y)`` for an edge, and ``EXISTS-W``/``FORALL-W``/``EXISTS-I``/
``FORALL-I`` for world- and index-sort quantifiers.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import bisim, fo_bridge, kripke, proofcheck, semantics, syntax, tableau

__all__ = ["main", "run", "format_output"]


class _Result:
    def __init__(self, command, ok, text, value=None, model=None, extra=None):
        self.command = command
        self.ok = ok
        self.text = text
        self.value = value if value is not None else text.splitlines()[0] if text else ""
        self.model = model
        self.extra = extra or {}


def format_output(result: _Result, fmt: str = "plain") -> str:
    if fmt == "json":
        obj = {"command": result.command, "verdict": result.value, "diagnostics": []}
        if result.model is not None:
            obj["model"] = result.model
        obj.update(result.extra)
        return json.dumps(obj, sort_keys=True) + "\n"
    return result.text if result.text.endswith("\n") else result.text + "\n"


def _formula(text):
    return syntax.parse_formula(text)


def _pointed(path, world):
    m = kripke.load_model(path)
    if world not in m.valuation:
        raise kripke.ModelError([f"world {world!r} is not declared in {path}"])
    return m, world


def _cmd_check(a):
    m, w = _pointed(a.model, a.world)
    v = semantics.holds(m, w, _formula(a.formula))
    return _Result("check", v, "true" if v else "false", value=v)


def _cmd_sat(a):
    v = tableau.decide_sat(_formula(a.formula))
    model = kripke.render_model(v.model.model, first=v.model.point) if v else None
    return _Result("sat", v.satisfiable, tableau.format_verdict(v),
                   value="sat" if v else "unsat", model=model)


def _cmd_valid(a):
    f = _formula(a.formula)
    v = tableau.decide_sat(syntax.Not(f))
    if not v:
        return _Result("valid", True, "VALID", value="valid")
    model = kripke.render_model(v.model.model, first=v.model.point)
    return _Result("valid", False, "NOT VALID\n" + model, value="not valid", model=model)


def _cmd_oracle(a):
    f = _formula(a.formula)
    props = a.props if a.props else sorted(syntax.atoms(f))
    pm = semantics.sat_oracle(f, semantics.OracleBounds(a.worlds, a.indices, props))
    if pm is None:
        return _Result("oracle", False, "NONE", value="none")
    model = kripke.render_model(pm.model, first=pm.point)
    return _Result("oracle", True, "FOUND\n" + model, value="found", model=model)


def _two_points(a):
    m1, w1 = _pointed(a.model1, a.world1)
    m2, w2 = _pointed(a.model2, a.world2)
    return m1, w1, m2, w2


def _cmd_bisim(a):
    m1, w1, m2, w2 = _two_points(a)
    v = bisim.bisimilar(m1, w1, m2, w2)
    text = "BISIMILAR" if v else "NOT BISIMILAR"
    extra = {}
    if not v and a.explain:
        f = bisim.distinguishing_formula(m1, w1, m2, w2, a.max_n)
        shown = syntax.render_formula(f) if f is not None else None
        text += "\n" + (shown if shown else f"no distinguishing formula up to depth {a.max_n}")
        extra["formula"] = shown
    return _Result("bisim", v, text, value="bisimilar" if v else "not bisimilar", extra=extra)


def _cmd_nbisim(a):
    m1, w1, m2, w2 = _two_points(a)
    v = bisim.n_bisimilar(m1, w1, m2, w2, a.n)
    text = f"{a.n}-BISIMILAR" if v else f"NOT {a.n}-BISIMILAR"
    return _Result("nbisim", v, text, value=v)


def _cmd_distinguish(a):
    m1, w1, m2, w2 = _two_points(a)
    f = bisim.distinguishing_formula(m1, w1, m2, w2, a.max_n)
    if f is None:
        return _Result("distinguish", False, "NONE", value=None, extra={"formula": None})
    shown = syntax.render_formula(f)
    return _Result("distinguish", True, shown, value=shown, extra={"formula": shown})


def _cmd_charform(a):
    m, w = _pointed(a.model, a.world)
    ctx = bisim.CharContext(m, a.props if a.props else None, a.n)
    shown = syntax.render_formula(bisim.char_formula(ctx, w, a.n))
    return _Result("charform", True, shown, value=shown)


def _cmd_translate(a):
    shown = fo_bridge.render_fo(fo_bridge.translate(_formula(a.formula)))
    return _Result("translate", True, shown, value=shown)


def _cmd_ef(a):
    m1, w1, m2, w2 = _two_points(a)
    cfg = fo_bridge.GameConfig.from_points(m1, w1, m2, w2, a.qx, a.qt)
    winner = fo_bridge.ef_winner(cfg)
    return _Result("ef", winner is fo_bridge.Player.DUPLICATOR, winner.value, value=winner.value)


def _cmd_prove(a):
    res = proofcheck.check_proof(proofcheck.load_proof(a.proof))
    if res:
        return _Result("prove", True, "ACCEPTED", value="accepted")
    text = f"REJECTED line {res.line}: {res.reason}"
    return _Result("prove", False, text, value="rejected",
                   extra={"line": res.line, "reason": res.reason})


def _cmd_random_formula(a):
    f = syntax.random_formula(a.seed, a.depth, a.props or ["p", "q"])
    shown = syntax.render_formula(f)
    return _Result("random-formula", True, shown, value=shown)


def _cmd_random_model(a):
    m = kripke.random_model(a.seed, a.worlds, a.indices, a.props or ["p"])
    text = kripke.render_model(m)
    return _Result("random-model", True, text, value="model", model=text)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("plain", "json"), default="plain")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")

    p = argparse.ArgumentParser(prog="iqml", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    def two(sp):
        for arg in ("model1", "world1", "model2", "world2"):
            sp.add_argument(arg)

    sp = cmd("check", _cmd_check, "evaluate a formula at a world")
    sp.add_argument("model")
    sp.add_argument("world")
    sp.add_argument("formula")
    cmd("sat", _cmd_sat, "tableau satisfiability").add_argument("formula")
    cmd("valid", _cmd_valid, "tableau validity").add_argument("formula")
    sp = cmd("oracle", _cmd_oracle, "brute-force search for a small model")
    sp.add_argument("formula")
    sp.add_argument("--worlds", type=int, default=3)
    sp.add_argument("--indices", type=int, default=2)
    sp.add_argument("--props", nargs="*")
    sp = cmd("bisim", _cmd_bisim, "bisimilarity of two pointed models")
    two(sp)
    sp.add_argument("--explain", action="store_true", help="print a distinguishing formula")
    sp.add_argument("--max-n", type=int, default=3)
    sp = cmd("nbisim", _cmd_nbisim, "depth-n bisimilarity")
    two(sp)
    sp.add_argument("--n", type=int, required=True)
    sp = cmd("distinguish", _cmd_distinguish, "distinguishing formula")
    two(sp)
    sp.add_argument("--max-n", type=int, default=3)
    sp = cmd("charform", _cmd_charform, "characteristic formula")
    sp.add_argument("model")
    sp.add_argument("world")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--props", nargs="*")
    cmd("translate", _cmd_translate, "two-sorted first-order translation").add_argument("formula")
    sp = cmd("ef", _cmd_ef, "Ehrenfeucht-Fraisse game winner")
    two(sp)
    sp.add_argument("--qx", type=int, required=True)
    sp.add_argument("--qt", type=int, required=True)
    cmd("prove", _cmd_prove, "check a Hilbert-style proof file").add_argument("proof")
    sp = cmd("random-formula", _cmd_random_formula, "print a random formula")
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--props", nargs="*")
    sp = cmd("random-model", _cmd_random_model, "print a random model")
    sp.add_argument("--worlds", type=int, default=3)
    sp.add_argument("--indices", type=int, default=2)
    sp.add_argument("--props", nargs="*")
    return p


_ERRORS = (syntax.FormulaSyntaxError, kripke.ModelError, kripke.GuardExceeded,
           proofcheck.ProofFormatError, bisim.CharGuardExceeded, OSError, ValueError, KeyError)


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        result = args.func(args)
    except _ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        if args.format == "json":
            out.write(json.dumps({"command": args.command, "verdict": None,
                                  "diagnostics": [str(msg)]}, sort_keys=True) + "\n")
        err.write(f"iqml {args.command}: error: {msg}\n")
        return 2
    out.write(format_output(result, args.format))
    return 0 if result.ok else 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
