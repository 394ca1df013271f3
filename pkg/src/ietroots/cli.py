"""The ``iet`` command line tool.

Every command prints a result envelope ``{status, payload, budget_report}``.
Exit codes: 0 definitive answer, 2 inconclusive (a budget ran out), 1 error.
Errors go to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .dynamics import (
    DEFAULT_MAX_ITER,
    check_return_system,
    first_return,
    idoc_3iet,
    maximal_chains,
    tower_build,
)
from .errors import (
    BudgetExceeded,
    DocumentError,
    IETError,
    PrecisionExhausted,
    VerificationFailed,
)
from .exact import DEFAULT_PRECISION_BITS, precision_budget, sqrt_basis, track_precision
from .iet import compose, power, rank
from .roots import Inconclusive, example_family, find_root_3iet, tower_classify
from .serialize import (
    certificate_to_json,
    chains_to_json,
    dumps,
    iet_to_json,
    parse_document,
    real_display,
    real_from_json,
    return_system_to_json,
    verify_certificate,
)

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "inconclusive"
    def error(self, message):
        raise UsageError(message)


class _Inconclusive(Exception):
    def __init__(self, budget: str, message: str, payload: Any = None):
        super().__init__(message)
        self.budget = budget
        self.payload = payload


class _Context:
    def __init__(self, args):
        self.args = args
        self.iterations = 0
        self._stdin_used = False

    def document(self, source: str | None):
        """Parse an IET document from a path, ``-``, inline JSON or stdin."""
        if source is None:
            if not self.args.stdin:
                raise UsageError("a document argument is required (or pass --stdin)")
            source = "-"
        data = self.json_input(source)
        # accept the envelope of a previous command in a pipeline
        if isinstance(data, dict) and "payload" in data and "status" in data:
            data = (data.get("payload") or {}).get("document", data)
        return parse_document(data).iet

    def json_input(self, source: str):
        if source == "-":
            if self._stdin_used:
                raise UsageError("stdin can supply only one document")
            self._stdin_used = True
            text = sys.stdin.read()
        elif source.lstrip().startswith(("{", "[")):
            text = source
        else:
            try:
                text = Path(source).read_text()
            except OSError as exc:
                raise UsageError(f"cannot read {source}: {exc.strerror}") from None
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON: {exc.msg} at line {exc.lineno}", "") from None


def _coeff_array(text: str) -> list:
    text = text.strip()
    if text.startswith("["):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid coefficient array {text!r}: {exc.msg}") from None
    return [c.strip() for c in text.split(",")]


def _real_arg(text: str, basis, name: str):
    return real_from_json(_coeff_array(text), basis, f"/{name}")


# ---------------------------------------------------------------------------
# commands

def cmd_eval(ctx, a):
    T = ctx.document(a.doc)
    x = _real_arg(a.x, T.basis, "x")
    return {"x": real_display(x), "y": real_display(T(x))}


def cmd_compose(ctx, a):
    S, T = ctx.document(a.doc), ctx.document(a.other)
    return {"document": iet_to_json(compose(S, T))}


def cmd_power(ctx, a):
    return {"document": iet_to_json(power(ctx.document(a.doc), a.n))}


def cmd_canon(ctx, a):
    T = ctx.document(a.doc)
    cf = T.canonical_form
    return {"document": iet_to_json(cf.iet), "m": cf.iet.m,
            "merge_map": [i + 1 for i in cf.merge_map]}


def cmd_rank(ctx, a):
    T = ctx.document(a.doc)
    return {"rank": rank(T), "m": T.canonical.m}


def cmd_chains(ctx, a):
    cs = maximal_chains(ctx.document(a.doc), ctx.args.max_iter)
    ctx.iterations = cs.budget_used
    payload = chains_to_json(cs)
    if not cs.complete:
        raise _Inconclusive("max_iter", f"{cs.count} chains after {cs.budget_used} steps",
                            payload)
    return payload


def cmd_first_return(ctx, a):
    T = ctx.document(a.doc)
    J = (_real_arg(a.a, T.basis, "a"), _real_arg(a.b, T.basis, "b"))
    rs = first_return(T, J, ctx.args.max_iter)
    ctx.iterations = rs.budget_used
    payload = return_system_to_json(rs)
    payload["checks"] = check_return_system(T, rs)
    return payload


def cmd_tower(ctx, a):
    base = ctx.document(a.doc)
    T, shape = tower_build(base, a.heights)
    return {"document": iet_to_json(T), "heights": list(shape.heights),
            "levels": [{"column": i + 1, "level": j,
                        "start": real_display(shape.positions[(i, j)])["coeffs"]}
                       for i, j in shape.layout]}


def cmd_find_root(ctx, a):
    result = find_root_3iet(ctx.document(a.doc), ctx.args.max_iter)
    if isinstance(result, Inconclusive):
        raise _Inconclusive(result.budget, result.message)
    return certificate_to_json(result)


def cmd_idoc(ctx, a):
    res = idoc_3iet(ctx.document(a.doc))
    point = res.solution.point
    return {
        "idoc": res.holds,
        "root_possible": not res.holds,
        "witness": None if res.witness is None else list(res.witness),
        "solution": {"kind": res.solution.kind,
                     "point": None if point is None else [str(x) for x in point],
                     "directions": [[str(x) for x in d] for d in res.solution.directions]},
    }


def cmd_classify_tower(ctx, a):
    base = ctx.document(a.doc)
    T, shape = tower_build(base, (a.m, a.n))
    form = tower_classify(shape)
    return {"kind": form.kind, "d": form.d, "inverted": form.inverted,
            "alpha": real_display(form.alpha),
            "base": iet_to_json(form.base), "model": iet_to_json(form.model),
            "conjugator": iet_to_json(form.g), "verified": form.check(T)}


def cmd_examples(ctx, a):
    basis = sqrt_basis(*a.radicands)
    alphas = [_real_arg(s, basis, f"alpha/{i}") for i, s in enumerate(a.alpha)]
    T, S, N = example_family(a.m, alphas)
    return {"m": a.m, "n": N, "rank": rank(T), "T": iet_to_json(T), "S": iet_to_json(S),
            "verified": power(S, N) == T}


def cmd_verify(ctx, a):
    cert = ctx.json_input(a.cert)
    if isinstance(cert, dict) and "payload" in cert and "status" in cert:
        cert = cert["payload"]
    T = ctx.document(a.doc)
    verdict = verify_certificate(cert, T)
    if not verdict.ok:
        raise _Rejected(verdict)
    return {"valid": True, "kind": verdict.kind}


class _Rejected(Exception):
    def __init__(self, verdict):
        super().__init__("; ".join(verdict.problems))
        self.verdict = verdict


# ---------------------------------------------------------------------------

def _default_max_iter() -> int:
    env = os.environ.get("IET_MAX_ITER")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"IET_MAX_ITER={env!r} is not an integer") from None
    return DEFAULT_MAX_ITER


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{v} is not positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-iter", type=_positive_int, default=None,
                        help=f"orbit iteration budget (default {DEFAULT_MAX_ITER}, "
                             "or IET_MAX_ITER)")
    common.add_argument("--precision-bits", type=_positive_int, default=DEFAULT_PRECISION_BITS,
                        help="interval refinement budget for sign decisions")
    common.add_argument("--output", choices=("json", "text"), default="text")
    common.add_argument("--stdin", action="store_true",
                        help="read the (first) document from stdin")

    parser = _Parser(prog="iet", description="Exact computations with interval exchanges.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("eval", cmd_eval, "evaluate T at a point")
    p.add_argument("doc", nargs="?")
    p.add_argument("x", help="coefficient array, e.g. '[\"1/2\",\"0\"]' or 1/2,0")
    p = add("compose", cmd_compose, "the map x -> A(B(x))")
    p.add_argument("doc", nargs="?")
    p.add_argument("other")
    p = add("power", cmd_power, "T^n for an integer n")
    p.add_argument("doc", nargs="?")
    p.add_argument("n", type=int)
    add("canon", cmd_canon, "canonical (separating) form").add_argument("doc", nargs="?")
    add("rank", cmd_rank, "rank over Q of the canonical lengths").add_argument("doc", nargs="?")
    add("chains", cmd_chains, "maximal chains of discontinuities").add_argument("doc", nargs="?")
    p = add("first-return", cmd_first_return, "first return map to [a, b)")
    p.add_argument("doc", nargs="?")
    p.add_argument("a")
    p.add_argument("b")
    p = add("tower", cmd_tower, "tower over a base IET with integer heights")
    p.add_argument("doc", nargs="?")
    p.add_argument("heights", type=_positive_int, nargs="+")
    add("find-root", cmd_find_root, "root or no-root certificate for a 3-IET") \
        .add_argument("doc", nargs="?")
    add("idoc", cmd_idoc, "decide the infinite distinct orbit condition of a 3-IET") \
        .add_argument("doc", nargs="?")
    p = add("classify-tower", cmd_classify_tower, "classify the (m, n) tower over a rotation")
    p.add_argument("doc", nargs="?")
    p.add_argument("m", type=_positive_int)
    p.add_argument("n", type=_positive_int)
    p = add("examples", cmd_examples, "an m-IET of maximal rank with an explicit root")
    p.add_argument("m", type=int)
    p.add_argument("--radicands", type=int, nargs="+", required=True)
    p.add_argument("--alpha", action="append", required=True,
                   help="coefficient array over the basis; repeat once per parameter")
    p = add("verify", cmd_verify, "re-check a certificate against an IET document")
    p.add_argument("cert")
    p.add_argument("doc", nargs="?")
    return parser


def _render_text(value, indent=0) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        if "expr" in value and "approx" in value:
            return [f"{pad}{value['expr']}  ≈ {value['approx']}"]
        if {"perm", "lambda", "basis"} <= value.keys():
            T = parse_document(value).iet
            lam = ", ".join(str(x) for x in T.lengths)
            return [f"{pad}perm {T.perm}  lengths [{lam}]  L = {T.L}"]
        lines = []
        for k, v in value.items():
            sub = _render_text(v, indent + 1)
            if len(sub) == 1:
                lines.append(f"{pad}{k}: {sub[0].strip()}")
            else:
                lines.append(f"{pad}{k}:")
                lines.extend(sub)
        return lines
    if isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        lines = []
        for v in value:
            sub = _render_text(v, indent + 1)
            lines.append(f"{pad}- {sub[0].strip()}")
            lines.extend(sub[1:])
        return lines
    if isinstance(value, str):
        return [f"{pad}{value}"]
    return [f"{pad}{json.dumps(value, ensure_ascii=False)}"]


def _emit(envelope: dict, output: str, stream):
    if output == "json":
        print(dumps(envelope), file=stream)
    else:
        print("\n".join(_render_text(envelope)), file=stream)


def _error(kind: str, message: str, pointer: str | None = None, **extra) -> int:
    err = {"type": kind, "message": message}
    if pointer is not None:
        err["pointer"] = pointer
    err.update(extra)
    print(dumps({"status": "ERROR", "error": err}), file=sys.stderr)
    return EXIT_ERROR


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.max_iter is None:
            args.max_iter = _default_max_iter()
    except UsageError as exc:
        return _error("UsageError", str(exc))

    ctx = _Context(args)
    report = {"iterations": 0, "max_iter": args.max_iter, "precision_bits": 0,
              "precision_budget": args.precision_bits}
    status, payload, code = "OK", None, EXIT_OK
    with precision_budget(args.precision_bits), track_precision() as tracker:
        try:
            payload = args.func(ctx, args)
        except _Inconclusive as exc:
            status, payload, code = "INCONCLUSIVE", exc.payload, EXIT_INCONCLUSIVE
            report["exhausted"] = exc.budget
            report["message"] = str(exc)
        except BudgetExceeded as exc:
            status, code = "INCONCLUSIVE", EXIT_INCONCLUSIVE
            report["exhausted"] = exc.budget
            report["message"] = str(exc)
        except PrecisionExhausted as exc:
            status, code = "INCONCLUSIVE", EXIT_INCONCLUSIVE
            report["exhausted"] = "precision_bits"
            report["message"] = str(exc)
        except _Rejected as exc:
            return _error("VerificationFailed", str(exc), diff=exc.verdict.diff)
        except DocumentError as exc:
            return _error("DocumentError", str(exc), exc.pointer)
        except UsageError as exc:
            return _error("UsageError", str(exc))
        except VerificationFailed as exc:
            return _error("VerificationFailed", str(exc))
        except (IETError, ValueError) as exc:
            return _error(type(exc).__name__, str(exc))
    report["iterations"] = ctx.iterations
    report["precision_bits"] = tracker.max_bits
    _emit({"status": status, "payload": payload, "budget_report": report}, args.output,
          sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
