"""Command-line entry point.

Every subcommand prints JSON on stdout (or writes it with ``--out``).
Exit status: 0 on success, 1 when a verification or solve fails, 2 on
usage errors and malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from .analysis import EvalConfig, QuadratureGrid, eval_series, petersson, tail_bound
from .errors import ObstructionViolated
from .forms import delta_cusp, eisenstein_G, frak_m, g2_star, real_eisenstein
from .lattice import GraphSpec, graph_sum
from .operators import laplace, partial, partial_bar, rc_bracket1, rc_bracket2, sym_bracket2
from .primitives import build_double_eisenstein, solve_del_primitive
from .series import RAForm
from .verify import SUITES, run_suite

SCHEMAS = """\
JSON schemas
  scalar  {"terms": [{"zetas": [3, 3], "rat": "-1/2", "symbols": ["c"]}]}
  form    {"weights": [r, s], "order": N, "terms": [{"m": m, "n": n, "k": k, "coeff": <scalar>}],
           "flags": [...]}          (terms sorted by (m, n, k))
  graph   {"vertices": ["v1", "v2"], "edges": [{"tail": "v1", "head": "v2"}, {"tail": null, "head": "v1"}]}
  family  {"a": A, "b": B, "k": K, "order": N, "members": {"r,s": <form>}, "constants": [names]}
  numeric {"value": x | {"re": x, "im": y}, "error_estimate": e, "config": {...}}

Floats are printed with 17 significant digits.  Set RAQMOD_CACHE_DIR to keep
expanded forms on disk between runs.
"""


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# deterministic JSON


def _encode(obj, indent: int, level: int = 0) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        return format(obj, ".17g") if obj != int(obj) or abs(obj) >= 1e16 else format(obj, ".1f")
    if isinstance(obj, complex):
        return _encode({"re": obj.real, "im": obj.imag}, indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj, 2) + "\n"


def _emit(obj, out: str | None):
    text = dumps(obj)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _load_form(path: str) -> RAForm:
    data = _load_json(path)
    try:
        return RAForm.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path} is not a form: {exc}") from exc


def _parse_point(text: str) -> complex:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError as exc:
        raise UsageError(f"point must be given as x,y; got {text!r}") from exc
    if y <= 0:
        raise UsageError("the point must lie in the upper half plane (y > 0)")
    return complex(x, y)


def _parse_symbols(items) -> dict:
    out = {}
    for item in items or ():
        name, _, value = item.partition("=")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise UsageError(f"bad --symbol {item!r}; expected name=value") from exc
    return out


@contextmanager
def _symbols_required():
    try:
        yield
    except KeyError as exc:
        raise UsageError(f"{exc.args[0]}; pass it with --symbol name=value") from exc


# ---------------------------------------------------------------------------
# subcommands


def _build_form(name: str, order: int) -> RAForm:
    if name == "G2star":
        return g2_star(order)
    if name in ("delta", "Delta"):
        return delta_cusp(order)
    if name == "m":
        return frak_m(order)
    if name.startswith("G") and name[1:].isdigit():
        return eisenstein_G(int(name[1:]), order)
    if name.startswith("E:"):
        try:
            r, s = (int(t) for t in name[2:].split(","))
        except ValueError as exc:
            raise UsageError(f"bad form {name!r}; expected E:r,s") from exc
        return real_eisenstein(r, s, order)
    raise UsageError(f"unknown form {name!r}; use G<k>, G2star, delta, m or E:r,s")


def _cached_form(name: str, order: int) -> RAForm:
    cache = os.environ.get("RAQMOD_CACHE_DIR")
    if not cache:
        return _build_form(name, order)
    path = Path(cache) / f"{name.replace(':', '_').replace(',', '_')}_N{order}.json"
    if path.exists():
        return RAForm.from_json(json.loads(path.read_text(encoding="utf-8")))
    form = _build_form(name, order)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(form.to_json()), encoding="utf-8")
    return form


def cmd_expand(args) -> int:
    form = _cached_form(args.form, args.order)
    data = form.to_json()
    data["constant_part"] = {str(k): str(v) for k, v in sorted(form.constant_part().items(), reverse=True)}
    _emit(data, args.out)
    return 0


_UNARY = {"del": partial, "dbar": partial_bar, "laplace": laplace}
_BINARY = {"rc1": rc_bracket1, "rc2": rc_bracket2, "sym2": sym_bracket2}


def cmd_apply(args) -> int:
    f = _load_form(args.inp)
    if args.op in _UNARY:
        result = _UNARY[args.op](f)
    else:
        if not args.in2:
            raise UsageError(f"operator {args.op} needs a second form (--in2)")
        result = _BINARY[args.op](f, _load_form(args.in2))
    _emit(result.to_json(), args.out)
    return 0


def cmd_solve(args) -> int:
    f = _load_form(args.inp)
    try:
        sol = solve_del_primitive(f, args.target_r)
    except ObstructionViolated as exc:
        _emit({"status": "obstructed", "message": str(exc), "offending": [list(p) for p in exc.offending]}, args.out)
        return 1
    _emit({"status": "solved", "primitive": sol.primitive.to_json(), "free_parameters": sol.free_parameters}, args.out)
    return 0


def cmd_double_eis(args) -> int:
    fam = build_double_eisenstein(args.a, args.b, args.k, args.order)
    _emit(fam.to_json(), args.out)
    return 0


def cmd_eval(args) -> int:
    f = _load_form(args.inp)
    z = _parse_point(args.z)
    cfg = EvalConfig.make(_parse_symbols(args.symbol), args.order, args.tolerance)
    with _symbols_required():
        value = eval_series(f, z, cfg)
    err = float(tail_bound(f, z, cfg))
    _emit({"value": value, "error_estimate": err, "config": {"z": [z.real, z.imag], "order": cfg.order or f.order, "target_abs_error": cfg.target_abs_error}}, args.out)
    return 0


def cmd_petersson(args) -> int:
    f, g = _load_form(args.f), _load_form(args.g)
    cfg = EvalConfig.make(_parse_symbols(args.symbol), args.order, args.tolerance)
    grid = QuadratureGrid(args.nx, args.ny, args.y_max)
    coarse = QuadratureGrid(max(args.nx // 2, 1), max(args.ny // 2, 1), args.y_max)
    with _symbols_required():
        value = petersson(f, g, args.n, grid, cfg)
        err = abs(value - petersson(f, g, args.n, coarse, cfg))
    _emit({"value": value, "error_estimate": err, "config": {"n": args.n if args.n is not None else f.r + g.s, "nx": args.nx, "ny": args.ny, "y_max": args.y_max}}, args.out)
    return 0


def cmd_graph_sum(args) -> int:
    try:
        G = GraphSpec.from_json(_load_json(args.graph))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.graph} is not a graph: {exc}") from exc
    res = graph_sum(G, _parse_point(args.z), args.cutoff, jobs=args.jobs)
    data = res.to_json()
    data = {"value": data.pop("value"), "error_estimate": data.pop("error_estimate"), "config": {"cutoff": args.cutoff, "z": args.z}, **data}
    _emit(data, args.out)
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        rep = run_suite(name, order=args.order, cutoff=args.cutoff, tolerance=args.tolerance, jobs=args.jobs)
        reports.append(rep)
        print(f"{'PASS' if rep.passed else 'FAIL'} {name} ({rep.runtime:.2f}s)", file=sys.stderr)
    payload = reports[0].to_json() if len(reports) == 1 else {"status": "pass" if all(r.passed for r in reports) else "fail", "suites": [r.to_json() for r in reports]}
    _emit(payload, args.out)
    return 0 if all(r.passed for r in reports) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raqmod",
        description="Exact and numerical computations with real-analytic modular forms.",
        epilog=SCHEMAS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=SCHEMAS, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--out", help="write JSON here instead of stdout")
        return p

    p = add("expand", "expand a named form: G<k>, G2star, delta, m or E:r,s")
    p.add_argument("--form", required=True)
    p.add_argument("--order", type=int, default=8, help="truncation order N (default 8)")
    p.set_defaults(func=cmd_expand)

    p = add("apply", "apply an operator to a form")
    p.add_argument("--op", required=True, choices=sorted(_UNARY) + sorted(_BINARY))
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--in2")
    p.set_defaults(func=cmd_apply)

    p = add("solve", "find a del-primitive of a form")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--target-r", type=int, help="weight r of the primitive (input r minus one)")
    p.set_defaults(func=cmd_solve)

    p = add("double-eis", "build a double Eisenstein family F^(k) for (a, b)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--order", type=int, default=12, help="truncation order N (default 12)")
    p.set_defaults(func=cmd_double_eis)

    p = add("eval", "evaluate a form at a point x,y of the upper half plane")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--order", type=int, help="use only q-orders up to this (default: all stored)")
    p.add_argument("--tolerance", type=float, default=1e-9, help="largest admissible tail estimate (default 1e-9)")
    p.add_argument("--symbol", action="append", help="numeric value for a named constant, name=value")
    p.set_defaults(func=cmd_eval)

    p = add("petersson", "Petersson pairing of two forms over the fundamental domain")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--n", type=int, help="power of y (default r(f) + s(g), the only modular choice)")
    p.add_argument("--nx", type=int, default=64)
    p.add_argument("--ny", type=int, default=64)
    p.add_argument("--y-max", type=float, default=6.0)
    p.add_argument("--order", type=int)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--symbol", action="append")
    p.set_defaults(func=cmd_petersson)

    p = add("graph-sum", "lattice sum of a modular graph function")
    p.add_argument("--graph", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--cutoff", type=int, default=50, help="box size M (default 50)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--json", action="store_true", help="accepted for compatibility; output is always JSON")
    p.set_defaults(func=cmd_graph_sum)

    p = add("verify", "run a verification suite")
    p.add_argument("--suite", required=True, choices=list(SUITES) + ["all"])
    p.add_argument("--order", type=int, help="series order (suite default if omitted)")
    p.add_argument("--cutoff", type=int, help="lattice cutoff M for zagier and c211 (default 50)")
    p.add_argument("--tolerance", type=float, help="numeric threshold (suite default if omitted)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"raqmod: error: {exc}", file=sys.stderr)
        return 2
    except ObstructionViolated as exc:
        print(f"raqmod: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"raqmod: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
