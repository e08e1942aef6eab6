"""ari: encode, decode, evaluate and check proof scripts."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import arithmetization as A
from . import checker as CH
from . import corpus as K
from . import enumeration as E
from . import syntax as S

EXIT_OK, EXIT_DEDUCTION, EXIT_FAIL, EXIT_USAGE = 0, 1, 2, 64

_STATUS = {"PROOF": EXIT_OK, "DEDUCTION": EXIT_DEDUCTION, "FAILED": EXIT_FAIL}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _budget(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("digit budget must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digit-budget", type=_budget, default=E.SMALL_DIGITS,
                        help="largest number of decimal digits to materialise (default 10000)")
    common.add_argument("--format", choices=("text", "json", "structured"), default="text")

    p = _Parser(prog="ari", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    enc = sub.add_parser("encode", parents=[common], help="code of a formula or termoid")
    enc.add_argument("expr")
    enc.add_argument("--kind", choices=("auto", "formula", "termoid"), default="auto")
    enc.add_argument("--value", action="store_true", help="also print the integer if it fits the budget")

    dec = sub.add_parser("decode", parents=[common], help="formula, termoid or deduction of a code")
    dec.add_argument("code")
    dec.add_argument("--kind", choices=("auto", "formula", "termoid", "deduction"), default="auto")

    ev = sub.add_parser("eval", parents=[common], help="apply a function symbol to codes")
    ev.add_argument("fn")
    ev.add_argument("codes", nargs="*")

    for name in ("check", "audit"):
        c = sub.add_parser(name, parents=[common],
                           help="check a script" if name == "check" else "check scripts with links")
        c.add_argument("scripts", nargs=1 if name == "check" else "+",
                       help="a path, corpus:NAME, or a bare corpus name")
        c.add_argument("--mode", choices=("open", "closed"), help="override the script's logic")
        c.add_argument("--strict-capture", action="store_true")
        c.add_argument("--link", action="append", default=[], metavar="NAME=SCRIPT")

    cp = sub.add_parser("corpus", help="bundled scripts")
    cp.add_argument("action", choices=("list",))
    return p


def load_script(ref: str) -> CH.Script:
    if ref.startswith("corpus:"):
        return K.load_corpus(ref.removeprefix("corpus:"))
    path = Path(ref)
    if path.is_file():
        return CH.parse_script(path.read_text(encoding="utf-8"))
    if ref in K.ENTRIES:
        return K.load_corpus(ref)
    raise UsageError(f"no script file or corpus entry named {ref!r}")


def _parse_expr(text: str, kind: str):
    if kind == "formula":
        return S.parse_formula(text)
    if kind == "termoid":
        return S.parse_termoid(text)
    try:
        return S.parse_formula(text)
    except S.ParseError:
        return S.parse_termoid(text)


def _factored(c: E.Code) -> str:
    match c:
        case E.Lit(n) if n > 1:
            fs = sorted(E.factorize(n).items())
            return E.format_code(E.Product(tuple((g, E.Lit(k)) for g, k in fs)))
    return E.format_code(c)


def _show_code(c: E.Code, budget: int, with_value: bool) -> dict:
    out = {"code": _factored(c)}
    if with_value:
        v = E.materialize(c, budget)
        out["value"] = S._int_str(v) if isinstance(v, int) else None
        if not isinstance(v, int):
            out["too_large_min_digits"] = (S._int_str(v.min_digits) if v.min_digits is not None
                                           else f"10^{v.log10_min_digits:.6g}")
    return out


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "text":
        print(text)
    else:
        print(json.dumps(payload, indent=1, ensure_ascii=False))


def _cmd_encode(args) -> int:
    c = E.encode(_parse_expr(args.expr, args.kind))
    info = _show_code(c, args.digit_budget, args.value)
    text = info["code"]
    if args.value:
        text += "\n" + (info["value"] or f"TooLarge (at least {info['too_large_min_digits']} digits)")
    _emit(args, info, text)
    return EXIT_OK


def _cmd_decode(args) -> int:
    obj = E.decode(E.parse_code(args.code), args.kind)
    match obj:
        case E.Trivial() | E.MpNode() | E.GenNode():
            text = S.print_formula(obj.root)
            kind = "deduction"
        case _ if S.is_formula(obj):
            text, kind = S.print_formula(obj), "formula"
        case _:
            text, kind = S.print_termoid(obj), "termoid"
    _emit(args, {"kind": kind, "text": text}, text)
    return EXIT_OK


def _cmd_eval(args) -> int:
    codes = [E.parse_code(c) for c in args.codes]
    arity = 2 if args.fn in S.BINARY else 1 if args.fn in S.UNARY else None
    if arity is None:
        raise UsageError(f"unknown function symbol {args.fn!r}")
    if len(codes) != arity:
        raise UsageError(f"{args.fn} takes {arity} argument(s)")
    c = A.eval_apply(args.fn, codes)
    v = E.try_int(c, args.digit_budget)
    text = S._int_str(v) if v is not None else E.format_code(c)
    _emit(args, {"code": E.format_code(c), "value": text if v is not None else None}, text)
    return EXIT_OK


def _links(items: list[str]) -> dict[str, tuple[str, CH.Script]]:
    out = {}
    for item in items:
        name, sep, ref = item.partition("=")
        if not sep or not name or not ref:
            raise UsageError(f"--link expects NAME=SCRIPT, got {item!r}")
        out[name] = (ref.removeprefix("corpus:"), load_script(ref))
    return out


def _cmd_check(args) -> int:
    links = _links(args.link)
    status = EXIT_OK
    for ref in args.scripts:
        script = load_script(ref)
        if args.mode:
            script = dataclasses.replace(script, logic=args.mode)
        rep = CH.audit(script, links, strict_capture=args.strict_capture)
        sys.stdout.write(CH.emit_report(rep, args.format))
        status = max(status, _STATUS[rep.classification])
    return status


def _cmd_corpus(args) -> int:
    for e in K.list_corpus():
        print(f"{e.name:12} {e.anchor}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    sys.set_int_max_str_digits(0)
    args = build_parser().parse_args(argv)
    handler = {"encode": _cmd_encode, "decode": _cmd_decode, "eval": _cmd_eval,
               "check": _cmd_check, "audit": _cmd_check, "corpus": _cmd_corpus}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"ari: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except K.UnknownEntry as exc:
        print(f"ari: unknown corpus entry {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CH.ScriptSyntaxError, CH.MonotonicityError, CH.LinkageMismatch, S.ParseError,
            E.NotACode, E.NotEncodable, E.NonMaterializable, ValueError) as exc:
        print(f"ari: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
