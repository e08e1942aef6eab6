"""Abstract syntax of LAri and its Kleene extension: termoids, formulae,
substitution, free-variable analysis, closures, and the concrete grammar."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Union

# ---------------------------------------------------------------------------
# Function symbols


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arity: int
    table_index: int


UNARY = ("suc", "sg", "ssg", "exp0", "exp1", "exp2", "exp00", "exp01", "exp02",
         "ell1", "cfor", "fl", "sigma", "len", "ax")
BINARY = ("add", "mul", "pow", "msd", "Mp", "mp", "ell", "e")
TERNARY: tuple[str, ...] = ()

SYMBOLS: dict[str, FunctionSymbol] = {}
for _arity, _names in ((1, UNARY), (2, BINARY), (3, TERNARY)):
    for _k, _n in enumerate(_names, start=1):
        SYMBOLS[_n] = FunctionSymbol(_n, _arity, _k)


def symbol(name: str) -> FunctionSymbol:
    try:
        return SYMBOLS[name]
    except KeyError:
        raise UnknownSymbol(name) from None


class UnknownSymbol(Exception):
    pass


# ---------------------------------------------------------------------------
# Termoids


@dataclass(frozen=True)
class Variable:
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError("variable index must be >= 1")

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class Var:
    var: Variable


@dataclass(frozen=True)
class Numeroid:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("numeroid must be non-negative")


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple["Termoid", ...]

    def __post_init__(self) -> None:
        if symbol(self.fn).arity != len(self.args):
            raise ArityError(f"{self.fn} expects {symbol(self.fn).arity} args")


@dataclass(frozen=True)
class Iota:
    bound: Variable
    body: "Formula"


# The three value-numeroid forms below belong to the Kleene layer only.
# Nu(t): the numeroid of the value of t.  NuF(r): the numeroid of the code of
# the formula denoted by F_r.  PiF(r): the explicit generator termoid of F_r.
@dataclass(frozen=True)
class Nu:
    arg: "Termoid"


@dataclass(frozen=True)
class NuF:
    arg: "Termoid"


@dataclass(frozen=True)
class PiF:
    arg: "Termoid"


@dataclass(frozen=True)
class Meta:
    """Placeholder used while expanding script-level macro definitions."""
    name: str


Termoid = Union[Var, Numeroid, App, Iota, Nu, NuF, PiF, Meta]


class ArityError(Exception):
    pass


# ---------------------------------------------------------------------------
# Formulae

PREDICATES = ("eq", "lt", "le")


@dataclass(frozen=True)
class Atom:
    pred: str
    left: Termoid
    right: Termoid


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Variable
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Variable
    body: "Formula"


@dataclass(frozen=True)
class KleeneAtom:
    sub: Termoid


Formula = Union[Atom, Imp, And, Or, Forall, Exists, KleeneAtom]

ZERO = Numeroid(0)
ONE = Numeroid(1)
FALSUM = Atom("eq", ZERO, ONE)


def x(i: int) -> Var:
    return Var(Variable(i))


def eq(a: Termoid, b: Termoid) -> Atom:
    return Atom("eq", a, b)


def app(fn: str, *args: Termoid) -> App:
    return App(fn, tuple(args))


def negate(e: Formula) -> Formula:
    return Imp(e, FALSUM)


def is_negation(e: Formula) -> bool:
    return isinstance(e, Imp) and e.right == FALSUM


# ---------------------------------------------------------------------------
# Free variables, substitution, closure


def free_vars(e: Termoid | Formula) -> frozenset[Variable]:
    match e:
        case Var(v):
            return frozenset({v})
        case Numeroid() | Meta():
            return frozenset()
        case App(_, args):
            return frozenset().union(*(free_vars(a) for a in args))
        case Iota(v, body) | Forall(v, body) | Exists(v, body):
            return free_vars(body) - {v}
        case Nu(a) | NuF(a) | PiF(a) | KleeneAtom(a):
            return free_vars(a)
        case Atom(_, l, r):
            return free_vars(l) | free_vars(r)
        case Imp(l, r) | And(l, r) | Or(l, r):
            return free_vars(l) | free_vars(r)
    raise TypeError(f"not a syntax object: {e!r}")


def all_vars(e: Termoid | Formula) -> frozenset[Variable]:
    """Free and bound variables alike."""
    match e:
        case Var(v):
            return frozenset({v})
        case Numeroid() | Meta():
            return frozenset()
        case App(_, args):
            return frozenset().union(*(all_vars(a) for a in args))
        case Iota(v, body) | Forall(v, body) | Exists(v, body):
            return all_vars(body) | {v}
        case Nu(a) | NuF(a) | PiF(a) | KleeneAtom(a):
            return all_vars(a)
        case Atom(_, l, r) | Imp(l, r) | And(l, r) | Or(l, r):
            return all_vars(l) | all_vars(r)
    raise TypeError(f"not a syntax object: {e!r}")


class CaptureViolation(Exception):
    pass


class IncompleteClosure(Exception):
    pass


@dataclass(frozen=True)
class Obligation:
    kind: str  # RangeNonEmpty | FreeFor | ValueInRange | Feasibility | ...
    variable: Variable | None
    termoid: Termoid | None
    origin: str = ""
    satisfied: bool = True
    note: str = ""


@dataclass
class _SubstState:
    captured: bool = False


def _subst(e, v: Variable, t: Termoid, tfree: frozenset[Variable], st: _SubstState):
    match e:
        case Var(w):
            return t if w == v else e
        case Numeroid() | Meta():
            return e
        case App(fn, args):
            return App(fn, tuple(_subst(a, v, t, tfree, st) for a in args))
        case Nu(a):
            return Nu(_subst(a, v, t, tfree, st))
        case NuF(a):
            return NuF(_subst(a, v, t, tfree, st))
        case PiF(a):
            return PiF(_subst(a, v, t, tfree, st))
        case KleeneAtom(a):
            return KleeneAtom(_subst(a, v, t, tfree, st))
        case Atom(p, l, r):
            return Atom(p, _subst(l, v, t, tfree, st), _subst(r, v, t, tfree, st))
        case Imp(l, r):
            return Imp(_subst(l, v, t, tfree, st), _subst(r, v, t, tfree, st))
        case And(l, r):
            return And(_subst(l, v, t, tfree, st), _subst(r, v, t, tfree, st))
        case Or(l, r):
            return Or(_subst(l, v, t, tfree, st), _subst(r, v, t, tfree, st))
        case Iota(w, body) | Forall(w, body) | Exists(w, body):
            if w == v or v not in free_vars(body):
                return e
            if w in tfree:
                st.captured = True
            return type(e)(w, _subst(body, v, t, tfree, st))
    raise TypeError(f"not a syntax object: {e!r}")


def substitute(c, v: Variable, t: Termoid, strict: bool = False, origin: str = ""):
    """Replace free occurrences of v in c by t.

    Returns (result, obligations).  The FreeFor obligation records whether t
    was free for v in c."""
    if t == Var(v):
        return c, []
    st = _SubstState()
    out = _subst(c, v, t, free_vars(t), st)
    if st.captured and strict:
        raise CaptureViolation(f"{print_termoid(t)} is not free for {v} in {print_formula(c) if is_formula(c) else print_termoid(c)}")
    ob = Obligation("FreeFor", v, t, origin, satisfied=not st.captured)
    return out, [ob]


def subst_plain(c, v: Variable, t: Termoid):
    out, _ = substitute(c, v, t)
    return out


def replace_meta(e, env: dict[str, Termoid]):
    """Expand macro placeholders; no capture checks (macro bodies are literal text)."""
    match e:
        case Meta(n):
            return env[n]
        case Var() | Numeroid():
            return e
        case App(fn, args):
            return App(fn, tuple(replace_meta(a, env) for a in args))
        case Nu(a):
            return Nu(replace_meta(a, env))
        case NuF(a):
            return NuF(replace_meta(a, env))
        case PiF(a):
            return PiF(replace_meta(a, env))
        case KleeneAtom(a):
            return KleeneAtom(replace_meta(a, env))
        case Atom(p, l, r):
            return Atom(p, replace_meta(l, env), replace_meta(r, env))
        case Imp(l, r) | And(l, r) | Or(l, r):
            return type(e)(replace_meta(l, env), replace_meta(r, env))
        case Iota(w, b) | Forall(w, b) | Exists(w, b):
            return type(e)(w, replace_meta(b, env))
    raise TypeError(f"not a syntax object: {e!r}")


def closure(e: Formula, order: Iterable[Variable]) -> Formula:
    order = list(order)
    missing = free_vars(e) - set(order)
    if missing:
        raise IncompleteClosure(", ".join(sorted(str(m) for m in missing)))
    for v in reversed(order):
        e = Forall(v, e)
    return e


def is_formula(e) -> bool:
    return isinstance(e, (Atom, Imp, And, Or, Forall, Exists, KleeneAtom))


def has_kleene(e) -> bool:
    match e:
        case KleeneAtom() | NuF() | PiF():
            return True
        case Var() | Numeroid() | Meta():
            return False
        case Nu(a):
            return has_kleene(a)
        case App(_, args):
            return any(has_kleene(a) for a in args)
        case Atom(_, l, r) | Imp(l, r) | And(l, r) | Or(l, r):
            return has_kleene(l) or has_kleene(r)
        case Iota(_, b) | Forall(_, b) | Exists(_, b):
            return has_kleene(b)
    raise TypeError(f"not a syntax object: {e!r}")


def subterms(e) -> Iterable:
    """Pre-order traversal over every termoid and formula node."""
    yield e
    match e:
        case App(_, args):
            for a in args:
                yield from subterms(a)
        case Nu(a) | NuF(a) | PiF(a) | KleeneAtom(a):
            yield from subterms(a)
        case Atom(_, l, r) | Imp(l, r) | And(l, r) | Or(l, r):
            yield from subterms(l)
            yield from subterms(r)
        case Iota(_, b) | Forall(_, b) | Exists(_, b):
            yield from subterms(b)


# ---------------------------------------------------------------------------
# Distinguished objects: omega and vf


def _omega() -> Iota:
    m, k = Variable(1), Variable(2)
    proof_of_f = lambda t: eq(app("ell", t, VF_PLACEHOLDER), ZERO)  # noqa: E731
    least = And(proof_of_f(Var(m)),
                negate(Exists(k, And(Atom("lt", Var(k), Var(m)), proof_of_f(Var(k))))))
    none = And(eq(Var(m), ZERO), negate(Exists(k, proof_of_f(Var(k)))))
    return Iota(m, Or(least, none))


def _falsum_code_int() -> int:
    # 2^15 * 3^23 * 5^(23^2): equality head, then numeroids 0 and 1
    return 2 ** 15 * 3 ** 23 * 5 ** (23 ** 2)


VF = Numeroid(_falsum_code_int())
VF_PLACEHOLDER = VF
OMEGA = _omega()


# ---------------------------------------------------------------------------
# Printing


def print_termoid(t: Termoid) -> str:
    match t:
        case Var(v):
            return str(v)
        case Numeroid(n):
            if t == VF:
                return "vf"
            return f"num({_int_str(n)})"
        case App(fn, args):
            return f"{fn}({','.join(print_termoid(a) for a in args)})"
        case Iota(v, body):
            if t == OMEGA:
                return "omega"
            return f"iota({v},{print_formula(body)})"
        case Nu(a):
            return f"nu({print_termoid(a)})"
        case NuF(a):
            return f"nuF({print_termoid(a)})"
        case PiF(a):
            return f"piF({print_termoid(a)})"
        case Meta(n):
            return f"?{n}"
    raise TypeError(f"not a termoid: {t!r}")


def print_formula(f: Formula) -> str:
    match f:
        case Atom(p, l, r):
            if f == FALSUM:
                return "bot"
            return f"{p}({print_termoid(l)},{print_termoid(r)})"
        case Imp(l, r):
            if r == FALSUM and l != FALSUM:
                return f"neg({print_formula(l)})"
            return f"imp({print_formula(l)},{print_formula(r)})"
        case And(l, r):
            return f"and({print_formula(l)},{print_formula(r)})"
        case Or(l, r):
            return f"or({print_formula(l)},{print_formula(r)})"
        case Forall(v, b):
            return f"all({v},{print_formula(b)})"
        case Exists(v, b):
            return f"exists({v},{print_formula(b)})"
        case KleeneAtom(s):
            return f"F({print_termoid(s)})"
    raise TypeError(f"not a formula: {f!r}")


def to_text(e) -> str:
    return print_formula(e) if is_formula(e) else print_termoid(e)


def _int_str(n: int) -> str:
    try:
        return str(n)
    except ValueError:  # interpreter digit limit
        import sys
        sys.set_int_max_str_digits(0)
        return str(n)


# ---------------------------------------------------------------------------
# Parsing


class ParseError(SyntaxError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos
        self.text = text


_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_\-]*)|(?P<num>\d+)|(?P<meta>\?[A-Za-z0-9_]+)|(?P<macro>@[A-Za-z_][A-Za-z0-9_]*)|(?P<p>[(),]))")

MacroTable = dict[str, tuple[tuple[str, ...], Formula]]


class _Parser:
    def __init__(self, text: str, macros: MacroTable | None = None,
                 term_macros: dict[str, tuple[tuple[str, ...], Termoid]] | None = None):
        self.text = text
        self.pos = 0
        self.macros = macros or {}
        self.term_macros = term_macros or {}
        self.toks: list[tuple[str, str, int]] = []
        i = 0
        while i < len(text):
            if text[i:].strip() == "":
                break
            m = _TOKEN.match(text, i)
            if not m or m.end() == i:
                raise ParseError(f"unexpected character {text[i:].lstrip()[:1]!r}", i, text)
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append((kind, m.group(kind), start))
            i = m.end()
        self.k = 0

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else ("eof", "", len(self.text))

    def take(self, kind: str | None = None, value: str | None = None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2], self.text)
        self.k += 1
        return tok

    def done(self):
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2], self.text)

    def variable(self) -> Variable:
        tok = self.take("id")
        m = re.fullmatch(r"x([1-9][0-9]*)", tok[1])
        if not m:
            raise ParseError(f"expected a variable, found {tok[1]!r}", tok[2], self.text)
        return Variable(int(m.group(1)))

    def args(self, n: int, item):
        self.take("p", "(")
        out = []
        for j in range(n):
            if j:
                self.take("p", ",")
            out.append(item())
        self.take("p", ")")
        return out

    def arglist(self, item):
        self.take("p", "(")
        out = []
        if self.peek()[1] != ")":
            out.append(item())
            while self.peek()[1] == ",":
                self.take("p", ",")
                out.append(item())
        self.take("p", ")")
        return out

    def termoid(self) -> Termoid:
        kind, val, pos = self.take()
        if kind == "meta":
            return Meta(val[1:])
        if kind == "num":
            return Numeroid(int(val))
        if kind == "macro":
            name = val[1:]
            if name not in self.term_macros:
                raise ParseError(f"unknown termoid macro {name!r}", pos, self.text)
            params, body = self.term_macros[name]
            actual = self.arglist(self.termoid) if self.peek()[1] == "(" else []
            if len(actual) != len(params):
                raise ParseError(f"macro {name} expects {len(params)} arguments", pos, self.text)
            return replace_meta(body, dict(zip(params, actual)))
        if kind != "id":
            raise ParseError(f"expected a termoid, found {val!r}", pos, self.text)
        if re.fullmatch(r"x[1-9][0-9]*", val):
            return Var(Variable(int(val[1:])))
        match val:
            case "num":
                self.take("p", "(")
                n = self.take("num")
                self.take("p", ")")
                return Numeroid(int(n[1]))
            case "vf":
                return VF
            case "omega":
                return OMEGA
            case "iota":
                v, body = self.binder()
                if v not in free_vars(body):
                    raise ParseError("iota body must contain the bound variable", pos, self.text)
                return Iota(v, body)
            case "nu":
                return Nu(self.args(1, self.termoid)[0])
            case "nuF":
                return NuF(self.args(1, self.termoid)[0])
            case "piF":
                return PiF(self.args(1, self.termoid)[0])
        if val not in SYMBOLS:
            raise ParseError(f"unknown function symbol {val!r}", pos, self.text)
        return App(val, tuple(self.args(SYMBOLS[val].arity, self.termoid)))

    def binder(self):
        self.take("p", "(")
        v = self.variable()
        self.take("p", ",")
        body = self.formula()
        self.take("p", ")")
        return v, body

    def formula(self) -> Formula:
        kind, val, pos = self.take()
        if kind == "macro":
            name = val[1:]
            if name not in self.macros:
                raise ParseError(f"unknown formula macro {name!r}", pos, self.text)
            params, body = self.macros[name]
            actual = self.arglist(self.termoid) if self.peek()[1] == "(" else []
            if len(actual) != len(params):
                raise ParseError(f"macro {name} expects {len(params)} arguments", pos, self.text)
            return replace_meta(body, dict(zip(params, actual)))
        if kind != "id":
            raise ParseError(f"expected a formula, found {val!r}", pos, self.text)
        match val:
            case "bot":
                return FALSUM
            case "eq" | "lt" | "le":
                l, r = self.args(2, self.termoid)
                return Atom(val, l, r)
            case "imp":
                l, r = self.args(2, self.formula)
                return Imp(l, r)
            case "and":
                l, r = self.args(2, self.formula)
                return And(l, r)
            case "or":
                l, r = self.args(2, self.formula)
                return Or(l, r)
            case "neg":
                return negate(self.args(1, self.formula)[0])
            case "all":
                return Forall(*self.binder())
            case "exists":
                return Exists(*self.binder())
            case "F":
                return KleeneAtom(self.args(1, self.termoid)[0])
        raise ParseError(f"unknown connective {val!r}", pos, self.text)


def parse(text: str, kind: str = "formula", macros: MacroTable | None = None,
          term_macros=None):
    p = _Parser(text, macros, term_macros)
    try:
        out = p.termoid() if kind == "termoid" else p.formula()
    except ArityError as exc:
        raise ParseError(str(exc), p.peek()[2], text) from None
    p.done()
    return out


def parse_formula(text: str, **kw) -> Formula:
    return parse(text, "formula", **kw)


def parse_termoid(text: str, **kw) -> Termoid:
    return parse(text, "termoid", **kw)


# ---------------------------------------------------------------------------
# Generic structural map (used by notation normalisers)


def map_termoids(e, fn: Callable[[Termoid], Termoid]):
    """Bottom-up rewrite of every termoid node with fn."""
    match e:
        case Var() | Numeroid() | Meta():
            return fn(e)
        case App(f, args):
            return fn(App(f, tuple(map_termoids(a, fn) for a in args)))
        case Nu(a):
            return fn(Nu(map_termoids(a, fn)))
        case NuF(a):
            return fn(NuF(map_termoids(a, fn)))
        case PiF(a):
            return fn(PiF(map_termoids(a, fn)))
        case Iota(v, b):
            return fn(Iota(v, map_termoids(b, fn)))
        case KleeneAtom(a):
            return KleeneAtom(map_termoids(a, fn))
        case Atom(p, l, r):
            return Atom(p, map_termoids(l, fn), map_termoids(r, fn))
        case Imp(l, r) | And(l, r) | Or(l, r):
            return type(e)(map_termoids(l, fn), map_termoids(r, fn))
        case Forall(v, b) | Exists(v, b):
            return type(e)(v, map_termoids(b, fn))
    raise TypeError(f"not a syntax object: {e!r}")

