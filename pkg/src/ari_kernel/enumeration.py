"""The enumeration En over symbolic codes.

A code is either a small literal or a canonical product of prime powers whose
exponents are again codes.  Values below LIT_BOUND are always literals, so the
canonical form of every value is unique and equality is structural."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal, getcontext
from functools import lru_cache
from typing import Union

import sympy

from . import syntax as S

LIT_DIGITS = 1000
LIT_BOUND = 10 ** LIT_DIGITS
TRIAL_PRIMES = 2000


@dataclass(frozen=True)
class Lit:
    n: int


@dataclass(frozen=True)
class Product:
    factors: tuple[tuple[int, "Code"], ...]


Code = Union[Lit, Product]

ZERO = Lit(0)
ONE = Lit(1)


class NotACode(Exception):
    pass


class NotEncodable(Exception):
    pass


class KleenePresent(NotEncodable):
    pass


class NonMaterializable(Exception):
    pass


@lru_cache(maxsize=None)
def prime(g: int) -> int:
    """p_g with p_0 = 2."""
    return int(sympy.prime(g + 1))


@lru_cache(maxsize=4096)
def prime_index(p: int) -> int:
    return int(sympy.primepi(p)) - 1


def factorize(n: int) -> dict[int, int]:
    """Prime-index -> exponent for a positive integer.

    Trial division over the first TRIAL_PRIMES primes; a cofactor left over is
    handed to sympy only when small enough to be factored quickly."""
    out: dict[int, int] = {}
    for g in range(TRIAL_PRIMES):
        if n == 1:
            return out
        p = prime(g)
        if p * p > n:
            out[prime_index(n)] = out.get(prime_index(n), 0) + 1
            return out
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        if k:
            out[g] = k
    if n == 1:
        return out
    if n.bit_length() > 80:
        raise NonMaterializable("integer too large to factor")
    for p, e in sympy.factorint(n).items():
        out[prime_index(p)] = e
    return out


# ---------------------------------------------------------------------------
# Construction and canonical form


def _log10_lower(c: Code) -> float:
    """A lower bound for log10 of the value (may be inf)."""
    match c:
        case Lit(n):
            return -math.inf if n == 0 else (n.bit_length() - 1) * 0.30102999566
        case Product(fs):
            total = 0.0
            for g, e in fs:
                le = _log10_lower(e)
                try:
                    ev = 10.0 ** le
                except OverflowError:
                    return math.inf
                total += ev * math.log10(prime(g))
            return total


def make(factors) -> Code:
    """Canonical code of prod p_g^{e_g}; factors is a mapping or pair list."""
    items = factors.items() if isinstance(factors, dict) else factors
    merged: dict[int, Code] = {}
    for g, e in items:
        if isinstance(e, int):
            e = Lit(e)
        if e == ZERO:
            continue
        merged[g] = add(merged[g], e) if g in merged else e
    fs = tuple(sorted(merged.items()))
    if all(isinstance(e, Lit) and e.n.bit_length() < 24 for _, e in fs):
        if sum(e.n * math.log10(prime(g)) for g, e in fs) < LIT_DIGITS + 0.5:
            v = 1
            for g, e in fs:
                v *= prime(g) ** e.n
            if v < LIT_BOUND:
                return Lit(v)
    return Product(fs)


def lit(n: int) -> Code:
    if n < 0:
        raise ValueError("codes are non-negative")
    if n < LIT_BOUND:
        return Lit(n)
    return make(factorize(n))


def factors_of(c: Code) -> dict[int, Code]:
    match c:
        case Lit(0):
            raise NonMaterializable("0 has no factorization")
        case Lit(n):
            return {g: Lit(e) for g, e in factorize(n).items()}
        case Product(fs):
            return dict(fs)


def code_exp(c: Code, g: int) -> Code:
    match c:
        case Lit(0) | Lit(1):
            return ZERO
        case Lit(n):
            p = prime(g)
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            return Lit(k)
        case Product(fs):
            for h, e in fs:
                if h == g:
                    return e
                if h > g:
                    break
            return ZERO


def code_eq(a: Code, b: Code) -> bool:
    return a == b


def code_len(c: Code) -> int:
    """Largest prime index present; len(0) = len(1) = 0."""
    match c:
        case Lit(0) | Lit(1):
            return 0
        case Lit(n):
            return max(factorize(n))
        case Product(fs):
            return fs[-1][0]


# ---------------------------------------------------------------------------
# Arithmetic on codes (exact or symbolic; raises NonMaterializable otherwise)

SMALL_DIGITS = 10_000


def add(a: Code, b: Code) -> Code:
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    if isinstance(a, Lit) and isinstance(b, Lit):
        return lit(a.n + b.n)
    va, vb = try_int(a), try_int(b)
    if va is None or vb is None:
        raise NonMaterializable("sum of non-materializable codes")
    return lit(va + vb)


def mul(a: Code, b: Code) -> Code:
    if a == ZERO or b == ZERO:
        return ZERO
    if isinstance(a, Lit) and isinstance(b, Lit):
        return lit(a.n * b.n)
    fa, fb = factors_of(a), factors_of(b)
    for g, e in fb.items():
        fa[g] = add(fa[g], e) if g in fa else e
    return make(fa)


def power(a: Code, b: Code) -> Code:
    if b == ZERO:
        return ONE
    if a == ZERO or a == ONE:
        return a
    if isinstance(a, Lit) and isinstance(b, Lit) and b.n.bit_length() < 24 \
            and b.n * math.log10(a.n) < LIT_DIGITS + 0.5:
        return lit(a.n ** b.n)
    return make({g: mul(e, b) for g, e in factors_of(a).items()})


def sub_trunc(a: Code, b: Code) -> Code:
    if a == b:
        return ZERO
    va, vb = try_int(a), try_int(b)
    if va is None or vb is None:
        raise NonMaterializable("difference of non-materializable codes")
    return lit(max(va - vb, 0))


def msd(a: Code, b: Code) -> Code:
    if a == b:
        return ZERO
    va, vb = try_int(a), try_int(b)
    if va is None or vb is None:
        raise NonMaterializable("msd of incomparable non-materializable codes")
    return lit(abs(va - vb))


# ---------------------------------------------------------------------------
# Materialization


@dataclass(frozen=True)
class TooLarge:
    min_digits: int | None
    log10_min_digits: float


_LOG_SCALE = 10 ** 40


@lru_cache(maxsize=None)
def _log10_floor_scaled(p: int) -> int:
    getcontext().prec = 80
    return int(Decimal(p).log10() * _LOG_SCALE) - 1


def _digits(n: int) -> int:
    if n == 0:
        return 1
    d = int(n.bit_length() * 0.30102999566398) - 1
    d = max(d, 0)
    while 10 ** (d + 1) <= n:
        d += 1
    return d + 1


def _mat(c: Code, budget: int) -> int | None:
    match c:
        case Lit(n):
            return n
        case Product(fs):
            if _log10_lower(c) > budget + 1:
                return None
            v = 1
            for g, e in fs:
                ev = _mat(e, budget)
                if ev is None:
                    return None
                if ev.bit_length() > 60 or ev * math.log10(prime(g)) > budget + 1:
                    return None
                v *= prime(g) ** ev
            return v


def materialize(c: Code, digit_budget: int = SMALL_DIGITS) -> int | TooLarge:
    v = _mat(c, digit_budget)
    if v is not None and _digits(v) <= digit_budget:
        return v
    md = _min_digits(c)
    if md is not None:
        return TooLarge(md, (md.bit_length() - 1) * 0.30102999566)
    lv = _log10_lower(c)
    return TooLarge(None, math.log10(lv) if lv > 1 else 0.0)


def _min_digits(c: Code) -> int | None:
    """Certified lower bound on the digit count, when the exponents materialize."""
    if isinstance(c, Lit):
        return _digits(c.n)
    total = 0
    for g, e in c.factors:
        ev = _mat(e, 100_000)
        if ev is None:
            return None
        total += ev * _log10_floor_scaled(prime(g))
    return total // _LOG_SCALE + 1


def try_int(c: Code, digit_budget: int = SMALL_DIGITS) -> int | None:
    v = materialize(c, digit_budget)
    return v if isinstance(v, int) else None


# ---------------------------------------------------------------------------
# Code literal syntax:  p(0)^15 * p(1)^(p(0)^3) * ...  or an integer


def format_code(c: Code) -> str:
    match c:
        case Lit(n):
            return S._int_str(n)
        case Product(fs):
            if not fs:
                return "1"
            parts = []
            for g, e in fs:
                es = format_code(e)
                parts.append(f"p({g})^{es if isinstance(e, Lit) else '(' + es + ')'}")
            return " * ".join(parts)


_CODE_TOK = re.compile(r"\s*(p|\d+|[()^*])")


def parse_code(text: str) -> Code:
    toks = []
    i = 0
    text = text.strip()
    while i < len(text):
        m = _CODE_TOK.match(text, i)
        if not m:
            raise S.ParseError(f"bad code literal near {text[i:i+10]!r}", i, text)
        toks.append(m.group(1))
        i = m.end()
        while i < len(text) and text[i].isspace():
            i += 1
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(want=None):
        nonlocal pos
        t = peek()
        if t is None or (want is not None and t != want):
            raise S.ParseError(f"expected {want!r} in code literal", pos, text)
        pos += 1
        return t

    def atom() -> Code:
        t = peek()
        if t == "(":
            take("(")
            c = product()
            take(")")
            return c
        if t == "p":
            take("p")
            take("(")
            g = int(take())
            take(")")
            e: Code = ONE
            if peek() == "^":
                take("^")
                e = atom()
            return make({g: e})
        if t is not None and t.isdigit():
            take()
            return lit(int(t))
        raise S.ParseError("expected a code factor", pos, text)

    def product() -> Code:
        c = atom()
        while peek() == "*":
            take("*")
            c = mul(c, atom())
        return c

    out = product()
    if pos != len(toks):
        raise S.ParseError("trailing input in code literal", pos, text)
    return out


# ---------------------------------------------------------------------------
# Symbol codes

VAR_PRIME = 9        # 29
NUM_PRIME = 8        # 23
PRED_CODE = {"eq": 15, "lt": 25, "le": 35}
CONN_CODE = {"imp": 3, "and": 5, "or": 7}
QUANT_CODE = {"all": 11, "exists": 13}
IOTA_CODE = 113
ARITY_PRIME = {1: 19, 2: 20, 3: 21}   # 71, 73, 79

_PRED_BY_CODE = {v: k for k, v in PRED_CODE.items()}
_CONN_BY_CODE = {v: k for k, v in CONN_CODE.items()}
_QUANT_BY_CODE = {v: k for k, v in QUANT_CODE.items()}


def symbol_code(name: str) -> Code:
    sym = S.symbol(name)
    return make({ARITY_PRIME[sym.arity]: sym.table_index})


_SYMBOL_BY_CODE = {symbol_code(n): n for n in S.SYMBOLS}


def _node(head: Code, *children: Code) -> Code:
    return make({g: c for g, c in enumerate((head, *children))})


@lru_cache(maxsize=200_000)
def encode_termoid(t: S.Termoid) -> Code:
    match t:
        case S.Var(v):
            return make({VAR_PRIME: v.index})
        case S.Numeroid(n):
            return make({NUM_PRIME: lit(n + 1)})
        case S.App(fn, args):
            if fn not in S.SYMBOLS:
                raise S.UnknownSymbol(fn)
            return _node(symbol_code(fn), *(encode_termoid(a) for a in args))
        case S.Iota(v, body):
            return _node(Lit(IOTA_CODE), encode_termoid(S.Var(v)), encode_formula(body))
        case S.Nu(_) | S.NuF(_) | S.PiF(_):
            raise KleenePresent(f"{S.print_termoid(t)} belongs to the Kleene layer")
        case S.Meta(_):
            raise NotEncodable("unexpanded macro placeholder")
    raise TypeError(f"not a termoid: {t!r}")


@lru_cache(maxsize=200_000)
def encode_formula(f: S.Formula) -> Code:
    match f:
        case S.Atom(p, l, r):
            return _node(Lit(PRED_CODE[p]), encode_termoid(l), encode_termoid(r))
        case S.Imp(l, r):
            return _node(Lit(3), encode_formula(l), encode_formula(r))
        case S.And(l, r):
            return _node(Lit(5), encode_formula(l), encode_formula(r))
        case S.Or(l, r):
            return _node(Lit(7), encode_formula(l), encode_formula(r))
        case S.Forall(v, b):
            return _node(Lit(11), encode_termoid(S.Var(v)), encode_formula(b))
        case S.Exists(v, b):
            return _node(Lit(13), encode_termoid(S.Var(v)), encode_formula(b))
        case S.KleeneAtom(_):
            raise KleenePresent("Kleene atoms have no code of their own")
    raise TypeError(f"not a formula: {f!r}")


def encode(e) -> Code:
    if isinstance(e, (Trivial, MpNode, GenNode)):
        return encode_deduction(e)
    return encode_formula(e) if S.is_formula(e) else encode_termoid(e)


# ---------------------------------------------------------------------------
# Deductions


@dataclass(frozen=True)
class Trivial:
    root: S.Formula


@dataclass(frozen=True)
class MpNode:
    root: S.Formula
    minor: "Deduction"
    major: "Deduction"

    def __post_init__(self) -> None:
        if self.major.root != S.Imp(self.minor.root, self.root):
            raise ValueError("major root must be minor root ⊃ root")


@dataclass(frozen=True)
class GenNode:
    root: S.Formula
    premise: "Deduction"
    variable: S.Variable

    def __post_init__(self) -> None:
        if self.root != S.Forall(self.variable, self.premise.root):
            raise ValueError("Gen root must quantify the premise root")


Deduction = Union[Trivial, MpNode, GenNode]


def encode_deduction(d: Deduction) -> Code:
    match d:
        case Trivial(root):
            return make({0: encode_formula(root)})
        case MpNode(root, minor, major):
            return make({0: encode_formula(root), 1: encode_deduction(minor),
                         2: encode_deduction(major)})
        case GenNode(root, premise, _):
            return make({0: encode_formula(root), 1: encode_deduction(premise)})
    raise TypeError(f"not a deduction: {d!r}")


# ---------------------------------------------------------------------------
# Decoding


def _parts(c: Code) -> dict[int, Code]:
    if c == ZERO:
        raise NotACode("0 codes no object")
    try:
        return factors_of(c)
    except NonMaterializable as exc:
        raise NotACode(str(exc)) from None


def _expect(fs: dict[int, Code], n: int, what: str) -> list[Code]:
    if set(fs) != set(range(n)):
        raise NotACode(f"{what}: expected prime positions 0..{n - 1}, found {sorted(fs)}")
    return [fs[g] for g in range(n)]


def decode_termoid(c: Code) -> S.Termoid:
    fs = _parts(c)
    if set(fs) == {VAR_PRIME}:
        i = try_int(fs[VAR_PRIME])
        if i is None or i < 1:
            raise NotACode("variable index")
        return S.Var(S.Variable(i))
    if set(fs) == {NUM_PRIME}:
        n = try_int(fs[NUM_PRIME])
        if n is None:
            raise NotACode("numeroid beyond budget")
        return S.Numeroid(n - 1)
    head = fs.get(0, ZERO)
    if head == Lit(IOTA_CODE):
        _, v, b = _expect(fs, 3, "iota")
        var = decode_termoid(v)
        if not isinstance(var, S.Var):
            raise NotACode("iota binder is not a variable")
        body = decode_formula(b)
        if var.var not in S.free_vars(body):
            raise NotACode("iota body lacks the bound variable")
        return S.Iota(var.var, body)
    if head in _SYMBOL_BY_CODE:
        name = _SYMBOL_BY_CODE[head]
        args = _expect(fs, 1 + S.symbol(name).arity, name)[1:]
        return S.App(name, tuple(decode_termoid(a) for a in args))
    raise NotACode(f"head exponent {format_code(head)} is not a termoid symbol")


def decode_formula(c: Code) -> S.Formula:
    fs = _parts(c)
    head = fs.get(0, ZERO)
    hv = head.n if isinstance(head, Lit) else None
    if hv in _PRED_BY_CODE:
        _, l, r = _expect(fs, 3, "atom")
        return S.Atom(_PRED_BY_CODE[hv], decode_termoid(l), decode_termoid(r))
    if hv in _CONN_BY_CODE:
        _, l, r = _expect(fs, 3, "connective")
        ctor = {"imp": S.Imp, "and": S.And, "or": S.Or}[_CONN_BY_CODE[hv]]
        return ctor(decode_formula(l), decode_formula(r))
    if hv in _QUANT_BY_CODE:
        _, v, b = _expect(fs, 3, "quantifier")
        var = decode_termoid(v)
        if not isinstance(var, S.Var):
            raise NotACode("quantifier binder is not a variable")
        ctor = S.Forall if _QUANT_BY_CODE[hv] == "all" else S.Exists
        return ctor(var.var, decode_formula(b))
    raise NotACode(f"head exponent {format_code(head)} is not a formula symbol")


def decode_deduction(c: Code) -> Deduction:
    fs = _parts(c)
    if 0 not in fs:
        raise NotACode("deduction without root")
    root = decode_formula(fs[0])
    match sorted(fs):
        case [0]:
            return Trivial(root)
        case [0, 1, 2]:
            minor, major = decode_deduction(fs[1]), decode_deduction(fs[2])
            try:
                return MpNode(root, minor, major)
            except ValueError as exc:
                raise NotACode(str(exc)) from None
        case [0, 1]:
            if not isinstance(root, S.Forall):
                raise NotACode("Gen root is not universal")
            prem = decode_deduction(fs[1])
            try:
                return GenNode(root, prem, root.var)
            except ValueError as exc:
                raise NotACode(str(exc)) from None
    raise NotACode("not a deduction shape")


def decode(c: Code, hint: str = "auto"):
    match hint:
        case "termoid":
            return decode_termoid(c)
        case "formula":
            return decode_formula(c)
        case "deduction":
            return decode_deduction(c)
    errors = []
    for fn in (decode_formula, decode_termoid, decode_deduction):
        try:
            return fn(c)
        except NotACode as exc:
            errors.append(str(exc))
    raise NotACode("; ".join(errors))


FALSUM_CODE = encode_formula(S.FALSUM)
