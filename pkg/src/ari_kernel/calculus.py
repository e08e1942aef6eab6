"""Axiom schemata, the rules MP and Gen, and the derived-rule expander."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import syntax as S
from .syntax import (FALSUM, And, Atom, Exists, Forall, Formula, Imp, Iota, Meta,
                     Numeroid, Obligation, Or, Var, free_vars, negate)


@dataclass(frozen=True)
class SchemaMatch:
    schema: str
    bindings: tuple = ()
    obligations: tuple[Obligation, ...] = ()


class RuleError(Exception):
    """Base of MP/Gen/expansion failures; the class name is the reason code."""


class NotImplication(RuleError):
    pass


class AntecedentMismatch(RuleError):
    pass


class VariableNotFree(RuleError):
    pass


class ClosedModeViolation(RuleError):
    pass


class HypothesisCapture(RuleError):
    pass


class ShapeMismatch(RuleError):
    pass


# ---------------------------------------------------------------------------
# Termoid pattern matching (metavariables are Meta nodes)


def match_pattern(pat, target, binds: dict) -> bool:
    match pat:
        case Meta(n):
            if not isinstance(target, (Var, Numeroid, S.App, Iota, S.Nu, S.NuF, S.PiF)):
                return False
            if n in binds:
                return binds[n] == target
            binds[n] = target
            return True
    if type(pat) is not type(target):
        return False
    match pat:
        case S.App(fn, args):
            return fn == target.fn and all(match_pattern(a, b, binds) for a, b in zip(args, target.args))
        case Atom(p, l, r):
            return p == target.pred and match_pattern(l, target.left, binds) \
                and match_pattern(r, target.right, binds)
        case Imp(l, r) | And(l, r) | Or(l, r):
            return match_pattern(l, target.left, binds) and match_pattern(r, target.right, binds)
        case Forall(v, b) | Exists(v, b) | Iota(v, b):
            return v == (target.var if not isinstance(target, Iota) else target.bound) \
                and match_pattern(b, target.body if not isinstance(target, Iota) else target.body, binds)
        case S.KleeneAtom(a) | S.Nu(a) | S.NuF(a) | S.PiF(a):
            return match_pattern(a, target.sub if isinstance(target, S.KleeneAtom) else target.arg, binds)
    return pat == target


def _p(text: str) -> Formula:
    return S.parse_formula(text)


# ---------------------------------------------------------------------------
# Non-logical axiom tables

# Bracketed elementary axioms.  Keys are the labels used by scripts.
ELEM_AX: dict[str, "Formula | tuple[Formula, ...]"] = {
    "42": _p("or(eq(sg(?r),num(0)),eq(sg(?r),num(1)))"),
    "44": _p("eq(mul(?r,num(0)),num(0))"),
    "120": _p("eq(mul(?r,num(1)),?r)"),
    "143": _p("or(eq(ssg(?r),num(0)),eq(ssg(?r),num(1)))"),
    "262": _p("imp(eq(ssg(msd(?r,?s)),num(1)),eq(?r,?s))"),
    "420": _p("imp(eq(ell1(?r),num(0)),eq(cfor(exp0(?r)),num(0)))"),
    "421": _p("imp(eq(cfor(?r),num(0)),eq(len(?r),num(2)))"),
    "427": _p("imp(eq(len(?r),num(2)),eq(?r,mul(mul(pow(num(2),exp0(?r)),pow(num(3),exp1(?r))),pow(num(5),exp2(?r)))))"),
    "lt1": _p("imp(neg(eq(?r,num(0))),lt(exp1(?r),?r))"),
    "lt2": _p("imp(neg(eq(?r,num(0))),lt(exp2(?r),?r))"),
    "ax-cfor": _p("imp(eq(ax(?r),num(0)),eq(cfor(?r),num(0)))"),
    "Ga0": (_p("eq(exp0(pow(num(2),?a)),?a)"),
            _p("eq(exp0(mul(mul(pow(num(2),?a),pow(num(3),?b)),pow(num(5),?c))),?a)")),
    "Ga1": (_p("eq(exp1(mul(mul(pow(num(2),?a),pow(num(3),?b)),pow(num(5),?c))),?b)"),),
    "Ga2": (_p("eq(exp2(mul(mul(pow(num(2),?a),pow(num(3),?b)),pow(num(5),?c))),?c)"),),
}

# Antecedents of the three defining axioms of ell1 (r is the proof code).
_ANT1 = "and(eq(?r,pow(num(2),exp0(?r))),eq(ax(exp0(?r)),num(0)))"
_ANT2 = ("and(and(and(eq(?r,mp(exp1(?r),exp2(?r))),imp(eq(?r,num(0)),bot)),"
         "eq(ell1(exp1(?r)),num(0))),eq(ell1(exp2(?r)),num(0)))")

# Closed-form consequences of the function definitions.
DEF_AX: dict[str, Formula] = {
    "exp00": _p("eq(exp0(exp0(?r)),exp00(?r))"),
    "exp01": _p("eq(exp1(exp0(?r)),exp01(?r))"),
    "exp02": _p("eq(exp2(exp0(?r)),exp02(?r))"),
    "Mp": _p("eq(Mp(?r,?s),mul(mul(pow(num(2),exp02(?s)),pow(num(3),?r)),pow(num(5),?s)))"),
    "mp": _p("eq(mp(?r,?s),mul(mul(Mp(?r,?s),e(?r,?s)),sg(?r)))"),
    "e": _p("eq(e(?r,?s),mul(ssg(msd(exp00(?s),num(3))),ssg(msd(exp01(?s),exp0(?r)))))"),
    "fl1": _p("imp(eq(cfor(?r),num(0)),eq(fl(?r),?r))"),
    "nuF": _p("eq(nuF(fl(?r)),fl(?r))"),
    "ell1-1": _p(f"imp({_ANT1},eq(ell1(?r),num(0)))"),
    "ell1-2": _p(f"imp({_ANT2},eq(ell1(?r),num(0)))"),
    "ell1-3": _p(f"imp(imp(or({_ANT1},{_ANT2}),bot),eq(ell1(?r),num(1)))"),
    "ell-def1": _p("imp(eq(ell(?r,?s),num(0)),and(eq(ell1(?r),num(0)),eq(exp0(?r),?s)))"),
    "ell-def2": _p("imp(and(eq(ell1(?r),num(0)),eq(exp0(?r),?s)),eq(ell(?r,?s),num(0)))"),
}


def register_elem(key: str, pattern: Formula) -> None:
    ELEM_AX[key] = pattern


def register_def(key: str, pattern: Formula) -> None:
    DEF_AX[key] = pattern


def _strip_closure(f: Formula):
    yield f
    while isinstance(f, Forall):
        f = f.body
        yield f


def _table_match(table: dict[str, Formula], key: str, f: Formula) -> dict | None:
    pats = table.get(key)
    if pats is None:
        return None
    for pat in pats if isinstance(pats, tuple) else (pats,):
        for g in _strip_closure(f):
            binds: dict = {}
            if match_pattern(pat, g, binds):
                return binds
    return None


# ---------------------------------------------------------------------------
# Logical schemata.  Each recognizer returns a SchemaMatch or None.

Recognizer = Callable[[Formula], "SchemaMatch | None"]


def _m(name, obligations=(), **b) -> SchemaMatch:
    return SchemaMatch(name, tuple(sorted((k, v) for k, v in b.items())), tuple(obligations))


def _imp0(f):
    match f:
        case Imp(a, a2) if a == a2:
            return _m("Imp0", A=a)


def _imp1(f):
    match f:
        case Imp(a, Imp(b, a2)) if a == a2:
            return _m("Imp1", A=a, B=b)


def _imp2(f):
    match f:
        case Imp(Imp(a, Imp(b, c)), Imp(Imp(a2, b2), Imp(a3, c2))) \
                if a == a2 == a3 and b == b2 and c == c2:
            return _m("Imp2", A=a, B=b, C=c)


def _imp3(f):
    match f:
        case Imp(l, b) if l == FALSUM:
            return _m("Imp3", B=b)


def _con1(f):
    match f:
        case Imp(And(a, b), a2) if a == a2:
            return _m("Con1", A=a, B=b)


def _con2(f):
    match f:
        case Imp(And(a, b), b2) if b == b2:
            return _m("Con2", A=a, B=b)


def _con3(f):
    match f:
        case Imp(a, Imp(b, And(a2, b2))) if a == a2 and b == b2:
            return _m("Con3", A=a, B=b)


def _dis1(f):
    match f:
        case Imp(a, Or(a2, b)) if a == a2:
            return _m("Dis1", A=a, B=b)


def _dis2(f):
    match f:
        case Imp(b, Or(a, b2)) if b == b2:
            return _m("Dis2", A=a, B=b)


def _dis3(f):
    match f:
        case Imp(And(Imp(a, c), Imp(b, c2)), Imp(Or(a2, b2), c3)) \
                if a == a2 and b == b2 and c == c2 == c3:
            return _m("Dis3", A=a, B=b, C=c)


def _fi1(f):
    match f:
        case Imp(Forall(v, a), a2) if a == a2 and v not in free_vars(a):
            return _m("Fi1", A=a, mu=v)


def _fi2(f):
    match f:
        case Imp(a, Forall(v, a2)) if a == a2 and v not in free_vars(a):
            return _m("Fi2", A=a, mu=v)


def _fi3(f):
    match f:
        case Imp(a, Exists(v, a2)) if a == a2 and v not in free_vars(a):
            return _m("Fi3", A=a, mu=v)


def _fi4(f):
    match f:
        case Imp(Exists(v, a), a2) if a == a2 and v not in free_vars(a):
            return _m("Fi4", A=a, mu=v)


def _disq(f):
    match f:
        case Imp(Forall(v, Imp(b, c)), Imp(Forall(v2, b2), Forall(v3, c2))) \
                if v == v2 == v3 and b == b2 and c == c2:
            return _m("DisQ", B=b, C=c, mu=v)


def _wba_a(f):
    match f:
        case Imp(Forall(v, c), c2) if c == c2 and v in free_vars(c):
            return _m("WBA-A", C=c, mu=v)


def _wba_e(f):
    match f:
        case Imp(c, Exists(v, c2)) if c == c2 and v in free_vars(c):
            return _m("WBA-E", C=c, mu=v)


def _br(f):
    match f:
        case Imp(Forall(v, Imp(c, a)), Imp(Exists(v2, c2), a2)) \
                if v == v2 and c == c2 and a == a2 and v in free_vars(c) and v not in free_vars(a):
            return _m("BR", A=a, C=c, mu=v)


def _ref(f):
    match f:
        case Atom("eq", r, r2) if r == r2:
            return _m("Ref", r=r)


def _sym(f):
    match f:
        case Imp(Atom("eq", r, s), Atom("eq", s2, r2)) if r == r2 and s == s2:
            return _m("Sym=", r=r, s=s)


def _lea1(f):
    match f:
        case Imp(Atom("eq", r, s), Imp(Atom(p, r2, t), Atom(p2, s2, t2))) \
                if p == p2 and r == r2 and s == s2 and t == t2:
            return _m("LEA1=", r=r, s=s, t=t, P=p)


def _lea2(f):
    match f:
        case Imp(Atom("eq", r, s), Imp(Atom(p, t, r2), Atom(p2, t2, s2))) \
                if p == p2 and r == r2 and s == s2 and t == t2:
            return _m("LEA2=", r=r, s=s, t=t, P=p)


def replaces_at_same_places(k1, k2, r, s) -> bool:
    """k2 arises from k1 by replacing some occurrences of r with s."""
    if k1 == k2:
        return True
    if k1 == r and k2 == s:
        return True
    match k1, k2:
        case S.App(f1, a1), S.App(f2, a2) if f1 == f2:
            return all(replaces_at_same_places(x, y, r, s) for x, y in zip(a1, a2))
        case (S.Nu(a), S.Nu(b)) | (S.NuF(a), S.NuF(b)) | (S.PiF(a), S.PiF(b)):
            return replaces_at_same_places(a, b, r, s)
    return False


def _lea_rp(f):
    match f:
        case Imp(Atom("eq", r, s), Atom("eq", k1, k2)) if k1 != k2 \
                and replaces_at_same_places(k1, k2, r, s):
            return _m("LEA-rp", r=r, s=s, K1=k1, K2=k2)


def _es(f):
    match f:
        case Exists(v, Atom("eq", Var(v2), t)) if v == v2 and v not in free_vars(t):
            return _m("E-S", [Obligation("RangeNonEmpty", v, t)], mu=v, t=t)


def infer_instance(c, v: S.Variable, d):
    """Find t with c[v:=t] == d.  Returns (t, ok) where t is None when v has
    no free occurrence in c."""
    found: list = []

    def walk(a, b, bound: frozenset) -> bool:
        if isinstance(a, Var) and a.var == v and v not in bound:
            if found and found[0] != b:
                return False
            if not found:
                found.append(b)
            return True
        if type(a) is not type(b):
            return False
        match a:
            case Var() | Numeroid() | Meta():
                return a == b
            case S.App(fn, args):
                return fn == b.fn and all(walk(x, y, bound) for x, y in zip(args, b.args))
            case S.Nu(x) | S.NuF(x) | S.PiF(x):
                return walk(x, b.arg, bound)
            case S.KleeneAtom(x):
                return walk(x, b.sub, bound)
            case Atom(p, l, r):
                return p == b.pred and walk(l, b.left, bound) and walk(r, b.right, bound)
            case Imp(l, r) | And(l, r) | Or(l, r):
                return walk(l, b.left, bound) and walk(r, b.right, bound)
            case Forall(w, body) | Exists(w, body):
                return w == b.var and walk(body, b.body, bound | {w})
            case Iota(w, body):
                return w == b.bound and walk(body, b.body, bound | {w})
        return False

    ok = walk(c, d, frozenset())
    return (found[0] if found else None), ok


def _sba_obligations(v, t, c, origin="") -> list[Obligation]:
    _, obs = S.substitute(c, v, t)
    return [Obligation("RangeNonEmpty", v, t, origin)] + [
        Obligation(o.kind, o.variable, o.termoid, origin, o.satisfied) for o in obs]


def _sba1(f, t_hint=None):
    match f:
        case Imp(Forall(v, c), d) if v in free_vars(c):
            if t_hint is not None:
                t, ok = t_hint, S.subst_plain(c, v, t_hint) == d
            else:
                t, ok = infer_instance(c, v, d)
            if ok and t is not None and v not in free_vars(t):
                obs = _sba_obligations(v, t, c)
                if all(o.satisfied for o in obs):
                    return _m("SBA1", obs, C=c, mu=v, t=t)


def _sba2(f, t_hint=None):
    match f:
        case Imp(d, Exists(v, c)) if v in free_vars(c):
            if t_hint is not None:
                t, ok = t_hint, S.subst_plain(c, v, t_hint) == d
            else:
                t, ok = infer_instance(c, v, d)
            if ok and t is not None and v not in free_vars(t):
                obs = _sba_obligations(v, t, c)
                if all(o.satisfied for o in obs):
                    return _m("SBA2", obs, C=c, mu=v, t=t)


def _tnd(f):
    match f:
        case Or(a, Imp(a2, r)) if a == a2 and r == FALSUM:
            return _m("TND", A=a)


def _dne(f):
    match f:
        case Imp(Imp(Imp(a, f1), f2), a2) if a == a2 and f1 == f2 == FALSUM:
            return _m("DNE", A=a)


def _cvi(f):
    match f:
        case Imp(Forall(m, Imp(Forall(k, Imp(Atom("lt", Var(k2), Var(m2)), dk)), dm)), Forall(m3, dm2)) \
                if m == m2 == m3 and k == k2 and k != m and dm == dm2:
            inst, obs = S.substitute(dm, m, Var(k))
            if inst == dk and all(o.satisfied for o in obs):
                return _m("CVI", D=dm, mu=m, kappa=k)


def _ind(f):
    match f:
        case Imp(And(a0, Forall(m, Imp(am, asuc))), Forall(m2, am2)) if m == m2 and am == am2:
            if S.subst_plain(am, m, S.ZERO) == a0 and \
                    S.subst_plain(am, m, S.app("suc", Var(m))) == asuc:
                return _m("IndPeano", A=am, mu=m)


def _numeroid(f):
    match f:
        case Atom("eq", S.App("suc", (Numeroid(n),)), Numeroid(n2)) if n2 == n + 1:
            return _m("NumeroidAx", n=Numeroid(n))
        case Atom("eq", Numeroid(n2), S.App("suc", (Numeroid(n),))) if n2 == n + 1:
            return _m("NumeroidAx", n=Numeroid(n))


def _rosser11(f):
    match f:
        case Imp(Exists(m, And(a, Forall(k, Imp(ak, Atom("eq", Var(k2), Var(m2)))))), a_iota) \
                if k == k2 and m == m2 and k != m:
            if S.subst_plain(a, m, Var(k)) == ak and \
                    S.subst_plain(a, m, Iota(m, a)) == a_iota:
                return _m("Rosser11", A=a, mu=m)


M_OMEGA = S.subst_plain(S.OMEGA.body, S.OMEGA.bound, S.OMEGA)


def _m_omega(f):
    if f == M_OMEGA:
        return _m("M-omega")


def _elem(f):
    for key in ELEM_AX:
        b = _table_match(ELEM_AX, key, f)
        if b is not None:
            return SchemaMatch(f"ElemAx({key})", tuple(sorted(b.items())))


def _def(f):
    for key in DEF_AX:
        b = _table_match(DEF_AX, key, f)
        if b is not None:
            return SchemaMatch(f"DefAx({key})", tuple(sorted(b.items())))


LOGICAL: list[tuple[str, Recognizer]] = [
    ("Imp0", _imp0), ("Imp1", _imp1), ("Imp2", _imp2), ("Imp3", _imp3),
    ("Con1", _con1), ("Con2", _con2), ("Con3", _con3),
    ("Dis1", _dis1), ("Dis2", _dis2), ("Dis3", _dis3),
    ("Fi1", _fi1), ("Fi2", _fi2), ("Fi3", _fi3), ("Fi4", _fi4), ("DisQ", _disq),
    ("WBA-A", _wba_a), ("WBA-E", _wba_e), ("BR", _br),
    ("Ref", _ref), ("Sym=", _sym), ("LEA1=", _lea1), ("LEA2=", _lea2), ("LEA-rp", _lea_rp),
    ("E-S", _es), ("SBA1", _sba1), ("SBA2", _sba2),
]

NONLOGICAL: list[tuple[str, Recognizer]] = [
    ("TND", _tnd), ("DNE", _dne), ("CVI", _cvi), ("IndPeano", _ind),
    ("NumeroidAx", _numeroid), ("ElemAx", _elem), ("DefAx", _def),
    ("Rosser11", _rosser11), ("M-omega", _m_omega),
]

SCHEMATA = LOGICAL + NONLOGICAL
SCHEMA_NAMES = [n for n, _ in SCHEMATA]
_BY_NAME = dict(SCHEMATA)

# Schemata that are not part of the logic proper; their uses are ledgered.
LEDGERED = {"TND", "DNE", "CVI", "IndPeano", "NumeroidAx", "ElemAx", "DefAx", "Rosser11", "M-omega"}


def _with_closure(rec: Recognizer, f: Formula):
    for g in _strip_closure(f):
        m = rec(g)
        if m is not None:
            return m
    return None


def match_axiom(f: Formula, mode: str = "open", table=None) -> SchemaMatch | None:
    """First schema (in SCHEMA_NAMES order) of which f, or its matrix, is an instance."""
    if mode == "closed" and free_vars(f):
        return None
    for _, rec in SCHEMATA:
        m = _with_closure(rec, f)
        if m is not None:
            return m
    return None


def match_schema(name: str, f: Formula, key: str | None = None, termoid=None) -> SchemaMatch | None:
    """Check f against one named schema (ElemAx/DefAx take a table key;
    SBA1/SBA2 accept an explicit substituted termoid)."""
    if name == "ElemAx" or name == "DefAx":
        table = ELEM_AX if name == "ElemAx" else DEF_AX
        if key is None:
            return _with_closure(_BY_NAME[name], f)
        b = _table_match(table, key, f)
        return None if b is None else SchemaMatch(f"{name}({key})", tuple(sorted(b.items())))
    if name in ("SBA1", "SBA2") and termoid is not None:
        rec = _sba1 if name == "SBA1" else _sba2
        return _with_closure(lambda g: rec(g, termoid), f)
    rec = _BY_NAME.get(name)
    if rec is None:
        raise KeyError(f"unknown schema {name!r}")
    return _with_closure(rec, f)


def schema_bindings_roundtrip(m: SchemaMatch, f: Formula) -> bool:
    """Re-instantiate a logical schema match and compare with f."""
    b = dict(m.bindings)
    inst = instantiate(m.schema, b)
    return inst is None or inst == f or any(g == inst for g in _strip_closure(f))


def instantiate(name: str, b: dict):
    A, B, C = b.get("A"), b.get("B"), b.get("C")
    mu = b.get("mu")
    match name:
        case "Imp0":
            return Imp(A, A)
        case "Imp1":
            return Imp(A, Imp(B, A))
        case "Imp2":
            return Imp(Imp(A, Imp(B, C)), Imp(Imp(A, B), Imp(A, C)))
        case "Imp3":
            return Imp(FALSUM, B)
        case "Con1":
            return Imp(And(A, B), A)
        case "Con2":
            return Imp(And(A, B), B)
        case "Con3":
            return Imp(A, Imp(B, And(A, B)))
        case "Dis1":
            return Imp(A, Or(A, B))
        case "Dis2":
            return Imp(B, Or(A, B))
        case "Dis3":
            return Imp(And(Imp(A, C), Imp(B, C)), Imp(Or(A, B), C))
        case "Fi1":
            return Imp(Forall(mu, A), A)
        case "Fi2":
            return Imp(A, Forall(mu, A))
        case "Fi3":
            return Imp(A, Exists(mu, A))
        case "Fi4":
            return Imp(Exists(mu, A), A)
        case "DisQ":
            return Imp(Forall(mu, Imp(B, C)), Imp(Forall(mu, B), Forall(mu, C)))
        case "WBA-A":
            return Imp(Forall(mu, C), C)
        case "WBA-E":
            return Imp(C, Exists(mu, C))
        case "BR":
            return Imp(Forall(mu, Imp(C, A)), Imp(Exists(mu, C), A))
        case "Ref":
            return Atom("eq", b["r"], b["r"])
        case "Sym=":
            return Imp(Atom("eq", b["r"], b["s"]), Atom("eq", b["s"], b["r"]))
        case "LEA1=":
            return Imp(Atom("eq", b["r"], b["s"]), Imp(Atom(b["P"], b["r"], b["t"]), Atom(b["P"], b["s"], b["t"])))
        case "LEA2=":
            return Imp(Atom("eq", b["r"], b["s"]), Imp(Atom(b["P"], b["t"], b["r"]), Atom(b["P"], b["t"], b["s"])))
        case "E-S":
            return Exists(mu, Atom("eq", Var(mu), b["t"]))
        case "SBA1":
            return Imp(Forall(mu, C), S.subst_plain(C, mu, b["t"]))
        case "SBA2":
            return Imp(S.subst_plain(C, mu, b["t"]), Exists(mu, C))
        case "TND":
            return Or(A, negate(A))
        case "DNE":
            return Imp(negate(negate(A)), A)
    return None


# ---------------------------------------------------------------------------
# Rules


def apply_mp(minor: Formula, major: Formula, mode: str = "open") -> Formula:
    if not isinstance(major, Imp):
        raise NotImplication(S.print_formula(major)[:80])
    if major.left != minor:
        raise AntecedentMismatch("antecedent of the major premise differs from the minor premise")
    if mode == "closed" and (free_vars(minor) or free_vars(major)):
        raise ClosedModeViolation("MP on open formulas in closed logic")
    return major.right


def apply_gen(premise: Formula, v: S.Variable, mode: str = "open",
              active_hypotheses: dict[str, Formula] | None = None) -> Formula:
    if mode == "closed":
        raise ClosedModeViolation("Gen is not available in closed logic")
    if v not in free_vars(premise):
        raise VariableNotFree(f"{v} is not free in the premise")
    for name, h in (active_hypotheses or {}).items():
        if v in free_vars(h):
            raise HypothesisCapture(f"{v} is free in hypothesis {name}")
    return Forall(v, premise)


# ---------------------------------------------------------------------------
# Derived rules


@dataclass(frozen=True)
class Step:
    label: str
    formula: Formula
    just: tuple          # ("Imp1",) | ("MP", minor, major) | ("DefRewrite", ref)


@dataclass
class _Builder:
    steps: list[Step] = field(default_factory=list)
    n: int = 0

    def add(self, f: Formula, *just) -> str:
        self.n += 1
        lab = str(self.n)
        self.steps.append(Step(lab, f, tuple(just)))
        return lab

    def rewrite(self, f: Formula, ref: str) -> str:
        base = self.steps[-1].label
        lab = base + "a" if base[-1].isdigit() else base[:-1] + chr(ord(base[-1]) + 1)
        self.steps.append(Step(lab, f, ("DefRewrite", ref)))
        return lab


def _imp0_steps(b: _Builder, A):
    l1 = b.add(Imp(A, Imp(A, A)), "Imp1")
    l2 = b.add(Imp(A, Imp(Imp(A, A), A)), "Imp1")
    l3 = b.add(Imp(Imp(A, Imp(Imp(A, A), A)), Imp(Imp(A, Imp(A, A)), Imp(A, A))), "Imp2")
    l4 = b.add(Imp(Imp(A, Imp(A, A)), Imp(A, A)), "MP", l2, l3)
    return b.add(Imp(A, A), "MP", l1, l4)


def _chin_steps(b: _Builder, ra, rb, A, B, C):
    l1 = b.add(Imp(Imp(B, C), Imp(A, Imp(B, C))), "Imp1")
    l2 = b.add(Imp(A, Imp(B, C)), "MP", rb, l1)
    l3 = b.add(Imp(Imp(A, Imp(B, C)), Imp(Imp(A, B), Imp(A, C))), "Imp2")
    l4 = b.add(Imp(Imp(A, B), Imp(A, C)), "MP", l2, l3)
    return b.add(Imp(A, C), "MP", ra, l4)


def _chin2_steps(b: _Builder, ra, rb, A, B, C):
    l1 = b.add(Imp(B, Imp(A, B)), "Imp1")
    l2 = b.add(Imp(A, B), "MP", rb, l1)
    l3 = b.add(Imp(Imp(A, Imp(B, C)), Imp(Imp(A, B), Imp(A, C))), "Imp2")
    l4 = b.add(Imp(Imp(A, B), Imp(A, C)), "MP", ra, l3)
    return b.add(Imp(A, C), "MP", l2, l4)


def _chinfla2_steps(b: _Builder, A, B, C):
    l1 = b.add(Imp(Imp(B, C), Imp(A, Imp(B, C))), "Imp1")
    l2 = b.add(Imp(Imp(A, Imp(B, C)), Imp(Imp(A, B), Imp(A, C))), "Imp2")
    return _chin_steps(b, l1, l2, Imp(B, C), Imp(A, Imp(B, C)), Imp(Imp(A, B), Imp(A, C)))


def _intant_steps(b: _Builder, ra, A, B, C):
    l1 = b.add(Imp(Imp(A, Imp(B, C)), Imp(Imp(A, B), Imp(A, C))), "Imp2")
    l2 = b.add(Imp(Imp(A, B), Imp(A, C)), "MP", ra, l1)
    l3 = b.add(Imp(B, Imp(A, B)), "Imp1")
    return _chin_steps(b, l3, l2, B, Imp(A, B), Imp(A, C))


def _intant2_steps(b: _Builder, A, B, C):
    X = Imp(A, Imp(B, C))
    P = Imp(Imp(A, B), Imp(A, C))
    R = Imp(B, Imp(A, C))
    one = Imp(B, Imp(A, B))
    l1 = b.add(one, "Imp1")
    l2 = b.add(Imp(X, P), "Imp2")
    l3 = b.add(Imp(P, Imp(B, P)), "Imp1")
    l4 = b.add(Imp(Imp(P, Imp(B, P)), Imp(X, Imp(P, Imp(B, P)))), "Imp1")
    l5 = b.add(Imp(X, Imp(P, Imp(B, P))), "MP", l3, l4)
    l6 = b.add(Imp(Imp(X, Imp(P, Imp(B, P))), Imp(Imp(X, P), Imp(X, Imp(B, P)))), "Imp2")
    l7 = b.add(Imp(Imp(X, P), Imp(X, Imp(B, P))), "MP", l5, l6)
    l8 = b.add(Imp(X, Imp(B, P)), "MP", l2, l7)
    Q = Imp(one, R)
    l9 = b.add(Imp(Imp(B, P), Q), "Imp2")
    l10 = b.add(Imp(Imp(Imp(B, P), Q), Imp(X, Imp(Imp(B, P), Q))), "Imp1")
    l11 = b.add(Imp(X, Imp(Imp(B, P), Q)), "MP", l9, l10)
    l12 = b.add(Imp(Imp(X, Imp(Imp(B, P), Q)), Imp(Imp(X, Imp(B, P)), Imp(X, Q))), "Imp2")
    l13 = b.add(Imp(Imp(X, Imp(B, P)), Imp(X, Q)), "MP", l11, l12)
    l14 = b.add(Imp(X, Q), "MP", l8, l13)
    l15 = b.add(Imp(one, Imp(X, one)), "Imp1")
    l16 = b.add(Imp(X, one), "MP", l1, l15)
    l17 = b.add(Imp(Imp(X, Imp(one, R)), Imp(Imp(X, one), Imp(X, R))), "Imp2")
    l18 = b.add(Imp(Imp(X, one), Imp(X, R)), "MP", l14, l17)
    return b.add(Imp(X, R), "MP", l16, l18)


def _contrap1_steps(b: _Builder, ra, A, B):
    nb, na = negate(B), negate(A)
    l7 = _chinfla2_steps(b, A, B, FALSUM)
    l12 = _chin2_steps(b, l7, ra, nb, Imp(A, B), na)
    l12a = b.rewrite(Imp(nb, na), l12)
    return b.rewrite(Imp(nb, na), l12a)


def _contrap2_steps(b: _Builder, A, B):
    nb, na = negate(B), negate(A)
    l7 = _chinfla2_steps(b, A, B, FALSUM)
    l15 = _intant_steps(b, l7, nb, Imp(A, B), na)
    l15a = b.rewrite(Imp(Imp(A, B), Imp(nb, na)), l15)
    return b.rewrite(Imp(Imp(A, B), Imp(nb, na)), l15a)


def _mtp_head(b: _Builder, A, B):
    na = negate(A)
    l1 = b.add(Imp(FALSUM, B), "Imp3")
    l2 = b.add(Imp(Imp(FALSUM, B), Imp(A, Imp(FALSUM, B))), "Imp1")
    l3 = b.add(Imp(A, Imp(FALSUM, B)), "MP", l1, l2)
    l4 = b.add(Imp(Imp(A, Imp(FALSUM, B)), Imp(Imp(A, FALSUM), Imp(A, B))), "Imp2")
    l5 = b.add(Imp(Imp(A, FALSUM), Imp(A, B)), "MP", l3, l4)
    return b.rewrite(Imp(na, Imp(A, B)), l5)


def _mtp2_steps(b: _Builder, ra, A, B):
    na = negate(A)
    D = Imp(na, B)
    l5a = _mtp_head(b, A, B)
    l13 = _intant_steps(b, l5a, na, A, B)
    l14 = b.add(Imp(B, D), "Imp1")
    l15 = b.add(Imp(Imp(A, D), Imp(Imp(B, D), And(Imp(A, D), Imp(B, D)))), "Con3")
    l16 = b.add(Imp(Imp(B, D), And(Imp(A, D), Imp(B, D))), "MP", l13, l15)
    l17 = b.add(And(Imp(A, D), Imp(B, D)), "MP", l14, l16)
    l18 = b.add(Imp(And(Imp(A, D), Imp(B, D)), Imp(Or(A, B), D)), "Dis3")
    l19 = b.add(Imp(Or(A, B), D), "MP", l17, l18)
    return b.add(D, "MP", ra, l19)


def _mtp1_steps(b: _Builder, ra, rb, A, B):
    l5a = _mtp_head(b, A, B)
    l6 = b.add(Imp(A, B), "MP", rb, l5a)
    l11 = _imp0_steps(b, B)
    AB, BB = Imp(A, B), Imp(B, B)
    l12 = b.add(Imp(AB, Imp(BB, And(AB, BB))), "Con3")
    l13 = b.add(Imp(BB, And(AB, BB)), "MP", l6, l12)
    l14 = b.add(And(AB, BB), "MP", l11, l13)
    l15 = b.add(Imp(And(AB, BB), Imp(Or(A, B), B)), "Dis3")
    l16 = b.add(Imp(Or(A, B), B), "MP", l14, l15)
    return b.add(B, "MP", ra, l16)


RULES = ("Imp0", "ch.in.", "ch.in.2", "ch.in.-fla2", "Int-Ant", "int-ant",
         "Contrap", "contrap", "Mtp1", "Mtp2")

RULE_ALIASES = {
    "chin": "ch.in.", "ch.in": "ch.in.", "ch.in.2": "ch.in.2", "chin2": "ch.in.2",
    "ch.in.₂": "ch.in.2", "ch.in.-fla2": "ch.in.-fla2", "chinfla2": "ch.in.-fla2",
    "ch.in.-fla₂": "ch.in.-fla2", "Int-Ant": "Int-Ant", "intant": "Int-Ant",
    "int-ant": "int-ant", "intant2": "int-ant", "Contrap": "Contrap", "contrap1": "Contrap",
    "contrap": "contrap", "contrap2": "contrap", "Mtp1": "Mtp1", "Mtp₁": "Mtp1",
    "Mtp2": "Mtp2", "Mtp₂": "Mtp2", "Imp0": "Imp0",
}

# number of numbered lines (definitional rewrites are extra)
RULE_WIDTH = {"Imp0": 5, "ch.in.": 5, "ch.in.2": 5, "ch.in.-fla2": 7, "Int-Ant": 8,
              "int-ant": 19, "Contrap": 12, "contrap": 15, "Mtp2": 20, "Mtp1": 17}
RULE_PREMISES = {"Imp0": 0, "ch.in.": 2, "ch.in.2": 2, "ch.in.-fla2": 0, "Int-Ant": 1,
                 "int-ant": 0, "Contrap": 1, "contrap": 0, "Mtp2": 1, "Mtp1": 2}


def canonical_rule(name: str) -> str:
    if name in RULES:
        return name
    try:
        return RULE_ALIASES[name]
    except KeyError:
        raise ShapeMismatch(f"unknown derived rule {name!r}") from None


def _imp_parts(f, what):
    if not isinstance(f, Imp):
        raise ShapeMismatch(f"{what} must be an implication")
    return f.left, f.right


def expand_derived(rule: str, premises: list[Formula], conclusion: Formula | None = None) -> list[Step]:
    """The primitive-line sequence of a derived rule.  Premises are referred
    to as "a" and "b"; rules without premises read their instantiation off the
    conclusion."""
    rule = canonical_rule(rule)
    if len(premises) != RULE_PREMISES[rule]:
        raise ShapeMismatch(f"{rule} takes {RULE_PREMISES[rule]} premise(s), got {len(premises)}")
    b = _Builder()
    match rule:
        case "Imp0":
            if conclusion is None:
                raise ShapeMismatch("Imp0 needs its conclusion")
            A, A2 = _imp_parts(conclusion, "Imp0 conclusion")
            if A != A2:
                raise ShapeMismatch("Imp0 conclusion must be A ⊃ A")
            _imp0_steps(b, A)
        case "ch.in.":
            A, B = _imp_parts(premises[0], "premise a")
            B2, C = _imp_parts(premises[1], "premise b")
            if B != B2:
                raise ShapeMismatch("consequent of a differs from antecedent of b")
            _chin_steps(b, "a", "b", A, B, C)
        case "ch.in.2":
            A, BC = _imp_parts(premises[0], "premise a")
            B, C = _imp_parts(BC, "consequent of premise a")
            if premises[1] != B:
                raise ShapeMismatch("premise b must be the middle antecedent of a")
            _chin2_steps(b, "a", "b", A, B, C)
        case "ch.in.-fla2":
            if conclusion is None:
                raise ShapeMismatch("ch.in.-fla2 needs its conclusion")
            BC, rest = _imp_parts(conclusion, "conclusion")
            B, C = _imp_parts(BC, "conclusion antecedent")
            AB, AC = _imp_parts(rest, "conclusion consequent")
            A, _ = _imp_parts(AB, "conclusion")
            _chinfla2_steps(b, A, B, C)
        case "Int-Ant":
            A, BC = _imp_parts(premises[0], "premise a")
            B, C = _imp_parts(BC, "consequent of premise a")
            _intant_steps(b, "a", A, B, C)
        case "int-ant":
            if conclusion is None:
                raise ShapeMismatch("int-ant needs its conclusion")
            X, _ = _imp_parts(conclusion, "conclusion")
            A, BC = _imp_parts(X, "conclusion antecedent")
            B, C = _imp_parts(BC, "conclusion antecedent")
            _intant2_steps(b, A, B, C)
        case "Contrap":
            A, B = _imp_parts(premises[0], "premise a")
            _contrap1_steps(b, "a", A, B)
        case "contrap":
            if conclusion is None:
                raise ShapeMismatch("contrap needs its conclusion")
            AB, _ = _imp_parts(conclusion, "conclusion")
            A, B = _imp_parts(AB, "conclusion antecedent")
            _contrap2_steps(b, A, B)
        case "Mtp2":
            if not isinstance(premises[0], Or):
                raise ShapeMismatch("Mtp2 premise must be a disjunction")
            _mtp2_steps(b, "a", premises[0].left, premises[0].right)
        case "Mtp1":
            if not isinstance(premises[0], Or):
                raise ShapeMismatch("Mtp1 premise a must be a disjunction")
            A, B = premises[0].left, premises[0].right
            if premises[1] != negate(A):
                raise ShapeMismatch("Mtp1 premise b must negate the first disjunct")
            _mtp1_steps(b, "a", "b", A, B)
    if conclusion is not None and b.steps[-1].formula != conclusion:
        raise ShapeMismatch(f"{rule} expansion ends in a different formula")
    return b.steps


def numbered_width(steps: list[Step]) -> int:
    return sum(1 for s in steps if s.just[0] != "DefRewrite")


def verify_steps(steps: list[Step], premises: dict[str, Formula]) -> list[tuple[str, str | None]]:
    """Check an expansion line by line.  Returns (label, failure-or-None)."""
    env = dict(premises)
    out = []
    for s in steps:
        err = None
        match s.just:
            case ("MP", i, j):
                try:
                    if apply_mp(env[i], env[j]) != s.formula:
                        err = "MP conclusion differs"
                except RuleError as exc:
                    err = type(exc).__name__
            case ("DefRewrite", i):
                if env[i] != s.formula:
                    err = "rewrite changes the formula"
            case (name,):
                if match_schema(name, s.formula) is None:
                    err = f"not an instance of {name}"
        env[s.label] = s.formula
        out.append((s.label, err))
    return out
