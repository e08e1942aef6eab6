"""Kleene atoms F_r: the three nu-schemata, notation normalisation and
translation into the ground language."""

from __future__ import annotations

from . import arithmetization as A
from . import enumeration as E
from . import syntax as S
from .calculus import SchemaMatch, replaces_at_same_places
from .syntax import FALSUM, App, Atom, Imp, KleeneAtom, Numeroid


class NonConstantSubscript(Exception):
    pass


class ValueTooLarge(Exception):
    pass


class LanguageRestriction(Exception):
    """A Kleene subscript that is not a termoid of the ground language."""


def _in_ground_language(t) -> bool:
    return not any(isinstance(s, (S.Nu, S.NuF, S.PiF, S.Meta)) for s in S.subterms(t))


def _exp(path, t):
    for g in path:
        t = App(f"exp{g}", (t,))
    return t


def match_nu_schema(f: S.Formula) -> SchemaMatch | None:
    match f:
        case Imp(Atom("eq", r1, r2), Imp(KleeneAtom(a), KleeneAtom(b))) if a == r1 and b == r2:
            if _in_ground_language(r1) and _in_ground_language(r2):
                return SchemaMatch("LEA1nu", (("r1", r1), ("r2", r2)))
        case Imp(Atom("eq", App("fl", (s,)), s2), Atom("eq", S.NuF(App("fl", (s3,))), S.NuF(s4))) \
                if s == s2 == s3 == s4 and isinstance(s, App) and s.fn == "exp0":
            if _in_ground_language(s):
                return SchemaMatch("LEA2nu", (("r", s.args[0]),))
        case Imp(Atom("eq", App("exp0", (r,)), Numeroid(3)),
                 Imp(KleeneAtom(r2), Imp(KleeneAtom(r3), KleeneAtom(r4)))):
            if r == r2 and r3 == _exp((1,), r) and r4 == _exp((2,), r) and _in_ground_language(r):
                return SchemaMatch("LEAMPnu", (("r", r),))
    return None


NU_SCHEMATA = ("LEA1nu", "LEA2nu", "LEAMPnu")


# ---------------------------------------------------------------------------
# Evaluation of subscripts


def subscript_value(t: S.Termoid, val: dict | None = None, table: A.AxiomTable = A.FULL,
                    digit_budget: int = E.SMALL_DIGITS) -> int:
    """Integer value of a constant termoid, or an exception saying why not."""
    try:
        c = A.eval_termoid(t, val or {}, table)
    except A.NonConstant as exc:
        raise NonConstantSubscript(str(exc)) from None
    except E.NonMaterializable as exc:
        raise ValueTooLarge(str(exc)) from None
    m = E.materialize(c, digit_budget)
    if isinstance(m, E.TooLarge):
        raise ValueTooLarge(f"subscript value has at least {m.min_digits} digits")
    return m


def materializes(t: S.Termoid, val: dict | None = None, digit_budget: int = E.SMALL_DIGITS) -> bool:
    try:
        subscript_value(t, val, digit_budget=digit_budget)
    except (NonConstantSubscript, ValueTooLarge):
        return False
    return True


def _translate_atom(r, val, table, budget):
    n = subscript_value(r, val, table, budget)
    return E.decode_formula(A.eval_fl(E.lit(n)))


def translate(f: S.Formula, val: dict | None = None, table: A.AxiomTable = A.FULL,
              digit_budget: int = E.SMALL_DIGITS) -> S.Formula:
    match f:
        case KleeneAtom(r):
            if not _in_ground_language(r):
                raise LanguageRestriction(S.print_termoid(r))
            return _translate_atom(r, val, table, digit_budget)
        case Atom():
            if S.has_kleene(f):
                raise LanguageRestriction("nu-notation inside an atomic formula")
            return f
        case Imp(l, r) | S.And(l, r) | S.Or(l, r):
            return type(f)(translate(l, val, table, digit_budget), translate(r, val, table, digit_budget))
        case S.Forall(v, b) | S.Exists(v, b):
            return type(f)(v, translate(b, val, table, digit_budget))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Notation normalisation: nu(n) is n, nu(pi_F r) is nu_F r, and so on.


def _norm_termoid(t, budget):
    match t:
        case S.Nu(Numeroid()):
            return t.arg
        case S.Nu(S.PiF(r)):
            return _norm_termoid(S.NuF(r), budget)
        case S.NuF(Numeroid(k)):
            return Numeroid(E.materialize(A.eval_fl(E.lit(k)), budget))
        case S.Nu(a) if not S.free_vars(a) and _in_ground_language(a):
            try:
                return Numeroid(subscript_value(a, digit_budget=budget))
            except (ValueTooLarge, NonConstantSubscript):
                return t
    return t


def normalize(e, digit_budget: int = E.SMALL_DIGITS):
    """Rewrite value-notations to a canonical spelling; Kleene atoms with a
    materialisable constant subscript become the formula they denote."""
    out = S.map_termoids(e, lambda t: _norm_termoid(t, digit_budget))
    return _resolve_atoms(out, digit_budget)


def _resolve_atoms(f, budget):
    match f:
        case KleeneAtom(r) if not S.free_vars(r) and _in_ground_language(r):
            try:
                return _translate_atom(r, None, A.FULL, budget)
            except (ValueTooLarge, NonConstantSubscript, E.NotACode):
                return f
        case Imp(l, r) | S.And(l, r) | S.Or(l, r):
            return type(f)(_resolve_atoms(l, budget), _resolve_atoms(r, budget))
        case S.Forall(v, b) | S.Exists(v, b):
            return type(f)(v, _resolve_atoms(b, budget))
    return f


# ---------------------------------------------------------------------------
# Substantiation: Ari+ fragments for numeroidal instances of LEA1nu


def substantiate(f: S.Formula, val: dict | None = None, table: A.AxiomTable = A.FULL,
                 digit_budget: int = E.SMALL_DIGITS) -> list[tuple[S.Formula, tuple]] | None:
    """Lines (formula, justification) ending in the translation of f, or None
    when a subscript does not materialise.  Justifications use the same
    shapes as the derived-rule expander plus ("Eval",) for a numerical fact."""
    m = match_nu_schema(f)
    if m is None or m.schema != "LEA1nu":
        return None
    b = dict(m.bindings)
    try:
        v1 = subscript_value(b["r1"], val, table, digit_budget)
        v2 = subscript_value(b["r2"], val, table, digit_budget)
        g = translate(f, val, table, digit_budget)
    except (ValueTooLarge, NonConstantSubscript):
        return None
    ant, cons = g.left, g.right
    if v1 == v2:
        e1 = cons.left
        # consequent is E > E: Imp0 then weaken by the antecedent
        return [(cons, ("Imp0",)),
                (Imp(cons, Imp(ant, cons)), ("Imp1",)),
                (g, ("MP", 0, 1))] if cons == Imp(e1, e1) else None
    refute = S.negate(ant)
    return [
        (Imp(FALSUM, cons), ("Imp3",)),
        (Imp(Imp(FALSUM, cons), Imp(ant, Imp(FALSUM, cons))), ("Imp1",)),
        (Imp(ant, Imp(FALSUM, cons)), ("MP", 0, 1)),
        (Imp(Imp(ant, Imp(FALSUM, cons)), Imp(Imp(ant, FALSUM), Imp(ant, cons))), ("Imp2",)),
        (Imp(refute, g), ("MP", 2, 3)),
        (refute, ("Eval",)),
        (g, ("MP", 5, 4)),
    ]
