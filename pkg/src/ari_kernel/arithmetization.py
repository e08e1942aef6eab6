"""Evaluators for the primitive recursive symbols over symbolic codes."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import enumeration as E
from . import syntax as S
from .enumeration import Code, Lit, ONE, ZERO


class BudgetExceeded(Exception):
    pass


class NonConstant(Exception):
    pass


@dataclass(frozen=True)
class AxiomTable:
    """Axiom membership for ax.

    mode "full" decodes and asks the schema recognizer (closed logic);
    mode "micro" consults an explicit set of axiom codes."""
    mode: str = "full"
    codes: frozenset = field(default_factory=frozenset)
    name: str = "Ari"

    def is_axiom(self, n: Code) -> bool:
        if self.mode == "micro":
            return n in self.codes
        try:
            f = E.decode_formula(n)
        except E.NotACode:
            return False
        if S.free_vars(f):
            return False
        from .calculus import match_axiom
        return match_axiom(f, mode="closed") is not None


FULL = AxiomTable()


def micro_table(name: str, formulas) -> AxiomTable:
    return AxiomTable("micro", frozenset(E.encode_formula(f) for f in formulas), name)


# ---------------------------------------------------------------------------
# Elementary functions

EXP_PATHS = {
    "exp0": (0,), "exp1": (1,), "exp2": (2,),
    "exp00": (0, 0), "exp01": (0, 1), "exp02": (0, 2),
}


def sg(n: Code) -> Code:
    return ZERO if n == ZERO else ONE


def ssg(n: Code) -> Code:
    return ONE if n == ZERO else ZERO


def exp_path(c: Code, path) -> Code:
    for g in path:
        c = E.code_exp(c, g)
    return c


def eval_elem(fn: str, *args: Code) -> Code:
    match fn, args:
        case "sg", (n,):
            return sg(n)
        case "ssg", (n,):
            return ssg(n)
        case "msd", (a, b):
            return E.msd(a, b)
        case "len", (n,):
            return Lit(E.code_len(n))
        case _ if fn in EXP_PATHS and len(args) == 1:
            return exp_path(args[0], EXP_PATHS[fn])
        case _ if fn.startswith("exp_") and len(args) == 1:
            return exp_path(args[0], tuple(int(g) for g in fn[4:].split(",")))
    raise ValueError(f"not an elementary function call: {fn}/{len(args)}")


def eval_Mp(n: Code, q: Code) -> Code:
    return E.make({0: exp_path(q, (0, 2)), 1: n, 2: q})


def eval_e(n: Code, q: Code) -> Code:
    ok = exp_path(q, (0, 0)) == Lit(3) and exp_path(q, (0, 1)) == E.code_exp(n, 0)
    return ONE if ok else ZERO


def eval_mp(n: Code, q: Code) -> Code:
    if eval_e(n, q) == ONE and sg(n) == ONE:
        return eval_Mp(n, q)
    return ZERO


def eval_ax(n: Code, table: AxiomTable = FULL) -> Code:
    return ZERO if table.is_axiom(n) else ONE


def ant1(n: Code, table: AxiomTable) -> bool:
    head = E.code_exp(n, 0)
    return n == E.make({0: head}) and table.is_axiom(head)


def eval_ell1(n: Code, table: AxiomTable = FULL, _memo: dict | None = None) -> Code:
    memo = {} if _memo is None else _memo
    if n in memo:
        return memo[n]
    if isinstance(n, E.Lit) and n.n % 15:
        # a nonzero mp value carries 3^n1 with n1 > 0, and 5^n2 with n2 > 0
        # since e(n1, 0) = 0; so only the Ant1 case can apply
        v = n.n
        hit = v > 0 and v & (v - 1) == 0 and table.is_axiom(E.Lit(v.bit_length() - 1))
        memo[n] = ZERO if hit else ONE
        return memo[n]
    if ant1(n, table):
        memo[n] = ZERO
        return ZERO
    result = ONE
    if n != ZERO:
        n1, n2 = E.code_exp(n, 1), E.code_exp(n, 2)
        if n == eval_mp(n1, n2) and eval_ell1(n1, table, memo) == ZERO \
                and eval_ell1(n2, table, memo) == ZERO:
            result = ZERO
    memo[n] = result
    return result


def eval_ell(n: Code, q: Code, table: AxiomTable = FULL) -> Code:
    if eval_ell1(n, table) == ZERO and E.code_exp(n, 0) == q:
        return ZERO
    return ONE


def eval_cfor(n: Code) -> Code:
    try:
        f = E.decode_formula(n)
    except E.NotACode:
        return ONE
    return ONE if S.free_vars(f) else ZERO


def eval_fl(n: Code) -> Code:
    return n if eval_cfor(n) == ZERO else E.FALSUM_CODE


def eval_sigma(t: int, budget: int = 100_000) -> int:
    """sigma(0) = 0, sigma(suc x) = suc(sigma x), run step by step."""
    if t < 0:
        raise ValueError("sigma takes a non-negative integer")
    # unwind the recursion explicitly: first descend, then rebuild
    pending = 0
    k = t
    while k != 0:
        if pending >= budget:
            raise BudgetExceeded(f"sigma({t}) needs more than {budget} recursion steps")
        k -= 1
        pending += 1
    value = 0
    for _ in range(pending):
        value += 1
    return value


# ---------------------------------------------------------------------------
# Evaluation of constant termoids


def eval_apply(fn: str, args: list[Code], table: AxiomTable = FULL) -> Code:
    match fn:
        case "suc":
            return E.add(args[0], ONE)
        case "add":
            return E.add(*args)
        case "mul":
            return E.mul(*args)
        case "pow":
            return E.power(*args)
        case "Mp":
            return eval_Mp(*args)
        case "mp":
            return eval_mp(*args)
        case "e":
            return eval_e(*args)
        case "ell1":
            return eval_ell1(args[0], table)
        case "ell":
            return eval_ell(args[0], args[1], table)
        case "ax":
            return eval_ax(args[0], table)
        case "cfor":
            return eval_cfor(args[0])
        case "fl":
            return eval_fl(args[0])
        case "sigma":
            v = E.try_int(args[0])
            if v is None:
                raise E.NonMaterializable("sigma of a non-materializable value")
            return E.lit(eval_sigma(v))
    return eval_elem(fn, *args)


def eval_termoid(t: S.Termoid, valuation: dict[S.Variable, int] | None = None,
                 table: AxiomTable = FULL) -> Code:
    valuation = valuation or {}
    match t:
        case S.Numeroid(n):
            return E.lit(n)
        case S.Var(v):
            if v not in valuation:
                raise NonConstant(f"{v} has no value")
            return E.lit(valuation[v])
        case S.App(fn, args):
            return eval_apply(fn, [eval_termoid(a, valuation, table) for a in args], table)
        case S.Nu(a):
            return eval_termoid(a, valuation, table)
        case S.Iota():
            raise E.NonMaterializable("a description has no computable value")
        case S.NuF() | S.PiF():
            raise E.NonMaterializable("Kleene-layer generator has no computable value")
    raise TypeError(f"not a termoid: {t!r}")
