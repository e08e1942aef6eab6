import pytest
from hypothesis import given
from hypothesis import strategies as st

from ari_kernel import calculus as C
from ari_kernel import syntax as S
from _cases import counted
from strategies import VARS, closed_formulas, formulas, letters

pytestmark = pytest.mark.property

PROPOSITIONAL = ("Imp0", "Imp1", "Imp2", "Imp3", "Con1", "Con2", "Con3", "Dis1", "Dis2", "Dis3", "TND", "DNE")


def premises_for(rule, A, B, Cc):
    """Premises and conclusion of a derived rule, instantiated at A, B, C."""
    imp, neg = S.Imp, S.negate
    match rule:
        case "Imp0":
            return [], imp(A, A)
        case "ch.in.":
            return [imp(A, B), imp(B, Cc)], imp(A, Cc)
        case "ch.in.2":
            return [imp(A, imp(B, Cc)), B], imp(A, Cc)
        case "ch.in.-fla2":
            return [], imp(imp(B, Cc), imp(imp(A, B), imp(A, Cc)))
        case "Int-Ant":
            return [imp(A, imp(B, Cc))], imp(B, imp(A, Cc))
        case "int-ant":
            return [], imp(imp(A, imp(B, Cc)), imp(B, imp(A, Cc)))
        case "Contrap":
            return [imp(A, B)], imp(neg(B), neg(A))
        case "contrap":
            return [], imp(imp(A, B), imp(neg(B), neg(A)))
        case "Mtp2":
            return [S.Or(A, B)], imp(neg(A), B)
        case "Mtp1":
            return [S.Or(A, B), neg(A)], B


@given(st.sampled_from(PROPOSITIONAL), letters, letters, letters)
@counted
def test_schema_match_roundtrip(name, A, B, Cc):
    f = C.instantiate(name, {"A": A, "B": B, "C": Cc})
    m = C.match_schema(name, f)
    assert m is not None
    assert C.instantiate(name, dict(m.bindings)) == f
    first = C.match_axiom(f)
    assert first is not None and C.schema_bindings_roundtrip(first, f)


@given(st.sampled_from(C.RULES), letters, letters, letters)
@counted
def test_derived_rule_expansions_check(rule, A, B, Cc):
    prem, concl = premises_for(rule, A, B, Cc)
    steps = C.expand_derived(rule, prem, concl)
    env = dict(zip("ab", prem))
    assert all(err is None for _, err in C.verify_steps(steps, env))
    assert C.numbered_width(steps) == C.RULE_WIDTH[rule]
    assert steps[-1].formula == concl


@given(formulas)
@counted
def test_closed_mode_axioms_are_closed(f):
    m = C.match_axiom(f, mode="closed")
    if m is not None:
        assert not S.free_vars(f)


@given(formulas, VARS)
@counted
def test_quantifier_schemata_on_random_bodies(body, v):
    f = S.Imp(S.Forall(v, body), body)
    m = C.match_schema("WBA-A", f)
    assert (m is not None) == (v in S.free_vars(body))


@given(closed_formulas)
@counted
def test_negation_transparency(A):
    assert S.negate(A) == S.Imp(A, S.FALSUM)
    dne = S.Imp(S.negate(S.negate(A)), A)
    assert C.match_schema("DNE", dne) is not None
    assert C.match_schema("DNE", S.parse_formula(f"imp(imp(imp({S.print_formula(A)},bot),bot),{S.print_formula(A)})")) is not None


@given(letters, letters)
@counted
def test_mp_rule(A, B):
    assert C.apply_mp(A, S.Imp(A, B)) == B
    if A != B:
        with pytest.raises(C.AntecedentMismatch):
            C.apply_mp(B, S.Imp(A, B))


def test_gen_rules():
    f = S.parse_formula("eq(x1,x1)")
    assert C.apply_gen(f, S.Variable(1)) == S.Forall(S.Variable(1), f)
    with pytest.raises(C.ClosedModeViolation):
        C.apply_gen(f, S.Variable(1), mode="closed")
    with pytest.raises(C.VariableNotFree):
        C.apply_gen(f, S.Variable(2))
    with pytest.raises(C.HypothesisCapture):
        C.apply_gen(f, S.Variable(1), active_hypotheses={"h": S.parse_formula("eq(x1,num(0))")})


def test_rule_widths_table():
    assert C.RULE_WIDTH == {"Imp0": 5, "ch.in.": 5, "ch.in.2": 5, "ch.in.-fla2": 7, "Int-Ant": 8,
                            "int-ant": 19, "Contrap": 12, "contrap": 15, "Mtp2": 20, "Mtp1": 17}


def test_elementary_table_entries():
    f = S.parse_formula("or(eq(sg(num(4)),num(0)),eq(sg(num(4)),num(1)))")
    assert C.match_schema("ElemAx", f, key="42") is not None
    assert C.match_schema("ElemAx", f, key="44") is None


def test_m_omega_is_recognised():
    assert C.match_schema("M-omega", C.M_OMEGA) is not None


def test_lea_replacement():
    f = S.parse_formula("imp(eq(num(1),num(2)),eq(add(num(1),x1),add(num(2),x1)))")
    assert C.match_schema("LEA-rp", f) is not None
    g = S.parse_formula("imp(eq(num(1),num(2)),eq(add(num(1),x1),add(num(3),x1)))")
    assert C.match_schema("LEA-rp", g) is None
