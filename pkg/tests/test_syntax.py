import pytest
from hypothesis import given
from hypothesis import strategies as st

from ari_kernel import syntax as S
from _cases import counted
from strategies import VARS, formulas, kleene_formulas, termoids

pytestmark = pytest.mark.property


@given(formulas)
@counted
def test_print_parse_roundtrip(f):
    text = S.print_formula(f)
    assert S.parse_formula(text) == f
    assert S.print_formula(S.parse_formula(text)) == text


@given(kleene_formulas)
@counted
def test_roundtrip_with_kleene_atoms(f):
    assert S.parse_formula(S.print_formula(f)) == f


@given(termoids)
@counted
def test_termoid_roundtrip(t):
    assert S.parse_termoid(S.print_termoid(t)) == t


@given(formulas, VARS)
@counted
def test_substitute_variable_by_itself(c, v):
    out, obs = S.substitute(c, v, S.Var(v))
    assert out == c
    assert obs == [] or all(o.satisfied for o in obs)


@given(formulas, VARS, termoids)
@counted
def test_substitution_free_variables(c, v, t):
    try:
        out, _ = S.substitute(c, v, t, strict=True)
    except S.CaptureViolation:
        return
    assert S.free_vars(out) <= (S.free_vars(c) - {v}) | S.free_vars(t)


@given(formulas)
@counted
def test_negate_is_implication_of_falsum(e):
    n = S.negate(e)
    assert n == S.Imp(e, S.Atom("eq", S.Numeroid(0), S.Numeroid(1)))
    assert S.parse_formula(f"neg({S.print_formula(e)})") == n


def test_falsum_literal():
    assert S.parse_formula("eq(num(0),num(1))") == S.FALSUM
    assert S.parse_formula("bot") == S.FALSUM


def test_con_ari_matrix_parses():
    f = S.parse_formula("imp(eq(ell(x1,vf),num(0)),bot)")
    assert f == S.negate(S.eq(S.app("ell", S.x(1), S.VF), S.Numeroid(0)))


def test_kleene_atom_text():
    assert S.parse_formula("F(exp0(x1))") == S.KleeneAtom(S.App("exp0", (S.x(1),)))


@pytest.mark.parametrize("text", ["imp(eq(num(0),num(1))", "eq(x0,num(1))", "foo(num(1))", "eq(num(0),num(1)) x"])
def test_parse_errors_carry_position(text):
    with pytest.raises(SyntaxError):
        S.parse_formula(text)


def test_capture_is_reported():
    c = S.parse_formula("exists(x2, eq(x1,x2))")
    out, obs = S.substitute(c, S.Variable(1), S.x(2))
    assert any(o.kind == "FreeFor" and not o.satisfied for o in obs)
    with pytest.raises(S.CaptureViolation):
        S.substitute(c, S.Variable(1), S.x(2), strict=True)
