import pytest
from hypothesis import given
from hypothesis import strategies as st

from ari_kernel import arithmetization as A
from ari_kernel import calculus as C
from ari_kernel import enumeration as E
from ari_kernel import kleene as K
from ari_kernel import syntax as S
from _cases import counted
from strategies import kleene_formulas

pytestmark = pytest.mark.property


def _small_atom_codes():
    out = []
    for p in ("eq", "lt", "le"):
        for a in range(3):
            for b in range(2):
                v = E.try_int(E.encode_formula(S.Atom(p, S.Numeroid(a), S.Numeroid(b))))
                if v is not None and v.bit_length() < 200:
                    out.append(v)
    return out


CODES = _small_atom_codes()
subscripts = st.one_of(st.sampled_from(CODES), st.integers(0, 10 ** 6))


def split(k: int, j: int) -> S.Termoid:
    """A ground termoid with value k that is not the numeroid itself."""
    j = min(j, k)
    return S.App("add", (S.Numeroid(k - j), S.Numeroid(j)))


def lea1(r1, r2):
    return S.Imp(S.eq(r1, r2), S.Imp(S.KleeneAtom(r1), S.KleeneAtom(r2)))


def replay(lines, target):
    """Check a substantiation fragment line by line."""
    done = []
    for f, just in lines:
        match just:
            case ("MP", i, j):
                assert C.apply_mp(done[i], done[j]) == f
            case ("Eval",):
                l, r = f.left.left, f.left.right
                assert f.right == S.FALSUM
                assert A.eval_termoid(l) != A.eval_termoid(r)
            case (name,):
                assert C.match_schema(name, f) is not None, name
        done.append(f)
    assert done[-1] == target


@given(subscripts, st.integers(0, 50))
@counted
def test_true_antecedent_gives_identity_consequent(k, j):
    f = lea1(S.Numeroid(k), split(k, j))
    assert K.match_nu_schema(f).schema == "LEA1nu"
    g = K.translate(f)
    assert g.right.left == g.right.right
    replay(K.substantiate(f), g)


@given(subscripts, subscripts)
@counted
def test_refutable_antecedent_is_substantiated(k1, k2):
    if k1 == k2:
        return
    f = lea1(S.Numeroid(k1), S.Numeroid(k2))
    lines = K.substantiate(f)
    assert [j[0] for _, j in lines[:2]] == ["Imp3", "Imp1"]
    replay(lines, K.translate(f))


@given(kleene_formulas, kleene_formulas)
@counted
def test_translation_commutes_with_connectives(a, b):
    for op in (S.Imp, S.And, S.Or):
        assert K.translate(op(a, b)) == op(K.translate(a), K.translate(b))


@given(st.integers(0, 10 ** 6))
@counted
def test_non_formula_subscripts_denote_falsum(k):
    try:
        E.decode_formula(E.lit(k))
        return
    except E.NotACode:
        pass
    assert K.translate(S.KleeneAtom(S.Numeroid(k))) == S.FALSUM


def test_vf_denotes_falsum():
    assert K.translate(S.parse_formula("F(vf)")) == S.FALSUM
    assert K.translate(S.parse_formula("F(num(0))")) == S.FALSUM


def test_tower_subscript_is_too_large():
    with pytest.raises(K.ValueTooLarge):
        K.translate(S.parse_formula("F(pow(num(2),vf))"))


def test_language_restriction():
    with pytest.raises(K.LanguageRestriction):
        K.translate(S.KleeneAtom(S.NuF(S.Numeroid(3))))


def test_lea_mp_and_lea2_shapes():
    r = S.parse_termoid("exp0(x1)")
    mp = S.parse_formula("imp(eq(exp0(x2),num(3)),imp(F(x2),imp(F(exp1(x2)),F(exp2(x2)))))")
    assert K.match_nu_schema(mp).schema == "LEAMPnu"
    lea2 = S.Imp(S.eq(S.App("fl", (r,)), r), S.eq(S.NuF(S.App("fl", (r,))), S.NuF(r)))
    assert K.match_nu_schema(lea2).schema == "LEA2nu"


def test_normalize_value_notations():
    assert K.normalize(S.parse_termoid("nu(num(7))")) == S.Numeroid(7)
    assert K.normalize(S.parse_termoid("nu(add(num(2),num(3)))")) == S.Numeroid(5)
