"""Hypothesis strategies for syntax objects and codes."""

from __future__ import annotations

from hypothesis import strategies as st

from ari_kernel import enumeration as E
from ari_kernel import syntax as S

VARS = st.integers(1, 4).map(S.Variable)
SMALL_FNS = ("suc", "sg", "exp0", "exp1", "add", "mul", "pow", "msd", "ell1", "ax")


def _app(children):
    def build(fn, args):
        return S.App(fn, tuple(args))
    return st.sampled_from(SMALL_FNS).flatmap(
        lambda fn: st.lists(children, min_size=S.symbol(fn).arity, max_size=S.symbol(fn).arity)
        .map(lambda args: build(fn, args)))


termoids = st.recursive(
    st.one_of(VARS.map(S.Var), st.integers(0, 40).map(S.Numeroid)),
    _app, max_leaves=6)

closed_termoids = st.recursive(st.integers(0, 40).map(S.Numeroid), _app, max_leaves=5)


def _atoms(terms):
    return st.builds(S.Atom, st.sampled_from(("eq", "lt", "le")), terms, terms)


def _compound(children):
    return st.one_of(
        st.builds(S.Imp, children, children),
        st.builds(S.And, children, children),
        st.builds(S.Or, children, children),
        st.builds(S.Forall, VARS, children),
        st.builds(S.Exists, VARS, children),
    )


formulas = st.recursive(_atoms(termoids), _compound, max_leaves=5)
closed_formulas = st.recursive(_atoms(closed_termoids), lambda c: st.one_of(
    st.builds(S.Imp, c, c), st.builds(S.And, c, c), st.builds(S.Or, c, c)), max_leaves=4)

# propositional letters for schema and rule instances
letters = st.recursive(
    st.sampled_from([S.parse_formula(f"lt(num({k}),num(0))") for k in range(1, 5)]),
    lambda c: st.one_of(st.builds(S.Imp, c, c), st.builds(S.And, c, c), st.builds(S.Or, c, c)),
    max_leaves=3)

kleene_formulas = st.recursive(
    st.one_of(_atoms(closed_termoids), st.integers(0, 2000).map(lambda k: S.KleeneAtom(S.Numeroid(k)))),
    lambda c: st.one_of(st.builds(S.Imp, c, c), st.builds(S.And, c, c), st.builds(S.Or, c, c)),
    max_leaves=4)


@st.composite
def exponent_maps(draw, max_index: int = 8):
    """Finite exponent assignments g -> code, exponents small or symbolic."""
    k = draw(st.integers(0, max_index))
    exps = st.one_of(st.integers(0, 60).map(E.lit),
                     st.integers(1, 3).map(lambda j: E.make({0: E.lit(10 ** 4)}) if j == 1 else E.lit(j)))
    return {g: draw(exps) for g in range(k + 1)}
