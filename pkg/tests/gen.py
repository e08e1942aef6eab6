"""Seeded generators for the fixed-size acceptance samples."""

from __future__ import annotations

import random

from ari_kernel import enumeration as E
from ari_kernel import syntax as S

ATOMS = (S.parse_formula("eq(num(0),num(0))"), S.parse_formula("eq(num(1),num(1))"))


def micro_formula(rng: random.Random, depth: int = 2) -> S.Formula:
    if depth == 0 or rng.random() < 0.4:
        return rng.choice(ATOMS)
    return S.Imp(micro_formula(rng, depth - 1), micro_formula(rng, depth - 1))


def deduction(rng: random.Random, depth: int, root: S.Formula | None = None) -> E.Deduction:
    """A deduction tree of depth at most `depth` over the micro-system atoms.
    Leaves are arbitrary formulas; only the tree shape has to be right."""
    free = root is None
    if free:
        root = micro_formula(rng)
    if depth <= 1 or rng.random() < 0.3:
        return E.Trivial(root)
    if free and rng.random() < 0.15:
        v = S.Variable(rng.randint(1, 3))
        inner = deduction(rng, depth - 1)
        return E.GenNode(S.Forall(v, inner.root), inner, v)
    minor = deduction(rng, depth - 1)
    major = deduction(rng, depth - 1, S.Imp(minor.root, root))
    return E.MpNode(root, minor, major)


def tree_depth(d: E.Deduction) -> int:
    match d:
        case E.Trivial():
            return 1
        case E.MpNode(_, a, b):
            return 1 + max(tree_depth(a), tree_depth(b))
        case E.GenNode(_, p, _):
            return 1 + tree_depth(p)


def code_pair(rng: random.Random) -> tuple[E.Code, E.Code, bool]:
    """(n, q, q_is_an_implication_major_for_n)."""
    match rng.randrange(3):
        case 0:
            return E.lit(rng.randrange(0, 10 ** 6)), E.lit(rng.randrange(0, 10 ** 6)), False
        case 1:
            n = E.encode_deduction(deduction(rng, 3))
            q = E.encode_deduction(deduction(rng, 3))
            return n, q, False
    minor = deduction(rng, 3)
    major = deduction(rng, 3, S.Imp(minor.root, micro_formula(rng)))
    return E.encode_deduction(minor), E.encode_deduction(major), True
