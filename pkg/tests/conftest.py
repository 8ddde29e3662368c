"""Shared generators for the seeded randomized suites."""

import random
from fractions import Fraction
from itertools import product

import pytest

from agodel import (
    INF, RAT, ZERO, And, App, Atom, Bot, DArrow, DDArrow, Delta, Exists,
    Forall, Iff, Imp, Inv, LukImp, Not, One, Or, Power, Signature, Structure,
    Tensor, Top, Var, elem, free_vars, lex2, rat,
)

# values used by grid checks and random tables
RAT_POOL = [ZERO, rat(1, 2), rat(1), rat(2), INF]
RAT_ELEMS = [Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1),
             Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5)]


def make_rng(seed):
    return random.Random(seed)


def random_truth_value(rng, backend=RAT):
    roll = rng.random()
    if roll < 0.15:
        return ZERO
    if roll < 0.3:
        return INF
    if backend is RAT:
        return elem(rng.choice(RAT_ELEMS), RAT)
    return lex2(rng.choice(RAT_ELEMS), rng.choice(RAT_ELEMS))


def random_structure(rng, sig, size=None, backend=RAT):
    size = size or rng.randint(1, 3)
    universe = tuple(f"m{i}" for i in range(1, size + 1))
    funcs = {}
    for name, arity in sig.functions.items():
        funcs[name] = {
            args: rng.choice(universe)
            for args in product(universe, repeat=arity)
        }
    preds = {}
    for name, arity in sig.predicates.items():
        preds[name] = {
            args: random_truth_value(rng, backend)
            for args in product(universe, repeat=arity)
        }
    return Structure(sig, backend, universe, funcs, preds)


def random_term(rng, sig, variables):
    choices = list(variables) + sig.constants()
    if not choices:
        raise ValueError("no terms available")
    pick = rng.choice(choices)
    return Var(pick) if pick in variables else App(pick, ())


CORE_LEAVES = ("atom", "bot", "one")
CORE_OPS = ("and", "imp", "tensor", "inv", "forall", "exists")
DERIVED_OPS = ("or", "not", "iff", "power", "darrow", "ddarrow", "delta", "lukimp", "top")


def random_formula(rng, sig, depth, bound=(), allow_derived=True, qdepth=None):
    """Random formula over sig; closed when all atom args can be bound."""
    if qdepth is None:
        qdepth = depth
    bound = tuple(bound)

    def atom():
        preds = list(sig.predicates)
        usable = [p for p in preds if sig.predicates[p] == 0 or bound or sig.constants()]
        if not usable:
            return rng.choice([Bot(), One()])
        name = rng.choice(usable)
        arity = sig.predicates[name]
        try:
            args = tuple(random_term(rng, sig, bound) for _ in range(arity))
        except ValueError:
            return rng.choice([Bot(), One()])
        return Atom(name, args)

    if depth <= 0:
        return rng.choice([atom(), atom(), atom(), Bot(), One()])
    ops = list(CORE_OPS) + (list(DERIVED_OPS) if allow_derived else [])
    if qdepth <= 0:
        ops = [o for o in ops if o not in ("forall", "exists")]
    op = rng.choice(ops + ["leaf"])
    if op == "leaf":
        return atom()
    if op in ("forall", "exists"):
        var = f"x{len(bound) + 1}"
        body = random_formula(rng, sig, depth - 1, bound + (var,), allow_derived,
                              qdepth - 1)
        return (Forall if op == "forall" else Exists)(var, body)
    if op in ("inv", "not", "delta"):
        node = {"inv": Inv, "not": Not, "delta": Delta}[op]
        return node(random_formula(rng, sig, depth - 1, bound, allow_derived, qdepth))
    if op == "power":
        return Power(random_formula(rng, sig, depth - 1, bound, allow_derived, qdepth),
                     rng.randint(1, 3))
    if op == "top":
        return Top()
    node = {"and": And, "imp": Imp, "tensor": Tensor, "or": Or, "iff": Iff,
            "darrow": DArrow, "ddarrow": DDArrow, "lukimp": LukImp}[op]
    return node(
        random_formula(rng, sig, depth - 1, bound, allow_derived, qdepth),
        random_formula(rng, sig, depth - 1, bound, allow_derived, qdepth),
    )


def random_core_sentence(rng, sig, depth=4, qdepth=2):
    """Closed core-connective formula (for the translation suites)."""
    for _ in range(50):
        phi = random_formula(rng, sig, depth, bound=(), allow_derived=False,
                             qdepth=qdepth)
        if not free_vars(phi):
            return phi
    return Bot()


def similarity_closure(rng, size, value_pool):
    """Random e-table satisfying the similarity axioms by construction:
    reflexive INF diagonal, symmetrized, then max-min transitive closure."""
    universe = tuple(f"m{i}" for i in range(1, size + 1))
    sig = Signature(predicates={"e": 2}, equality="e")
    from agodel import tv_max, tv_min

    table = {}
    for i, a in enumerate(universe):
        for j, b in enumerate(universe):
            if i == j:
                table[(a, b)] = INF
            elif i < j:
                table[(a, b)] = rng.choice(value_pool)
            else:
                table[(a, b)] = table[(b, a)]
    changed = True
    while changed:
        changed = False
        for a in universe:
            for b in universe:
                for c in universe:
                    through = tv_min(table[(a, c)], table[(c, b)])
                    better = tv_max(table[(a, b)], through)
                    if better != table[(a, b)]:
                        table[(a, b)] = better
                        changed = True
    return Structure(sig, RAT, universe, {}, {"e": table})


@pytest.fixture
def rng():
    return make_rng(20260810)
