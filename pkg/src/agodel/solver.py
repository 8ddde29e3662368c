"""Finite-domain model finding for sentence sets.

Pipeline: ground all quantifiers over n named elements, compile the
condition "sentence evaluates to absolute truth" into a disjunction of
constraint systems, and decide each system by Fourier-Motzkin
elimination over exact rationals.

Each ground atom is an unknown ranging over the three strata of the
carrier: a case tag picks the stratum (zero / group element / inf), and
group-element unknowns are compared through integer-coefficient linear
forms over formal exponents (the group is written multiplicatively, so
products become sums of exponents and inverses become negations).

A satisfiable system yields a rational exponent valuation; scaling all
exponents by the common denominator and raising 2 to them turns the
witness into an exact positive-rational structure, which is then
re-checked against the evaluator before being returned.  Soundness
note: a finite system of integer-coefficient strict and non-strict
linear comparisons is satisfiable in some totally ordered abelian group
iff it is satisfiable over the rationals (divisible hull), so UNSAT
verdicts hold over every totally ordered abelian group; NONE_UP_TO
only means no model with at most n_max elements was found.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import ResourceLimitError, UsageError
from .semantics import Structure, satisfies
from .syntax import (
    And, App, Atom, Bot, DArrow, DDArrow, Delta, Exists, Forall, Formula, Iff,
    Imp, Inv, LukImp, Not, One, Or, Power, Signature, Tensor, Term, Top, Var,
    free_vars, print_formula, substitute,
)
from .values import (
    INF, LEX2, RAT, ZERO, TruthValue, lex2, one, rat, tv_compare, tv_inv,
    tv_mul, tv_power,
)

AtomKey = Tuple[str, Tuple[str, ...]]

TAG_ZERO = "zero"
TAG_ELEM = "elem"
TAG_INF = "inf"

DEFAULT_BRANCH_BUDGET = 20000
DEFAULT_CONSTRAINT_BUDGET = 100000


# ---------------------------------------------------------------------------
# Linear forms and constraint systems

# A linear form is a dict var -> integer coefficient (exponent space);
# a constraint means  sum(coeffs) + const  REL  0  with REL in {<, <=, =}.


@dataclass(frozen=True)
class Constraint:
    coeffs: Tuple[Tuple[object, Fraction], ...]
    const: Fraction
    rel: str

    @staticmethod
    def make(coeffs: Dict, const, rel: str) -> "Constraint":
        items = tuple(sorted(
            ((v, Fraction(c)) for v, c in coeffs.items() if c != 0),
            key=lambda it: repr(it[0]),
        ))
        return Constraint(items, Fraction(const), rel)

    def as_dict(self) -> Dict:
        return dict(self.coeffs)

    def pretty(self) -> str:
        if not self.coeffs:
            lhs = "0"
        else:
            lhs = " + ".join(f"{c}*{v}" for v, c in self.coeffs)
        shift = f" + {self.const}" if self.const else ""
        return f"{lhs}{shift} {self.rel} 0"


@dataclass
class ConstraintSystem:
    """One case branch: stratum tags for atoms plus linear comparisons."""

    tags: Dict[AtomKey, str] = field(default_factory=dict)
    lins: List[Constraint] = field(default_factory=list)

    def canonical_key(self):
        tag_part = tuple(sorted(self.tags.items()))
        lin_part = tuple(sorted((c.coeffs, c.const, c.rel) for c in self.lins))
        return (tag_part, lin_part)

    def holds_for(self, valuation: Dict[AtomKey, TruthValue]) -> bool:
        """Membership of a concrete valuation in this branch's solution set.

        Comparisons are evaluated directly in the group: an exponent form
        sum(c_i * x_i) REL 0 holds iff prod(v_i ** c_i) REL identity.
        """
        kind_tag = {0: TAG_ZERO, 1: TAG_ELEM, 2: TAG_INF}
        for atom, tag in self.tags.items():
            if kind_tag[valuation[atom].kind] != tag:
                return False
        for cons in self.lins:
            if cons.const != 0:
                raise UsageError("concrete membership needs homogeneous constraints")
            value = None
            for var, coeff in cons.coeffs:
                if coeff.denominator != 1:
                    raise UsageError("concrete membership needs integer coefficients")
                n = int(coeff)
                factor = tv_power(valuation[var], abs(n))
                if n < 0:
                    factor = tv_inv(factor)
                value = factor if value is None else tv_mul(value, factor)
            backend = value.backend if value is not None else RAT
            cmp = tv_compare(value, one(backend)) if value is not None else 0
            if cons.rel == "<" and not cmp < 0:
                return False
            if cons.rel == "<=" and not cmp <= 0:
                return False
            if cons.rel == "=" and not cmp == 0:
                return False
        return True


# ---------------------------------------------------------------------------
# Grounding


def _check_solver_signature(sig: Signature) -> None:
    bad = sorted(n for n, a in sig.functions.items() if a >= 1)
    if bad:
        raise UsageError(
            f"function symbols of positive arity are unsupported by the solver: {bad}"
        )


def element_names(sig: Signature, n: int) -> List[str]:
    """n fresh element names, avoiding collisions with declared symbols."""
    taken = set(sig.functions) | set(sig.predicates)
    prefix = "e"
    while any(f"{prefix}{i}" in taken for i in range(1, n + 1)):
        prefix += "_"
    return [f"{prefix}{i}" for i in range(1, n + 1)]


def ground_sentence(
    phi: Formula, elements: Sequence[str], const_map: Optional[Dict[str, str]] = None
) -> Formula:
    """Replace quantifiers by explicit finite meets/joins over elements.

    Universal quantifiers become left-nested conjunctions, existential
    ones left-nested disjunctions.  Constants are replaced through
    ``const_map``; element occurrences are nullary term applications
    named after the element.
    """
    const_map = const_map or {}

    def go(node: Formula) -> Formula:
        if isinstance(node, (Bot, One, Top)):
            return node
        if isinstance(node, Atom):
            return Atom(node.pred, tuple(_ground_term(t, const_map) for t in node.args))
        if isinstance(node, (And, Imp, Tensor, Or, Iff, DArrow, DDArrow, LukImp)):
            return type(node)(go(node.left), go(node.right))
        if isinstance(node, Power):
            return Power(go(node.body), node.n)
        if isinstance(node, (Inv, Not, Delta)):
            return type(node)(go(node.body))
        if isinstance(node, (Forall, Exists)):
            combiner = And if isinstance(node, Forall) else Or
            parts = [go(substitute(node.body, node.var, App(el, ())))
                     for el in elements]
            out = parts[0]
            for p in parts[1:]:
                out = combiner(out, p)
            return out
        raise UsageError(f"not a formula: {node!r}")

    return go(phi)


def _ground_term(t: Term, const_map: Dict[str, str]) -> Term:
    if isinstance(t, Var):
        return t
    if t.args:
        raise UsageError("function symbols of positive arity are unsupported by the solver")
    if t.func in const_map:
        return App(const_map[t.func], ())
    return t


def ground(
    theory: Sequence[Formula], n: int, const_map: Optional[Dict[str, str]] = None
) -> List[Formula]:
    if n < 1:
        raise UsageError("domain size must be >= 1")
    elements = [f"e{i}" for i in range(1, n + 1)]
    return [ground_sentence(phi, elements, const_map) for phi in theory]


# ---------------------------------------------------------------------------
# Compilation into case branches

# Symbolic values during compilation: ("Z",) | ("I",) | ("E", form) where
# form maps atom keys to integer exponent coefficients.

_SYM_Z = ("Z",)
_SYM_I = ("I",)


def _sym_elem(form: Dict[AtomKey, int]):
    return ("E", {k: v for k, v in form.items() if v})


class _Compiler:
    def __init__(self, branch_budget: int):
        self.branch_budget = branch_budget

    def _guard(self, branches):
        if len(branches) > self.branch_budget:
            raise ResourceLimitError(
                f"case-branch count exceeds budget {self.branch_budget}"
            )
        return branches

    # Each compile step returns [(tags, lins, sym_value)].
    def compile(self, phi: Formula):
        if isinstance(phi, Bot):
            return [({}, [], _SYM_Z)]
        if isinstance(phi, Top):
            return [({}, [], _SYM_I)]
        if isinstance(phi, One):
            return [({}, [], _sym_elem({}))]
        if isinstance(phi, Atom):
            key = _atom_key(phi)
            return [
                ({key: TAG_ZERO}, [], _SYM_Z),
                ({key: TAG_ELEM}, [], _sym_elem({key: 1})),
                ({key: TAG_INF}, [], _SYM_I),
            ]
        if isinstance(phi, (Inv, Not, Delta)):
            out = []
            for tags, lins, v in self.compile(phi.body):
                for extra, value in self._unary(phi, v):
                    out.append((tags, lins + extra, value))
            return self._guard(out)
        if isinstance(phi, Power):
            out = []
            for tags, lins, v in self.compile(phi.body):
                out.append((tags, lins, _sym_power(v, phi.n)))
            return self._guard(out)
        if isinstance(phi, (And, Imp, Tensor, Or, Iff, DArrow, DDArrow, LukImp)):
            out = []
            left = self.compile(phi.left)
            right = self.compile(phi.right)
            for tags1, lins1, v1 in left:
                for tags2, lins2, v2 in right:
                    tags = _merge_tags(tags1, tags2)
                    if tags is None:
                        continue
                    lins = lins1 + lins2
                    for extra, value in self._binary(phi, v1, v2):
                        out.append((tags, lins + extra, value))
                    if len(out) > self.branch_budget:
                        raise ResourceLimitError(
                            f"case-branch count exceeds budget {self.branch_budget}"
                        )
            return out
        if isinstance(phi, (Forall, Exists)):
            raise UsageError("compile expects a ground sentence; run ground() first")
        raise UsageError(f"not a formula: {phi!r}")

    def _unary(self, phi, v):
        if isinstance(phi, Inv):
            return [([], _sym_inv(v))]
        if isinstance(phi, Not):
            # value is INF when the body is 0, else 0
            if v == _SYM_Z:
                return [([], _SYM_I)]
            return [([], _SYM_Z)]
        if isinstance(phi, Delta):
            if v == _SYM_I:
                return [([], _SYM_I)]
            return [([], _SYM_Z)]
        raise UsageError(f"unexpected unary node {phi!r}")

    def _binary(self, phi, v1, v2):
        cases = _sym_cases(v1, v2)
        out = []
        if isinstance(phi, And):
            for extra, rel in cases:
                out.append((extra, v1 if rel in ("<", "=") else v2))
        elif isinstance(phi, Or):
            for extra, rel in cases:
                out.append((extra, v2 if rel == "<" else v1))
        elif isinstance(phi, Iff):
            for extra, rel in cases:
                if rel == "=":
                    out.append((extra, _SYM_I))
                else:
                    out.append((extra, v1 if rel == "<" else v2))
        elif isinstance(phi, Imp):
            for extra, rel in cases:
                out.append((extra, _SYM_I if rel in ("<", "=") else v2))
        elif isinstance(phi, DArrow):
            for extra, rel in cases:
                if rel == "<" and v2 != _SYM_I:
                    out.append((extra, _SYM_I))
                else:
                    out.append((extra, v2))
        elif isinstance(phi, DDArrow):
            for extra, rel in cases:
                if rel == "<":
                    out.append((extra, _SYM_I))
                elif rel == "=" and v1 == _SYM_I and v2 == _SYM_I:
                    out.append((extra, _SYM_Z))
                else:
                    out.append((extra, v2))
        elif isinstance(phi, Tensor):
            out.append(([], _sym_mul(v1, v2)))
        elif isinstance(phi, LukImp):
            for extra, rel in cases:
                if rel in ("<", "="):
                    out.append((extra, _SYM_I))
                else:
                    out.append((extra, _sym_mul(v2, _sym_inv(v1))))
        else:
            raise UsageError(f"unexpected binary node {phi!r}")
        return out


def _atom_key(phi: Atom) -> AtomKey:
    names = []
    for t in phi.args:
        if isinstance(t, App) and not t.args:
            names.append(t.func)
        else:
            raise UsageError(f"compile expects ground atoms, got argument {t!r}")
    return (phi.pred, tuple(names))


def _merge_tags(a: Dict, b: Dict):
    if len(a) < len(b):
        a, b = b, a
    merged = dict(a)
    for k, v in b.items():
        if merged.setdefault(k, v) != v:
            return None  # contradictory strata; branch infeasible
    return merged


def _sym_inv(v):
    if v == _SYM_Z:
        return _SYM_I
    if v == _SYM_I:
        return _SYM_Z
    return _sym_elem({k: -c for k, c in v[1].items()})


def _sym_mul(a, b):
    kinds = (a[0], b[0])
    if kinds == ("E", "E"):
        form = dict(a[1])
        for k, c in b[1].items():
            form[k] = form.get(k, 0) + c
        return _sym_elem(form)
    if set(kinds) == {"Z", "I"}:
        return _sym_elem({})  # inf * 0 = identity
    if "Z" in kinds:
        return _SYM_Z
    return _SYM_I


def _sym_power(v, n: int):
    if v[0] != "E":
        return v
    return _sym_elem({k: c * n for k, c in v[1].items()})


def _sym_cases(v1, v2):
    """Disjoint exhaustive cases for the order between two symbolic values.

    Returns [(extra_constraints, rel)] with rel in {'<', '=', '>'}.
    Strata order the kinds outright; two group-element forms split on
    the sign of their difference.
    """
    k1, k2 = v1[0], v2[0]
    rank = {"Z": 0, "E": 1, "I": 2}
    if k1 != k2:
        return [([], "<" if rank[k1] < rank[k2] else ">")]
    if k1 != "E":
        return [([], "=")]
    diff = dict(v1[1])
    for k, c in v2[1].items():
        diff[k] = diff.get(k, 0) - c
    diff = {k: c for k, c in diff.items() if c}
    if not diff:
        return [([], "=")]
    lt = Constraint.make(diff, 0, "<")
    eq = Constraint.make(diff, 0, "=")
    gt = Constraint.make({k: -c for k, c in diff.items()}, 0, "<")
    return [([lt], "<"), ([eq], "="), ([gt], ">")]


def compile_inf(phi: Formula, branch_budget: int = DEFAULT_BRANCH_BUDGET) -> List[ConstraintSystem]:
    """Branches whose union of solution sets is exactly {valuations: phi = INF}."""
    compiler = _Compiler(branch_budget)
    systems = []
    seen = set()
    for tags, lins, v in compiler.compile(phi):
        if v != _SYM_I:
            continue
        system = ConstraintSystem(tags, _simplify_lins(lins))
        key = system.canonical_key()
        if key not in seen:
            seen.add(key)
            systems.append(system)
    # drop branches whose simplified constraints are already contradictory
    out = []
    for s in systems:
        trivial_false = any(
            not c.coeffs and not _const_holds(c) for c in s.lins
        )
        if not trivial_false:
            out.append(s)
    out.sort(key=ConstraintSystem.canonical_key)
    return out


def _const_holds(c: Constraint) -> bool:
    if c.rel == "<":
        return c.const < 0
    if c.rel == "<=":
        return c.const <= 0
    return c.const == 0


def _simplify_lins(lins: Iterable[Constraint]) -> List[Constraint]:
    out = []
    seen = set()
    for c in lins:
        if not c.coeffs and _const_holds(c):
            continue  # trivially true
        key = (c.coeffs, c.const, c.rel)
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


# ---------------------------------------------------------------------------
# Fourier-Motzkin over exact rationals


@dataclass
class FMResult:
    sat: bool
    witness: Optional[Dict[object, Fraction]] = None
    certificate: Optional[str] = None


def fm_solve(
    constraints: Sequence[Constraint],
    constraint_budget: int = DEFAULT_CONSTRAINT_BUDGET,
) -> FMResult:
    """Decide a conjunction of linear comparisons over the rationals.

    Equalities are removed by exact substitution, then variables are
    eliminated one by one; every lower/upper bound pair combines into a
    new comparison whose strictness is inherited.  SAT returns a
    concrete rational valuation (reconstructed by walking the
    elimination stack backwards); UNSAT is certified by a contradictory
    constant comparison.
    """
    work = [(c.as_dict(), c.const, c.rel) for c in constraints]
    substitutions: List[Tuple[object, Dict, Fraction]] = []  # var = form + const
    eliminations: List[Tuple[object, List, List]] = []  # var, lowers, uppers

    # equality substitution pass
    while True:
        eq_index = next(
            (i for i, (coeffs, _, rel) in enumerate(work) if rel == "=" and coeffs),
            None,
        )
        if eq_index is None:
            break
        coeffs, cst, _ = work.pop(eq_index)
        var = min(coeffs, key=repr)
        c_var = coeffs.pop(var)
        # var = -(rest + cst) / c_var
        expr = {v: -c / c_var for v, c in coeffs.items()}
        expr_const = -cst / c_var
        substitutions.append((var, expr, expr_const))
        work = [_substitute_lin(item, var, expr, expr_const) for item in work]

    for coeffs, cst, rel in list(work):
        if not coeffs and rel == "=" and cst != 0:
            return FMResult(False, certificate=f"0 = {cst} is false")

    inequalities = [(coeffs, cst, rel) for coeffs, cst, rel in work if coeffs or rel != "="]

    def constant_check(items):
        for coeffs, cst, rel in items:
            if coeffs:
                continue
            if rel == "<" and not cst < 0:
                return f"0 < {-cst} is false" if cst else "0 < 0 is false"
            if rel == "<=" and not cst <= 0:
                return f"0 <= {-cst} is false"
        return None

    while True:
        cert = constant_check(inequalities)
        if cert is not None:
            return FMResult(False, certificate=cert)
        variables = sorted({v for coeffs, _, _ in inequalities for v in coeffs}, key=repr)
        if not variables:
            break
        # eliminate the variable with the cheapest lower*upper product
        def cost(var):
            lo = sum(1 for coeffs, _, _ in inequalities if coeffs.get(var, 0) < 0)
            hi = sum(1 for coeffs, _, _ in inequalities if coeffs.get(var, 0) > 0)
            return lo * hi

        var = min(variables, key=lambda v: (cost(v), repr(v)))
        lowers, uppers, rest = [], [], []
        for coeffs, cst, rel in inequalities:
            c = coeffs.get(var, 0)
            if c == 0:
                rest.append((coeffs, cst, rel))
                continue
            others = {v: k for v, k in coeffs.items() if v != var}
            # c*var + others + cst REL 0
            bound_form = {v: -k / c for v, k in others.items()}
            bound_const = -cst / c
            if c > 0:
                uppers.append((bound_form, bound_const, rel))  # var REL bound
            else:
                lowers.append((bound_form, bound_const, rel))  # bound REL var
        eliminations.append((var, lowers, uppers))
        new = list(rest)
        for lo_form, lo_const, lo_rel in lowers:
            for hi_form, hi_const, hi_rel in uppers:
                coeffs = dict(lo_form)
                for v, k in hi_form.items():
                    coeffs[v] = coeffs.get(v, 0) - k
                coeffs = {v: k for v, k in coeffs.items() if k}
                cst = lo_const - hi_const
                rel = "<" if "<" in (lo_rel, hi_rel) else "<="
                new.append((coeffs, cst, rel))
        if len(new) > constraint_budget:
            raise ResourceLimitError(
                f"Fourier-Motzkin constraint count exceeds budget {constraint_budget}"
            )
        inequalities = new

    # feasible: rebuild a witness, last eliminated variable first; variables
    # that dropped out unconstrained default to 0 and are overwritten below
    witness: Dict[object, Fraction] = {}
    for c in constraints:
        for v, _ in c.coeffs:
            witness.setdefault(v, Fraction(0))
    for var, lowers, uppers in reversed(eliminations):
        lo = None
        lo_strict = False
        for form, cst, rel in lowers:
            value = cst + sum(k * witness[v] for v, k in form.items())
            if lo is None or value > lo or (value == lo and rel == "<"):
                lo, lo_strict = value, rel == "<"
        hi = None
        hi_strict = False
        for form, cst, rel in uppers:
            value = cst + sum(k * witness[v] for v, k in form.items())
            if hi is None or value < hi or (value == hi and rel == "<"):
                hi, hi_strict = value, rel == "<"
        witness[var] = _pick_in_interval(lo, lo_strict, hi, hi_strict)
    for var, expr, expr_const in reversed(substitutions):
        witness[var] = expr_const + sum(c * witness[v] for v, c in expr.items())
    return FMResult(True, witness=witness)


def _substitute_lin(item, var, expr, expr_const):
    coeffs, cst, rel = item
    c = coeffs.get(var)
    if c is None or c == 0:
        return (dict(coeffs), cst, rel)
    out = {v: k for v, k in coeffs.items() if v != var}
    for v, k in expr.items():
        out[v] = out.get(v, 0) + c * k
    out = {v: k for v, k in out.items() if k}
    return (out, cst + c * expr_const, rel)


def _pick_in_interval(lo, lo_strict, hi, hi_strict) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if hi is None:
        return lo + 1
    if lo is None:
        return hi - 1
    if lo == hi:
        if lo_strict or hi_strict:
            raise AssertionError("elimination left an empty interval")
        return lo
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# Model search


@dataclass
class SolveStats:
    domains_tried: int = 0
    constant_maps_tried: int = 0
    branches_examined: int = 0
    fm_calls: int = 0


@dataclass
class FindResult:
    structure: Optional[Structure]
    n_max: int
    stats: SolveStats

    @property
    def sat(self) -> bool:
        return self.structure is not None


def find_model(
    sig: Signature,
    theory: Sequence[Formula],
    n_max: int,
    branch_budget: int = DEFAULT_BRANCH_BUDGET,
    constraint_budget: int = DEFAULT_CONSTRAINT_BUDGET,
) -> FindResult:
    """Iterative-deepening search for a finite rational-backend model.

    Branches are examined in the canonical order of their case-tag
    tuples, so the witness is reproducible.  A NONE result is not a
    proof of unsatisfiability beyond n_max elements.
    """
    _check_solver_signature(sig)
    for phi in theory:
        if free_vars(phi):
            raise UsageError(f"theory contains a non-sentence: {print_formula(phi)}")
    stats = SolveStats()
    constants = sig.constants()
    for n in range(1, n_max + 1):
        stats.domains_tried += 1
        elements = element_names(sig, n)
        for values in product(elements, repeat=len(constants)):
            stats.constant_maps_tried += 1
            const_map = dict(zip(constants, values))
            per_sentence = []
            empty = False
            for phi in theory:
                grounded = ground_sentence(phi, elements, const_map)
                branches = compile_inf(grounded, branch_budget)
                if not branches:
                    empty = True
                    break
                per_sentence.append(branches)
            if empty:
                continue
            combined = _merge_sentence_branches(per_sentence, branch_budget)
            combined.sort(key=ConstraintSystem.canonical_key)
            for system in combined:
                stats.branches_examined += 1
                stats.fm_calls += 1
                result = fm_solve(system.lins, constraint_budget)
                if not result.sat:
                    continue
                struct = _witness_structure(sig, elements, const_map, system, result.witness)
                for phi in theory:
                    if not satisfies(struct, phi):
                        raise AssertionError(
                            f"solver produced a non-model for {print_formula(phi)}"
                        )
                return FindResult(struct, n_max, stats)
    return FindResult(None, n_max, stats)


def _merge_sentence_branches(per_sentence, branch_budget):
    merged = [ConstraintSystem({}, [])]
    for branches in per_sentence:
        next_merged = []
        for base in merged:
            for branch in branches:
                tags = _merge_tags(base.tags, branch.tags)
                if tags is None:
                    continue
                next_merged.append(
                    ConstraintSystem(tags, _simplify_lins(base.lins + branch.lins))
                )
                if len(next_merged) > branch_budget:
                    raise ResourceLimitError(
                        f"combined case-branch count exceeds budget {branch_budget}"
                    )
        merged = next_merged
    return merged


def _witness_structure(sig, elements, const_map, system, witness) -> Structure:
    # scale exponents to integers; constraints are homogeneous, so a
    # uniform positive scaling preserves them, and base 2 keeps values rational
    denominators = [v.denominator for v in witness.values()]
    scale = lcm(*denominators) if denominators else 1
    exponents = {var: int(v * scale) for var, v in witness.items()}

    def atom_value(key: AtomKey) -> TruthValue:
        tag = system.tags.get(key)
        if tag == TAG_ZERO:
            return ZERO
        if tag == TAG_INF:
            return INF
        if tag == TAG_ELEM:
            return rat(Fraction(2) ** exponents.get(key, 0))
        return rat(1)  # unconstrained atom: any value works

    preds = {}
    for name, arity in sig.predicates.items():
        table = {}
        for args in product(elements, repeat=arity):
            table[args] = atom_value((name, tuple(args)))
        preds[name] = table
    funcs = {name: {(): const_map[name]} for name in sig.functions}
    return Structure(sig, RAT, tuple(elements), funcs, preds)


# ---------------------------------------------------------------------------
# The non-archimedean reproduction lab


@dataclass
class RemarkLabReport:
    n: int
    standard_ok: bool
    lex_ok: bool
    standard_structure: Structure
    lex_structure: Structure
    failures: List[str] = field(default_factory=list)


def remark_theory_fragment(n: int) -> Tuple[Signature, List[Formula]]:
    """The finite fragment {one ==> rho, eps ==> top} + {rho^k ==> eps}, k <= n."""
    sig = Signature(predicates={"rho": 0, "eps": 0})
    rho, eps = Atom("rho"), Atom("eps")
    axioms: List[Formula] = [DDArrow(One(), rho), DDArrow(eps, Top())]
    axioms += [DDArrow(Power(rho, k), eps) for k in range(1, n + 1)]
    return sig, axioms


def remark_lab(n: int) -> RemarkLabReport:
    """Build and validate the two witnesses for the n-axiom fragment.

    The rational structure rho=2, eps=2^(n+1) shows the fragment is
    satisfiable by a standard model for every finite n, while the
    lexicographic-pair structure rho=(1,2), eps=(2,1) satisfies every
    axiom uniformly: (1,2)^k = (1,2^k) stays below (2,1) for all k.
    Every axiom is re-checked through the evaluator, exactly.
    """
    if n < 1:
        raise UsageError("remark_lab needs n >= 1")
    sig, axioms = remark_theory_fragment(n)
    standard = Structure(sig, RAT, ("m1",), {}, {
        "rho": {(): rat(2)},
        "eps": {(): rat(Fraction(2) ** (n + 1))},
    })
    lex_struct = Structure(sig, LEX2, ("m1",), {}, {
        "rho": {(): lex2(1, 2)},
        "eps": {(): lex2(2, 1)},
    })
    failures = []
    standard_ok = True
    lex_ok = True
    for phi in axioms:
        if not satisfies(standard, phi):
            standard_ok = False
            failures.append(f"standard model fails {print_formula(phi)}")
        if not satisfies(lex_struct, phi):
            lex_ok = False
            failures.append(f"lex model fails {print_formula(phi)}")
    return RemarkLabReport(n, standard_ok, lex_ok, standard, lex_struct, failures)
