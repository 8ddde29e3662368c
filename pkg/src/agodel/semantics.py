"""Finite structures and exact formula evaluation.

A structure interprets every function symbol by a total table over a
finite nonempty universe and every predicate symbol by a total table of
truth values.  Finiteness makes every structure safe: quantifier values
are finite minima and maxima, so evaluation is exact and total.

Derived connectives are evaluated by their case tables directly;
``syntax.expand_derived`` provides the definitional route, and the test
suite checks the two agree everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import UsageError
from .syntax import (
    And, App, Atom, Bot, DArrow, DDArrow, Delta, Exists, Forall, Formula, Iff,
    Imp, Inv, LukImp, Not, One, Or, Power, Signature, Tensor, Term, Top, Var,
    free_vars, is_sentence,
)
from .values import (
    INF, K_ELEM, ZERO, GroupBackend, TruthValue, backend_by_name,
    format_truth_value, one, parse_truth_value, tv_compare, tv_dmin, tv_inv,
    tv_max, tv_min, tv_mul, tv_power, tv_resid,
)

Assignment = Dict[str, str]


@dataclass
class Structure:
    """Finite interpretation of a signature over one group backend."""

    signature: Signature
    backend: GroupBackend
    universe: Tuple[str, ...]
    funcs: Dict[str, Dict[Tuple[str, ...], str]] = field(default_factory=dict)
    preds: Dict[str, Dict[Tuple[str, ...], TruthValue]] = field(default_factory=dict)

    def __post_init__(self):
        self.universe = tuple(self.universe)
        if not self.universe:
            raise UsageError("universe must be nonempty")
        if len(set(self.universe)) != len(self.universe):
            raise UsageError("duplicate universe elements")
        members = set(self.universe)
        for name, arity in self.signature.functions.items():
            table = self.funcs.get(name)
            if table is None:
                raise UsageError(f"missing table for function {name!r}")
            self._check_total(name, table, arity)
            for args, out in table.items():
                if out not in members:
                    raise UsageError(f"function {name!r} maps {args} outside the universe")
        for name, arity in self.signature.predicates.items():
            table = self.preds.get(name)
            if table is None:
                raise UsageError(f"missing table for predicate {name!r}")
            self._check_total(name, table, arity)
            for args, tv in table.items():
                if tv.kind == K_ELEM and tv.backend is not self.backend:
                    raise UsageError(
                        f"predicate {name!r} at {args} uses backend "
                        f"{tv.backend.name}, structure is {self.backend.name}"
                    )
        extra = set(self.funcs) - set(self.signature.functions)
        extra |= set(self.preds) - set(self.signature.predicates)
        if extra:
            raise UsageError(f"tables for undeclared symbols: {sorted(extra)}")

    def _check_total(self, name: str, table: Mapping, arity: int) -> None:
        expected = set(product(self.universe, repeat=arity))
        keys = set(table.keys())
        if keys != expected:
            missing = sorted(expected - keys)[:3]
            alien = sorted(keys - expected)[:3]
            detail = []
            if missing:
                detail.append(f"missing entries e.g. {missing}")
            if alien:
                detail.append(f"unknown entries e.g. {alien}")
            raise UsageError(f"table for {name!r} is not total: " + "; ".join(detail))

    def atomic_values(self) -> List[TruthValue]:
        """All truth values realized in predicate tables, deduplicated."""
        seen: List[TruthValue] = []
        for table in self.preds.values():
            for tv in table.values():
                if tv not in seen:
                    seen.append(tv)
        return seen


# ---------------------------------------------------------------------------
# Evaluation


def eval_term(t: Term, struct: Structure, env: Assignment) -> str:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UsageError(f"unbound variable {t.name!r}") from None
    if isinstance(t, App):
        args = tuple(eval_term(a, struct, env) for a in t.args)
        try:
            return struct.funcs[t.func][args]
        except KeyError:
            raise UsageError(f"no interpretation for {t.func!r} at {args}") from None
    raise UsageError(f"not a term: {t!r}")


def eval_formula(
    phi: Formula,
    struct: Structure,
    env: Optional[Assignment] = None,
    on_value: Optional[Callable[[TruthValue], None]] = None,
) -> TruthValue:
    """Exact truth value of phi in struct under env.

    ``on_value``, when given, is called with the value of every
    subformula under every assignment reached during evaluation; the
    classical-translation check uses it to collect witness values.
    """
    env = dict(env) if env else {}
    missing = free_vars(phi) - set(env)
    if missing:
        raise UsageError(f"unbound variables {sorted(missing)}")
    return _eval(phi, struct, env, on_value)


def _eval(phi, struct, env, sink) -> TruthValue:
    value = _eval_node(phi, struct, env, sink)
    if sink is not None:
        sink(value)
    return value


def _eval_node(phi, struct, env, sink) -> TruthValue:
    if isinstance(phi, Atom):
        args = tuple(eval_term(t, struct, env) for t in phi.args)
        try:
            return struct.preds[phi.pred][args]
        except KeyError:
            raise UsageError(
                f"structure has no interpretation for {phi.pred!r} at {args}"
            ) from None
    if isinstance(phi, Bot):
        return ZERO
    if isinstance(phi, One):
        return one(struct.backend)
    if isinstance(phi, Top):
        return INF
    if isinstance(phi, And):
        return tv_min(_eval(phi.left, struct, env, sink), _eval(phi.right, struct, env, sink))
    if isinstance(phi, Imp):
        return tv_resid(_eval(phi.left, struct, env, sink), _eval(phi.right, struct, env, sink))
    if isinstance(phi, Tensor):
        return tv_mul(
            _eval(phi.left, struct, env, sink),
            _eval(phi.right, struct, env, sink),
            struct.backend,
        )
    if isinstance(phi, Inv):
        return tv_inv(_eval(phi.body, struct, env, sink))
    if isinstance(phi, Forall):
        return _quantify(phi, struct, env, sink, tv_min)
    if isinstance(phi, Exists):
        return _quantify(phi, struct, env, sink, tv_max)
    if isinstance(phi, Or):
        return tv_max(_eval(phi.left, struct, env, sink), _eval(phi.right, struct, env, sink))
    if isinstance(phi, Not):
        return tv_resid(_eval(phi.body, struct, env, sink), ZERO)
    if isinstance(phi, Iff):
        return tv_dmin(_eval(phi.left, struct, env, sink), _eval(phi.right, struct, env, sink))
    if isinstance(phi, Power):
        return tv_power(_eval(phi.body, struct, env, sink), phi.n)
    if isinstance(phi, DArrow):
        a = _eval(phi.left, struct, env, sink)
        b = _eval(phi.right, struct, env, sink)
        if tv_compare(a, b) < 0 and not b.is_inf:
            return INF
        return b
    if isinstance(phi, DDArrow):
        a = _eval(phi.left, struct, env, sink)
        b = _eval(phi.right, struct, env, sink)
        cmp = tv_compare(a, b)
        if cmp < 0:
            return INF
        if cmp == 0 and a.is_inf:
            return ZERO
        return b
    if isinstance(phi, Delta):
        a = _eval(phi.body, struct, env, sink)
        return INF if a.is_inf else ZERO
    if isinstance(phi, LukImp):
        a = _eval(phi.left, struct, env, sink)
        b = _eval(phi.right, struct, env, sink)
        if tv_compare(a, b) <= 0:
            return INF
        return tv_mul(b, tv_inv(a), struct.backend)
    raise UsageError(f"not a formula: {phi!r}")


def _quantify(phi, struct, env, sink, combine) -> TruthValue:
    saved = env.get(phi.var)
    had = phi.var in env
    result = None
    for element in struct.universe:
        env[phi.var] = element
        v = _eval(phi.body, struct, env, sink)
        result = v if result is None else combine(result, v)
    if had:
        env[phi.var] = saved
    else:
        del env[phi.var]
    return result


# ---------------------------------------------------------------------------
# Satisfaction and entailment


def satisfies(struct: Structure, phi: Formula) -> bool:
    """True when the sentence evaluates to absolute truth."""
    if not is_sentence(phi):
        raise UsageError(f"not a sentence (free: {sorted(free_vars(phi))})")
    return eval_formula(phi, struct).is_inf


def models_theory(struct: Structure, theory: Iterable[Formula]) -> bool:
    return all(satisfies(struct, phi) for phi in theory)


def entails_over(
    pool: Sequence[Structure], theory: Sequence[Formula], chi: Formula
) -> bool:
    """Entailment relativized to a finite pool of structures.

    Checks that every pool member modeling the theory also models chi.
    This is a desk-scale surrogate; full entailment quantifies over all
    structures and is not decidable.
    """
    for struct in pool:
        if models_theory(struct, theory) and not satisfies(struct, chi):
            return False
    return True


# ---------------------------------------------------------------------------
# Similarity and ultrametric checks


def similarity_axioms(sig: Signature) -> List[Formula]:
    """Reflexivity, symmetry and min-transitivity for the equality surrogate."""
    e = sig.equality
    if e is None:
        raise UsageError("signature declares no equality predicate")
    x, y, z = Var("x"), Var("y"), Var("z")
    return [
        Forall("x", Atom(e, (x, x))),
        Forall("x", Forall("y", Imp(Atom(e, (x, y)), Atom(e, (y, x))))),
        Forall("x", Forall("y", Forall("z", Imp(
            And(Atom(e, (x, y)), Atom(e, (y, z))), Atom(e, (x, z)))))),
    ]


def check_similarity(struct: Structure) -> bool:
    """True when all three similarity axioms hold to value INF."""
    return all(satisfies(struct, ax) for ax in similarity_axioms(struct.signature))


@dataclass
class UltrametricReport:
    """Pointwise verdicts for d = e^-1 over all pairs and triples."""

    identity_violations: List[Tuple[str, str]]
    symmetry_violations: List[Tuple[str, str]]
    triangle_violations: List[Tuple[str, str, str]]

    @property
    def ok(self) -> bool:
        return not (self.identity_violations or self.symmetry_violations
                    or self.triangle_violations)

    @property
    def pseudo_ok(self) -> bool:
        """Pseudo-ultrametric: symmetry and strong triangle only."""
        return not (self.symmetry_violations or self.triangle_violations)


def check_ultrametric(struct: Structure) -> UltrametricReport:
    """Check the three d = e^-1 clauses pointwise and report violations."""
    e = struct.signature.equality
    if e is None:
        raise UsageError("signature declares no equality predicate")
    table = struct.preds[e]

    def d(a: str, b: str) -> TruthValue:
        return tv_inv(table[(a, b)])

    identity = []
    symmetry = []
    triangle = []
    for a in struct.universe:
        for b in struct.universe:
            if (d(a, b).is_zero) != (a == b):
                identity.append((a, b))
            if tv_compare(d(a, b), d(b, a)) != 0:
                symmetry.append((a, b))
    for a, b, c in product(struct.universe, repeat=3):
        if tv_compare(d(a, b), tv_max(d(a, c), d(b, c))) > 0:
            triangle.append((a, b, c))
    return UltrametricReport(identity, symmetry, triangle)


# ---------------------------------------------------------------------------
# Structure files

# Line-oriented format:
#   backend rat|lex2
#   universe m1 m2 ...
#   fn f m1 m2 -> m1         (one line per tuple; constants: fn c -> m1)
#   pred P m1 m2 = 3/2       (nullary: pred P = 3/2)


def load_structure(text: str, sig: Optional[Signature] = None) -> Structure:
    """Parse a structure file; infers the signature when none is given.

    Inference takes each symbol's arity from its table lines and marks a
    binary predicate named ``e`` as the equality surrogate.
    """
    backend: Optional[GroupBackend] = None
    universe: List[str] = []
    fn_lines: List[Tuple[int, str, Tuple[str, ...], str]] = []
    pred_lines: List[Tuple[int, str, Tuple[str, ...], str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "backend":
                backend = backend_by_name(parts[1])
            elif kind == "universe":
                universe = parts[1:]
            elif kind == "fn":
                if "->" not in parts:
                    raise UsageError("expected 'fn name args... -> value'")
                arrow = parts.index("->")
                if arrow < 2 or len(parts) != arrow + 2:
                    raise UsageError("expected 'fn name args... -> value'")
                fn_lines.append((lineno, parts[1], tuple(parts[2:arrow]), parts[arrow + 1]))
            elif kind == "pred":
                if "=" not in parts:
                    raise UsageError("expected 'pred name args... = value'")
                eq = parts.index("=")
                if eq < 2:
                    raise UsageError("expected 'pred name args... = value'")
                value_text = " ".join(parts[eq + 1:])
                pred_lines.append((lineno, parts[1], tuple(parts[2:eq]), value_text))
            else:
                raise UsageError(f"unrecognized line {line!r}")
        except (IndexError, UsageError) as exc:
            raise UsageError(f"structure line {lineno}: {exc}") from None
    if backend is None:
        raise UsageError("structure file missing 'backend' line")
    if not universe:
        raise UsageError("structure file missing 'universe' line")

    if sig is None:
        functions = {}
        predicates = {}
        for lineno, name, args, _ in fn_lines:
            functions.setdefault(name, len(args))
            if functions[name] != len(args):
                raise UsageError(f"structure line {lineno}: inconsistent arity for {name!r}")
        for lineno, name, args, _ in pred_lines:
            predicates.setdefault(name, len(args))
            if predicates[name] != len(args):
                raise UsageError(f"structure line {lineno}: inconsistent arity for {name!r}")
        equality = "e" if predicates.get("e") == 2 else None
        sig = Signature(functions, predicates, equality)

    funcs: Dict[str, Dict[Tuple[str, ...], str]] = {n: {} for n in sig.functions}
    preds: Dict[str, Dict[Tuple[str, ...], TruthValue]] = {n: {} for n in sig.predicates}
    for lineno, name, args, out in fn_lines:
        if name not in funcs:
            raise UsageError(f"structure line {lineno}: undeclared function {name!r}")
        if args in funcs[name]:
            raise UsageError(f"structure line {lineno}: duplicate entry for {name!r} {args}")
        funcs[name][args] = out
    for lineno, name, args, value_text in pred_lines:
        if name not in preds:
            raise UsageError(f"structure line {lineno}: undeclared predicate {name!r}")
        if args in preds[name]:
            raise UsageError(f"structure line {lineno}: duplicate entry for {name!r} {args}")
        try:
            preds[name][args] = parse_truth_value(value_text, backend)
        except UsageError as exc:
            raise UsageError(f"structure line {lineno}: {exc}") from None
    return Structure(sig, backend, tuple(universe), funcs, preds)


def dump_structure(struct: Structure) -> str:
    lines = [f"backend {struct.backend.name}", "universe " + " ".join(struct.universe)]
    for name in sorted(struct.funcs):
        for args in sorted(struct.funcs[name]):
            head = " ".join((name,) + args)
            lines.append(f"fn {head} -> {struct.funcs[name][args]}")
    for name in sorted(struct.preds):
        for args in sorted(struct.preds[name]):
            head = " ".join((name,) + args)
            lines.append(f"pred {head} = {format_truth_value(struct.preds[name][args])}")
    return "\n".join(lines) + "\n"
