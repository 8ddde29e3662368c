"""Two-sorted classical companions of finite structures.

Every structure M over a group G has a classical first-order companion
with an object sort (the universe of M) and a value sort (a finite
slice of the truth-value carrier).  Relation symbols become graphs
R(a..., g) holding exactly when the source table assigns g; the value
sort carries the order, the product, the inverse and the constants
0, 1, inf.  Every formula phi translates to a classical formula
phi_G(g) with one distinguished value variable such that

    M satisfies phi  iff  the companion satisfies  exists g (phi_G(g) and g = inf)

``check_translation`` machine-checks that equivalence instance by
instance.  The companion's value sort must contain every witness the
equivalence needs, i.e. the value of every subformula of phi under
every assignment; ``check_translation`` collects that exact set through
an evaluator hook and seeds the sort with it, so the check never
reports a wrong answer.  When a caller forces a fixed closure depth
instead, a missing witness raises ClosureExhausted rather than
returning an unsound verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Set, Tuple, Union

from .errors import ClosureExhausted, ResourceLimitError, UsageError
from .semantics import Structure, eval_formula
from .syntax import (
    And, App, Atom, Bot, Exists, Forall, Formula, Imp, Inv, One, Tensor, Term,
    Top, Var, expand_derived, free_vars, is_core, is_sentence,
)
from .values import INF, ZERO, TruthValue, one, tv_compare, tv_inv, tv_mul

# ---------------------------------------------------------------------------
# Classical (two-sorted) formulas

# Value-sort terms


@dataclass(frozen=True)
class VVar:
    name: str


@dataclass(frozen=True)
class VConst:
    which: str  # "0" | "1" | "inf"


@dataclass(frozen=True)
class VMul:
    left: "ValueTerm"
    right: "ValueTerm"


@dataclass(frozen=True)
class VInv:
    arg: "ValueTerm"


ValueTerm = Union[VVar, VConst, VMul, VInv]


@dataclass(frozen=True)
class CRel:
    """Graph atom R(args..., value): the table of R maps args to value."""

    pred: str
    args: Tuple[Term, ...]
    value: ValueTerm


@dataclass(frozen=True)
class CLe:
    left: ValueTerm
    right: ValueTerm


@dataclass(frozen=True)
class CEqV:
    left: ValueTerm
    right: ValueTerm


@dataclass(frozen=True)
class CEqO:
    left: Term
    right: Term


@dataclass(frozen=True)
class CAnd:
    left: "ClassicalFormula"
    right: "ClassicalFormula"


@dataclass(frozen=True)
class COr:
    left: "ClassicalFormula"
    right: "ClassicalFormula"


@dataclass(frozen=True)
class CImp:
    left: "ClassicalFormula"
    right: "ClassicalFormula"


@dataclass(frozen=True)
class CNot:
    body: "ClassicalFormula"


@dataclass(frozen=True)
class CForallObj:
    var: str
    body: "ClassicalFormula"


@dataclass(frozen=True)
class CExistsObj:
    var: str
    body: "ClassicalFormula"


@dataclass(frozen=True)
class CForallVal:
    var: str
    body: "ClassicalFormula"


@dataclass(frozen=True)
class CExistsVal:
    var: str
    body: "ClassicalFormula"


ClassicalFormula = Union[
    CRel, CLe, CEqV, CEqO, CAnd, COr, CImp, CNot,
    CForallObj, CExistsObj, CForallVal, CExistsVal,
]


def _conj(parts: Sequence[ClassicalFormula]) -> ClassicalFormula:
    out = parts[0]
    for p in parts[1:]:
        out = CAnd(out, p)
    return out


# ---------------------------------------------------------------------------
# Translation


@dataclass
class Translation:
    """A classical formula with its distinguished free value variable."""

    formula: ClassicalFormula
    value_var: str


def translate(phi: Formula) -> Translation:
    """Translate a core-only formula into its classical companion form.

    The result has the object free variables of phi plus one free value
    variable naming the truth value of phi.  Value variables are
    allocated per subformula, so they never collide: the variable of a
    node is bound strictly inside its parent's clause.
    """
    if not is_core(phi):
        raise UsageError("translate requires a core-only formula; run expand_derived first")
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"g{counter[0]}"

    def go(node: Formula, g: str) -> ClassicalFormula:
        if isinstance(node, Bot):
            return CEqV(VVar(g), VConst("0"))
        if isinstance(node, Top):
            return CEqV(VVar(g), VConst("inf"))
        if isinstance(node, One):
            return CEqV(VVar(g), VConst("1"))
        if isinstance(node, Atom):
            return CRel(node.pred, node.args, VVar(g))
        if isinstance(node, And):
            g1, g2 = fresh(), fresh()
            inner = _conj([
                go(node.left, g1),
                go(node.right, g2),
                CImp(CLe(VVar(g1), VVar(g2)), CEqV(VVar(g), VVar(g1))),
                CImp(CLe(VVar(g2), VVar(g1)), CEqV(VVar(g), VVar(g2))),
            ])
            return CExistsVal(g1, CExistsVal(g2, inner))
        if isinstance(node, Imp):
            g1, g2 = fresh(), fresh()
            inner = _conj([
                go(node.left, g1),
                go(node.right, g2),
                CImp(CLe(VVar(g1), VVar(g2)), CEqV(VVar(g), VConst("inf"))),
                CImp(CNot(CLe(VVar(g1), VVar(g2))), CEqV(VVar(g), VVar(g2))),
            ])
            return CExistsVal(g1, CExistsVal(g2, inner))
        if isinstance(node, Tensor):
            g1, g2 = fresh(), fresh()
            inner = _conj([
                go(node.left, g1),
                go(node.right, g2),
                CEqV(VVar(g), VMul(VVar(g1), VVar(g2))),
            ])
            return CExistsVal(g1, CExistsVal(g2, inner))
        if isinstance(node, Inv):
            g1 = fresh()
            return CExistsVal(g1, CAnd(go(node.body, g1), CEqV(VVar(g), VInv(VVar(g1)))))
        if isinstance(node, (Forall, Exists)):
            g1, g2 = fresh(), fresh()
            a = node.var
            body = go(node.body, g1)  # shared by both clauses below
            if isinstance(node, Forall):
                bound = CForallObj(a, CForallVal(g1, CImp(body, CLe(VVar(g), VVar(g1)))))
                approx = CForallVal(g2, CImp(
                    CLe(VVar(g), VVar(g2)),
                    CExistsObj(a, CExistsVal(g1, CAnd(body, CLe(VVar(g1), VVar(g2))))),
                ))
            else:
                bound = CForallObj(a, CForallVal(g1, CImp(body, CLe(VVar(g1), VVar(g)))))
                approx = CForallVal(g2, CImp(
                    CLe(VVar(g2), VVar(g)),
                    CExistsObj(a, CExistsVal(g1, CAnd(body, CLe(VVar(g2), VVar(g1))))),
                ))
            return CAnd(bound, approx)
        raise UsageError(f"not a core formula node: {node!r}")

    g0 = "g"
    return Translation(go(phi, g0), g0)


def holds_sentence(trans: Translation) -> ClassicalFormula:
    """exists g (phi_G(g) and g = inf): the satisfaction form of a translation."""
    g = trans.value_var
    return CExistsVal(g, CAnd(trans.formula, CEqV(VVar(g), VConst("inf"))))


# ---------------------------------------------------------------------------
# Classical structures


@dataclass
class ClassicalStructure:
    """Finite two-sorted companion: object sort, value sort, graphs.

    ``values`` is sorted ascending and always contains 0, 1 and inf.
    Graphs are stored functionally (args -> value), which both enforces
    and witnesses their functionality.
    """

    backend: object
    objects: Tuple[str, ...]
    values: Tuple[TruthValue, ...]
    relations: Dict[str, Dict[Tuple[str, ...], TruthValue]]
    funcs: Dict[str, Dict[Tuple[str, ...], str]]

    def constant(self, which: str) -> TruthValue:
        if which == "0":
            return ZERO
        if which == "inf":
            return INF
        if which == "1":
            return one(self.backend)
        raise UsageError(f"unknown value constant {which!r}")


def to_classical(
    struct: Structure,
    closure_depth: int = 2,
    extra_values: Iterable[TruthValue] = (),
    max_values: int = 5000,
) -> ClassicalStructure:
    """Materialize the companion of a finite structure.

    The value sort is the set of truth values realized in the tables,
    plus 0, 1, inf and ``extra_values``, closed under product and
    inverse to ``closure_depth`` rounds.  Exceeding ``max_values``
    raises a resource error rather than silently truncating.
    """
    values: Set[TruthValue] = {ZERO, one(struct.backend), INF}
    values.update(struct.atomic_values())
    values.update(extra_values)
    for _ in range(closure_depth):
        new: Set[TruthValue] = set()
        current = list(values)
        for a in current:
            inv = tv_inv(a)
            if inv not in values:
                new.add(inv)
        for a in current:
            for b in current:
                p = tv_mul(a, b, struct.backend)
                if p not in values:
                    new.add(p)
                if len(values) + len(new) > max_values:
                    raise ResourceLimitError(
                        f"value-sort closure exceeds {max_values} elements"
                    )
        if not new:
            break
        values |= new
    ordered = tuple(sorted(values, key=_sort_key))
    return ClassicalStructure(
        backend=struct.backend,
        objects=struct.universe,
        values=ordered,
        relations={name: dict(table) for name, table in struct.preds.items()},
        funcs={name: dict(table) for name, table in struct.funcs.items()},
    )


def _sort_key(tv: TruthValue):
    return (tv.kind, tv.payload if tv.kind == 1 else 0)


# ---------------------------------------------------------------------------
# Classical evaluation (two-valued Tarskian semantics)


class _ClassicalEvaluator:
    """Evaluator with per-call memoization keyed on (node, free-var values).

    Translations share subtrees, so memoizing on object identity plus
    the projection of the assignment onto the node's free variables
    turns the naive exponential evaluation into one pass per node and
    assignment.
    """

    def __init__(self, companion: ClassicalStructure):
        self.c = companion
        self.memo: Dict[Tuple[int, Tuple], bool] = {}
        self.fv_cache: Dict[int, Tuple[str, ...]] = {}

    # free variables (both sorts) of a classical node, cached by identity
    def free(self, node) -> Tuple[str, ...]:
        key = id(node)
        got = self.fv_cache.get(key)
        if got is not None:
            return got
        if isinstance(node, CRel):
            names: Set[str] = set()
            for t in node.args:
                names |= _obj_term_vars(t)
            names |= _val_term_vars(node.value)
        elif isinstance(node, (CLe, CEqV)):
            names = _val_term_vars(node.left) | _val_term_vars(node.right)
        elif isinstance(node, CEqO):
            names = _obj_term_vars(node.left) | _obj_term_vars(node.right)
        elif isinstance(node, (CAnd, COr, CImp)):
            names = set(self.free(node.left)) | set(self.free(node.right))
        elif isinstance(node, CNot):
            names = set(self.free(node.body))
        elif isinstance(node, (CForallObj, CExistsObj, CForallVal, CExistsVal)):
            names = set(self.free(node.body)) - {node.var}
        else:
            raise UsageError(f"not a classical formula: {node!r}")
        result = tuple(sorted(names))
        self.fv_cache[key] = result
        return result

    def eval(self, node, env: Dict[str, object]) -> bool:
        key = (id(node), tuple(env[v] for v in self.free(node)))
        got = self.memo.get(key)
        if got is not None:
            return got
        result = self._eval(node, env)
        self.memo[key] = result
        return result

    def _eval(self, node, env) -> bool:
        if isinstance(node, CRel):
            args = tuple(self._obj_term(t, env) for t in node.args)
            value = self._val_term(node.value, env)
            table = self.c.relations.get(node.pred)
            if table is None or args not in table:
                raise UsageError(f"no graph entry for {node.pred!r} at {args}")
            return table[args] == value
        if isinstance(node, CLe):
            return tv_compare(self._val_term(node.left, env),
                              self._val_term(node.right, env)) <= 0
        if isinstance(node, CEqV):
            return self._val_term(node.left, env) == self._val_term(node.right, env)
        if isinstance(node, CEqO):
            return self._obj_term(node.left, env) == self._obj_term(node.right, env)
        if isinstance(node, CAnd):
            return self.eval(node.left, env) and self.eval(node.right, env)
        if isinstance(node, COr):
            return self.eval(node.left, env) or self.eval(node.right, env)
        if isinstance(node, CImp):
            return (not self.eval(node.left, env)) or self.eval(node.right, env)
        if isinstance(node, CNot):
            return not self.eval(node.body, env)
        if isinstance(node, (CForallObj, CExistsObj)):
            domain: Sequence = self.c.objects
            want_all = isinstance(node, CForallObj)
        elif isinstance(node, (CForallVal, CExistsVal)):
            domain = self.c.values
            want_all = isinstance(node, CForallVal)
        else:
            raise UsageError(f"not a classical formula: {node!r}")
        saved = env.get(node.var)
        had = node.var in env
        try:
            for item in domain:
                env[node.var] = item
                truth = self.eval(node.body, env)
                if want_all and not truth:
                    return False
                if not want_all and truth:
                    return True
            return want_all
        finally:
            if had:
                env[node.var] = saved
            else:
                env.pop(node.var, None)

    def _obj_term(self, t: Term, env) -> str:
        if isinstance(t, Var):
            try:
                v = env[t.name]
            except KeyError:
                raise UsageError(f"unbound object variable {t.name!r}") from None
            if not isinstance(v, str):
                raise UsageError(f"sort violation: {t.name!r} holds a value-sort item")
            return v
        if isinstance(t, App):
            args = tuple(self._obj_term(a, env) for a in t.args)
            try:
                return self.c.funcs[t.func][args]
            except KeyError:
                raise UsageError(f"no interpretation for {t.func!r} at {args}") from None
        raise UsageError(f"not an object term: {t!r}")

    def _val_term(self, t: ValueTerm, env) -> TruthValue:
        if isinstance(t, VVar):
            try:
                v = env[t.name]
            except KeyError:
                raise UsageError(f"unbound value variable {t.name!r}") from None
            if not isinstance(v, TruthValue):
                raise UsageError(f"sort violation: {t.name!r} holds an object-sort item")
            return v
        if isinstance(t, VConst):
            return self.c.constant(t.which)
        if isinstance(t, VMul):
            return tv_mul(self._val_term(t.left, env), self._val_term(t.right, env),
                          self.c.backend)
        if isinstance(t, VInv):
            return tv_inv(self._val_term(t.arg, env))
        raise UsageError(f"not a value term: {t!r}")


def _obj_term_vars(t: Term) -> Set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: Set[str] = set()
    for a in t.args:
        out |= _obj_term_vars(a)
    return out


def _val_term_vars(t: ValueTerm) -> Set[str]:
    if isinstance(t, VVar):
        return {t.name}
    if isinstance(t, VConst):
        return set()
    if isinstance(t, VMul):
        return _val_term_vars(t.left) | _val_term_vars(t.right)
    return _val_term_vars(t.arg)


def eval_classical(
    psi: ClassicalFormula,
    companion: ClassicalStructure,
    env: Optional[Dict[str, object]] = None,
) -> bool:
    """Two-valued satisfaction; value quantifiers range over the finite sort."""
    evaluator = _ClassicalEvaluator(companion)
    scope = dict(env) if env else {}
    missing = set(evaluator.free(psi)) - set(scope)
    if missing:
        raise UsageError(f"unbound variables {sorted(missing)}")
    return evaluator.eval(psi, scope)


# ---------------------------------------------------------------------------
# The equivalence check


def check_translation(
    phi: Formula,
    struct: Structure,
    closure_depth: Optional[int] = None,
    max_values: int = 5000,
) -> bool:
    """Machine-check the translation equivalence for one sentence.

    Returns whether direct satisfaction and classical satisfaction of
    the translated sentence agree.  With the default witness-seeded
    value sort the verdict is always meaningful; with an explicit
    ``closure_depth`` a value sort too shallow for the needed witnesses
    raises ClosureExhausted instead of producing a wrong answer.
    """
    if not is_sentence(phi):
        raise UsageError(f"not a sentence (free: {sorted(free_vars(phi))})")
    core = _ensure_core(phi)
    needed: Set[TruthValue] = set()
    value = eval_formula(core, struct, on_value=needed.add)
    direct = value.is_inf

    if closure_depth is None:
        companion = to_classical(struct, closure_depth=0, extra_values=needed,
                                 max_values=max_values)
    else:
        companion = to_classical(struct, closure_depth=closure_depth,
                                 max_values=max_values)
        missing = needed - set(companion.values)
        if missing:
            shown = sorted(missing, key=_sort_key)[:3]
            raise ClosureExhausted(
                f"value sort (closure depth {closure_depth}) lacks "
                f"{len(missing)} needed witness value(s), e.g. {shown}"
            )
    classical = eval_classical(holds_sentence(translate(core)), companion)
    return direct == classical


def _ensure_core(phi: Formula) -> Formula:
    return phi if is_core(phi) else expand_derived(phi)


# ---------------------------------------------------------------------------
# Text form (parenthesized prefix, emitted by the CLI)


def print_value_term(t: ValueTerm) -> str:
    if isinstance(t, VVar):
        return t.name
    if isinstance(t, VConst):
        return t.which
    if isinstance(t, VMul):
        return f"(mul {print_value_term(t.left)} {print_value_term(t.right)})"
    return f"(inv {print_value_term(t.arg)})"


def _print_obj_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.func
    return f"({t.func} {' '.join(_print_obj_term(a) for a in t.args)})"


def print_classical(psi: ClassicalFormula) -> str:
    """Parenthesized prefix form, one token per operator.

    Grammar: (rel P a... g) | (le s t) | (eqv s t) | (eqo s t)
           | (and A B) | (or A B) | (imp A B) | (not A)
           | (forall-obj x A) | (exists-obj x A)
           | (forall-val g A) | (exists-val g A)
    with value terms  g | 0 | 1 | inf | (mul s t) | (inv s).
    """
    if isinstance(psi, CRel):
        parts = [psi.pred] + [_print_obj_term(t) for t in psi.args]
        parts.append(print_value_term(psi.value))
        return "(rel " + " ".join(parts) + ")"
    if isinstance(psi, CLe):
        return f"(le {print_value_term(psi.left)} {print_value_term(psi.right)})"
    if isinstance(psi, CEqV):
        return f"(eqv {print_value_term(psi.left)} {print_value_term(psi.right)})"
    if isinstance(psi, CEqO):
        return f"(eqo {_print_obj_term(psi.left)} {_print_obj_term(psi.right)})"
    if isinstance(psi, CAnd):
        return f"(and {print_classical(psi.left)} {print_classical(psi.right)})"
    if isinstance(psi, COr):
        return f"(or {print_classical(psi.left)} {print_classical(psi.right)})"
    if isinstance(psi, CImp):
        return f"(imp {print_classical(psi.left)} {print_classical(psi.right)})"
    if isinstance(psi, CNot):
        return f"(not {print_classical(psi.body)})"
    if isinstance(psi, CForallObj):
        return f"(forall-obj {psi.var} {print_classical(psi.body)})"
    if isinstance(psi, CExistsObj):
        return f"(exists-obj {psi.var} {print_classical(psi.body)})"
    if isinstance(psi, CForallVal):
        return f"(forall-val {psi.var} {print_classical(psi.body)})"
    if isinstance(psi, CExistsVal):
        return f"(exists-val {psi.var} {print_classical(psi.body)})"
    raise UsageError(f"not a classical formula: {psi!r}")
