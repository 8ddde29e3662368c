"""Signatures, terms and formulas, with a concrete text grammar.

Connectives
-----------
Core: bot, one, atoms, /\\ (meet), -> (residuated implication),
* (group product), ^-1 (inverse), forall, exists.

Derived (first-class AST nodes, expandable to core on demand):
top, \\/ , ~ (negation), <->, ^n (n-th power), => , ==> , delta(.),
->l (shifted implication).  The definitions are:

    phi^1        = phi                 phi^n = phi^(n-1) * phi
    phi \\/ psi  = ((phi->psi)->psi) /\\ ((psi->phi)->phi)
    ~phi         = phi -> bot
    phi <-> psi  = (phi->psi) /\\ (psi->phi)
    top          = ~bot
    phi => psi   = (psi->phi) -> psi
    phi ==> psi  = ((phi=>psi) /\\ ~~psi^-1) \\/ (psi /\\ ~~phi^-1)
    delta(phi)   = ~(phi ==> top)
    phi ->l psi  = one -> (psi * phi^-1)

Precedence, tightest first: postfix ^-1 and ^n, prefix ~, *, /\\, \\/,
-> and ->l (right associative), <-> => ==> (right associative),
quantifiers loosest (the body extends as far right as possible).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

from .errors import ArityError, FormulaSyntaxError, ParseError, UnknownSymbolError, UsageError

# ---------------------------------------------------------------------------
# Signatures


@dataclass
class Signature:
    """Function and predicate symbols with fixed arities.

    ``equality`` optionally names a distinguished binary predicate that
    plays the role of the equality relation (conventionally ``e``).
    """

    functions: Dict[str, int] = field(default_factory=dict)
    predicates: Dict[str, int] = field(default_factory=dict)
    equality: Optional[str] = None

    def __post_init__(self):
        overlap = set(self.functions) & set(self.predicates)
        if overlap:
            raise UsageError(f"symbols declared both as function and predicate: {sorted(overlap)}")
        for name, arity in list(self.functions.items()) + list(self.predicates.items()):
            if arity < 0:
                raise UsageError(f"negative arity for {name}")
            if not _IDENT_RE.fullmatch(name) or name in KEYWORDS:
                raise UsageError(f"bad symbol name {name!r}")
        if self.equality is not None:
            if self.predicates.get(self.equality) != 2:
                raise UsageError(
                    f"equality predicate {self.equality!r} must be declared with arity 2"
                )

    def constants(self) -> List[str]:
        return sorted(n for n, a in self.functions.items() if a == 0)

    def with_constants(self, names: Iterable[str]) -> "Signature":
        funcs = dict(self.functions)
        for n in names:
            if n in funcs and funcs[n] != 0:
                raise UsageError(f"cannot add constant {n!r}: already a function of arity {funcs[n]}")
            if n in self.predicates:
                raise UsageError(f"cannot add constant {n!r}: already a predicate")
            funcs[n] = 0
        return Signature(funcs, dict(self.predicates), self.equality)


def parse_signature(text: str) -> Signature:
    """Line format: ``fn name/arity``, ``pred name/arity``, ``equality name``."""
    functions: Dict[str, int] = {}
    predicates: Dict[str, int] = {}
    equality = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] in ("fn", "pred") and len(parts) == 2 and "/" in parts[1]:
                name, arity_text = parts[1].rsplit("/", 1)
                arity = int(arity_text)
                table = functions if parts[0] == "fn" else predicates
                if name in functions or name in predicates:
                    raise UsageError(f"duplicate symbol {name!r}")
                table[name] = arity
            elif parts[0] == "equality" and len(parts) == 2:
                equality = parts[1]
            else:
                raise UsageError(f"unrecognized declaration {line!r}")
        except (ValueError, UsageError) as exc:
            raise UsageError(f"signature line {lineno}: {exc}") from None
    return Signature(functions, predicates, equality)


def format_signature(sig: Signature) -> str:
    lines = [f"fn {n}/{a}" for n, a in sorted(sig.functions.items())]
    lines += [f"pred {n}/{a}" for n, a in sorted(sig.predicates.items())]
    if sig.equality:
        lines.append(f"equality {sig.equality}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    func: str
    args: Tuple["Term", ...] = ()


Term = Union[Var, App]


def const(name: str) -> App:
    return App(name, ())


def term_vars(t: Term) -> Set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: Set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[Term, ...] = ()


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Inv:
    body: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Power:
    body: "Formula"
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise UsageError(f"power exponent must be >= 1, got {self.n}")


@dataclass(frozen=True)
class DArrow:
    """The => connective: INF when left < right < INF, otherwise right."""

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class DDArrow:
    """The ==> connective: asserts strict order between the sides."""

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Delta:
    """Crispness projection: INF when the body is INF, otherwise ZERO."""

    body: "Formula"


@dataclass(frozen=True)
class LukImp:
    """The ->l connective: INF when left <= right, else right * left^-1."""

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[
    Bot, One, Top, Atom, And, Imp, Tensor, Inv, Or, Not, Iff, Power,
    DArrow, DDArrow, Delta, LukImp, Forall, Exists,
]

CORE_NODES = (Bot, One, Atom, And, Imp, Tensor, Inv, Forall, Exists)
BINARY_NODES = (And, Imp, Tensor, Or, Iff, DArrow, DDArrow, LukImp)


def is_core(phi: Formula) -> bool:
    """True when no derived node occurs anywhere in the formula."""
    if isinstance(phi, (Bot, One, Atom)):
        return True
    if isinstance(phi, (And, Imp, Tensor)):
        return is_core(phi.left) and is_core(phi.right)
    if isinstance(phi, Inv):
        return is_core(phi.body)
    if isinstance(phi, (Forall, Exists)):
        return is_core(phi.body)
    return False


def subformulas(phi: Formula):
    """Yield phi and all its subformulas, prefix order."""
    yield phi
    if isinstance(phi, BINARY_NODES):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif isinstance(phi, (Inv, Not, Delta, Power)):
        yield from subformulas(phi.body)
    elif isinstance(phi, (Forall, Exists)):
        yield from subformulas(phi.body)


def formula_depth(phi: Formula) -> int:
    """Connective nesting depth; atoms and constants are depth 0."""
    if isinstance(phi, (Bot, One, Top, Atom)):
        return 0
    if isinstance(phi, BINARY_NODES):
        return 1 + max(formula_depth(phi.left), formula_depth(phi.right))
    if isinstance(phi, (Inv, Not, Delta, Power, Forall, Exists)):
        return 1 + formula_depth(phi.body)
    raise UsageError(f"not a formula: {phi!r}")


def quantifier_depth(phi: Formula) -> int:
    if isinstance(phi, (Bot, One, Top, Atom)):
        return 0
    if isinstance(phi, BINARY_NODES):
        return max(quantifier_depth(phi.left), quantifier_depth(phi.right))
    if isinstance(phi, (Inv, Not, Delta, Power)):
        return quantifier_depth(phi.body)
    return 1 + quantifier_depth(phi.body)


# ---------------------------------------------------------------------------
# Derived-connective expansion


def expand_derived(phi: Formula) -> Formula:
    """Rewrite every derived node by its definition; the result is core-only.

    Expansion is purely syntactic and idempotent; the evaluator uses the
    case tables directly, and the test suite checks the two agree.
    """
    if isinstance(phi, (Bot, One)):
        return phi
    if isinstance(phi, Atom):
        return phi
    if isinstance(phi, And):
        return And(expand_derived(phi.left), expand_derived(phi.right))
    if isinstance(phi, Imp):
        return Imp(expand_derived(phi.left), expand_derived(phi.right))
    if isinstance(phi, Tensor):
        return Tensor(expand_derived(phi.left), expand_derived(phi.right))
    if isinstance(phi, Inv):
        return Inv(expand_derived(phi.body))
    if isinstance(phi, Forall):
        return Forall(phi.var, expand_derived(phi.body))
    if isinstance(phi, Exists):
        return Exists(phi.var, expand_derived(phi.body))
    if isinstance(phi, Top):
        return expand_derived(Not(Bot()))
    if isinstance(phi, Not):
        return expand_derived(Imp(phi.body, Bot()))
    if isinstance(phi, Or):
        l, r = phi.left, phi.right
        return expand_derived(And(Imp(Imp(l, r), r), Imp(Imp(r, l), l)))
    if isinstance(phi, Iff):
        l, r = phi.left, phi.right
        return expand_derived(And(Imp(l, r), Imp(r, l)))
    if isinstance(phi, Power):
        if phi.n == 1:
            return expand_derived(phi.body)
        return expand_derived(Tensor(Power(phi.body, phi.n - 1), phi.body))
    if isinstance(phi, DArrow):
        l, r = phi.left, phi.right
        return expand_derived(Imp(Imp(r, l), r))
    if isinstance(phi, DDArrow):
        l, r = phi.left, phi.right
        return expand_derived(
            Or(And(DArrow(l, r), Not(Not(Inv(r)))), And(r, Not(Not(Inv(l)))))
        )
    if isinstance(phi, Delta):
        return expand_derived(Not(DDArrow(phi.body, Top())))
    if isinstance(phi, LukImp):
        l, r = phi.left, phi.right
        return expand_derived(Imp(One(), Tensor(r, Inv(l))))
    raise UsageError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Free variables and substitution


def free_vars(phi: Formula) -> Set[str]:
    if isinstance(phi, (Bot, One, Top)):
        return set()
    if isinstance(phi, Atom):
        out: Set[str] = set()
        for t in phi.args:
            out |= term_vars(t)
        return out
    if isinstance(phi, BINARY_NODES):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Inv, Not, Delta, Power)):
        return free_vars(phi.body)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - {phi.var}
    raise UsageError(f"not a formula: {phi!r}")


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def _fresh(base: str, taken: Set[str]) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def substitute_term(t: Term, x: str, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.name == x else t
    return App(t.func, tuple(substitute_term(a, x, s) for a in t.args))


def substitute(phi: Formula, x: str, s: Term) -> Formula:
    """Capture-avoiding substitution of term s for free occurrences of x."""
    if isinstance(phi, (Bot, One, Top)):
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(substitute_term(a, x, s) for a in phi.args))
    if isinstance(phi, BINARY_NODES):
        return type(phi)(substitute(phi.left, x, s), substitute(phi.right, x, s))
    if isinstance(phi, Power):
        return Power(substitute(phi.body, x, s), phi.n)
    if isinstance(phi, (Inv, Not, Delta)):
        return type(phi)(substitute(phi.body, x, s))
    if isinstance(phi, (Forall, Exists)):
        if phi.var == x:
            return phi
        if phi.var in term_vars(s) and x in free_vars(phi.body):
            taken = free_vars(phi.body) | term_vars(s) | {x}
            fresh = _fresh(phi.var, taken)
            body = substitute(phi.body, phi.var, Var(fresh))
            return type(phi)(fresh, substitute(body, x, s))
        return type(phi)(phi.var, substitute(phi.body, x, s))
    raise UsageError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Tokenizer

KEYWORDS = {"bot", "one", "top", "forall", "exists", "delta"}

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")

_TOKEN_RE = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<OP>==>|<->|->l|->|=>|\^-1|/\\|\\/|[*~().,^])
  | (?P<INT>\d+)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # OP | INT | IDENT | EOF
    text: str
    line: int
    column: int
    offset: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(
                f"unexpected character {text[pos]!r}",
                line, pos - line_start + 1, pos,
            )
        kind = m.lastgroup
        value = m.group()
        if kind == "WS":
            line += value.count("\n")
            if "\n" in value:
                line_start = m.start() + value.rfind("\n") + 1
        else:
            tokens.append(Token(kind, value, line, m.start() - line_start + 1, m.start()))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1, pos))
    return tokens


# ---------------------------------------------------------------------------
# Parser (recursive descent over the precedence levels)


class _Parser:
    def __init__(self, tokens: List[Token], sig: Signature):
        self.tokens = tokens
        self.sig = sig
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None, cls=FormulaSyntaxError):
        tok = tok or self.peek()
        raise cls(message, tok.line, tok.column, tok.offset)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            shown = tok.text or "end of input"
            self.error(f"expected {text!r}, found {shown!r}")
        return self.advance()

    # formula := quantified | iff_level
    def formula(self) -> Formula:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text in ("forall", "exists"):
            return self.quantified()
        return self.iff_level()

    def quantified(self) -> Formula:
        tok = self.advance()
        var_tok = self.peek()
        if var_tok.kind != "IDENT" or var_tok.text in KEYWORDS:
            self.error("expected a variable name after quantifier")
        if var_tok.text in self.sig.functions or var_tok.text in self.sig.predicates:
            self.error(
                f"{var_tok.text!r} is a declared symbol and cannot be a bound variable",
                var_tok, cls=UnknownSymbolError,
            )
        self.advance()
        self.expect(".")
        body = self.formula()
        node = Forall if tok.text == "forall" else Exists
        return node(var_tok.text, body)

    def iff_level(self) -> Formula:
        left = self.arrow_level()
        tok = self.peek()
        if tok.text in ("<->", "=>", "==>"):
            self.advance()
            right = self.iff_level()  # right associative
            return {"<->": Iff, "=>": DArrow, "==>": DDArrow}[tok.text](left, right)
        return left

    def arrow_level(self) -> Formula:
        left = self.or_level()
        tok = self.peek()
        if tok.text in ("->", "->l"):
            self.advance()
            right = self.arrow_level()  # right associative
            return (Imp if tok.text == "->" else LukImp)(left, right)
        return left

    def or_level(self) -> Formula:
        node = self.and_level()
        while self.peek().text == "\\/":
            self.advance()
            node = Or(node, self.and_level())
        return node

    def and_level(self) -> Formula:
        node = self.tensor_level()
        while self.peek().text == "/\\":
            self.advance()
            node = And(node, self.tensor_level())
        return node

    def tensor_level(self) -> Formula:
        node = self.unary()
        while self.peek().text == "*":
            self.advance()
            node = Tensor(node, self.unary())
        return node

    def unary(self) -> Formula:
        if self.peek().text == "~":
            self.advance()
            return Not(self.unary())
        return self.postfix()

    def postfix(self) -> Formula:
        node = self.primary()
        while True:
            tok = self.peek()
            if tok.text == "^-1":
                self.advance()
                node = Inv(node)
            elif tok.text == "^":
                self.advance()
                num = self.peek()
                if num.kind != "INT":
                    self.error("expected an integer exponent after '^'")
                n = int(num.text)
                if n < 1:
                    self.error("power exponent must be >= 1")
                self.advance()
                node = Power(node, n)
            else:
                return node

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.text == "(":
            self.advance()
            node = self.formula()
            self.expect(")")
            return node
        if tok.kind == "IDENT":
            if tok.text == "bot":
                self.advance()
                return Bot()
            if tok.text == "one":
                self.advance()
                return One()
            if tok.text == "top":
                self.advance()
                return Top()
            if tok.text == "delta":
                self.advance()
                self.expect("(")
                body = self.formula()
                self.expect(")")
                return Delta(body)
            if tok.text in ("forall", "exists"):
                return self.quantified()
            return self.atom()
        shown = tok.text or "end of input"
        self.error(f"expected a formula, found {shown!r}")

    def atom(self) -> Formula:
        tok = self.advance()
        name = tok.text
        if name not in self.sig.predicates:
            self.error(f"unknown predicate {name!r}", tok, cls=UnknownSymbolError)
        arity = self.sig.predicates[name]
        if arity == 0:
            if self.peek().text == "(":
                self.error(f"nullary predicate {name!r} takes no argument list", tok, cls=ArityError)
            return Atom(name, ())
        self.expect("(")
        args = [self.term()]
        while self.peek().text == ",":
            self.advance()
            args.append(self.term())
        self.expect(")")
        if len(args) != arity:
            self.error(f"predicate {name!r} expects {arity} arguments, got {len(args)}", tok, cls=ArityError)
        return Atom(name, tuple(args))

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.text in KEYWORDS:
            shown = tok.text or "end of input"
            self.error(f"expected a term, found {shown!r}")
        self.advance()
        name = tok.text
        if name in self.sig.predicates:
            self.error(f"predicate {name!r} used as a term", tok, cls=UnknownSymbolError)
        if name in self.sig.functions:
            arity = self.sig.functions[name]
            if arity == 0:
                return App(name, ())
            self.expect("(")
            args = [self.term()]
            while self.peek().text == ",":
                self.advance()
                args.append(self.term())
            self.expect(")")
            if len(args) != arity:
                self.error(f"function {name!r} expects {arity} arguments, got {len(args)}", tok, cls=ArityError)
            return App(name, tuple(args))
        return Var(name)


def parse(text: str, sig: Signature) -> Formula:
    """Parse one formula; raises a ParseError subclass with position info."""
    parser = _Parser(tokenize(text), sig)
    phi = parser.formula()
    tok = parser.peek()
    if tok.kind != "EOF":
        parser.error(f"unexpected trailing input {tok.text!r}")
    return phi


def parse_theory(text: str, sig: Signature) -> List[Formula]:
    """One sentence per line; blank lines and # comments are skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse(line, sig))
        except ParseError as exc:
            raise type(exc)(f"theory line {lineno}: {exc.message}", lineno, exc.column, exc.offset) from None
    return out


# ---------------------------------------------------------------------------
# Pretty printer

# Precedence levels used by the printer; larger binds tighter.
_LEVEL_QUANT = 0
_LEVEL_IFF = 1
_LEVEL_ARROW = 2
_LEVEL_OR = 3
_LEVEL_AND = 4
_LEVEL_TENSOR = 5
_LEVEL_NOT = 6
_LEVEL_POSTFIX = 7
_LEVEL_PRIMARY = 8


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.func
    return f"{t.func}({', '.join(print_term(a) for a in t.args)})"


def _wrap(text: str, level: int, context: int) -> str:
    return f"({text})" if level < context else text


def _print(phi: Formula, context: int) -> str:
    if isinstance(phi, Bot):
        return "bot"
    if isinstance(phi, One):
        return "one"
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.pred
        return f"{phi.pred}({', '.join(print_term(a) for a in phi.args)})"
    if isinstance(phi, Delta):
        return f"delta({_print(phi.body, _LEVEL_QUANT)})"
    if isinstance(phi, (Forall, Exists)):
        kw = "forall" if isinstance(phi, Forall) else "exists"
        text = f"{kw} {phi.var}. {_print(phi.body, _LEVEL_QUANT)}"
        return _wrap(text, _LEVEL_QUANT, context)
    if isinstance(phi, (Iff, DArrow, DDArrow)):
        op = {Iff: "<->", DArrow: "=>", DDArrow: "==>"}[type(phi)]
        text = f"{_print(phi.left, _LEVEL_IFF + 1)} {op} {_print(phi.right, _LEVEL_IFF)}"
        return _wrap(text, _LEVEL_IFF, context)
    if isinstance(phi, (Imp, LukImp)):
        op = "->" if isinstance(phi, Imp) else "->l"
        text = f"{_print(phi.left, _LEVEL_ARROW + 1)} {op} {_print(phi.right, _LEVEL_ARROW)}"
        return _wrap(text, _LEVEL_ARROW, context)
    if isinstance(phi, Or):
        text = f"{_print(phi.left, _LEVEL_OR)} \\/ {_print(phi.right, _LEVEL_OR + 1)}"
        return _wrap(text, _LEVEL_OR, context)
    if isinstance(phi, And):
        text = f"{_print(phi.left, _LEVEL_AND)} /\\ {_print(phi.right, _LEVEL_AND + 1)}"
        return _wrap(text, _LEVEL_AND, context)
    if isinstance(phi, Tensor):
        text = f"{_print(phi.left, _LEVEL_TENSOR)} * {_print(phi.right, _LEVEL_TENSOR + 1)}"
        return _wrap(text, _LEVEL_TENSOR, context)
    if isinstance(phi, Not):
        text = f"~{_print(phi.body, _LEVEL_NOT)}"
        return _wrap(text, _LEVEL_NOT, context)
    if isinstance(phi, Inv):
        text = f"{_print(phi.body, _LEVEL_POSTFIX)}^-1"
        return _wrap(text, _LEVEL_POSTFIX, context)
    if isinstance(phi, Power):
        text = f"{_print(phi.body, _LEVEL_POSTFIX)}^{phi.n}"
        return _wrap(text, _LEVEL_POSTFIX, context)
    raise UsageError(f"not a formula: {phi!r}")


def print_formula(phi: Formula) -> str:
    """Inverse of parse up to whitespace: parse(print_formula(phi)) == phi."""
    return _print(phi, _LEVEL_QUANT)
