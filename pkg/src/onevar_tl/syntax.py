"""Formula ASTs, parsing, printing and fragment classification.

Four logics share one core AST with eight constructors.  Everything else
(negation, conjunction, the box of the branching-time logics, the composite
state/path operator pairs of CTL and ATL) is introduced by ``expand_derived``
and normalised away at parse time, so a single semantics implementation
suffices downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence


class LogicId(Enum):
    CTL = "ctl"
    CTLSTAR = "ctlstar"
    ATL = "atl"
    ATLSTAR = "atlstar"

    @property
    def alternating(self) -> bool:
        return self in (LogicId.ATL, LogicId.ATLSTAR)

    @property
    def starred(self) -> bool:
        return self in (LogicId.CTLSTAR, LogicId.ATLSTAR)


class Sort(Enum):
    STATE = "state"
    PATH = "path"


@dataclass(frozen=True)
class AgentSet:
    """Agents named 1..k."""

    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("agent set must be non-empty")

    @property
    def members(self) -> frozenset[int]:
        return frozenset(range(1, self.k + 1))


class Formula:
    """Base class of the core AST; subclasses are frozen and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Var(Formula):
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError("variable indices start at 1")


@dataclass(frozen=True)
class Falsum(Formula):
    pass


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class ForAllPaths(Formula):
    body: Formula


@dataclass(frozen=True)
class Coalition(Formula):
    agents: frozenset[int]
    body: Formula


@dataclass(frozen=True)
class Next(Formula):
    body: Formula


@dataclass(frozen=True)
class Until(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Always(Formula):
    body: Formula


FALSE = Falsum()


class SortError(ValueError):
    """A path formula appeared where a state formula is required."""


class FragmentError(ValueError):
    """A formula lies outside the fragment an operation expects."""


def sort_of(f: Formula) -> Sort:
    match f:
        case Var() | Falsum() | ForAllPaths() | Coalition():
            return Sort.STATE
        case Implies(lhs, rhs):
            if sort_of(lhs) is Sort.STATE and sort_of(rhs) is Sort.STATE:
                return Sort.STATE
            return Sort.PATH
        case Next() | Until() | Always():
            return Sort.PATH
    raise TypeError(f"not a formula: {f!r}")


def is_state_formula(f: Formula) -> bool:
    return sort_of(f) is Sort.STATE


# ---------------------------------------------------------------------------
# Derived connectives.

def neg(f: Formula) -> Formula:
    return Implies(f, FALSE)


def top() -> Formula:
    return Implies(FALSE, FALSE)


def conj(a: Formula, b: Formula) -> Formula:
    return neg(Implies(a, neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Implies(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Implies(a, b), Implies(b, a))


def conj_all(items: Sequence[Formula]) -> Formula:
    if not items:
        return top()
    out = items[-1]
    for f in reversed(items[:-1]):
        out = conj(f, out)
    return out


def eventually(f: Formula) -> Formula:
    """F f as a path formula: true U f."""
    return Until(top(), f)


def always_derived(f: Formula) -> Formula:
    """G f in the branching-time star logic: not (true U not f)."""
    return neg(Until(top(), neg(f)))


def exists_paths(f: Formula) -> Formula:
    """E f: not A not f."""
    return neg(ForAllPaths(neg(f)))


def ax(f: Formula) -> Formula:
    return ForAllPaths(Next(f))


def ex(f: Formula) -> Formula:
    """EX in the paired fragment: not AX not f."""
    return neg(ax(neg(f)))


def au(a: Formula, b: Formula) -> Formula:
    return ForAllPaths(Until(a, b))


def eu(a: Formula, b: Formula) -> Formula:
    """E(a U b) in the paired fragment: not A not (a U b)."""
    return neg(ForAllPaths(neg(Until(a, b))))


def af(f: Formula) -> Formula:
    return au(top(), f)


def ef(f: Formula) -> Formula:
    return eu(top(), f)


def ag(f: Formula) -> Formula:
    """AG in the paired fragment: not EF not f."""
    return neg(ef(neg(f)))


def eg(f: Formula) -> Formula:
    """EG in the paired fragment: not AF not f."""
    return neg(af(neg(f)))


def coalition(agents: Iterable[int], body: Formula) -> Formula:
    return Coalition(frozenset(agents), body)


_DERIVED: dict[str, Callable[..., Formula]] = {
    "not": neg,
    "top": top,
    "and": conj,
    "or": disj,
    "iff": iff,
    "eventually": eventually,
    "ax": ax,
    "ex": ex,
    "au": au,
    "eu": eu,
    "af": af,
    "ef": ef,
    "ag": ag,
    "eg": eg,
    "exists": exists_paths,
}


def expand_derived(name: str, *args: Formula, logic: LogicId = LogicId.CTLSTAR) -> Formula:
    """Expand a derived connective to core constructors.

    The box is the one logic-sensitive case: primitive in the alternating
    logics, rewritten through until in the branching-time ones.
    """
    if name == "always":
        (body,) = args
        return Always(body) if logic.alternating else always_derived(body)
    try:
        builder = _DERIVED[name]
    except KeyError:
        raise ValueError(f"unknown derived connective: {name!r}") from None
    return builder(*args)


# ---------------------------------------------------------------------------
# Substitution.

def substitute(f: Formula, var: int, replacement: Formula) -> Formula:
    if not is_state_formula(replacement):
        raise SortError("replacement must be a state formula")
    return substitute_all(f, {var: replacement})


def substitute_all(f: Formula, mapping: dict[int, Formula]) -> Formula:
    """Simultaneous uniform substitution of state formulas for variables."""
    for repl in mapping.values():
        if not is_state_formula(repl):
            raise SortError("replacement must be a state formula")
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(g)
        if hit is not None:
            return hit
        match g:
            case Var(i):
                out = mapping.get(i, g)
            case Falsum():
                out = g
            case Implies(a, b):
                out = Implies(go(a), go(b))
            case ForAllPaths(b):
                out = ForAllPaths(go(b))
            case Coalition(c, b):
                out = Coalition(c, go(b))
            case Next(b):
                out = Next(go(b))
            case Until(a, b):
                out = Until(go(a), go(b))
            case Always(b):
                out = Always(go(b))
            case _:
                raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return go(f)


# ---------------------------------------------------------------------------
# Classification.

@dataclass(frozen=True)
class Classification:
    variables: frozenset[int]
    is_ctl: bool
    is_atl: bool
    is_variable_free: bool
    size: int


def variables_of(f: Formula) -> frozenset[int]:
    seen: set[int] = set()
    visited: set[int] = set()

    def go(g: Formula) -> None:
        if id(g) in visited:
            return
        visited.add(id(g))
        match g:
            case Var(i):
                seen.add(i)
            case Implies(a, b) | Until(a, b):
                go(a)
                go(b)
            case ForAllPaths(b) | Coalition(_, b) | Next(b) | Always(b):
                go(b)
    go(f)
    return frozenset(seen)


def size_of(f: Formula) -> int:
    """Node count of the core-constructor tree (shared subtrees count fully)."""
    memo: dict[Formula, int] = {}

    def go(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        match g:
            case Var() | Falsum():
                n = 1
            case Implies(a, b) | Until(a, b):
                n = 1 + go(a) + go(b)
            case ForAllPaths(b) | Coalition(_, b) | Next(b) | Always(b):
                n = 1 + go(b)
            case _:
                raise TypeError(f"not a formula: {g!r}")
        memo[g] = n
        return n

    return go(f)


def is_ctl_formula(f: Formula) -> bool:
    """Membership in the paired quantifier+operator fragment of CTL.

    On the core AST the admissible quantified shapes are A X phi,
    A (phi U psi) and A ((phi U psi) -> false); the last is how the
    existential until and the derived AG/EG normalise.
    """
    memo: dict[Formula, bool] = {}

    def state(g: Formula) -> bool:
        hit = memo.get(g)
        if hit is not None:
            return hit
        match g:
            case Var() | Falsum():
                out = True
            case Implies(a, b):
                out = state(a) and state(b)
            case ForAllPaths(Next(a)):
                out = state(a)
            case ForAllPaths(Until(a, b)):
                out = state(a) and state(b)
            case ForAllPaths(Implies(Until(a, b), Falsum())):
                out = state(a) and state(b)
            case _:
                out = False
        memo[g] = out
        return out

    return state(f)


def is_atl_formula(f: Formula) -> bool:
    """Membership in the paired coalition fragment of ATL."""
    memo: dict[Formula, bool] = {}

    def state(g: Formula) -> bool:
        hit = memo.get(g)
        if hit is not None:
            return hit
        match g:
            case Var() | Falsum():
                out = True
            case Implies(a, b):
                out = state(a) and state(b)
            case Coalition(_, Next(a)):
                out = state(a)
            case Coalition(_, Always(a)):
                out = state(a)
            case Coalition(_, Until(a, b)):
                out = state(a) and state(b)
            case _:
                out = False
        memo[g] = out
        return out

    return state(f)


def is_ctlstar_formula(f: Formula) -> bool:
    """State formula free of coalitions and the primitive box."""
    visited: set[int] = set()

    def go(g: Formula) -> bool:
        if id(g) in visited:
            return True
        visited.add(id(g))
        match g:
            case Coalition() | Always():
                return False
            case Var() | Falsum():
                return True
            case Implies(a, b) | Until(a, b):
                return go(a) and go(b)
            case ForAllPaths(b) | Next(b):
                return go(b)
        return False

    return is_state_formula(f) and go(f)


def is_atlstar_formula(f: Formula) -> bool:
    """State formula free of the plain path quantifier."""
    visited: set[int] = set()

    def go(g: Formula) -> bool:
        if id(g) in visited:
            return True
        visited.add(id(g))
        match g:
            case ForAllPaths():
                return False
            case Var() | Falsum():
                return True
            case Implies(a, b) | Until(a, b):
                return go(a) and go(b)
            case Coalition(_, b) | Next(b) | Always(b):
                return go(b)
        return False

    return is_state_formula(f) and go(f)


def in_logic(f: Formula, logic: LogicId) -> bool:
    match logic:
        case LogicId.CTL:
            return is_ctl_formula(f)
        case LogicId.CTLSTAR:
            return is_ctlstar_formula(f)
        case LogicId.ATL:
            return is_atl_formula(f)
        case LogicId.ATLSTAR:
            return is_atlstar_formula(f)
    raise ValueError(logic)


def classify(f: Formula) -> Classification:
    vs = variables_of(f)
    return Classification(
        variables=vs,
        is_ctl=is_ctl_formula(f),
        is_atl=is_atl_formula(f),
        is_variable_free=not vs,
        size=size_of(f),
    )


def coalitions_of(f: Formula) -> frozenset[frozenset[int]]:
    out: set[frozenset[int]] = set()

    def go(g: Formula) -> None:
        match g:
            case Coalition(c, b):
                out.add(c)
                go(b)
            case Implies(a, b) | Until(a, b):
                go(a)
                go(b)
            case ForAllPaths(b) | Next(b) | Always(b):
                go(b)
    go(f)
    return frozenset(out)


def max_agent(f: Formula) -> int:
    return max((max(c) for c in coalitions_of(f) if c), default=0)


# ---------------------------------------------------------------------------
# Variable-free constant folding.

def fold_variable_free(f: Formula) -> bool:
    """Fold a variable-free formula to its constant truth value.

    Seriality makes every temporal layer transparent: a quantified or
    temporal formula over constants holds exactly when its (eventual)
    operand constant does, and an until reduces to its right operand.
    """
    if variables_of(f):
        raise ValueError("formula contains a variable")

    def go(g: Formula) -> bool:
        match g:
            case Falsum():
                return False
            case Implies(a, b):
                return (not go(a)) or go(b)
            case ForAllPaths(b) | Coalition(_, b) | Next(b) | Always(b):
                return go(b)
            case Until(_, b):
                return go(b)
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


# ---------------------------------------------------------------------------
# CTL -> ATL quantifier embedding.

def ctl_to_atl(f: Formula, agents: AgentSet) -> Formula:
    """Replace the universal quantifier by the empty coalition and the
    existential one by the grand coalition, recursively."""
    if not is_ctl_formula(f):
        raise FragmentError("input is not in the CTL fragment")
    empty: frozenset[int] = frozenset()
    grand = agents.members

    def go(g: Formula) -> Formula:
        match g:
            case Var() | Falsum():
                return g
            case Implies(ForAllPaths(Implies(Until(a, b), Falsum())), Falsum()):
                # E(a U b) in core form; maps to the grand coalition directly.
                return Coalition(grand, Until(go(a), go(b)))
            case Implies(a, b):
                return Implies(go(a), go(b))
            case ForAllPaths(Next(a)):
                return Coalition(empty, Next(go(a)))
            case ForAllPaths(Until(a, b)):
                return Coalition(empty, Until(go(a), go(b)))
            case ForAllPaths(Implies(Until(a, b), Falsum())):
                # A not (a U b) == not E(a U b)
                return neg(Coalition(grand, Until(go(a), go(b))))
        raise FragmentError(f"not a CTL shape: {g!r}")

    return go(f)


# ---------------------------------------------------------------------------
# Concrete syntax.
#
# Tokens: p<i>, false, true, ( ), ->, &, |, <->, !, A, E, X, U, G, F,
# <<a1,...,ak>> with <<>> the empty and <<*>> the full coalition.
# Precedence: unary > U > & > | > -> (right assoc) > <->.

class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        detail = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at position {position}{detail}")


@dataclass(frozen=True)
class _Token:
    kind: str
    value: object
    pos: int


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<var>p(?P<varidx>\d+))
    | (?P<false>false)
    | (?P<true>true)
    | (?P<coal><<(?P<coalbody>[^>]*)>>)
    | (?P<iff><->)
    | (?P<arrow>->)
    | (?P<amp>&)
    | (?P<pipe>\|)
    | (?P<bang>!)
    | (?P<lparen>\()
    | (?P<rparen>\))
    | (?P<letter>[AEXUGF])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "coal":
            body = m.group("coalbody").strip()
            if body == "*":
                value: object = "*"
            elif body == "":
                value = frozenset()
            else:
                try:
                    value = frozenset(int(part.strip()) for part in body.split(","))
                except ValueError:
                    raise ParseError("malformed coalition", m.start()) from None
            tokens.append(_Token("coal", value, m.start()))
        elif kind == "var":
            idx = int(m.group("varidx"))
            if idx < 1:
                raise ParseError("variable indices start at 1", m.start())
            tokens.append(_Token("var", idx, m.start()))
        elif kind == "letter":
            tokens.append(_Token(m.group("letter"), None, m.start()))
        elif kind != "ws":
            tokens.append(_Token(kind, None, m.start()))
        pos = m.end()
    tokens.append(_Token("end", None, len(text)))
    return tokens


# Surface tree, elaborated per logic afterwards.

@dataclass(frozen=True)
class _SNode:
    kind: str            # var false true not and or imp iff quant coal next until always eventually
    payload: object = None
    children: tuple["_SNode", ...] = ()


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"unexpected token {tok.kind!r}", tok.pos, (kind,))
        return self.advance()

    def parse_formula(self) -> _SNode:
        node = self.parse_iff()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected token {tok.kind!r}", tok.pos, ("end of input",))
        return node

    def parse_iff(self) -> _SNode:
        node = self.parse_imp()
        while self.peek().kind == "iff":
            self.advance()
            rhs = self.parse_imp()
            node = _SNode("iff", None, (node, rhs))
        return node

    def parse_imp(self) -> _SNode:
        lhs = self.parse_or()
        if self.peek().kind == "arrow":
            self.advance()
            rhs = self.parse_imp()
            return _SNode("imp", None, (lhs, rhs))
        return lhs

    def parse_or(self) -> _SNode:
        node = self.parse_and()
        while self.peek().kind == "pipe":
            self.advance()
            node = _SNode("or", None, (node, self.parse_and()))
        return node

    def parse_and(self) -> _SNode:
        node = self.parse_until()
        while self.peek().kind == "amp":
            self.advance()
            node = _SNode("and", None, (node, self.parse_until()))
        return node

    def parse_until(self) -> _SNode:
        lhs = self.parse_unary()
        if self.peek().kind == "U":
            self.advance()
            rhs = self.parse_until_rhs()
            return _SNode("until", None, (lhs, rhs))
        return lhs

    def parse_until_rhs(self) -> _SNode:
        lhs = self.parse_unary()
        if self.peek().kind == "U":
            self.advance()
            return _SNode("until", None, (lhs, self.parse_until_rhs()))
        return lhs

    def parse_unary(self) -> _SNode:
        tok = self.peek()
        if tok.kind == "bang":
            self.advance()
            return _SNode("not", None, (self.parse_unary(),))
        if tok.kind in ("A", "E"):
            self.advance()
            return _SNode("quant", tok.kind, (self.parse_unary(),))
        if tok.kind == "coal":
            self.advance()
            return _SNode("coal", tok.value, (self.parse_unary(),))
        if tok.kind == "X":
            self.advance()
            return _SNode("next", None, (self.parse_unary(),))
        if tok.kind == "G":
            self.advance()
            return _SNode("always", None, (self.parse_unary(),))
        if tok.kind == "F":
            self.advance()
            return _SNode("eventually", None, (self.parse_unary(),))
        return self.parse_atom()

    def parse_atom(self) -> _SNode:
        tok = self.peek()
        if tok.kind == "var":
            self.advance()
            return _SNode("var", tok.value)
        if tok.kind == "false":
            self.advance()
            return _SNode("false")
        if tok.kind == "true":
            self.advance()
            return _SNode("true")
        if tok.kind == "lparen":
            self.advance()
            node = self.parse_iff()
            self.expect("rparen")
            return node
        raise ParseError(
            f"unexpected token {tok.kind!r}", tok.pos,
            ("variable", "false", "true", "(", "!", "A", "E", "X", "G", "F", "<<...>>"),
        )


def _resolve_coalition(payload: object, agents: AgentSet) -> frozenset[int]:
    if payload == "*":
        return agents.members
    members = payload  # frozenset[int]
    for a in members:
        if not 1 <= a <= agents.k:
            raise FragmentError(f"agent index {a} out of range 1..{agents.k}")
    return members


def _elab_boolean(node: _SNode, rec) -> Formula | None:
    match node.kind:
        case "var":
            return Var(node.payload)
        case "false":
            return FALSE
        case "true":
            return top()
        case "not":
            return neg(rec(node.children[0]))
        case "and":
            return conj(rec(node.children[0]), rec(node.children[1]))
        case "or":
            return disj(rec(node.children[0]), rec(node.children[1]))
        case "imp":
            return Implies(rec(node.children[0]), rec(node.children[1]))
        case "iff":
            return iff(rec(node.children[0]), rec(node.children[1]))
    return None


def _elab_star(node: _SNode, logic: LogicId, agents: AgentSet) -> Formula:
    def rec(n: _SNode) -> Formula:
        return _elab_star(n, logic, agents)

    base = _elab_boolean(node, rec)
    if base is not None:
        return base
    alternating = logic.alternating
    match node.kind:
        case "quant":
            body = rec(node.children[0])
            if alternating:
                c = frozenset() if node.payload == "A" else agents.members
                return Coalition(c, body)
            return ForAllPaths(body) if node.payload == "A" else exists_paths(body)
        case "coal":
            if not alternating:
                raise FragmentError("coalition quantifiers require an alternating-time logic")
            return Coalition(_resolve_coalition(node.payload, agents), rec(node.children[0]))
        case "next":
            return Next(rec(node.children[0]))
        case "until":
            return Until(rec(node.children[0]), rec(node.children[1]))
        case "always":
            body = rec(node.children[0])
            return Always(body) if alternating else always_derived(body)
        case "eventually":
            return eventually(rec(node.children[0]))
    raise AssertionError(node.kind)


def _elab_paired(node: _SNode, logic: LogicId, agents: AgentSet) -> Formula:
    """CTL and ATL: every quantifier pairs with one temporal operator."""

    def rec(n: _SNode) -> Formula:
        return _elab_paired(n, logic, agents)

    base = _elab_boolean(node, rec)
    if base is not None:
        return base
    alternating = logic.alternating

    if node.kind in ("quant", "coal"):
        if node.kind == "coal":
            if not alternating:
                raise FragmentError("coalition quantifiers require an alternating-time logic")
            c = _resolve_coalition(node.payload, agents)
        elif alternating:
            c = frozenset() if node.payload == "A" else agents.members
        else:
            c = None  # branching-time quantifier, kind in payload
        body = node.children[0]
        operands = tuple(rec(child) for child in body.children)
        if alternating:
            match body.kind:
                case "next":
                    return Coalition(c, Next(operands[0]))
                case "always":
                    return Coalition(c, Always(operands[0]))
                case "until":
                    return Coalition(c, Until(operands[0], operands[1]))
                case "eventually":
                    return Coalition(c, Until(top(), operands[0]))
        else:
            existential = node.payload == "E"
            match body.kind:
                case "next":
                    return ex(operands[0]) if existential else ax(operands[0])
                case "until":
                    return eu(*operands) if existential else au(*operands)
                case "always":
                    return eg(operands[0]) if existential else ag(operands[0])
                case "eventually":
                    return ef(operands[0]) if existential else af(operands[0])
        raise SortError(
            "a quantifier must pair with a temporal operator (X, U, G, F) in this logic")

    if node.kind in ("next", "until", "always", "eventually"):
        raise SortError("path formula in state position")
    raise AssertionError(node.kind)


def parse(text: str, logic: LogicId, agents: AgentSet | None = None) -> Formula:
    """Parse concrete syntax into the core AST for the given logic."""
    agents = agents or AgentSet(1)
    tokens = _tokenize(text)
    surface = _Parser(tokens).parse_formula()
    if logic.starred:
        f = _elab_star(surface, logic, agents)
        if not is_state_formula(f):
            raise SortError("top-level formula must be a state formula")
        return f
    return _elab_paired(surface, logic, agents)


# ---------------------------------------------------------------------------
# Printing.  Core syntax plus the sugar that re-parses to an identical tree
# in every logic ("true", "F", "E", and "G" for the primitive box).

_ATOM, _UNARY, _UNTIL, _AND, _OR, _IMP, _IFF = 7, 6, 5, 4, 3, 2, 1


def _fmt(f: Formula, need: int) -> str:
    text, level = _fmt_node(f)
    if level < need:
        return f"({text})"
    return text


def _quantified_implication(g: Formula) -> bool:
    """A bare quantifier over an implication has no surface form in the
    paired logics; sugar that would print one must stand down."""
    return isinstance(g, ForAllPaths) and isinstance(g.body, Implies)


def _fmt_node(f: Formula) -> tuple[str, int]:
    match f:
        case Implies(Falsum(), Falsum()):
            return "true", _ATOM
        case Implies(Implies(a, Implies(b, Falsum())), Falsum()) if (
                not _quantified_implication(a) and not _quantified_implication(b)):
            return f"{_fmt(a, _AND)} & {_fmt(b, _AND + 1)}", _AND
        case Implies(ForAllPaths(Implies(body, Falsum())), Falsum()):
            return f"E {_fmt(body, _UNARY)}", _UNARY
        case Implies(Implies(a, Falsum()), b) if not _quantified_implication(a):
            return f"{_fmt(a, _OR)} | {_fmt(b, _OR + 1)}", _OR
        case Until(Implies(Falsum(), Falsum()), rhs):
            return f"F {_fmt(rhs, _UNARY)}", _UNARY
        case Var(i):
            return f"p{i}", _ATOM
        case Falsum():
            return "false", _ATOM
        case Implies(a, b):
            return f"{_fmt(a, _IMP + 1)} -> {_fmt(b, _IMP)}", _IMP
        case ForAllPaths(b):
            return f"A {_fmt(b, _UNARY)}", _UNARY
        case Coalition(c, b):
            inner = ",".join(str(a) for a in sorted(c))
            return f"<<{inner}>> {_fmt(b, _UNARY)}", _UNARY
        case Next(b):
            return f"X {_fmt(b, _UNARY)}", _UNARY
        case Always(b):
            return f"G {_fmt(b, _UNARY)}", _UNARY
        case Until(a, b):
            return f"{_fmt(a, _UNTIL + 1)} U {_fmt(b, _UNTIL)}", _UNTIL
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f: Formula) -> str:
    return _fmt(f, 0)
