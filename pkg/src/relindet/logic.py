"""Three-valued propositions under strong Kleene semantics.

Propositions are small immutable trees. Leaves are :class:`Atom` claims
``variable = bit``; inner nodes are :class:`Connective` nodes. A compact text
syntax is accepted by :func:`parse_proposition`::

    a=0                 atom
    a^b=0               parity atom, sugar for  not (a=1 xor b=1)
    not p   !p   ¬p     negation
    p and q   p & q   p ∧ q
    p or q    p | q   p ∨ q
    p xor q   p ⊕ q
    p iff q   p <-> q   p ↔ q     (the ``equals`` connective)

Precedence, loosest first: iff, or, xor, and, not.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Union

from .errors import ArityError


class TruthValue(enum.IntEnum):
    """Truth values ordered ``FALSE < INDETERMINATE < TRUE``."""

    FALSE = 0
    INDETERMINATE = 1
    TRUE = 2

    @classmethod
    def of(cls, b: bool) -> TruthValue:
        return cls.TRUE if b else cls.FALSE

    @property
    def determinate(self) -> bool:
        return self is not TruthValue.INDETERMINATE

    def __str__(self) -> str:
        return {0: "False", 1: "Indeterminate", 2: "True"}[self.value]


F, I, T = TruthValue.FALSE, TruthValue.INDETERMINATE, TruthValue.TRUE

CONNECTIVES = ("not", "and", "or", "xor", "equals")


def _xor2(p: TruthValue, q: TruthValue) -> TruthValue:
    if not (p.determinate and q.determinate):
        return I
    return TruthValue.of(p != q)


def kleene_connective(kind: str, inputs: Iterable[TruthValue]) -> TruthValue:
    """Evaluate a connective on three-valued inputs.

    ``and``/``or``/``xor`` accept two or more operands; ``not`` exactly one;
    ``equals`` exactly two.
    """
    args = [TruthValue(v) for v in inputs]
    n = len(args)
    if kind == "not":
        if n != 1:
            raise ArityError(f"'not' takes 1 operand, got {n}")
        return TruthValue(2 - args[0])
    if kind == "equals":
        if n != 2:
            raise ArityError(f"'equals' takes 2 operands, got {n}")
        return kleene_connective("not", [_xor2(*args)])
    if kind not in CONNECTIVES:
        raise ValueError(f"unknown connective {kind!r}")
    if n < 2:
        raise ArityError(f"{kind!r} takes at least 2 operands, got {n}")
    if kind == "and":
        return min(args)
    if kind == "or":
        return max(args)
    return reduce(_xor2, args)


@dataclass(frozen=True)
class Atom:
    variable: str
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError(f"atom value must be a bit, got {self.value!r}")

    def __str__(self) -> str:
        return f"{self.variable}={self.value}"


@dataclass(frozen=True)
class Connective:
    kind: str
    children: tuple[Proposition, ...]

    def __post_init__(self):
        if self.kind not in CONNECTIVES:
            raise ValueError(f"unknown connective {self.kind!r}")
        n = len(self.children)
        if (self.kind == "not" and n != 1) or (self.kind == "equals" and n != 2) or n < 1:
            raise ArityError(f"{self.kind!r} cannot take {n} operands")
        if self.kind in ("and", "or", "xor") and n < 2:
            raise ArityError(f"{self.kind!r} takes at least 2 operands, got {n}")

    def __str__(self) -> str:
        if self.kind == "not":
            return f"not {_wrap(self.children[0])}"
        word = "iff" if self.kind == "equals" else self.kind
        return f" {word} ".join(_wrap(c) for c in self.children)


Proposition = Union[Atom, Connective]


def _wrap(p: Proposition) -> str:
    return str(p) if isinstance(p, Atom) else f"({p})"


def Not(p: Proposition) -> Connective:
    return Connective("not", (p,))


def And(*ps: Proposition) -> Connective:
    return Connective("and", tuple(ps))


def Or(*ps: Proposition) -> Connective:
    return Connective("or", tuple(ps))


def Xor(*ps: Proposition) -> Connective:
    return Connective("xor", tuple(ps))


def Equals(p: Proposition, q: Proposition) -> Connective:
    return Connective("equals", (p, q))


def parity(variables: Iterable[str], value: int) -> Proposition:
    """The claim ``v1 xor v2 xor ... = value`` as a proposition tree."""
    names = list(variables)
    if not names:
        raise ArityError("parity needs at least one variable")
    if len(names) == 1:
        return Atom(names[0], value)
    odd = Xor(*(Atom(v, 1) for v in names))
    return odd if value == 1 else Not(odd)


def atoms(p: Proposition) -> Iterator[Atom]:
    if isinstance(p, Atom):
        yield p
    else:
        for child in p.children:
            yield from atoms(child)


def variables(p: Proposition) -> frozenset[str]:
    return frozenset(a.variable for a in atoms(p))


def evaluate(p: Proposition, valuation) -> TruthValue:
    """Evaluate ``p`` given a callable mapping each atom to a truth value."""
    if isinstance(p, Atom):
        return valuation(p)
    return kleene_connective(p.kind, [evaluate(c, valuation) for c in p.children])


# -- text syntax -----------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<lp>\()|(?P<rp>\))"
    r"|(?P<iff><->|↔|\biff\b)"
    r"|(?P<or>\||∨|\bor\b)"
    r"|(?P<xor>⊕|\bxor\b)"
    r"|(?P<and>&|∧|\band\b)"
    r"|(?P<not>!|¬|~|\bnot\b)"
    r"|(?P<atom>[A-Za-z_][\w.]*(?:\s*\^\s*[A-Za-z_][\w.]*)*\s*=\s*[01])"
    r")"
)


class PropositionSyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise PropositionSyntaxError(f"unexpected input at column {pos + 1}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


def parse_proposition(text: str) -> Proposition:
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos][0] if pos < len(tokens) else None

    def take(kind):
        nonlocal pos
        if peek() != kind:
            where = tokens[pos][2] + 1 if pos < len(tokens) else len(text) + 1
            raise PropositionSyntaxError(f"expected {kind} at column {where} in {text!r}")
        pos += 1
        return tokens[pos - 1]

    def binary(kind, conn, sub):
        def rule():
            first = sub()
            items = [first]
            while peek() == kind:
                take(kind)
                items.append(sub())
            if len(items) == 1:
                return first
            if conn == "equals":
                return reduce(lambda p, q: Equals(p, q), items)
            return Connective(conn, tuple(items))
        return rule

    def unary():
        if peek() == "not":
            take("not")
            return Not(unary())
        if peek() == "lp":
            take("lp")
            inner = iff()
            take("rp")
            return inner
        _, raw, _ = take("atom")
        lhs, rhs = raw.split("=")
        names = [n.strip() for n in lhs.split("^")]
        return parity(names, int(rhs))

    conj = binary("and", "and", unary)
    exclusive = binary("xor", "xor", conj)
    disj = binary("or", "or", exclusive)
    iff = binary("iff", "equals", disj)

    if not tokens:
        raise PropositionSyntaxError("empty proposition")
    result = iff()
    if pos != len(tokens):
        raise PropositionSyntaxError(f"trailing input at column {tokens[pos][2] + 1} in {text!r}")
    return result


def proposition_to_json(p: Proposition):
    if isinstance(p, Atom):
        return {"atom": [p.variable, p.value]}
    return {"op": p.kind, "args": [proposition_to_json(c) for c in p.children]}


def proposition_from_json(doc) -> Proposition:
    if isinstance(doc, str):
        return parse_proposition(doc)
    if not isinstance(doc, dict):
        raise PropositionSyntaxError(f"proposition must be a string or object, got {type(doc).__name__}")
    if "atom" in doc:
        var, val = doc["atom"]
        return Atom(str(var), int(val))
    if "op" in doc:
        return Connective(doc["op"], tuple(proposition_from_json(c) for c in doc.get("args", [])))
    raise PropositionSyntaxError("proposition object needs 'atom' or 'op'")
