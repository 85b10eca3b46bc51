"""Bounded formula fragment: edge/equality/exact-distance atoms in one free
variable x over parameter vertices.

Shapes are little ASTs over parameter slots (letters a, b, ... in text
form); an instance binds slots to host vertices.  Distance atoms are capped
at K_MAX = 4 so every positive atom carries a bounded witness profile.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Union

from .canonical import tuple_key
from .graphs import FinGraph, InvalidInput, ResourceBudget, distances_from

K_MAX = 4
DNF_CAP = 4096


class UnsupportedFormula(InvalidInput):
    """Formula leaves the bounded-witness fragment."""


@dataclass(frozen=True)
class Atom:
    # kinds: "true" (x=x), "eq" (x = slot), "edge" (E(x, slot)),
    # "dist_eq" (exact distance k), "dist_le" (distance <= k)
    kind: str
    slot: int | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind in ("dist_eq", "dist_le"):
            if self.k is None or not 2 <= self.k <= K_MAX:
                raise UnsupportedFormula(
                    f"distance atoms need 2 <= k <= {K_MAX}; got {self.k}"
                )
        elif self.kind not in ("true", "eq", "edge"):
            raise InvalidInput(f"unknown atom kind {self.kind!r}")


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]


Formula = Union[Atom, Not, And, Or]


def arity(f: Formula) -> int:
    slots = set()

    def walk(x):
        if isinstance(x, Atom):
            if x.slot is not None:
                slots.add(x.slot)
        elif isinstance(x, Not):
            walk(x.child)
        else:
            for c in x.children:
                walk(c)

    walk(f)
    if slots and slots != set(range(max(slots) + 1)):
        raise InvalidInput("parameter slots must be dense from 0")
    return len(slots)


@dataclass(frozen=True)
class FormulaInstance:
    """A shape with its slots bound to host vertices."""

    shape: Formula
    params: tuple[int, ...]

    def __post_init__(self):
        if len(self.params) != arity(self.shape):
            raise InvalidInput("instance binds the wrong number of parameters")


def conj(*insts: FormulaInstance) -> FormulaInstance:
    """Conjunction instance; slots are re-numbered left to right."""
    parts = []
    params: list[int] = []
    for inst in insts:
        off = len(params)
        parts.append(_shift(inst.shape, off))
        params.extend(inst.params)
    return FormulaInstance(And(tuple(parts)), tuple(params))


def disj(*insts: FormulaInstance) -> FormulaInstance:
    parts = []
    params: list[int] = []
    for inst in insts:
        off = len(params)
        parts.append(_shift(inst.shape, off))
        params.extend(inst.params)
    return FormulaInstance(Or(tuple(parts)), tuple(params))


def neg(inst: FormulaInstance) -> FormulaInstance:
    return FormulaInstance(Not(inst.shape), inst.params)


def _shift(f: Formula, off: int) -> Formula:
    if isinstance(f, Atom):
        if f.slot is None:
            return f
        return Atom(f.kind, f.slot + off, f.k)
    if isinstance(f, Not):
        return Not(_shift(f.child, off))
    if isinstance(f, And):
        return And(tuple(_shift(c, off) for c in f.children))
    return Or(tuple(_shift(c, off) for c in f.children))


def _rename(f: Formula, perm: dict[int, int]) -> Formula:
    if isinstance(f, Atom):
        if f.slot is None:
            return f
        return Atom(f.kind, perm[f.slot], f.k)
    if isinstance(f, Not):
        return Not(_rename(f.child, perm))
    if isinstance(f, And):
        return And(tuple(_rename(c, perm) for c in f.children))
    return Or(tuple(_rename(c, perm) for c in f.children))


# -- text form -----------------------------------------------------------------


def _slot_name(i: int) -> str:
    return chr(ord("a") + i)


def shape_text(f: Formula, name=_slot_name) -> str:
    if isinstance(f, Atom):
        if f.kind == "true":
            return "x=x"
        p = name(f.slot)
        if f.kind == "eq":
            return f"x={p}"
        if f.kind == "edge":
            return f"E(x,{p})"
        if f.kind == "dist_eq":
            return f"dist={f.k}(x,{p})"
        return f"dist<={f.k}(x,{p})"
    if isinstance(f, Not):
        return f"!{_wrap(f.child, name)}"
    if isinstance(f, And):
        return " & ".join(_wrap(c, name) for c in f.children)
    return " | ".join(_wrap(c, name) for c in f.children)


def _wrap(f: Formula, name=_slot_name) -> str:
    if isinstance(f, (And, Or)) and len(f.children) != 1:
        return f"({shape_text(f, name)})"
    return shape_text(f, name)


def instance_text(inst: FormulaInstance) -> str:
    return shape_text(inst.shape, lambda i: f"v{inst.params[i]}")


# -- parser --------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.slots: dict[str, int] = {}

    def error(self, msg):
        raise InvalidInput(f"formula {self.text!r}: {msg} at {self.pos}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eat(self, tok: str) -> bool:
        self.skip()
        if self.text.startswith(tok, self.pos):
            self.pos += len(tok)
            return True
        return False

    def expect(self, tok: str):
        if not self.eat(tok):
            self.error(f"expected {tok!r}")

    def parse(self) -> Formula:
        f = self.parse_or()
        self.skip()
        if self.pos != len(self.text):
            self.error("trailing input")
        return f

    def parse_or(self) -> Formula:
        parts = [self.parse_and()]
        while self.eat("|"):
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> Formula:
        parts = [self.parse_unary()]
        while self.eat("&"):
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_unary(self) -> Formula:
        if self.eat("!"):
            return Not(self.parse_unary())
        if self.eat("("):
            f = self.parse_or()
            self.expect(")")
            return f
        return self.parse_atom()

    def slot_for(self, name: str) -> int:
        if not (len(name) == 1 and "a" <= name <= "z" and name != "x"):
            self.error(f"bad parameter name {name!r}")
        if name not in self.slots:
            self.slots[name] = len(self.slots)
        return self.slots[name]

    def ident(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalnum():
            self.pos += 1
        if start == self.pos:
            self.error("expected a name")
        return self.text[start:self.pos]

    def parse_atom(self) -> Formula:
        self.skip()
        if self.eat("E("):
            self.expect("x")
            self.expect(",")
            slot = self.slot_for(self.ident())
            self.expect(")")
            return Atom("edge", slot)
        if self.eat("dist"):
            if self.eat("<="):
                kind = "dist_le"
            elif self.eat("="):
                kind = "dist_eq"
            else:
                self.error("expected = or <= after dist")
            self.skip()
            num = ""
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                num += self.text[self.pos]
                self.pos += 1
            if not num:
                self.error("expected a distance")
            k = int(num)
            self.expect("(")
            self.expect("x")
            self.expect(",")
            slot = self.slot_for(self.ident())
            self.expect(")")
            if kind == "dist_eq" and k == 0:
                self.error("write x=p for distance 0")
            if kind == "dist_eq" and k == 1:
                return Atom("edge", slot)
            if kind == "dist_le" and k < 2:
                self.error("write E(x,p) or x=p for distances below 2")
            if k > K_MAX:
                raise UnsupportedFormula(
                    f"distance {k} beyond the fragment bound {K_MAX}"
                )
            return Atom(kind, slot, k)
        if self.eat("x"):
            self.expect("=")
            name = self.ident()
            if name == "x":
                return Atom("true")
            return Atom("eq", self.slot_for(name))
        self.error("expected an atom")


def parse_shape(text: str) -> tuple[Formula, tuple[str, ...]]:
    """Parse a shape; returns (formula, parameter letters in slot order)."""
    p = _Parser(text)
    f = p.parse()
    names = tuple(sorted(p.slots, key=p.slots.get))
    _ = arity(f)
    return f, names


# -- evaluation ----------------------------------------------------------------


def evaluate(g: FinGraph, inst: FormulaInstance, x: int) -> bool:
    g.check_vertex(x)
    for v in inst.params:
        g.check_vertex(v)
    dist = distances_from(g, x)

    def ev(f: Formula) -> bool:
        if isinstance(f, Atom):
            if f.kind == "true":
                return True
            p = inst.params[f.slot]
            if f.kind == "eq":
                return x == p
            if f.kind == "edge":
                return g.has_edge(x, p)
            if f.kind == "dist_eq":
                return dist[p] == f.k
            return 0 <= dist[p] <= f.k
        if isinstance(f, Not):
            return not ev(f.child)
        if isinstance(f, And):
            return all(ev(c) for c in f.children)
        return any(ev(c) for c in f.children)

    return ev(inst.shape)


def evaluate_at_infinity(shape: Formula) -> bool:
    """Truth at the generic far point: unrelated to every parameter."""
    if isinstance(shape, Atom):
        return shape.kind == "true"
    if isinstance(shape, Not):
        return not evaluate_at_infinity(shape.child)
    if isinstance(shape, And):
        return all(evaluate_at_infinity(c) for c in shape.children)
    return any(evaluate_at_infinity(c) for c in shape.children)


def satisfying_vertices(g: FinGraph, inst: FormulaInstance) -> list[int]:
    return [x for x in range(g.n) if evaluate(g, inst, x)]


# -- canonical variable keys ---------------------------------------------------


def _canon_shape(f: Formula) -> Formula:
    """Flatten and sort boolean structure (no slot games here)."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        c = _canon_shape(f.child)
        if isinstance(c, Not):
            return _canon_shape(c.child)
        return Not(c)
    kids = []
    for c in f.children:
        cc = _canon_shape(c)
        if isinstance(cc, type(f)):
            kids.extend(cc.children)
        else:
            kids.append(cc)
    uniq = sorted(set(kids), key=shape_text)
    if len(uniq) == 1:
        return uniq[0]
    return type(f)(tuple(uniq))


def instance_key(g: FinGraph, inst: FormulaInstance):
    """Orbit-keyed variable identity: invariant instances share keys.

    Minimizes (shape text, parameter-tuple orbit key) over slot
    permutations, so syntactically shuffled but equivalent instances and
    automorphism-related parameter tuples collapse together.
    """
    k = len(inst.params)
    if k == 0:
        return (shape_text(_canon_shape(inst.shape)), "-")
    if k > 5:
        raise ResourceBudget("instance arity beyond the variable-key bound")
    best = None
    for perm in permutations(range(k)):
        renamed = _canon_shape(_rename(inst.shape, {i: perm[i] for i in range(k)}))
        txt = shape_text(renamed)
        pars = tuple(inst.params[perm.index(j)] for j in range(k))
        okey = repr(tuple_key(g, pars))
        cand = (txt, okey)
        if best is None or cand < best:
            best = cand
    return best
