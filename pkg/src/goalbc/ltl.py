"""LTL abstract syntax, cubes, trace formulas and structural utilities."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping


@dataclass(frozen=True, eq=False)
class Formula:
    """Base class of the LTL syntax tree.

    Nodes are immutable; equality is structural and hashes are cached because
    formulas are used heavily as set members during translation.
    """

    def _fields(self) -> tuple:
        return tuple(getattr(self, name) for name in self.__match_args__)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        return hash(self) == hash(other) and self._fields() == other._fields()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._fields())
            object.__setattr__(self, "_hash", h)
        return h

    @cached_property
    def text(self) -> str:
        return to_text(self)

    def __str__(self):
        return self.text

    def __repr__(self):
        return f"<{type(self).__name__} {self.text}>"

    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __invert__(self) -> Formula:
        return Not(self)

    def __rshift__(self, other: Formula) -> Formula:
        return Implies(self, other)


@dataclass(frozen=True, eq=False)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Bottom(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("atom name must be nonempty")


@dataclass(frozen=True, eq=False)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, eq=False)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True, eq=False)
class Globally(Formula):
    arg: Formula


@dataclass(frozen=True, eq=False)
class Finally(Formula):
    arg: Formula


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Release(Formula):
    left: Formula
    right: Formula


TRUE = Top()
FALSE = Bottom()

UNARY = (Not, Next, Globally, Finally)
BINARY = (And, Or, Implies, Until, Release)

_UNARY_SYMBOL = {Not: "!", Next: "X ", Globally: "G ", Finally: "F "}
_BINARY_SYMBOL = {And: "&", Or: "|", Implies: "->", Until: "U", Release: "R"}


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    result = None
    for p in parts:
        result = p if result is None else And(result, p)
    return TRUE if result is None else result


def disj(parts: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``false``."""
    result = None
    for p in parts:
        result = p if result is None else Or(result, p)
    return FALSE if result is None else result


def next_n(f: Formula, n: int) -> Formula:
    for _ in range(n):
        f = Next(f)
    return f


# --------------------------------------------------------------------------
# printing


def _is_simple(f: Formula) -> bool:
    return isinstance(f, (Top, Bottom, Atom)) or (
        isinstance(f, Not) and isinstance(f.arg, Atom)
    )


def to_text(f: Formula) -> str:
    """Canonical, fully re-parseable text for ``f``.

    Operands that are not atoms, constants or negated atoms are always
    parenthesised, so the output never depends on operator precedence.
    """
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, UNARY):
        sym = _UNARY_SYMBOL[type(f)]
        if isinstance(f.arg, (Top, Bottom, Atom)):
            return sym + f.arg.text
        return f"{sym}({f.arg.text})"
    if isinstance(f, BINARY):
        left = f.left.text if _is_simple(f.left) else f"({f.left.text})"
        right = f.right.text if _is_simple(f.right) else f"({f.right.text})"
        return f"{left} {_BINARY_SYMBOL[type(f)]} {right}"
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# structural utilities


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, duplicates included."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, UNARY):
            stack.append(g.arg)
        elif isinstance(g, BINARY):
            stack.append(g.right)
            stack.append(g.left)


def atoms_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def desugar(f: Formula) -> Formula:
    """Replace ``->``, ``G`` and ``F`` by their core definitions."""
    if isinstance(f, (Top, Bottom, Atom)):
        return f
    if isinstance(f, Implies):
        return Or(Not(desugar(f.left)), desugar(f.right))
    if isinstance(f, Globally):
        return Release(FALSE, desugar(f.arg))
    if isinstance(f, Finally):
        return Until(TRUE, desugar(f.arg))
    if isinstance(f, UNARY):
        return type(f)(desugar(f.arg))
    return type(f)(desugar(f.left), desugar(f.right))


def formula_size(f: Formula) -> int:
    """Number of syntax-tree nodes after desugaring."""
    if isinstance(f, (Top, Bottom, Atom)):
        return 1
    if isinstance(f, Implies):
        return 2 + formula_size(f.left) + formula_size(f.right)
    if isinstance(f, (Globally, Finally)):
        return 2 + formula_size(f.arg)
    if isinstance(f, UNARY):
        return 1 + formula_size(f.arg)
    return 1 + formula_size(f.left) + formula_size(f.right)


def nnf(f: Formula) -> Formula:
    """Negation normal form over ``true false atom ! & | X U R``.

    Sugar is removed; negations end up directly above atoms.
    """
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Top):
        return FALSE if neg else TRUE
    if isinstance(f, Bottom):
        return TRUE if neg else FALSE
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, Next):
        return Next(_nnf(f.arg, neg))
    if isinstance(f, Globally):
        inner = _nnf(f.arg, neg)
        return Until(TRUE, inner) if neg else Release(FALSE, inner)
    if isinstance(f, Finally):
        inner = _nnf(f.arg, neg)
        return Release(FALSE, inner) if neg else Until(TRUE, inner)
    if isinstance(f, Implies):
        left, right = _nnf(f.left, not neg), _nnf(f.right, neg)
        return And(left, right) if neg else Or(left, right)
    left, right = _nnf(f.left, neg), _nnf(f.right, neg)
    if isinstance(f, And):
        return Or(left, right) if neg else And(left, right)
    if isinstance(f, Or):
        return And(left, right) if neg else Or(left, right)
    if isinstance(f, Until):
        return Release(left, right) if neg else Until(left, right)
    if isinstance(f, Release):
        return Until(left, right) if neg else Release(left, right)
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# cubes


class InconsistentCube(ValueError):
    pass


@dataclass(frozen=True)
class Cube:
    """A consistent conjunction of literals, kept sorted by atom name.

    ``literals`` is a tuple of ``(atom, polarity)`` pairs. The empty cube is
    ``true``.
    """

    literals: tuple[tuple[str, bool], ...] = ()

    def __post_init__(self):
        seen: dict[str, bool] = {}
        for atom, pol in self.literals:
            if seen.get(atom, pol) != pol:
                raise InconsistentCube(f"atom {atom!r} with both polarities")
            seen[atom] = pol
        canon = tuple(sorted(seen.items()))
        if canon != self.literals:
            object.__setattr__(self, "literals", canon)

    @classmethod
    def of(cls, *texts: str) -> Cube:
        """Build from literal strings such as ``"h"`` or ``"!p"``."""
        lits = []
        for t in texts:
            t = t.strip()
            if t.startswith("!"):
                lits.append((t[1:].strip(), False))
            else:
                lits.append((t, True))
        return cls(tuple(lits))

    @classmethod
    def from_mapping(cls, values: Mapping[str, bool]) -> Cube:
        return cls(tuple(values.items()))

    @property
    def mapping(self) -> dict[str, bool]:
        return dict(self.literals)

    @property
    def atoms(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.literals)

    def __bool__(self):
        # a cube is never the false formula; emptiness means ``true``
        return True

    def __len__(self):
        return len(self.literals)

    def is_true(self) -> bool:
        return not self.literals

    def get(self, atom: str) -> bool | None:
        return self.mapping.get(atom)

    def conjoin(self, other: Cube) -> Cube | None:
        """Conjunction, or ``None`` when the result is inconsistent."""
        merged = dict(self.literals)
        for atom, pol in other.literals:
            if merged.get(atom, pol) != pol:
                return None
            merged[atom] = pol
        return Cube.from_mapping(merged)

    def implies(self, other: Cube) -> bool:
        """Every letter satisfying ``self`` satisfies ``other``."""
        mine = self.mapping
        return all(mine.get(a) == p for a, p in other.literals)

    def satisfied_by(self, letter: Mapping[str, bool]) -> bool:
        return all(letter.get(a, False) == p for a, p in self.literals)

    def to_formula(self) -> Formula:
        return conj(Atom(a) if p else Not(Atom(a)) for a, p in self.literals)

    def to_strings(self) -> list[str]:
        return [a if p else f"!{a}" for a, p in self.literals]

    def __str__(self):
        if not self.literals:
            return "true"
        return " & ".join(self.to_strings())


TRUE_CUBE = Cube()


def fuse(c1: Cube, c2: Cube) -> tuple[Cube, str] | None:
    """Fuse two cubes that clash on exactly one atom.

    Returns the conjunction of both cubes with the clashing atom dropped,
    together with that atom; ``None`` when there is no clash or more than one.
    """
    m1, m2 = c1.mapping, c2.mapping
    clashes = [a for a, p in m1.items() if a in m2 and m2[a] != p]
    if len(clashes) != 1:
        return None
    atom = clashes[0]
    merged = {a: p for a, p in m1.items() if a != atom}
    merged.update((a, p) for a, p in m2.items() if a != atom)
    return Cube.from_mapping(merged), atom


# --------------------------------------------------------------------------
# trace formulas


@dataclass(frozen=True)
class TraceFormula:
    """``p_0 & X p_1 & ... & X^n p_n & X^(n+1) G p_(n+1)`` over cubes."""

    prefix: tuple[Cube, ...]
    loop: Cube

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))

    def to_ltl(self) -> Formula:
        return trace_formula_to_ltl(self)

    def normalized(self) -> TraceFormula:
        """Absorb trailing prefix cubes equal to the loop cube into the loop.

        ``X^n c & X^(n+1) G c`` is ``X^n G c``; the common case is a run of
        ``true`` cubes before a ``true`` loop.
        """
        prefix = list(self.prefix)
        while prefix and prefix[-1] == self.loop:
            prefix.pop()
        return TraceFormula(tuple(prefix), self.loop)


def trace_formula_to_ltl(t: TraceFormula) -> Formula:
    parts = [next_n(c.to_formula(), i) for i, c in enumerate(t.prefix)]
    parts.append(next_n(Globally(t.loop.to_formula()), len(t.prefix)))
    return conj(parts)


def _formula_to_cube(f: Formula) -> Cube | None:
    lits = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Top):
            continue
        if isinstance(g, And):
            stack.extend((g.right, g.left))
        elif isinstance(g, Atom):
            lits.append((g.name, True))
        elif isinstance(g, Not) and isinstance(g.arg, Atom):
            lits.append((g.arg.name, False))
        else:
            return None
    try:
        cube = Cube(tuple(lits))
    except InconsistentCube:
        return None
    # only accept the canonical rendering so the conversion is a bijection
    return cube if cube.to_formula() == f else None


def trace_formula_from_ltl(f: Formula) -> TraceFormula | None:
    """Inverse of :func:`trace_formula_to_ltl`; ``None`` for other shapes."""
    loop_part = f.right if isinstance(f, And) else f
    n = 0
    inner = loop_part
    while isinstance(inner, Next):
        inner, n = inner.arg, n + 1
    if not isinstance(inner, Globally):
        return None
    loop = _formula_to_cube(inner.arg)
    if loop is None:
        return None
    if n == 0:
        return TraceFormula((), loop) if loop_part is f else None
    if not isinstance(f, And):
        return None
    rest = f.left
    prefix: list[Cube] = []
    for i in range(n - 1, 0, -1):
        if not isinstance(rest, And):
            return None
        part = rest.right
        for _ in range(i):
            if not isinstance(part, Next):
                return None
            part = part.arg
        cube = _formula_to_cube(part)
        if cube is None:
            return None
        prefix.append(cube)
        rest = rest.left
    first = _formula_to_cube(rest)
    if first is None:
        return None
    prefix.append(first)
    prefix.reverse()
    return TraceFormula(tuple(prefix), loop)
