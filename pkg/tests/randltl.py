"""Seeded random formulas and scenes for property tests."""
from __future__ import annotations

import random

from goalbc.ltl import (
    FALSE,
    TRUE,
    And,
    Atom,
    Finally,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Release,
    Until,
    formula_size,
)
from goalbc.scene import Scene

ATOMS = ("a", "b", "c")
_UNARY = (Not, Next, Globally, Finally)
_BINARY = (And, Or, Implies, Until, Release)


def random_formula(rng: random.Random, size: int, atoms=ATOMS):
    """A formula whose node count is at most ``size``."""
    if size <= 1:
        r = rng.random()
        if r < 0.06:
            return TRUE
        if r < 0.1:
            return FALSE
        return Atom(rng.choice(atoms))
    if size == 2 or rng.random() < 0.35:
        return rng.choice(_UNARY)(random_formula(rng, size - 1, atoms))
    left = rng.randint(1, size - 2)
    ctor = rng.choice(_BINARY)
    return ctor(random_formula(rng, left, atoms), random_formula(rng, size - 1 - left, atoms))


def random_goal(rng: random.Random, max_size: int, atoms=ATOMS):
    """Goals are usually invariants, as in requirement documents."""
    while True:
        body = random_formula(rng, rng.randint(1, max_size - 2), atoms)
        f = Globally(body) if rng.random() < 0.7 else body
        if formula_size(f) <= max_size:
            return f


def random_scene(rng: random.Random, max_size: int = 8, atoms=ATOMS) -> Scene:
    g1 = random_goal(rng, max_size, atoms)
    g2 = random_goal(rng, max_size, atoms)
    return Scene("random", atoms, atoms, (), (("g1", g1), ("g2", g2)))
