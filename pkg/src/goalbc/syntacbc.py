"""BC construction by strengthening one disjunct of the negated goals.

For goal ``g_i`` the negation ``!g_i`` is rewritten into a *special case*
``sc`` (``sc -> !g_i`` but not conversely) picked from a small template
table. If ``sc`` is consistent with the domain and the other goals, then
``sc | !G_-i`` is a boundary condition.
"""
from __future__ import annotations

from .ltl import (
    TRUE,
    And,
    Atom,
    Bottom,
    Finally,
    Formula,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Release,
    Top,
    Until,
    atoms_of,
    conj,
    disj,
)
from .oracle import implies, is_sat
from .scene import (
    BcKind,
    BoundaryCondition,
    Scene,
    contrasty_reduce,
    find_extra_goals,
    validate_bc,
)


def push_negation(f: Formula, negate: bool = True) -> Formula:
    """Negation normal form that keeps ``G``, ``F`` and ``->`` in place.

    Unlike :func:`goalbc.ltl.nnf` the result stays close to the way goals
    are written, e.g. ``!G (call -> F open)`` becomes
    ``F (call & G !open)``.
    """
    if not negate:
        if isinstance(f, Not):
            return push_negation(f.arg, True)
        if isinstance(f, (Next, Globally, Finally)):
            return type(f)(push_negation(f.arg, False))
        if isinstance(f, (And, Or, Implies, Until, Release)):
            return type(f)(push_negation(f.left, False), push_negation(f.right, False))
        return f
    if isinstance(f, Top):
        return Bottom()
    if isinstance(f, Bottom):
        return TRUE
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return push_negation(f.arg, False)
    if isinstance(f, Next):
        return Next(push_negation(f.arg))
    if isinstance(f, Globally):
        return Finally(push_negation(f.arg))
    if isinstance(f, Finally):
        return Globally(push_negation(f.arg))
    if isinstance(f, And):
        return Or(push_negation(f.left), push_negation(f.right))
    if isinstance(f, Or):
        return And(push_negation(f.left), push_negation(f.right))
    if isinstance(f, Implies):
        return And(push_negation(f.left, False), push_negation(f.right))
    if isinstance(f, Until):
        return Release(push_negation(f.left), push_negation(f.right))
    if isinstance(f, Release):
        return Until(push_negation(f.left), push_negation(f.right))
    raise TypeError(f"not a formula: {f!r}")


def fresh_atom(s: Scene, i: int) -> str | None:
    """Alphabetically first atom of the other goals or domain absent from goal ``i``."""
    pool = set(atoms_of(s.dom)) | set(atoms_of(s.others(i)))
    candidates = sorted(pool - atoms_of(s.goal_formulas[i]))
    return candidates[0] if candidates else None


def template_candidates(f: Formula, p: str | None) -> list[Formula]:
    """Special-case candidates for ``f`` in preference order.

    ``p`` is the fresh atom; rows that need it yield nothing when it is None.
    """
    need_p = isinstance(f, (Top, Atom, And, Globally)) or (
        isinstance(f, Not) and isinstance(f.arg, Atom)
    )
    if need_p:
        if p is None:
            return []
        return [Atom(p) if isinstance(f, Top) else And(f, Atom(p))]
    if isinstance(f, Or):
        return [f.left, f.right]
    if isinstance(f, Implies):
        return [push_negation(f.left), f.right]
    if isinstance(f, Until):
        return [f.right, And(f.left, Next(f.right))]
    if isinstance(f, Finally):
        # F a is true U a
        return [f.arg, Next(f.arg)]
    if isinstance(f, Release):
        return [And(f.right, Next(f.left)), f.left]
    return []


def is_special_case(sc: Formula, f: Formula) -> bool:
    return implies(sc, f) and not implies(f, sc)


def special_case_by_template(f: Formula, s: Scene, i: int) -> Formula | None:
    """First template candidate for ``f`` that is a genuine special case of it."""
    for sc in template_candidates(f, fresh_atom(s, i)):
        if is_special_case(sc, f):
            return sc
    return None


def syntactic_substitution(s: Scene, i: int, sc: Formula) -> Formula:
    """``!g_1 | ... | sc | ... | !g_n`` with ``sc`` in place of ``!g_i``."""
    return disj(sc if k == i else Not(g) for k, g in enumerate(s.goal_formulas))


def syntacbc(
    s: Scene, reduce: bool = True, validate: bool = True, stats: dict | None = None
) -> list[BoundaryCondition]:
    """Compute syntactic BCs for every goal; empty when the scene has extra goals."""
    stats = {} if stats is None else stats
    stats.setdefault("rejected", 0)
    if find_extra_goals(s):
        return []
    scope = s.goal_names
    found: list[BoundaryCondition] = []
    for i, g in enumerate(s.goal_formulas):
        f = push_negation(g)
        p = fresh_atom(s, i)
        for sc in template_candidates(f, p):
            if not is_special_case(sc, f):
                continue
            if not is_sat(conj([sc, s.dom, s.others(i)])):
                continue
            bc = syntactic_substitution(s, i, sc)
            verdict = validate_bc(s, bc) if validate else None
            if verdict is not None and not verdict.is_bc:
                stats["rejected"] += 1
                continue
            found.append(BoundaryCondition(BcKind.SYNTACTIC, scope, bc, verdict=verdict))
            break
    stats["candidates"] = len(found)
    return contrasty_reduce(s, found) if reduce else found
