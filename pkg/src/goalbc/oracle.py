"""LTL satisfiability, implication and equivalence, plus independent oracles.

``check_sat`` decides satisfiability through the Büchi translation. The two
oracles never touch automata: ``lasso_eval`` computes the exact truth value
of a formula on an ultimately periodic word, and ``bounded_sat_search``
enumerates every lasso up to a length bound.
"""
from __future__ import annotations

from collections import Counter
from functools import lru_cache
from itertools import product

import numpy as np

from .buchi import LassoTrace, _translate, check_emptiness, translate
from .ltl import (
    And,
    Atom,
    Bottom,
    Cube,
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
)

STATS: Counter = Counter()


class WitnessError(AssertionError):
    """The automaton produced a witness the exact evaluator rejects."""


def check_sat(f: Formula) -> LassoTrace | None:
    """A verified model of ``f`` as a lasso, or ``None`` when unsatisfiable."""
    return _check_sat(f)


@lru_cache(maxsize=16384)
def _check_sat(f: Formula) -> LassoTrace | None:
    STATS["sat_calls"] += 1
    witness = check_emptiness(translate(f))
    if witness is not None and not lasso_eval(witness, f):
        raise WitnessError(f"witness {witness} does not satisfy {f}")
    return witness


def is_sat(f: Formula) -> bool:
    return check_sat(f) is not None


def implies(f: Formula, g: Formula) -> bool:
    """Every model of ``f`` is a model of ``g``."""
    return not is_sat(And(f, Not(g)))


def equiv(f: Formula, g: Formula) -> bool:
    return f == g or (implies(f, g) and implies(g, f))


def clear_caches() -> None:
    """Forget memoised SAT results and translations."""
    _check_sat.cache_clear()
    _translate.cache_clear()


# --------------------------------------------------------------------------
# exact evaluation on lassos


def lasso_eval(w: LassoTrace, f: Formula) -> bool:
    """Truth of ``f`` at position 0 of ``stem . loop^omega``.

    Every subformula is evaluated at each of the ``len(w)`` distinct
    positions; Until/F take the least and Release/G the greatest fixpoint of
    their one-step unfolding around the loop, which is exact.
    """
    letters = w.letters()
    succ = [w.successor(i) for i in range(len(w))]
    return _eval(f, letters, succ, {})[0]


def _eval(f, letters, succ, memo) -> list[bool]:
    if f in memo:
        return memo[f]
    k = len(letters)
    if isinstance(f, Top):
        val = [True] * k
    elif isinstance(f, Bottom):
        val = [False] * k
    elif isinstance(f, Atom):
        val = [letter.get(f.name, False) for letter in letters]
    elif isinstance(f, Not):
        val = [not v for v in _eval(f.arg, letters, succ, memo)]
    elif isinstance(f, Next):
        inner = _eval(f.arg, letters, succ, memo)
        val = [inner[succ[i]] for i in range(k)]
    elif isinstance(f, (And, Or, Implies)):
        a = _eval(f.left, letters, succ, memo)
        b = _eval(f.right, letters, succ, memo)
        if isinstance(f, And):
            val = [x and y for x, y in zip(a, b)]
        elif isinstance(f, Or):
            val = [x or y for x, y in zip(a, b)]
        else:
            val = [(not x) or y for x, y in zip(a, b)]
    elif isinstance(f, (Until, Finally)):
        a = [True] * k if isinstance(f, Finally) else _eval(f.left, letters, succ, memo)
        b = _eval(f.arg if isinstance(f, Finally) else f.right, letters, succ, memo)
        val = _fixpoint(a, b, succ, least=True)
    elif isinstance(f, (Release, Globally)):
        a = [False] * k if isinstance(f, Globally) else _eval(f.left, letters, succ, memo)
        b = _eval(f.arg if isinstance(f, Globally) else f.right, letters, succ, memo)
        val = _fixpoint(a, b, succ, least=False)
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = val
    return val


def _fixpoint(a, b, succ, least: bool) -> list[bool]:
    k = len(succ)
    val = [not least] * k
    changed = True
    while changed:
        changed = False
        for i in reversed(range(k)):
            if least:
                new = b[i] or (a[i] and val[succ[i]])
            else:
                new = b[i] and (a[i] or val[succ[i]])
            if new != val[i]:
                val[i] = new
                changed = True
    return val


# --------------------------------------------------------------------------
# bounded enumeration


def bounded_sat_search(f: Formula, bound: int, chunk: int = 1 << 16) -> LassoTrace | None:
    """First lasso of total length <= ``bound`` satisfying ``f``.

    Lassos are enumerated over complete assignments to the atoms of ``f``, by
    increasing length, then increasing stem length, then letter code. A
    ``None`` result does not prove unsatisfiability.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    atoms = sorted(atoms_of(f))
    width = len(atoms)
    for n in range(1, bound + 1):
        for stem_len in range(n):
            succ = [i + 1 for i in range(n - 1)] + [stem_len]
            total = 1 << (width * n)
            for lo in range(0, total, chunk):
                codes = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
                truth = _eval_batch(f, codes, atoms, n, succ, {})[:, 0]
                hits = np.flatnonzero(truth)
                if hits.size:
                    w = _decode(int(codes[hits[0]]), atoms, n, stem_len)
                    if not lasso_eval(w, f):
                        raise AssertionError("batch and scalar evaluation disagree")
                    return w
    return None


def _decode(code: int, atoms: list[str], n: int, stem_len: int) -> LassoTrace:
    width = len(atoms)
    cubes = []
    for i in range(n):
        cubes.append(
            Cube(tuple((a, bool(code >> (i * width + j) & 1)) for j, a in enumerate(atoms)))
        )
    return LassoTrace(tuple(cubes[:stem_len]), tuple(cubes[stem_len:]))


def _eval_batch(f, codes, atoms, n, succ, memo) -> np.ndarray:
    """Vectorised twin of ``_eval``: rows are lassos, columns positions."""
    if f in memo:
        return memo[f]
    rows = codes.shape[0]
    if isinstance(f, Top):
        val = np.ones((rows, n), dtype=bool)
    elif isinstance(f, Bottom):
        val = np.zeros((rows, n), dtype=bool)
    elif isinstance(f, Atom):
        j = atoms.index(f.name)
        width = len(atoms)
        shifts = np.arange(n, dtype=np.int64) * width + j
        val = ((codes[:, None] >> shifts[None, :]) & 1).astype(bool)
    elif isinstance(f, Not):
        val = ~_eval_batch(f.arg, codes, atoms, n, succ, memo)
    elif isinstance(f, Next):
        val = _eval_batch(f.arg, codes, atoms, n, succ, memo)[:, succ]
    elif isinstance(f, (And, Or, Implies)):
        a = _eval_batch(f.left, codes, atoms, n, succ, memo)
        b = _eval_batch(f.right, codes, atoms, n, succ, memo)
        val = a & b if isinstance(f, And) else a | b if isinstance(f, Or) else ~a | b
    elif isinstance(f, (Until, Finally, Release, Globally)):
        unary = isinstance(f, (Finally, Globally))
        least = isinstance(f, (Until, Finally))
        b = _eval_batch(f.arg if unary else f.right, codes, atoms, n, succ, memo)
        if unary:
            a = np.full((rows, n), least, dtype=bool)
        else:
            a = _eval_batch(f.left, codes, atoms, n, succ, memo)
        val = np.full((rows, n), not least, dtype=bool)
        for _ in range(n + 1):
            for i in reversed(range(n)):
                if least:
                    val[:, i] = b[:, i] | (a[:, i] & val[:, succ[i]])
                else:
                    val[:, i] = b[:, i] & (a[:, i] | val[:, succ[i]])
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = val
    return val


def all_lassos(atoms: list[str], bound: int):
    """Every lasso of total length <= ``bound`` over complete letters."""
    letters = [
        Cube(tuple(zip(atoms, bits))) for bits in product((False, True), repeat=len(atoms))
    ]
    for n in range(1, bound + 1):
        for stem_len in range(n):
            for word in product(letters, repeat=n):
                yield LassoTrace(word[:stem_len], word[stem_len:])
