"""Büchi automata with cube-labelled transitions.

Translation goes NNF -> on-the-fly tableau producing a transition-marked
generalized Büchi automaton (one mark per Until subformula) -> counter
degeneralization into a state-based Büchi automaton. The result is trimmed
and reduced by bisimulation, both of which preserve the language.
"""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable

from . import _graph
from .ltl import (
    And,
    Atom,
    Bottom,
    Cube,
    Formula,
    Next,
    Not,
    Or,
    Release,
    Top,
    Until,
    atoms_of,
    nnf,
    subformulas,
)

DEFAULT_STATE_CAP = 100_000
DEFAULT_TRANSITION_CAP = 2_000_000


class ResourceLimitError(RuntimeError):
    """An automaton grew past the configured state or transition cap."""


@dataclass
class Limits:
    state_cap: int = DEFAULT_STATE_CAP
    transition_cap: int = DEFAULT_TRANSITION_CAP


LIMITS = Limits()


def configure(state_cap: int | None = None, transition_cap: int | None = None) -> None:
    """Change the process-wide automaton size caps."""
    if state_cap is not None:
        LIMITS.state_cap = state_cap
    if transition_cap is not None:
        LIMITS.transition_cap = transition_cap


class Kind(enum.Enum):
    NORMAL = "normal"
    FUSION = "fusion"


@dataclass(frozen=True)
class Transition:
    src: int
    label: Cube
    dst: int
    kind: Kind = Kind.NORMAL
    conflict: str | None = None
    # product transitions remember the pair of factor transitions they came from
    origin: tuple[int, int] | None = None


@dataclass(frozen=True)
class BuchiAutomaton:
    atoms: tuple[str, ...]
    n_states: int
    transitions: tuple[Transition, ...]
    initial: int
    accepting: frozenset[int]
    state_names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not 0 <= self.initial < self.n_states:
            raise ValueError("initial state out of range")
        if any(not 0 <= q < self.n_states for q in self.accepting):
            raise ValueError("accepting state out of range")
        known = set(self.atoms)
        for t in self.transitions:
            if not (0 <= t.src < self.n_states and 0 <= t.dst < self.n_states):
                raise ValueError(f"transition {t} out of range")
            if not t.label.atoms <= known:
                raise ValueError(f"label {t.label} mentions undeclared atoms")

    @cached_property
    def out(self) -> list[list[int]]:
        """Outgoing transition indices per state, in index order."""
        out: list[list[int]] = [[] for _ in range(self.n_states)]
        for i, t in enumerate(self.transitions):
            out[t.src].append(i)
        return out

    @property
    def fusion_transitions(self) -> list[int]:
        return [i for i, t in enumerate(self.transitions) if t.kind is Kind.FUSION]

    def successors(self, allowed: Callable[[int], bool] | None = None) -> list[list[int]]:
        succ: list[list[int]] = [[] for _ in range(self.n_states)]
        for i, t in enumerate(self.transitions):
            if allowed is None or allowed(i):
                succ[t.src].append(t.dst)
        return succ


@dataclass(frozen=True)
class LassoTrace:
    """The ultimately periodic word ``stem . loop^omega`` over cubes."""

    stem: tuple[Cube, ...]
    loop: tuple[Cube, ...]

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")

    def __len__(self):
        return len(self.stem) + len(self.loop)

    def letters(self) -> list[dict[str, bool]]:
        """Positions as assignments; atoms a cube leaves open read as false."""
        return [c.mapping for c in self.stem + self.loop]

    def successor(self, i: int) -> int:
        return i + 1 if i + 1 < len(self) else len(self.stem)

    def to_json(self) -> dict:
        return {
            "stem": [c.to_strings() for c in self.stem],
            "loop": [c.to_strings() for c in self.loop],
        }

    def __str__(self):
        stem = ", ".join(f"{{{c}}}" for c in self.stem)
        loop = ", ".join(f"{{{c}}}" for c in self.loop)
        return f"{stem}{' ' if stem else ''}({loop})^w"


# --------------------------------------------------------------------------
# translation


def _text_key(f: Formula) -> str:
    return f.text


def _expand(obligations: frozenset[Formula]) -> list[tuple[Cube, frozenset, frozenset]]:
    """Tableau expansion of one state.

    Returns ``(label, next obligations, postponed untils)`` triples. Dominated
    triples (stronger label, more obligations, fewer fulfilled untils) are
    dropped; that keeps the language unchanged.
    """
    results: set[tuple[Cube, frozenset, frozenset]] = set()
    work = [(tuple(sorted(obligations, key=_text_key)), {}, frozenset(), frozenset())]
    while work:
        todo, lits, nxt, post = work.pop()
        if not todo:
            results.add((Cube.from_mapping(lits), nxt, post))
            continue
        f, rest = todo[0], todo[1:]
        if isinstance(f, Top):
            work.append((rest, lits, nxt, post))
        elif isinstance(f, Bottom):
            continue
        elif isinstance(f, (Atom, Not)):
            name, pol = (f.name, True) if isinstance(f, Atom) else (f.arg.name, False)
            if lits.get(name, pol) != pol:
                continue
            work.append((rest, {**lits, name: pol}, nxt, post))
        elif isinstance(f, And):
            work.append(((f.left, f.right) + rest, lits, nxt, post))
        elif isinstance(f, Or):
            work.append(((f.right,) + rest, lits, nxt, post))
            work.append(((f.left,) + rest, lits, nxt, post))
        elif isinstance(f, Next):
            work.append((rest, lits, nxt | {f.arg}, post))
        elif isinstance(f, Until):
            work.append(((f.left,) + rest, lits, nxt | {f}, post | {f}))
            work.append(((f.right,) + rest, lits, nxt, post))
        elif isinstance(f, Release):
            work.append(((f.right,) + rest, lits, nxt | {f}, post))
            work.append(((f.left, f.right) + rest, lits, nxt, post))
        else:
            raise TypeError(f"formula not in negation normal form: {f}")
    items = list(results)
    # items are distinct, so domination is a strict order here
    kept = [
        (c, n, p)
        for i, (c, n, p) in enumerate(items)
        if not any(
            j != i and c.implies(c2) and n2 <= n and p2 <= p
            for j, (c2, n2, p2) in enumerate(items)
        )
    ]
    kept.sort(key=lambda r: (str(r[0]), sorted(map(_text_key, r[1])), sorted(map(_text_key, r[2]))))
    return kept


def translate(f: Formula) -> BuchiAutomaton:
    """Büchi automaton accepting exactly the models of ``f``.

    Raises :class:`ResourceLimitError` when the configured caps are exceeded.
    """
    return _translate(f, LIMITS.state_cap, LIMITS.transition_cap)


@lru_cache(maxsize=2048)
def _translate(f: Formula, state_cap: int, transition_cap: int) -> BuchiAutomaton:
    root = nnf(f)
    atoms = tuple(sorted(atoms_of(root)))
    untils = sorted({g for g in subformulas(root) if isinstance(g, Until)}, key=_text_key)
    m = len(untils)

    start = (frozenset([root]), 0)
    ids = {start: 0}
    keys = [start]
    edges: list[tuple[int, Cube, int]] = []
    expansions: dict[frozenset, list] = {}
    i = 0
    while i < len(keys):
        obligations, level = keys[i]
        if obligations not in expansions:
            expansions[obligations] = _expand(obligations)
        for cube, nxt, postponed in expansions[obligations]:
            j = 0 if level == m else level
            while j < m and untils[j] not in postponed:
                j += 1
            key = (nxt, j)
            if key not in ids:
                if len(keys) >= state_cap:
                    raise ResourceLimitError(f"more than {state_cap} states translating {f}")
                ids[key] = len(keys)
                keys.append(key)
            edges.append((i, cube, ids[key]))
            if len(edges) > transition_cap:
                raise ResourceLimitError(
                    f"more than {transition_cap} transitions translating {f}"
                )
        i += 1

    accepting = {ids[k] for k in keys if k[1] == m}
    names = [_state_name(obl, lvl, m) for obl, lvl in keys]
    return _reduce(atoms, len(keys), edges, 0, accepting, names)


def _state_name(obligations: frozenset, level: int, m: int) -> str:
    body = ", ".join(sorted(map(_text_key, obligations))) or "true"
    return f"{{{body}}}" + (f" #{level}" if m else "")


def _reduce(atoms, n, edges, initial, accepting, names) -> BuchiAutomaton:
    """Trim useless states, merge bisimilar ones and renumber in BFS order."""
    succ: list[list[int]] = [[] for _ in range(n)]
    pred: list[list[int]] = [[] for _ in range(n)]
    for s, _, d in edges:
        succ[s].append(d)
        pred[d].append(s)
    cyc = _graph.accepting_cycle_states(n, succ, accepting)
    useful = set(_graph.bfs_distances(cyc, lambda v: pred[v]))
    if initial not in useful:
        return BuchiAutomaton(atoms, 1, (), 0, frozenset(), (names[initial],))

    # coarsest bisimulation refining the accepting/non-accepting split
    block = {q: int(q in accepting) for q in useful}
    live_edges = [(s, c, d) for s, c, d in edges if s in useful and d in useful]
    while True:
        outgoing: dict[int, set] = defaultdict(set)
        for s, c, d in live_edges:
            outgoing[s].add((c, block[d]))
        signature = {
            q: (block[q], tuple(sorted((str(c), b) for c, b in outgoing[q]))) for q in useful
        }
        numbering: dict = {}
        new_block = {q: numbering.setdefault(signature[q], len(numbering)) for q in sorted(useful)}
        if len(numbering) == len(set(block.values())):
            block = new_block
            break
        block = new_block

    # quotient edges, dropping any label implied by a weaker one on the same arc
    arcs: dict[tuple[int, int], set[Cube]] = defaultdict(set)
    for s, c, d in live_edges:
        arcs[(block[s], block[d])].add(c)
    for key, labels in arcs.items():
        arcs[key] = {c for c in labels if not any(o != c and c.implies(o) for o in labels)}
    out: dict[int, list[tuple[Cube, int]]] = defaultdict(list)
    for (s, d), labels in arcs.items():
        out[s].extend((c, d) for c in labels)

    order = [block[initial]]
    seen = {order[0]}
    k = 0
    rep_name = {}
    for q in sorted(useful):
        rep_name.setdefault(block[q], names[q])
    while k < len(order):
        b = order[k]
        for c, d in sorted(out[b], key=lambda e: (str(e[0]), rep_name[e[1]])):
            if d not in seen:
                seen.add(d)
                order.append(d)
        k += 1
    index = {b: i for i, b in enumerate(order)}
    transitions = []
    for b in order:
        for c, d in sorted(out[b], key=lambda e: (index[e[1]], str(e[0]))):
            transitions.append(Transition(index[b], c, index[d]))
    acc_blocks = {block[q] for q in useful if q in accepting}
    return BuchiAutomaton(
        atoms,
        len(order),
        tuple(transitions),
        0,
        frozenset(index[b] for b in acc_blocks),
        tuple(rep_name[b] for b in order),
    )


# --------------------------------------------------------------------------
# emptiness


@dataclass(frozen=True)
class Run:
    """An accepting lasso run given as transition indices."""

    stem: tuple[int, ...]
    loop: tuple[int, ...]

    def trace(self, a: BuchiAutomaton) -> LassoTrace:
        return LassoTrace(
            tuple(a.transitions[i].label for i in self.stem),
            tuple(a.transitions[i].label for i in self.loop),
        )


def find_accepting_run(
    a: BuchiAutomaton, allowed: Callable[[int], bool] | None = None
) -> Run | None:
    """Shortest-stem accepting lasso using only ``allowed`` transitions.

    SCC analysis finds the states on accepting cycles; the stem is a BFS path
    to the nearest accepting such state and the loop a BFS cycle inside its SCC.
    """
    ok = allowed or (lambda i: True)
    succ = a.successors(ok)
    cyc = _graph.accepting_cycle_states(a.n_states, succ, a.accepting)
    targets = cyc & a.accepting
    if not targets:
        return None

    def edges_from(v):
        for i in a.out[v]:
            if ok(i):
                yield i, a.transitions[i].dst

    found = _graph.bfs_path([a.initial], edges_from, targets.__contains__)
    if found is None:
        return None
    f, stem = found
    comp = _graph.tarjan_scc(a.n_states, succ)

    def edges_in_scc(v):
        for i, w in edges_from(v):
            if comp[w] == comp[f]:
                yield i, w

    # one step out of f, then back to f
    best = None
    for i, w in edges_in_scc(f):
        back = _graph.bfs_path([w], edges_in_scc, lambda v: v == f)
        if back is not None and (best is None or len(back[1]) + 1 < len(best)):
            best = [i] + back[1]
    assert best is not None
    return Run(tuple(stem), tuple(best))


def check_emptiness(a: BuchiAutomaton) -> LassoTrace | None:
    """``None`` when ``L(a)`` is empty, otherwise an accepted lasso."""
    run = find_accepting_run(a)
    return None if run is None else run.trace(a)


def is_empty(a: BuchiAutomaton) -> bool:
    return find_accepting_run(a) is None


def accepts(a: BuchiAutomaton, w: LassoTrace) -> bool:
    """Does ``a`` accept the word ``w``?

    Each cube of ``w`` is read as the letter assigning its literals and false
    to every other atom. Decided by emptiness of the product of ``a`` with
    the lasso-shaped automaton of ``w``.
    """
    letters = w.letters()
    index: dict[tuple[int, int], int] = {}
    keys: list[tuple[int, int]] = []

    def vid(key):
        if key not in index:
            index[key] = len(keys)
            keys.append(key)
        return index[key]

    vid((0, a.initial))
    succ: list[list[int]] = []
    i = 0
    while i < len(keys):
        pos, q = keys[i]
        nxt = []
        for t in a.out[q]:
            tr = a.transitions[t]
            if tr.label.satisfied_by(letters[pos]):
                nxt.append(vid((w.successor(pos), tr.dst)))
        succ.append(nxt)
        i += 1
    accepting = [v for v, (_, q) in enumerate(keys) if q in a.accepting]
    return bool(_graph.accepting_cycle_states(len(keys), succ, accepting))


# --------------------------------------------------------------------------
# dot


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(a: BuchiAutomaton, name: str = "buchi") -> str:
    """Graphviz rendering; fusion edges are dashed and labelled ``fuse:<atom>``."""
    lines = [f"digraph {_dot_quote(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    lines.append('  __init [shape=point, label=""];')
    for q in range(a.n_states):
        shape = "doublecircle" if q in a.accepting else "circle"
        tooltip = a.state_names[q] if q < len(a.state_names) else str(q)
        lines.append(f"  {q} [label={_dot_quote(str(q))}, shape={shape}, tooltip={_dot_quote(tooltip)}];")
    lines.append(f"  __init -> {a.initial};")
    for t in a.transitions:
        if t.kind is Kind.FUSION:
            label = f"{t.label} / fuse:{t.conflict}"
            lines.append(
                f"  {t.src} -> {t.dst} [label={_dot_quote(label)}, style=dashed, color=red];"
            )
        else:
            lines.append(f"  {t.src} -> {t.dst} [label={_dot_quote(str(t.label))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
