"""BC identification through the synthesis product of two Büchi automata.

For a goal pair ``(g_i, g_j)`` the automata of ``Dom & G_-i & !g_i`` and
``Dom & G_-j & !g_j`` are combined in an intersection product that also
carries *fusion* edges: a pair of factor transitions whose labels clash on
exactly one fusible atom yields an edge labelled with both labels minus that
atom. Accepting lassos that use a single fusion transition describe the
moment where the goals pull a controllable atom in opposite directions.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from . import _graph
from .buchi import (
    LIMITS,
    BuchiAutomaton,
    Kind,
    LassoTrace,
    ResourceLimitError,
    Run,
    Transition,
    export_dot,
    translate,
)
from .ltl import Cube, Not, TraceFormula, conj, fuse
from .oracle import equiv
from .scene import BcKind, BoundaryCondition, Scene, more_general, validate_bc


def synthesize_trace_formulas(t1: TraceFormula, t2: TraceFormula) -> list[TraceFormula]:
    """Every synthesis of ``t1`` and ``t2``: one fused position, conjunction elsewhere.

    Position ``len(prefix)`` stands for the loop cube.
    """
    if len(t1.prefix) != len(t2.prefix):
        raise ValueError("trace formulas must have prefixes of equal length")
    left = list(t1.prefix) + [t1.loop]
    right = list(t2.prefix) + [t2.loop]
    joined = [a.conjoin(b) for a, b in zip(left, right)]
    out = []
    for j, (a, b) in enumerate(zip(left, right)):
        fused = fuse(a, b)
        if fused is None:
            continue
        if any(c is None for i, c in enumerate(joined) if i != j):
            continue
        cubes = [fused[0] if i == j else c for i, c in enumerate(joined)]
        out.append(TraceFormula(tuple(cubes[:-1]), cubes[-1]))
    return out


def synthesis_product(
    a1: BuchiAutomaton, a2: BuchiAutomaton, fusible=frozenset()
) -> BuchiAutomaton:
    """Layered intersection of ``a1`` and ``a2`` extended with fusion edges.

    States are ``(q1, q2, layer)``. Leaving layer 1 from an accepting ``q1``
    moves to layer 2; leaving layer 2 from an accepting ``q2`` moves back to
    layer 1. States ``(q1, q2, 2)`` with ``q2`` accepting are accepting.
    Only states reachable from the initial one are built.
    """
    if a1.atoms != a2.atoms:
        atoms = tuple(sorted(set(a1.atoms) | set(a2.atoms)))
    else:
        atoms = a1.atoms
    fusible = frozenset(fusible)
    index: dict[tuple[int, int, int], int] = {}
    keys: list[tuple[int, int, int]] = []

    def vid(key):
        if key not in index:
            if len(keys) >= LIMITS.state_cap:
                raise ResourceLimitError(f"product exceeds {LIMITS.state_cap} states")
            index[key] = len(keys)
            keys.append(key)
        return index[key]

    vid((a1.initial, a2.initial, 1))
    edges: list[Transition] = []
    i = 0
    while i < len(keys):
        q1, q2, layer = keys[i]
        if layer == 1:
            nxt_layer = 2 if q1 in a1.accepting else 1
        else:
            nxt_layer = 1 if q2 in a2.accepting else 2
        for t1 in a1.out[q1]:
            e1 = a1.transitions[t1]
            for t2 in a2.out[q2]:
                e2 = a2.transitions[t2]
                dst_key = (e1.dst, e2.dst, nxt_layer)
                both = e1.label.conjoin(e2.label)
                if both is not None:
                    edges.append(Transition(i, both, vid(dst_key), origin=(t1, t2)))
                    continue
                fused = fuse(e1.label, e2.label)
                if fused is not None and fused[1] in fusible:
                    edges.append(
                        Transition(i, fused[0], vid(dst_key), Kind.FUSION, fused[1], (t1, t2))
                    )
                if len(edges) > LIMITS.transition_cap:
                    raise ResourceLimitError(
                        f"product exceeds {LIMITS.transition_cap} transitions"
                    )
        i += 1
    accepting = frozenset(v for v, (_, q2, layer) in enumerate(keys) if layer == 2 and q2 in a2.accepting)
    names = tuple(f"{q1},{q2},{layer}" for q1, q2, layer in keys)
    return BuchiAutomaton(atoms, len(keys), tuple(edges), 0, accepting, names)


# --------------------------------------------------------------------------
# single-fusion lassos


@dataclass(frozen=True)
class FusionRun:
    run: Run
    # representative fusion transition; its layer copies share ``origin``
    edge: int
    conflict: str
    uniform_loop: bool


class _LassoSearch:
    """Shared precomputation for the per-fusion-edge searches on one product."""

    def __init__(self, a: BuchiAutomaton):
        self.a = a
        self.normal = [t.kind is Kind.NORMAL for t in a.transitions]
        self.normal_out = [[i for i in a.out[v] if self.normal[i]] for v in range(a.n_states)]
        self._stem_parent = self._bfs_tree([a.initial])
        self.loop_anchor = self._uniform_anchors()
        succ = a.successors(lambda i: self.normal[i])
        cyc = _graph.accepting_cycle_states(a.n_states, succ, a.accepting)
        self.any_anchor = cyc & a.accepting

    def _bfs_tree(self, sources) -> dict[int, tuple[int, int] | None]:
        parent: dict[int, tuple[int, int] | None] = {s: None for s in sources}
        queue = deque(sources)
        while queue:
            v = queue.popleft()
            for i in self.normal_out[v]:
                w = self.a.transitions[i].dst
                if w not in parent:
                    parent[w] = (i, v)
                    queue.append(w)
        return parent

    @staticmethod
    def _path(parent, v) -> list[int]:
        path = []
        while parent[v] is not None:
            i, v = parent[v]
            path.append(i)
        path.reverse()
        return path

    def _uniform_anchors(self) -> dict[int, Cube]:
        """Accepting states on a normal cycle whose edges all carry one cube."""
        a = self.a
        by_label: dict[Cube, list[int]] = {}
        for i, t in enumerate(a.transitions):
            if self.normal[i]:
                by_label.setdefault(t.label, []).append(i)
        anchors: dict[int, Cube] = {}
        for cube in sorted(by_label, key=lambda c: (len(c), str(c))):
            ids = set(by_label[cube])
            succ = a.successors(ids.__contains__)
            for v in _graph.accepting_cycle_states(a.n_states, succ, a.accepting) & a.accepting:
                anchors.setdefault(v, cube)
        return anchors

    def stem_to(self, v: int) -> list[int] | None:
        if v not in self._stem_parent:
            return None
        return self._path(self._stem_parent, v)

    def loop_at(self, v: int, label: Cube | None) -> list[int]:
        """Shortest normal cycle through ``v``, restricted to ``label`` if given."""
        a = self.a

        def edges_from(u):
            for i in self.normal_out[u]:
                if label is None or a.transitions[i].label == label:
                    yield i, a.transitions[i].dst

        best = None
        for i, w in edges_from(v):
            back = _graph.bfs_path([w], edges_from, lambda x: x == v)
            if back is not None and (best is None or len(back[1]) + 1 < len(best)):
                best = [i] + back[1]
        assert best is not None
        return best

    def after_fusion(self, e: int) -> list[tuple[int, list[int], bool]]:
        """Anchors reachable from the target of ``e`` with their connecting paths.

        Uniform-loop anchors come first, then other accepting-cycle anchors,
        each group ordered by distance and state index.
        """
        parent = self._bfs_tree([self.a.transitions[e].dst])
        # BFS discovery order is nondecreasing in distance
        order = {v: k for k, v in enumerate(parent)}
        paths = {v: self._path(parent, v) for v in parent if v in self.any_anchor}
        key = lambda v: (len(paths[v]), order[v])  # noqa: E731
        uniform = sorted((v for v in paths if v in self.loop_anchor), key=key)
        other = sorted((v for v in paths if v not in self.loop_anchor), key=key)
        return [(v, paths[v], True) for v in uniform] + [(v, paths[v], False) for v in other]


def _fusion_groups(a: BuchiAutomaton) -> list[list[int]]:
    """Fusion transitions grouped by the factor-transition pair they come from."""
    groups: dict[tuple[int, int], list[int]] = {}
    for i in a.fusion_transitions:
        groups.setdefault(a.transitions[i].origin, []).append(i)
    return [groups[k] for k in sorted(groups, key=lambda k: min(groups[k]))]


def find_single_fusion_lassos(a: BuchiAutomaton, max_runs_per_edge: int = 1) -> list[FusionRun]:
    """Accepting lassos that use one fusion transition exactly once.

    The fusion transition either sits in the stem, with a loop of normal
    transitions, or is itself the repeated loop step (the fused cube then
    holds forever). Layer copies of the same factor pair count as one
    transition. Up to ``max_runs_per_edge`` runs are kept per transition,
    preferring loops that repeat a single cube.
    """
    groups = _fusion_groups(a)
    if not groups:
        return []
    search = _LassoSearch(a)
    found: list[FusionRun] = []
    for group in groups:
        candidates = []
        for e in group:
            t = a.transitions[e]
            stem = search.stem_to(t.src)
            if stem is None:
                continue
            for v, path, uniform in search.after_fusion(e):
                loop = search.loop_at(v, search.loop_anchor.get(v) if uniform else None)
                run = Run(tuple(stem + [e] + path), tuple(loop))
                candidates.append((not uniform, len(run.stem), e, v, run))
        runs = sorted(candidates, key=lambda c: c[:4])
        if not runs:
            runs = _fused_loop_runs(a, search, group)
        for c in runs[:max_runs_per_edge]:
            run = c[-1]
            found.append(FusionRun(run, group[0], a.transitions[group[0]].conflict, not c[0]))
    return found


def _fused_loop_runs(a: BuchiAutomaton, search: _LassoSearch, group: list[int]):
    """Runs whose loop consists only of copies of one fusion transition."""
    ids = set(group)
    succ = a.successors(ids.__contains__)
    cyc = _graph.accepting_cycle_states(a.n_states, succ, a.accepting) & a.accepting
    out = []
    for v in sorted(cyc):
        stem = search.stem_to(v)
        if stem is None:
            continue

        def edges_from(u):
            for i in a.out[u]:
                if i in ids:
                    yield i, a.transitions[i].dst

        first = next(edges_from(v))
        back = _graph.bfs_path([first[1]], edges_from, lambda x: x == v)
        if back is None:
            continue
        run = Run(tuple(stem), tuple([first[0]] + back[1]))
        out.append((False, len(stem), group[0], v, run))
    return sorted(out, key=lambda c: c[:4])


def run_to_bc(
    a: BuchiAutomaton, fr: FusionRun, scope: tuple[str, ...]
) -> BoundaryCondition:
    """A TraceFormula BC when the loop repeats one cube, otherwise a Word BC."""
    word = fr.run.trace(a)
    loop_labels = set(word.loop)
    if len(loop_labels) == 1:
        tf = TraceFormula(word.stem, word.loop[0]).normalized()
        return BoundaryCondition(
            BcKind.TRACE_FORMULA, scope, tf.to_ltl(), conflict_atom=fr.conflict, trace=tf
        )
    return BoundaryCondition(BcKind.WORD, scope, word=word, conflict_atom=fr.conflict)


@dataclass
class PairResult:
    scope: tuple[str, str]
    product_states: int
    product_transitions: int
    fusion_transitions: int
    runs: int
    bcs: list[BoundaryCondition] = field(default_factory=list)
    rejected: int = 0
    duplicates: int = 0
    subsumed: int = 0


def analyse_pair(
    s: Scene,
    i: int,
    j: int,
    fusible=None,
    max_runs_per_edge: int = 1,
    validate: bool = True,
    dump_dir: str | None = None,
    keep_most_general: bool = True,
) -> PairResult:
    """Run the synthesis-product pipeline for goals ``i`` and ``j``.

    Trace-formula BCs are validated on the scene reduced to the pair,
    deduplicated up to equivalence, and, with ``keep_most_general``, those
    strictly implied by another BC of the pair are dropped.
    """
    fusible = s.fusible if fusible is None else fusible
    gi, gj = s.goal_formulas[i], s.goal_formulas[j]
    a1 = translate(conj([s.dom, s.others(i), Not(gi)]))
    a2 = translate(conj([s.dom, s.others(j), Not(gj)]))
    product = synthesis_product(a1, a2, fusible)
    scope = (s.goal_names[i], s.goal_names[j])
    if dump_dir is not None:
        os.makedirs(dump_dir, exist_ok=True)
        path = os.path.join(dump_dir, f"{s.name or 'scene'}_{scope[0]}_{scope[1]}.dot")
        with open(path, "w") as fh:
            fh.write(export_dot(product, f"{scope[0]}x{scope[1]}"))
    runs = find_single_fusion_lassos(product, max_runs_per_edge)
    result = PairResult(
        scope, product.n_states, len(product.transitions), len(product.fusion_transitions), len(runs)
    )
    reduced = s.reduced(scope)
    words: set[LassoTrace] = set()
    for fr in runs:
        bc = run_to_bc(product, fr, scope)
        if bc.kind is BcKind.WORD:
            if bc.word in words:
                result.duplicates += 1
                continue
            words.add(bc.word)
            result.bcs.append(bc)
            continue
        if any(
            b.formula is not None and (b.formula == bc.formula or equiv(b.formula, bc.formula))
            for b in result.bcs
        ):
            result.duplicates += 1
            continue
        if validate:
            verdict = validate_bc(reduced, bc.formula)
            if not verdict.is_bc:
                result.rejected += 1
                continue
            bc = BoundaryCondition(
                bc.kind, scope, bc.formula, conflict_atom=bc.conflict_atom, verdict=verdict, trace=bc.trace
            )
        result.bcs.append(bc)
    if keep_most_general:
        formulas = [b for b in result.bcs if b.formula is not None]
        weaker = {
            id(b)
            for b in formulas
            if any(o is not b and more_general(o.formula, b.formula) for o in formulas)
        }
        result.subsumed = len(weaker)
        result.bcs = [b for b in result.bcs if id(b) not in weaker]
    return result


def semanticbc(
    s: Scene,
    fusible=None,
    max_runs_per_edge: int = 1,
    validate: bool = True,
    dump_dir: str | None = None,
    stats: dict | None = None,
    keep_most_general: bool = True,
) -> tuple[list[BoundaryCondition], list[tuple[str, str]]]:
    """BCs for every goal pair, and the pairs (scopes) that produced any."""
    if s.n < 2:
        raise ValueError("SemanticBC needs at least two goals")
    stats = {} if stats is None else stats
    bcs: list[BoundaryCondition] = []
    scopes: list[tuple[str, str]] = []
    pairs = []
    for i, j in combinations(range(s.n), 2):
        r = analyse_pair(
            s, i, j, fusible, max_runs_per_edge, validate, dump_dir, keep_most_general
        )
        pairs.append(r)
        bcs.extend(r.bcs)
        if r.bcs:
            scopes.append(r.scope)
    stats["pairs"] = [
        {
            "scope": list(r.scope),
            "product_states": r.product_states,
            "product_transitions": r.product_transitions,
            "fusion_transitions": r.fusion_transitions,
            "runs": r.runs,
            "rejected": r.rejected,
            "duplicates": r.duplicates,
            "subsumed": r.subsumed,
        }
        for r in pairs
    ]
    stats["bc_t"] = sum(b.kind is BcKind.TRACE_FORMULA for b in bcs)
    stats["bc_w"] = sum(b.kind is BcKind.WORD for b in bcs)
    return bcs, scopes
