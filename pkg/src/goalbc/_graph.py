"""Small directed-graph helpers shared by the automata code."""
from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, Sequence


def tarjan_scc(n: int, succ: Sequence[Sequence[int]]) -> list[int]:
    """Return the SCC id of every vertex (iterative Tarjan)."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = n_comp
                        if w == v:
                            break
                    n_comp += 1
    return comp


def accepting_cycle_states(
    n: int, succ: Sequence[Sequence[int]], accepting: Iterable[int]
) -> set[int]:
    """Vertices lying in a nontrivial SCC that contains an accepting vertex."""
    comp = tarjan_scc(n, succ)
    size: dict[int, int] = {}
    for c in comp:
        size[c] = size.get(c, 0) + 1
    nontrivial = {c for c, k in size.items() if k > 1}
    nontrivial.update(comp[v] for v in range(n) if v in succ[v])
    good = {comp[v] for v in accepting if comp[v] in nontrivial}
    return {v for v in range(n) if comp[v] in good}


def bfs_path(
    sources: Iterable[int],
    edges_from: Callable[[int], Iterable[tuple[int, int]]],
    is_target: Callable[[int], bool],
) -> tuple[int, list[int]] | None:
    """Shortest edge path from any source to a target vertex.

    ``edges_from(v)`` yields ``(edge_id, successor)`` pairs. Returns the target
    vertex and the list of edge ids, or ``None``. A source that is itself a
    target yields an empty path.
    """
    parent: dict[int, tuple[int, int] | None] = {}
    queue: deque[int] = deque()
    for s in sources:
        if s not in parent:
            parent[s] = None
            queue.append(s)
    while queue:
        v = queue.popleft()
        if is_target(v):
            path = []
            u = v
            while parent[u] is not None:
                eid, prev = parent[u]
                path.append(eid)
                u = prev
            path.reverse()
            return v, path
        for eid, w in edges_from(v):
            if w not in parent:
                parent[w] = (eid, v)
                queue.append(w)
    return None


def bfs_distances(
    sources: Iterable[int], pred: Callable[[int], Iterable[int]]
) -> dict[int, int]:
    """Multi-source BFS distances following ``pred`` links."""
    dist = {}
    queue: deque[int] = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        for w in pred(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist
