"""Pure-Python search kernel over int bit masks.

Mirrors the compiled kernel's API exactly; works for any species count
because Python ints are unbounded. Status codes for bfs_witness:
0 = goal found, 1 = frontier exhausted (definitive absence),
2 = stopped by the depth limit, 3 = stopped by the node budget.
"""

from __future__ import annotations

from collections import deque

BACKEND = "pure"

FOUND = 0
EXHAUSTED = 1
DEPTH_LIMITED = 2
BUDGET_STOP = 3

GOAL_FULL = 0
GOAL_PROJECTED = 1


def res_mask(
    state: int, rmasks: tuple[int, ...], imasks: tuple[int, ...], pmasks: tuple[int, ...]
) -> int:
    """Union of products of the reactions enabled in `state`."""
    out = 0
    for r, i, p in zip(rmasks, imasks, pmasks):
        if state & r == r and state & i == 0:
            out |= p
    return out


def bfs_witness(
    starts: list[int],
    contexts: list[int],
    rmasks: tuple[int, ...],
    imasks: tuple[int, ...],
    pmasks: tuple[int, ...],
    goal_kind: int,
    goal_mask: int,
    t_mask: int,
    depth_limit: int,
    node_budget: int,
) -> tuple[int, int, list[int], int, int]:
    """Shortest-path search over full states W with successors C ∪ res(W).

    Contexts are tried in list order and states expanded first-in first-out,
    so the first goal hit is the shortest witness with the lexicographically
    least (start, context indices) path under that order. `depth_limit` < 0
    means unbounded. Returns (status, hit_state, context_index_path,
    start_index, visited).
    """

    def hits(w: int) -> bool:
        if goal_kind == GOAL_FULL:
            return w == goal_mask
        return w & t_mask == goal_mask

    # parent[w] = (previous state, context index); starts use index -1-k
    parent: dict[int, tuple[int, int]] = {}
    queue: deque[tuple[int, int]] = deque()
    truncated = False

    for k, w in enumerate(starts):
        if w in parent:
            continue
        if len(parent) >= node_budget:
            return (BUDGET_STOP, 0, [], -1, len(parent))
        parent[w] = (w, -1 - k)
        if hits(w):
            return (FOUND, w, [], k, len(parent))
        if depth_limit == 0:
            truncated = True
        else:
            queue.append((w, 0))

    while queue:
        w, depth = queue.popleft()
        d = res_mask(w, rmasks, imasks, pmasks)
        child_depth = depth + 1
        for ci, c in enumerate(contexts):
            w2 = c | d
            if w2 in parent:
                continue
            if len(parent) >= node_budget:
                return (BUDGET_STOP, 0, [], -1, len(parent))
            parent[w2] = (w, ci)
            if hits(w2):
                path = [ci]
                cur = w
                while True:
                    prev, pci = parent[cur]
                    if pci < 0:
                        return (FOUND, w2, path[::-1], -1 - pci, len(parent))
                    path.append(pci)
                    cur = prev
            if child_depth == depth_limit:
                truncated = True
            else:
                queue.append((w2, child_depth))

    return (DEPTH_LIMITED if truncated else EXHAUSTED, 0, [], -1, len(parent))


def bfs_closure(
    starts: list[int],
    contexts: list[int],
    rmasks: tuple[int, ...],
    imasks: tuple[int, ...],
    pmasks: tuple[int, ...],
    node_budget: int,
) -> tuple[list[int], set[int], bool]:
    """Closure of `starts` under successors C ∪ res(W).

    Returns (all states in discovery order, states seen as a successor of
    something, truncated flag). A truncated closure may be missing states
    and successor marks.
    """
    seen: set[int] = set()
    order: list[int] = []
    successor_seen: set[int] = set()
    queue: deque[int] = deque()
    for w in starts:
        if w in seen:
            continue
        if len(seen) >= node_budget:
            return (order, successor_seen, True)
        seen.add(w)
        order.append(w)
        queue.append(w)
    while queue:
        w = queue.popleft()
        d = res_mask(w, rmasks, imasks, pmasks)
        for c in contexts:
            w2 = c | d
            successor_seen.add(w2)
            if w2 in seen:
                continue
            if len(seen) >= node_budget:
                return (order, successor_seen, True)
            seen.add(w2)
            order.append(w2)
            queue.append(w2)
    return (order, successor_seen, False)
