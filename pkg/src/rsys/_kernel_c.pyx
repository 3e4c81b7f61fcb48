# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled search kernel over 64-bit masks (species counts up to 64).

Same API and status codes as the pure kernel; see _kernel_py for the
contract. The engine picks this backend when it is importable and the
species table fits in 64 bits.
"""

from libc.stdint cimport int64_t, uint64_t
from libcpp.deque cimport deque
from libcpp.pair cimport pair
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

BACKEND = "compiled"

FOUND = 0
EXHAUSTED = 1
DEPTH_LIMITED = 2
BUDGET_STOP = 3

GOAL_FULL = 0
GOAL_PROJECTED = 1


cdef inline uint64_t _res(uint64_t state, vector[uint64_t]& r, vector[uint64_t]& i,
                          vector[uint64_t]& p) nogil:
    cdef uint64_t out = 0
    cdef size_t k
    for k in range(r.size()):
        if (state & r[k]) == r[k] and (state & i[k]) == 0:
            out |= p[k]
    return out


cdef void _fill(object seq, vector[uint64_t]& out):
    for v in seq:
        out.push_back(<uint64_t> v)


def res_mask(state, rmasks, imasks, pmasks):
    """Union of products of the reactions enabled in `state`."""
    cdef vector[uint64_t] r, i, p
    _fill(rmasks, r)
    _fill(imasks, i)
    _fill(pmasks, p)
    return _res(<uint64_t> state, r, i, p)


def bfs_witness(starts, contexts, rmasks, imasks, pmasks,
                goal_kind, goal_mask, t_mask, depth_limit, node_budget):
    """Shortest-path search over full states; see _kernel_py.bfs_witness."""
    cdef vector[uint64_t] r, i, p, ctx, start_vec
    _fill(rmasks, r)
    _fill(imasks, i)
    _fill(pmasks, p)
    _fill(contexts, ctx)
    _fill(starts, start_vec)
    cdef int kind = <int> goal_kind
    cdef uint64_t goal = <uint64_t> goal_mask
    cdef uint64_t tmask = <uint64_t> t_mask
    cdef int64_t limit = <int64_t> depth_limit
    cdef uint64_t budget = <uint64_t> node_budget

    cdef unordered_map[uint64_t, pair[uint64_t, int64_t]] parent
    cdef deque[pair[uint64_t, int64_t]] queue
    cdef bint truncated = False
    cdef uint64_t w, w2, d, cur
    cdef int64_t k, ci, depth, child_depth, pci
    cdef pair[uint64_t, int64_t] entry
    cdef list path

    for k in range(<int64_t> start_vec.size()):
        w = start_vec[k]
        if parent.count(w):
            continue
        if parent.size() >= budget:
            return (BUDGET_STOP, 0, [], -1, parent.size())
        parent[w] = pair[uint64_t, int64_t](w, -1 - k)
        if (w == goal) if kind == 0 else ((w & tmask) == goal):
            return (FOUND, w, [], k, parent.size())
        if limit == 0:
            truncated = True
        else:
            queue.push_back(pair[uint64_t, int64_t](w, 0))

    while not queue.empty():
        entry = queue.front()
        queue.pop_front()
        w = entry.first
        depth = entry.second
        d = _res(w, r, i, p)
        child_depth = depth + 1
        for ci in range(<int64_t> ctx.size()):
            w2 = ctx[ci] | d
            if parent.count(w2):
                continue
            if parent.size() >= budget:
                return (BUDGET_STOP, 0, [], -1, parent.size())
            parent[w2] = pair[uint64_t, int64_t](w, ci)
            if (w2 == goal) if kind == 0 else ((w2 & tmask) == goal):
                path = [ci]
                cur = w
                while True:
                    entry = parent[cur]
                    pci = entry.second
                    if pci < 0:
                        path.reverse()
                        return (FOUND, w2, path, -1 - pci, parent.size())
                    path.append(pci)
                    cur = entry.first
            if child_depth == limit:
                truncated = True
            else:
                queue.push_back(pair[uint64_t, int64_t](w2, child_depth))

    return (DEPTH_LIMITED if truncated else EXHAUSTED, 0, [], -1, parent.size())


def bfs_closure(starts, contexts, rmasks, imasks, pmasks, node_budget):
    """Closure of `starts` under successors; see _kernel_py.bfs_closure."""
    cdef vector[uint64_t] r, i, p, ctx, start_vec
    _fill(rmasks, r)
    _fill(imasks, i)
    _fill(pmasks, p)
    _fill(contexts, ctx)
    _fill(starts, start_vec)
    cdef uint64_t budget = <uint64_t> node_budget

    cdef unordered_set[uint64_t] seen
    cdef unordered_set[uint64_t] successor_seen
    cdef deque[uint64_t] queue
    cdef list order = []
    cdef uint64_t w, w2, d
    cdef size_t k, ci

    for k in range(start_vec.size()):
        w = start_vec[k]
        if seen.count(w):
            continue
        if seen.size() >= budget:
            return (order, {v for v in successor_seen}, True)
        seen.insert(w)
        order.append(w)
        queue.push_back(w)
    while not queue.empty():
        w = queue.front()
        queue.pop_front()
        d = _res(w, r, i, p)
        for ci in range(ctx.size()):
            w2 = ctx[ci] | d
            successor_seen.insert(w2)
            if seen.count(w2):
                continue
            if seen.size() >= budget:
                return (order, {v for v in successor_seen}, True)
            seen.insert(w2)
            order.append(w2)
            queue.push_back(w2)
    return (order, {v for v in successor_seen}, False)
