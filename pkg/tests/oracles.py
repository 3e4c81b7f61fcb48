"""Independent reference implementations used to cross-check the package.

Everything here works on plain frozensets of species names and never imports
package internals beyond the public constructors. Deliberately naive: clarity
over speed, so disagreements point at the package, not the oracle.
"""

from __future__ import annotations

import itertools
import random
from collections import deque

Triple = tuple[frozenset, frozenset, frozenset]


def res_oracle(reactions: list[Triple], state: frozenset) -> frozenset:
    """Union of products over reactions enabled in `state`."""
    out: set = set()
    for reactants, inhibitors, products in reactions:
        if reactants <= state and not (inhibitors & state):
            out |= products
    return frozenset(out)


def run_oracle(
    reactions: list[Triple],
    contexts: list[frozenset],
    initial_result: frozenset | None = None,
) -> list[frozenset]:
    """Result sets D_0..D_n of the interactive process over `contexts`.

    D_0 is empty (or the supplied initial result); each later result feeds
    on the previous context and result, so the final context only pads the
    final state and the result count equals the context count.
    """
    results = [frozenset() if initial_result is None else frozenset(initial_result)]
    for ctx in contexts[:-1]:
        results.append(res_oracle(reactions, ctx | results[-1]))
    return results


def image_oracle(reactions: list[Triple], species: frozenset) -> set[frozenset]:
    """All result sets over every subset of `species` (exponential scan)."""
    names = sorted(species)
    out: set[frozenset] = set()
    for bits in itertools.product((False, True), repeat=len(names)):
        state = frozenset(n for n, b in zip(names, bits) if b)
        out.add(res_oracle(reactions, state))
    return out


def shortest_witness_len(
    reactions: list[Triple],
    contexts: list[frozenset],
    start: frozenset,
    goal: frozenset,
    target: frozenset | None = None,
    depth_limit: int = 64,
) -> int | None:
    """Length of the shortest steering sequence from `start` to `goal`.

    Layered breadth-first search over full states W; a state hits the goal
    when W == goal (or W & target == goal in target mode). Depth 0 is the
    start itself. Returns None when unreachable within `depth_limit`.
    """

    def hits(w: frozenset) -> bool:
        return (w & target == goal) if target is not None else (w == goal)

    if hits(start):
        return 0
    seen = {start}
    frontier = [start]
    for depth in range(1, depth_limit + 1):
        nxt = []
        for w in frontier:
            d = res_oracle(reactions, w)
            for ctx in contexts:
                w2 = ctx | d
                if w2 in seen:
                    continue
                if hits(w2):
                    return depth
                seen.add(w2)
                nxt.append(w2)
        if not nxt:
            return None
        frontier = nxt
    return None


def reachable_states(
    reactions: list[Triple],
    contexts: list[frozenset],
    start: frozenset,
) -> set[frozenset]:
    """All full states reachable from `start` (start included)."""
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        d = res_oracle(reactions, w)
        for ctx in contexts:
            w2 = ctx | d
            if w2 not in seen:
                seen.add(w2)
                queue.append(w2)
    return seen


def controllable_oracle(
    reactions: list[Triple],
    species: frozenset,
    contexts: list[frozenset],
) -> tuple[bool, tuple[frozenset, frozenset] | None]:
    """Exhaustive controllability check over all (X, Y) with Y in the image."""
    names = sorted(species)
    image = image_oracle(reactions, species)
    subsets = [
        frozenset(n for n, b in zip(names, bits) if b)
        for bits in itertools.product((False, True), repeat=len(names))
    ]
    for x in subsets:
        reach = reachable_states(reactions, contexts, x)
        for y in subsets:
            if y == x or y not in image:
                continue
            if y not in reach:
                return False, (x, y)
    return True, None


def random_system(
    rng: random.Random, n_species: int, n_reactions: int
) -> tuple[list[str], list[Triple]]:
    """A random reaction system over species s0..s{n-1}."""
    names = [f"s{i}" for i in range(n_species)]
    reactions: list[Triple] = []
    while len(reactions) < n_reactions:
        k_r = rng.randint(0, min(2, n_species))
        reactants = frozenset(rng.sample(names, k_r))
        rest = [n for n in names if n not in reactants]
        k_i = rng.randint(0, min(2, len(rest)))
        inhibitors = frozenset(rng.sample(rest, k_i))
        k_p = rng.randint(1, min(2, n_species))
        products = frozenset(rng.sample(names, k_p))
        reactions.append((reactants, inhibitors, products))
    return names, reactions


def random_dnf_network(
    rng: random.Random, n_vars: int, max_terms: int = 3
) -> dict[str, list[tuple[frozenset, frozenset]]]:
    """A random Boolean network: var -> DNF as (positive, negative) terms."""
    names = [f"v{i}" for i in range(n_vars)]
    net: dict[str, list[tuple[frozenset, frozenset]]] = {}
    for name in names:
        terms = []
        for _ in range(rng.randint(1, max_terms)):
            k = rng.randint(1, min(3, n_vars))
            chosen = rng.sample(names, k)
            pos = frozenset(v for v in chosen if rng.random() < 0.6)
            neg = frozenset(set(chosen) - pos)
            if not pos and not neg:
                pos = frozenset({rng.choice(names)})
            terms.append((pos, neg))
        net[name] = terms
    return net


def bn_step_oracle(
    net: dict[str, list[tuple[frozenset, frozenset]]], state: frozenset
) -> frozenset:
    """Synchronous update: var is on next step iff some term fires."""
    out = set()
    for name, terms in net.items():
        for pos, neg in terms:
            if pos <= state and not (neg & state):
                out.add(name)
                break
    return frozenset(out)
