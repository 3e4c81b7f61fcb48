"""Dynamics under a fixed context: orbits, context graphs, image queries,
and nonce extensions.

All state-to-state iteration goes through the selected kernel backend; the
functions here accept and return species sets, never raw masks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from ._engine import Engine, submasks_ascending
from .core import Reaction, ReactionSystem, SpeciesSet, SpeciesTable
from .errors import BudgetError, RefusalError, RsysError, SpeciesMismatchError

INPUT_SET_LIMIT = 20
NODE_BUDGET_DEFAULT = 4096
FULL_EXTENSION_LIMIT = 10


def _check_table(sset: SpeciesSet, system: ReactionSystem, what: str) -> None:
    if sset.table is not system.species and sset.table != system.species:
        raise SpeciesMismatchError(
            f"{what} uses a different species table than the system"
        )


@dataclass(frozen=True)
class Orbit:
    """Eventual behaviour under a constant context: transient, then cycle.

    `transient + cycle` lists the visited full states in order starting
    from the initial state; the successor of `cycle[-1]` is `cycle[0]`.
    """

    transient: tuple[SpeciesSet, ...]
    cycle: tuple[SpeciesSet, ...]
    context: SpeciesSet

    @property
    def period(self) -> int:
        return len(self.cycle)

    def __repr__(self) -> str:
        return (
            f"Orbit(transient={len(self.transient)}, period={self.period}, "
            f"context={self.context!r})"
        )


def orbit(
    system: ReactionSystem,
    start: SpeciesSet,
    context: SpeciesSet,
    max_steps: int = 100_000,
) -> Orbit:
    """Iterate W ↦ context ∪ res(W) from `start` until a state repeats.

    Raises BudgetError when no state recurs within `max_steps` iterations
    (cannot happen when max_steps ≥ 2^|S|, but the default keeps runtime
    bounded on large species tables).
    """
    _check_table(start, system, "start state")
    _check_table(context, system, "context")
    eng = Engine(system)
    table = system.species
    ctx = context.mask
    seen: dict[int, int] = {}
    seq: list[int] = []
    w = start.mask
    for _ in range(max_steps + 1):
        if w in seen:
            split = seen[w]
            states = [table.from_mask(m) for m in seq]
            return Orbit(tuple(states[:split]), tuple(states[split:]), context)
        seen[w] = len(seq)
        seq.append(w)
        w = ctx | eng.res(w)
    raise BudgetError(
        f"no recurrence within {max_steps} steps", visited=len(seq)
    )


def attractor_report(orbit: Orbit, markers: Sequence[str]) -> dict[str, int]:
    """Count, per marker species, the cycle states containing it.

    Transient states are ignored; the counts describe only the attractor.
    """
    table = orbit.context.table
    counts: dict[str, int] = {}
    for name in markers:
        bit = 1 << table.index(name)
        counts[name] = sum(1 for w in orbit.cycle if w.mask & bit)
    return counts


@dataclass(frozen=True)
class ContextGraph:
    """Reachable full states under all contexts drawn from an input set.

    Nodes are full states in discovery order (seeds first); each edge
    carries the smallest context producing that transition, namely the
    target state minus the source's result.
    """

    input_set: SpeciesSet
    seeds: tuple[SpeciesSet, ...]
    nodes: tuple[SpeciesSet, ...]
    edges: tuple[tuple[int, SpeciesSet, int], ...]
    truncated: bool

    def to_dot(self) -> str:
        lines = ["digraph context_graph {"]
        if self.truncated:
            lines.append("  truncated=true;")
        for k, node in enumerate(self.nodes):
            lines.append(f'  n{k} [label="{node!r}"];')
        for src, ctx, dst in self.edges:
            lines.append(f'  n{src} -> n{dst} [label="{ctx!r}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def context_graph(
    system: ReactionSystem,
    input_set: SpeciesSet,
    seeds: Iterable[SpeciesSet],
    node_budget: int = NODE_BUDGET_DEFAULT,
    input_limit: int = INPUT_SET_LIMIT,
) -> ContextGraph:
    """Breadth-first closure of step(W, C) = C ∪ res(W) over C ⊆ input_set.

    Refuses input sets larger than `input_limit` (every node can branch
    2^|input_set| ways; raise the limit explicitly to go bigger). When the
    node budget stops discovery the graph comes back `truncated` with all
    edges between the admitted nodes intact.
    """
    _check_table(input_set, system, "input set")
    seed_sets = tuple(seeds)
    if not seed_sets:
        raise RsysError("at least one seed state is required")
    for s in seed_sets:
        _check_table(s, system, "seed state")
    if len(input_set) > input_limit:
        raise RefusalError(
            f"input set has {len(input_set)} species; each node branches "
            f"2^{len(input_set)} ways (limit {input_limit}; pass a larger "
            "input_limit to proceed anyway)"
        )
    eng = Engine(system)
    table = system.species
    imask = input_set.mask
    index: dict[int, int] = {}
    order: list[int] = []
    truncated = False
    queue: list[int] = []
    for s in seed_sets:
        if s.mask not in index:
            if len(order) >= node_budget:
                truncated = True
                break
            index[s.mask] = len(order)
            order.append(s.mask)
            queue.append(s.mask)
    edges: list[tuple[int, int, int]] = []
    head = 0
    while head < len(queue):
        w = queue[head]
        head += 1
        d = eng.res(w)
        for extra in submasks_ascending(imask & ~d):
            succ = d | extra
            if succ not in index:
                if len(order) >= node_budget:
                    truncated = True
                    continue
                index[succ] = len(order)
                order.append(succ)
                queue.append(succ)
            edges.append((index[w], succ & ~d, index[succ]))
    edges.sort(key=lambda e: (e[0], bin(e[1]).count("1"), e[1], e[2]))
    return ContextGraph(
        input_set=input_set,
        seeds=seed_sets,
        nodes=tuple(table.from_mask(m) for m in order),
        edges=tuple(
            (src, table.from_mask(ctx), dst) for src, ctx, dst in edges
        ),
        truncated=truncated,
    )


@dataclass(frozen=True)
class PreimageCertificate:
    """Witness that `target` is in the image: res(preimage) relates to it.

    `fired` is the exact set of reactions enabled in the preimage.
    """

    target: SpeciesSet
    preimage: SpeciesSet
    fired: tuple[Reaction, ...]


def _cover_search(
    eng: Engine,
    v_mask: int,
    candidates_for: dict[int, list[int]],
    bad: Sequence[int],
) -> Optional[int]:
    """Pick an enabled reaction per target species, then neutralise every
    reaction producing outside the target.

    Assignments pin species IN (part of the preimage) or OUT; species left
    free end up OUT, so the search only has to add inhibitor species for
    reactions whose reactants are already fully pinned IN. Returns the IN
    mask of the first solution in canonical order, or None.
    """
    rm, im = eng.rmasks, eng.imasks
    vbits = []
    m = v_mask
    while m:
        low = m & -m
        vbits.append(low)
        m ^= low

    def fire(k: int, inm: int, outm: int) -> Optional[tuple[int, int]]:
        if rm[k] & outm or im[k] & inm:
            return None
        return inm | rm[k], outm | im[k]

    def solve_bad(inm: int, outm: int) -> Optional[int]:
        for k in bad:
            if rm[k] & outm or im[k] & inm:
                continue
            if rm[k] & ~inm:
                continue
            choices = im[k] & ~outm
            while choices:
                y = choices & -choices
                choices ^= y
                got = solve_bad(inm | y, outm)
                if got is not None:
                    return got
            return None
        return inm

    def cover(pos: int, covered: int, inm: int, outm: int) -> Optional[int]:
        while pos < len(vbits) and covered & vbits[pos]:
            pos += 1
        if pos == len(vbits):
            return solve_bad(inm, outm)
        for k in candidates_for[vbits[pos]]:
            fired = fire(k, inm, outm)
            if fired is None:
                continue
            got = cover(pos + 1, covered | eng.pmasks[k], *fired)
            if got is not None:
                return got
        return None

    return cover(0, 0, 0, 0)


def image_membership(
    system: ReactionSystem, target: SpeciesSet
) -> Optional[PreimageCertificate]:
    """Find U with res(U) exactly equal to `target`, or None.

    A solution needs every target species produced by a reaction whose
    whole product set stays inside the target, and every reaction that
    would produce outside the target disabled.
    """
    _check_table(target, system, "target")
    eng = Engine(system)
    v = target.mask
    n_reactions = len(eng.rmasks)
    good = [k for k in range(n_reactions) if not (eng.pmasks[k] & ~v)]
    bad = [k for k in range(n_reactions) if eng.pmasks[k] & ~v]
    candidates_for: dict[int, list[int]] = {}
    m = v
    while m:
        low = m & -m
        m ^= low
        candidates_for[low] = [k for k in good if eng.pmasks[k] & low]
        if not candidates_for[low]:
            return None
    inm = _cover_search(eng, v, candidates_for, bad)
    if inm is None:
        return None
    if eng.res(inm) != v:
        raise AssertionError("image search produced an invalid preimage")
    return _certificate(system, eng, target, inm)


def superset_image_membership(
    system: ReactionSystem, target: SpeciesSet
) -> Optional[PreimageCertificate]:
    """Find U with res(U) ⊇ `target`, or None.

    Products outside the target are allowed, so only the covering step is
    needed.
    """
    _check_table(target, system, "target")
    eng = Engine(system)
    v = target.mask
    candidates_for: dict[int, list[int]] = {}
    m = v
    while m:
        low = m & -m
        m ^= low
        candidates_for[low] = [
            k for k in range(len(eng.pmasks)) if eng.pmasks[k] & low
        ]
        if not candidates_for[low]:
            return None
    inm = _cover_search(eng, v, candidates_for, bad=())
    if inm is None:
        return None
    if eng.res(inm) & v != v:
        raise AssertionError("image search produced an invalid preimage")
    return _certificate(system, eng, target, inm)


def _certificate(
    system: ReactionSystem, eng: Engine, target: SpeciesSet, inm: int
) -> PreimageCertificate:
    fired = tuple(
        r
        for k, r in enumerate(system.reactions)
        if not (eng.rmasks[k] & ~inm) and not (eng.imasks[k] & inm)
    )
    return PreimageCertificate(
        target=target, preimage=system.species.from_mask(inm), fired=fired
    )


def nonce_extension(
    system: ReactionSystem,
    extra: Sequence[str],
    mode: str = "full",
    k: Optional[int] = None,
    seed: int = 0,
) -> ReactionSystem:
    """Extend the species table by `extra` names and widen every reaction.

    Each reaction (R, I, P) is replaced by the variants (R ∪ R', I ∪ I', P)
    over disjoint R', I' ⊆ extra; products never mention the new species,
    so for any state Z over the extended table the extended result equals
    the base result of Z restricted to the base species (the variant with
    R' = I' = ∅ is always kept, and any variant it enables under the
    restriction is enabled on some extension of the same state).

    mode="full" keeps all 3^|extra| variants per reaction and refuses more
    than FULL_EXTENSION_LIMIT extra species; mode="sample" keeps the plain
    variant plus k−1 distinct random ones drawn with the given seed.
    """
    extra = list(extra)
    if not extra:
        return system
    base = system.species
    table = SpeciesTable(list(base.names) + extra)
    e = len(extra)
    total = 3**e
    if mode == "full":
        if e > FULL_EXTENSION_LIMIT:
            raise RefusalError(
                f"full extension over {e} extra species adds 3^{e} variants "
                f"per reaction (limit {FULL_EXTENSION_LIMIT}; use "
                "mode='sample' with a draw count k)"
            )
        combos = range(total)
    elif mode == "sample":
        if k is None or k < 1:
            raise RsysError("mode='sample' needs a draw count k >= 1")
        k = min(k, total)
        rng = random.Random(seed)
        picked = {0}
        while len(picked) < k:
            picked.add(rng.randrange(total))
        combos = sorted(picked)
    else:
        raise RsysError(f"unknown extension mode {mode!r} (full or sample)")

    extra_bits = [1 << table.index(name) for name in extra]
    reactions: list[Reaction] = []
    for r in system.reactions:
        rmask = r.reactants.mask
        imask = r.inhibitors.mask
        pmask = r.products.mask
        for combo in combos:
            add_r = 0
            add_i = 0
            c = combo
            for bit in extra_bits:
                c, digit = divmod(c, 3)
                if digit == 1:
                    add_r |= bit
                elif digit == 2:
                    add_i |= bit
            if combo == 0:
                label = r.label
            elif r.label is None:
                label = None
            else:
                label = f"{r.label}__x{combo}"
            reactions.append(
                Reaction.unchecked(
                    SpeciesSet(table, rmask | add_r),
                    SpeciesSet(table, imask | add_i),
                    SpeciesSet(table, pmask),
                    label,
                )
            )
    return ReactionSystem(table, reactions)
