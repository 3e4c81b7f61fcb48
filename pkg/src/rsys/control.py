"""Controllability: context constraints, witness search, decisions.

Semantics in one paragraph: a witness for (X, Y) is a run W_0, W_1, …, W_r
with W_k = C_k ∪ res(W_{k-1}) whose end condition holds at some index r
(full mode: W_r = Y; target mode: W_r ∩ T = Y). In the default "given"
initial mode the source X is installed wholesale as W_0 and the constraint
applies to the steering contexts C_1 … C_r only; in "context" mode the
source must itself be the first context (W_0 = C_0 = X) and is
constraint-checked like every other context. Decisions quantify over all
ordered pairs (X, Y), X ≠ Y, with Y restricted to the image of the result
map (target mode: to projections of the image onto T), and report the
first counterexample in canonical order: ascending (|X|, X encoding,
|Y|, Y encoding).
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

from ._engine import (
    BUDGET_STOP,
    FOUND,
    GOAL_FULL,
    GOAL_PROJECTED,
    Engine,
    submasks_ascending,
)
from .core import (
    ContextSequence,
    ProcessTrace,
    ReactionSystem,
    SpeciesSet,
    SpeciesTable,
    run_process,
)
from .errors import BudgetError, RefusalError, RsysError, SpeciesMismatchError
from .formats import export_trace

CONTEXT_UNIVERSE_LIMIT = 1 << 20
SPECIES_LIMIT_DEFAULT = 16
FRONTIER_LIMIT_DEFAULT = 16
UNLIMITED = 1 << 62


def _check_table(sset: SpeciesSet, system: ReactionSystem, what: str) -> None:
    if sset.table is not system.species and sset.table != system.species:
        raise SpeciesMismatchError(
            f"{what} uses a different species table than the system"
        )


class ContextConstraint:
    """Restriction on the contexts a steering sequence may use."""

    def bind_check(self, table: SpeciesTable) -> None:
        raise NotImplementedError

    def count(self, table: SpeciesTable) -> int:
        raise NotImplementedError

    def context_masks(self, table: SpeciesTable) -> list[int]:
        raise NotImplementedError

    def satisfied_by(self, context: SpeciesSet) -> bool:
        raise NotImplementedError

    def violation(self) -> str:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class MaxCardinality(ContextConstraint):
    """Allow every context with at most `n` species."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise RsysError("cardinality bound must be at least 0")

    def bind_check(self, table: SpeciesTable) -> None:
        if self.n >= len(table):
            raise RsysError(
                f"cardinality bound {self.n} must stay below the species "
                f"count {len(table)} (the unconstrained case)"
            )

    def count(self, table: SpeciesTable) -> int:
        return sum(comb(len(table), k) for k in range(self.n + 1))

    def context_masks(self, table: SpeciesTable) -> list[int]:
        masks: list[int] = []
        for k in range(self.n + 1):
            block = [
                sum(1 << i for i in combo)
                for combo in combinations(range(len(table)), k)
            ]
            block.sort()
            masks.extend(block)
        return masks

    def satisfied_by(self, context: SpeciesSet) -> bool:
        return len(context) <= self.n

    def violation(self) -> str:
        return f"context has more than {self.n} species"

    def to_json(self) -> dict:
        return {"kind": "max-cardinality", "n": self.n}


@dataclass(frozen=True)
class AllowedSet(ContextConstraint):
    """Allow every context drawn from the fixed species set I."""

    allowed: SpeciesSet

    def bind_check(self, table: SpeciesTable) -> None:
        if self.allowed.table is not table and self.allowed.table != table:
            raise SpeciesMismatchError(
                "allowed set uses a different species table than the system"
            )

    def count(self, table: SpeciesTable) -> int:
        return 1 << len(self.allowed)

    def context_masks(self, table: SpeciesTable) -> list[int]:
        return submasks_ascending(self.allowed.mask)

    def satisfied_by(self, context: SpeciesSet) -> bool:
        return context <= self.allowed

    def violation(self) -> str:
        return "context not ⊆ I"

    def to_json(self) -> dict:
        return {"kind": "allowed-set", "I": list(self.allowed.members)}


def constraint_from_json(data: dict, table: SpeciesTable) -> ContextConstraint:
    kind = str(data.get("kind", "")).lower().replace("_", "-")
    if kind in ("max-cardinality", "maxcardinality"):
        return MaxCardinality(int(data["n"]))
    if kind in ("allowed-set", "allowedset"):
        return AllowedSet(table.set_of(data["I"]))
    raise RsysError(f"unknown constraint kind {data.get('kind')!r}")


@dataclass(frozen=True)
class Exhaustive:
    """Check every pair."""


@dataclass(frozen=True)
class Sampled:
    """Check `k` random pairs drawn with the given seed."""

    k: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise RsysError("sample size must be at least 1")


Scope = Union[Exhaustive, Sampled]


@dataclass(frozen=True)
class ControlQuery:
    """One witness-search problem: steer `source` to `target`.

    With `targets` set, source and target are read as projections onto
    that set and the end condition becomes W_r ∩ targets = target.
    `depth_limit` of None means unbounded (absence is then definitive);
    note the source is still taken literally as the full start state, so
    callers quantifying over all states that project to X must issue one
    query per completion (decide_target_controllable does).
    """

    source: SpeciesSet
    target: SpeciesSet
    constraint: ContextConstraint
    targets: Optional[SpeciesSet] = None
    initial_mode: str = "given"
    depth_limit: Optional[int] = None

    def __post_init__(self) -> None:
        if self.initial_mode not in ("given", "context"):
            raise RsysError(
                f"initial_mode must be 'given' or 'context', "
                f"not {self.initial_mode!r}"
            )
        if self.depth_limit is not None and self.depth_limit < 1:
            raise RsysError("depth_limit must be at least 1")
        if self.targets is not None and not self.target <= self.targets:
            raise RsysError("target must be a subset of the target set")

    def to_json(self) -> dict:
        out: dict = {
            "source": list(self.source.members),
            "target": list(self.target.members),
            "constraint": self.constraint.to_json(),
            "initial_mode": self.initial_mode,
        }
        if self.targets is not None:
            out["targets"] = list(self.targets.members)
        if self.depth_limit is not None:
            out["depth_limit"] = self.depth_limit
        return out


def query_from_json(data: dict, table: SpeciesTable) -> ControlQuery:
    try:
        source = table.set_of(data["source"])
        target = table.set_of(data["target"])
        constraint = constraint_from_json(data["constraint"], table)
    except KeyError as exc:
        raise RsysError(f"query is missing the {exc.args[0]!r} field") from None
    targets = data.get("targets")
    depth = data.get("depth_limit")
    return ControlQuery(
        source=source,
        target=target,
        constraint=constraint,
        targets=table.set_of(targets) if targets is not None else None,
        initial_mode=data.get("initial_mode", "given"),
        depth_limit=int(depth) if depth is not None else None,
    )


@dataclass(frozen=True)
class ControlWitness:
    """A steering sequence together with its replayed trace.

    In "given" mode `contexts` holds the steering contexts C_1 … C_r (empty
    when the source already satisfies the end condition); in "context" mode
    it additionally starts with C_0 = source. `trace` replays the whole
    run; the end condition holds at trace state `hit_index`.
    """

    contexts: tuple[SpeciesSet, ...]
    trace: ProcessTrace
    hit_index: int
    visited: int = 0

    def to_json(self) -> dict:
        return {
            "contexts": [list(c.members) for c in self.contexts],
            "hit_index": self.hit_index,
            "visited": self.visited,
            "trace": json.loads(export_trace(self.trace, "json")),
        }


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: Optional[str] = None
    hit_index: Optional[int] = None


@dataclass(frozen=True)
class ControllabilityVerdict:
    """Outcome of a pair scan.

    `counterexample` is the canonically first witness-free pair; under a
    sampled scope a true decision only means no counterexample was found
    among the pairs checked.
    """

    decision: bool
    counterexample: Optional[tuple[SpeciesSet, SpeciesSet]] = None
    pairs_checked: int = 0


def _contexts_checked(
    system: ReactionSystem,
    constraint: ContextConstraint,
    limit: int = CONTEXT_UNIVERSE_LIMIT,
) -> list[int]:
    table = system.species
    constraint.bind_check(table)
    count = constraint.count(table)
    if count > limit:
        raise RefusalError(
            f"constraint admits {count} contexts, above the enumeration "
            f"limit {limit}; pass a larger limit to enumerate anyway"
        )
    return constraint.context_masks(table)


def allowed_contexts(
    system: ReactionSystem,
    constraint: ContextConstraint,
    limit: int = CONTEXT_UNIVERSE_LIMIT,
) -> list[SpeciesSet]:
    """All contexts the constraint admits, ascending by (size, encoding)."""
    table = system.species
    return [table.from_mask(m) for m in _contexts_checked(system, constraint, limit)]


def find_witness(
    system: ReactionSystem,
    query: ControlQuery,
    node_budget: Optional[int] = None,
) -> Optional[ControlWitness]:
    """Shortest steering sequence for the query, or None when none exists.

    Breadth-first over full states with successors C ∪ res(W), contexts
    tried in canonical order, so the returned witness is shortest with
    ties broken canonically. None is definitive when the depth limit is
    unbounded (the search memoizes states); with a depth limit it only
    covers runs up to that length. A node budget turns an inconclusive
    search into a BudgetError instead.
    """
    _check_table(query.source, system, "source")
    _check_table(query.target, system, "target")
    if query.targets is not None:
        _check_table(query.targets, system, "target set")
    table = system.species
    ctx_masks = _contexts_checked(system, query.constraint)
    if query.targets is None:
        goal_kind, goal_mask, t_mask = GOAL_FULL, query.target.mask, 0
    else:
        goal_kind = GOAL_PROJECTED
        goal_mask, t_mask = query.target.mask, query.targets.mask
    if query.initial_mode == "context" and not query.constraint.satisfied_by(
        query.source
    ):
        return None
    eng = Engine(system)
    depth = -1 if query.depth_limit is None else query.depth_limit
    budget = UNLIMITED if node_budget is None else node_budget
    status, _, path, _, visited = eng.bfs_witness(
        [query.source.mask], ctx_masks, goal_kind, goal_mask, t_mask, depth, budget
    )
    if status == BUDGET_STOP:
        raise BudgetError(
            f"witness search stopped by the node budget after visiting "
            f"{visited} states",
            visited=visited,
        )
    if status != FOUND:
        return None
    steering = tuple(table.from_mask(ctx_masks[ci]) for ci in path)
    empty = table.set_of()
    if query.initial_mode == "given":
        trace = run_process(
            system, (empty,) + steering, initial_result=query.source
        )
        contexts = steering
    else:
        contexts = (query.source,) + steering
        trace = run_process(system, contexts)
    return ControlWitness(
        contexts=contexts,
        trace=trace,
        hit_index=len(steering),
        visited=visited,
    )


def verify_witness(
    system: ReactionSystem,
    query: ControlQuery,
    contexts: Union[ContextSequence, Sequence[SpeciesSet], ControlWitness],
) -> VerifyResult:
    """Replay a context sequence against a query, reporting the first
    index where the end condition holds or the first rule it breaks."""
    if isinstance(contexts, ControlWitness):
        contexts = contexts.contexts
    seq = tuple(contexts)
    for c in seq:
        _check_table(c, system, "context")
    eng = Engine(system)
    if query.targets is None:
        def hit(w: int) -> bool:
            return w == query.target.mask
    else:
        t_mask = query.targets.mask
        def hit(w: int) -> bool:
            return w & t_mask == query.target.mask

    if query.initial_mode == "given":
        steering = seq
        w = query.source.mask
    else:
        if not seq:
            return VerifyResult(False, "no contexts to replay", None)
        if seq[0] != query.source:
            return VerifyResult(
                False, "first context differs from the source", None
            )
        if not query.constraint.satisfied_by(seq[0]):
            return VerifyResult(
                False, f"{query.constraint.violation()} at step 0", None
            )
        steering = seq[1:]
        w = seq[0].mask
    states = [w]
    for k, c in enumerate(steering, start=1):
        if not query.constraint.satisfied_by(c):
            return VerifyResult(
                False, f"{query.constraint.violation()} at step {k}", None
            )
        w = c.mask | eng.res(w)
        states.append(w)
    for r, w in enumerate(states):
        if hit(w):
            if query.depth_limit is not None and r > query.depth_limit:
                return VerifyResult(
                    False,
                    f"end condition first holds at step {r}, beyond the "
                    f"depth limit {query.depth_limit}",
                    None,
                )
            return VerifyResult(True, None, r)
    return VerifyResult(False, "end condition never holds along the replay", None)


def trivial_witness(
    system: ReactionSystem, source: SpeciesSet, target: SpeciesSet
) -> ControlWitness:
    """The constraint-free three-context run (X, S, Y).

    Installing the full species set as the middle context makes the run
    independent of X; it verifies exactly when res(S) ⊆ Y, and otherwise
    the refusal names the final-state deviation.
    """
    _check_table(source, system, "source")
    _check_table(target, system, "target")
    table = system.species
    contexts = (source, table.full_set, target)
    trace = run_process(system, contexts)
    final = trace.states[2]
    if final != target:
        extra = final - target
        raise RefusalError(
            f"trivial witness replay deviates at step 2: expected "
            f"{target!r}, got {final!r} (the full-set result contributes "
            f"{extra!r})"
        )
    return ControlWitness(contexts=contexts, trace=trace, hit_index=2, visited=3)


def _canonical_sorted(masks: Iterable[int]) -> list[int]:
    return sorted(masks, key=lambda m: (m.bit_count(), m))


def _scan_pairs(
    eng: Engine,
    x_masks: Sequence[int],
    y_masks: Sequence[int],
    ctx_masks: list[int],
    outside_subs: list[int],
    t_mask: int,
    budget: int,
) -> tuple[int, Optional[tuple[int, int]]]:
    """Scan pairs in canonical order; return (pairs checked through the
    decision point, first counterexample or None)."""
    checked = 0
    for x in x_masks:
        starts = [x | z for z in outside_subs]
        _, successor_seen, truncated = eng.bfs_closure(starts, ctx_masks, budget)
        if truncated:
            raise BudgetError(
                "reachability closure stopped by the node budget",
                visited=budget,
            )
        observed = {w & t_mask for w in successor_seen}
        for y in y_masks:
            if y == x:
                continue
            checked += 1
            if y not in observed:
                return checked, (x, y)
    return checked, None


def _decide(
    system: ReactionSystem,
    t_mask: int,
    constraint: ContextConstraint,
    scope: Scope,
    proviso: str,
    species_limit: int,
    frontier_limit: int,
    node_budget: Optional[int],
    workers: int,
) -> ControllabilityVerdict:
    table = system.species
    if proviso not in ("projection", "superset"):
        raise RsysError(
            f"unknown proviso {proviso!r} (projection or superset)"
        )
    n_targets = t_mask.bit_count()
    full_mask = table.full_set.mask
    outside = full_mask & ~t_mask
    n_outside = outside.bit_count()
    if isinstance(scope, Exhaustive) and n_targets > species_limit:
        raise RefusalError(
            f"exhaustive scope over {n_targets} target species checks up to "
            f"4^{n_targets} pairs (default ceiling {species_limit}; pass "
            "species_limit to override)"
        )
    if n_outside > frontier_limit:
        raise RefusalError(
            f"start frontier spans 2^{n_outside} states per source "
            f"(limit {frontier_limit}); pin the full start state with "
            "find_witness instead, or raise frontier_limit"
        )
    ctx_masks = _contexts_checked(system, constraint)
    eng = Engine(system)
    budget = UNLIMITED if node_budget is None else node_budget
    outside_subs = submasks_ascending(outside)

    if isinstance(scope, Sampled):
        rng = random.Random(scope.seed)
        n = len(table)
        checked = 0
        for _ in range(scope.k):
            y = eng.res(rng.getrandbits(n)) & t_mask
            x = rng.getrandbits(n) & t_mask
            while x == y and t_mask:
                x = rng.getrandbits(n) & t_mask
            if x == y:
                continue
            checked += 1
            starts = [x | z for z in outside_subs]
            status, _, _, _, visited = eng.bfs_witness(
                starts, ctx_masks, GOAL_PROJECTED, y, t_mask, -1, budget
            )
            if status == BUDGET_STOP:
                raise BudgetError(
                    "witness search stopped by the node budget",
                    visited=visited,
                )
            if status != FOUND:
                return ControllabilityVerdict(
                    False,
                    (table.from_mask(x), table.from_mask(y)),
                    checked,
                )
        return ControllabilityVerdict(True, None, checked)

    # End sets come from the image of the result map; enumerating it is
    # exponential in the sensed species, so only the exhaustive scope
    # (whose size the ceilings above already bound) may pay for it.
    projections = {v & t_mask for v in eng.image()}
    if proviso == "projection":
        y_masks = _canonical_sorted(projections)
    else:
        down: set[int] = set()
        for proj in projections:
            if proj in down:
                continue
            down.update(submasks_ascending(proj))
        y_masks = _canonical_sorted(down)

    x_masks = submasks_ascending(t_mask)
    if workers <= 1 or len(x_masks) < 2:
        checked, cex = _scan_pairs(
            eng, x_masks, y_masks, ctx_masks, outside_subs, t_mask, budget
        )
    else:
        chunk_size = (len(x_masks) + workers - 1) // workers
        chunks = [
            x_masks[i : i + chunk_size]
            for i in range(0, len(x_masks), chunk_size)
        ]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda xs: _scan_pairs(
                        eng, xs, y_masks, ctx_masks, outside_subs, t_mask, budget
                    ),
                    chunks,
                )
            )
        checked, cex = 0, None
        for part_checked, part_cex in results:
            checked += part_checked
            if part_cex is not None:
                cex = part_cex
                break
    if cex is None:
        return ControllabilityVerdict(True, None, checked)
    return ControllabilityVerdict(
        False, (table.from_mask(cex[0]), table.from_mask(cex[1])), checked
    )


def decide_controllable(
    system: ReactionSystem,
    constraint: ContextConstraint,
    scope: Scope = Exhaustive(),
    species_limit: int = SPECIES_LIMIT_DEFAULT,
    node_budget: Optional[int] = None,
    workers: int = 1,
) -> ControllabilityVerdict:
    """Can every source be steered to every image state under the
    constraint?

    Sources range over all subsets; ends range over the image of the
    result map (unreachable-by-definition ends are skipped, not counted).
    """
    return _decide(
        system,
        system.species.full_set.mask,
        constraint,
        scope,
        "projection",
        species_limit,
        frontier_limit=0,
        node_budget=node_budget,
        workers=workers,
    )


def decide_target_controllable(
    system: ReactionSystem,
    targets: SpeciesSet,
    constraint: ContextConstraint,
    scope: Scope = Exhaustive(),
    proviso: str = "projection",
    species_limit: int = SPECIES_LIMIT_DEFAULT,
    frontier_limit: int = FRONTIER_LIMIT_DEFAULT,
    node_budget: Optional[int] = None,
    workers: int = 1,
) -> ControllabilityVerdict:
    """decide_controllable restricted to projections onto `targets`.

    Pairs (X, Y) range over subsets of the target set; the start frontier
    is every full state projecting to X (one reachable completion
    suffices), and admissible ends are image projections ("projection",
    the default) or any subset of one ("superset"). With targets = S the
    verdict coincides with decide_controllable.
    """
    _check_table(targets, system, "target set")
    return _decide(
        system,
        targets.mask,
        constraint,
        scope,
        proviso,
        species_limit,
        frontier_limit,
        node_budget,
        workers,
    )


@dataclass(frozen=True)
class MinimalNReport:
    """Smallest cardinality bound that decides true, with the probe trail."""

    minimal: Optional[int]
    verdicts: tuple[tuple[int, ControllabilityVerdict], ...]


def minimal_n(
    system: ReactionSystem,
    scope: Scope = Exhaustive(),
    targets: Optional[SpeciesSet] = None,
    species_limit: int = SPECIES_LIMIT_DEFAULT,
    frontier_limit: int = FRONTIER_LIMIT_DEFAULT,
    node_budget: Optional[int] = None,
    workers: int = 1,
) -> MinimalNReport:
    """Ascending scan n = 0, 1, …, |S|−1; the first true n is minimal
    because larger bounds only add contexts."""
    verdicts: list[tuple[int, ControllabilityVerdict]] = []
    for n in range(len(system.species)):
        verdict = _decide_dispatch(
            system,
            MaxCardinality(n),
            scope,
            targets,
            species_limit,
            frontier_limit,
            node_budget,
            workers,
        )
        verdicts.append((n, verdict))
        if verdict.decision:
            return MinimalNReport(n, tuple(verdicts))
    return MinimalNReport(None, tuple(verdicts))


@dataclass(frozen=True)
class MinimalSetReport:
    """Inclusion-minimal allowed set reached by greedy drops.

    `steps` records each drop probe as (species, dropped, verdict); when
    the starting set already fails, `minimal` is None and `start_verdict`
    carries the counterexample.
    """

    minimal: Optional[SpeciesSet]
    start_verdict: ControllabilityVerdict
    steps: tuple[tuple[str, bool, ControllabilityVerdict], ...] = ()


def minimal_I(
    system: ReactionSystem,
    start: SpeciesSet,
    scope: Scope = Exhaustive(),
    targets: Optional[SpeciesSet] = None,
    species_limit: int = SPECIES_LIMIT_DEFAULT,
    frontier_limit: int = FRONTIER_LIMIT_DEFAULT,
    node_budget: Optional[int] = None,
    workers: int = 1,
) -> MinimalSetReport:
    """Greedy single pass over `start` in species order, dropping every
    element whose removal keeps the verdict true.

    Monotonicity (smaller allowed sets admit fewer contexts) makes one
    pass sound: a drop that fails now would fail against any later subset,
    so the result is inclusion-minimal. It need not have minimum size.
    """
    _check_table(start, system, "allowed set")

    def probe(allowed: SpeciesSet) -> ControllabilityVerdict:
        return _decide_dispatch(
            system,
            AllowedSet(allowed),
            scope,
            targets,
            species_limit,
            frontier_limit,
            node_budget,
            workers,
        )

    start_verdict = probe(start)
    if not start_verdict.decision:
        return MinimalSetReport(None, start_verdict)
    table = system.species
    current = start
    steps: list[tuple[str, bool, ControllabilityVerdict]] = []
    for name in start.members:
        candidate = current - table.set_of([name])
        verdict = probe(candidate)
        if verdict.decision:
            current = candidate
        steps.append((name, verdict.decision, verdict))
    return MinimalSetReport(current, start_verdict, tuple(steps))


def _decide_dispatch(
    system: ReactionSystem,
    constraint: ContextConstraint,
    scope: Scope,
    targets: Optional[SpeciesSet],
    species_limit: int,
    frontier_limit: int,
    node_budget: Optional[int],
    workers: int,
) -> ControllabilityVerdict:
    if targets is None:
        return decide_controllable(
            system, constraint, scope, species_limit, node_budget, workers
        )
    return decide_target_controllable(
        system,
        targets,
        constraint,
        scope,
        "projection",
        species_limit,
        frontier_limit,
        node_budget,
        workers,
    )
