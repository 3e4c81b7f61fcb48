"""Exact set semantics: species tables, reactions, systems, and processes.

States are subsets of a fixed species table, stored as bit masks (bit k is
species k in table order). All values are immutable and safe to share.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Optional, Union

from .errors import ReactionError, RsysError, SpeciesMismatchError

NAME_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def _valid_name(name: object) -> bool:
    return isinstance(name, str) and NAME_PATTERN.match(name) is not None


class SpeciesTable:
    """Ordered universe of species names; positions define the bit layout."""

    __slots__ = ("names", "_index", "_hash")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        index: dict[str, int] = {}
        for k, name in enumerate(names):
            if not _valid_name(name):
                raise SpeciesMismatchError(
                    f"invalid species name {name!r}: names match [A-Za-z][A-Za-z0-9_]*"
                )
            if name in index:
                raise SpeciesMismatchError(f"duplicate species name {name!r}")
            index[name] = k
        self.names = names
        self._index = index
        self._hash = hash(names)

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SpeciesTable) and self.names == other.names

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"SpeciesTable({list(self.names)!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SpeciesMismatchError(f"unknown species {name!r}") from None

    def display_name(self, name: str) -> str:
        """Pretty form for reports: a blocking species iX renders as ι_X."""
        if name.startswith("i") and name[1:] in self._index:
            return "ι_" + name[1:]
        return name

    def set_of(self, names: Iterable[str] = ()) -> SpeciesSet:
        mask = 0
        for name in names:
            mask |= 1 << self.index(name)
        return SpeciesSet(self, mask)

    def from_mask(self, mask: int) -> SpeciesSet:
        return SpeciesSet(self, mask)

    @property
    def empty_set(self) -> SpeciesSet:
        return SpeciesSet(self, 0)

    @property
    def full_set(self) -> SpeciesSet:
        return SpeciesSet(self, (1 << len(self.names)) - 1)


def _same_table(a: SpeciesSet, b: SpeciesSet) -> None:
    if a.table is b.table or a.table.names == b.table.names:
        return
    raise SpeciesMismatchError(
        "species tables differ: "
        f"{len(a.table)} names starting {a.table.names[:3]} vs "
        f"{len(b.table)} names starting {b.table.names[:3]}"
    )


class SpeciesSet:
    """Immutable subset of a species table, backed by an int bit mask."""

    __slots__ = ("table", "mask")

    def __init__(self, table: SpeciesTable, mask: int):
        if not 0 <= mask < (1 << len(table)):
            raise SpeciesMismatchError(
                f"mask {mask:#x} out of range for {len(table)} species"
            )
        self.table = table
        self.mask = mask

    @property
    def members(self) -> tuple[str, ...]:
        m = self.mask
        return tuple(n for k, n in enumerate(self.table.names) if m >> k & 1)

    def sort_key(self) -> tuple[int, int]:
        """Canonical order: ascending cardinality, then ascending encoding."""
        return (self.mask.bit_count(), self.mask)

    def __or__(self, other: SpeciesSet) -> SpeciesSet:
        _same_table(self, other)
        return SpeciesSet(self.table, self.mask | other.mask)

    def __and__(self, other: SpeciesSet) -> SpeciesSet:
        _same_table(self, other)
        return SpeciesSet(self.table, self.mask & other.mask)

    def __sub__(self, other: SpeciesSet) -> SpeciesSet:
        _same_table(self, other)
        return SpeciesSet(self.table, self.mask & ~other.mask)

    def __le__(self, other: SpeciesSet) -> bool:
        _same_table(self, other)
        return self.mask & ~other.mask == 0

    def __ge__(self, other: SpeciesSet) -> bool:
        _same_table(self, other)
        return other.mask & ~self.mask == 0

    def __lt__(self, other: SpeciesSet) -> bool:
        return self <= other and self.mask != other.mask

    def isdisjoint(self, other: SpeciesSet) -> bool:
        _same_table(self, other)
        return self.mask & other.mask == 0

    def __contains__(self, name: str) -> bool:
        return self.mask >> self.table.index(name) & 1 == 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __iter__(self) -> Iterator[str]:
        return iter(self.members)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SpeciesSet)
            and self.mask == other.mask
            and (self.table is other.table or self.table.names == other.table.names)
        )

    def __hash__(self) -> int:
        return hash(self.mask) ^ self.table._hash

    def __repr__(self) -> str:
        return "{" + ", ".join(self.members) + "}"

    def pretty(self) -> str:
        disp = self.table.display_name
        return "{" + ", ".join(disp(n) for n in self.members) + "}"


class Reaction:
    """A reactants/inhibitors/products triple over one species table."""

    __slots__ = ("label", "reactants", "inhibitors", "products")

    def __init__(
        self,
        reactants: SpeciesSet,
        inhibitors: SpeciesSet,
        products: SpeciesSet,
        label: Optional[str] = None,
    ):
        _same_table(reactants, inhibitors)
        _same_table(reactants, products)
        if label is not None and not _valid_name(label):
            raise ReactionError(
                f"invalid reaction label {label!r}: labels match [A-Za-z][A-Za-z0-9_]*"
            )
        if reactants.mask & inhibitors.mask:
            overlap = SpeciesSet(reactants.table, reactants.mask & inhibitors.mask)
            raise ReactionError(
                "reactants and inhibitors overlap: " + ", ".join(overlap.members)
            )
        if products.mask == 0:
            raise ReactionError("empty product set")
        self.label = label
        self.reactants = reactants
        self.inhibitors = inhibitors
        self.products = products

    @classmethod
    def unchecked(
        cls,
        reactants: SpeciesSet,
        inhibitors: SpeciesSet,
        products: SpeciesSet,
        label: Optional[str] = None,
    ) -> Reaction:
        """Build without invariant checks, for diagnostics and negative tests."""
        self = object.__new__(cls)
        self.label = label
        self.reactants = reactants
        self.inhibitors = inhibitors
        self.products = products
        return self

    @property
    def table(self) -> SpeciesTable:
        return self.reactants.table

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Reaction)
            and self.label == other.label
            and self.reactants == other.reactants
            and self.inhibitors == other.inhibitors
            and self.products == other.products
        )

    def __hash__(self) -> int:
        return hash(
            (self.label, self.reactants.mask, self.inhibitors.mask, self.products.mask)
        )

    def __repr__(self) -> str:
        head = f"{self.label}: " if self.label else ""
        return f"{head}{self.reactants!r} | {self.inhibitors!r} -> {self.products!r}"


class ReactionSystem:
    """A species table plus a list of reactions over it."""

    __slots__ = ("species", "reactions")

    def __init__(self, species: SpeciesTable, reactions: Iterable[Reaction]):
        reactions = tuple(reactions)
        probe = SpeciesSet(species, 0)
        seen_labels: set[str] = set()
        for r in reactions:
            _same_table(probe, r.reactants)
            if r.label is not None:
                if r.label in seen_labels:
                    raise ReactionError(f"duplicate reaction label {r.label!r}")
                seen_labels.add(r.label)
        self.species = species
        self.reactions = reactions

    @property
    def resources(self) -> SpeciesSet:
        """Species some reaction senses (union of reactants and inhibitors).

        Results depend only on the state's intersection with this set:
        result_all(A, T) = result_all(A, T ∩ resources).
        """
        mask = 0
        for r in self.reactions:
            mask |= r.reactants.mask | r.inhibitors.mask
        return SpeciesSet(self.species, mask)

    @property
    def producible(self) -> SpeciesSet:
        """Union of all product sets."""
        mask = 0
        for r in self.reactions:
            mask |= r.products.mask
        return SpeciesSet(self.species, mask)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ReactionSystem)
            and self.species.names == other.species.names
            and self.reactions == other.reactions
        )

    def __hash__(self) -> int:
        return hash((self.species.names, self.reactions))

    def __repr__(self) -> str:
        return (
            f"ReactionSystem({len(self.species)} species, "
            f"{len(self.reactions)} reactions)"
        )


class ContextSequence:
    """Non-empty sequence of context sets C_0 … C_n over one table."""

    __slots__ = ("table", "contexts")

    def __init__(self, table: SpeciesTable, contexts: Iterable[SpeciesSet]):
        contexts = tuple(contexts)
        if not contexts:
            raise RsysError("empty context sequence")
        probe = SpeciesSet(table, 0)
        for c in contexts:
            _same_table(probe, c)
        self.table = table
        self.contexts = contexts

    def __len__(self) -> int:
        return len(self.contexts)

    def __iter__(self) -> Iterator[SpeciesSet]:
        return iter(self.contexts)

    def __getitem__(self, k: int) -> SpeciesSet:
        return self.contexts[k]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ContextSequence) and self.contexts == other.contexts

    def __repr__(self) -> str:
        return f"ContextSequence({list(self.contexts)!r})"


class ProcessTrace:
    """Contexts C_i and results D_i of an interactive process; W_i = C_i ∪ D_i."""

    __slots__ = ("contexts", "results", "initial_mode")

    def __init__(
        self,
        contexts: tuple[SpeciesSet, ...],
        results: tuple[SpeciesSet, ...],
        initial_mode: str,
    ):
        if len(contexts) != len(results) or not contexts:
            raise RsysError("trace needs equal non-zero context and result counts")
        if initial_mode not in ("context", "given"):
            raise RsysError(f"unknown initial mode {initial_mode!r}")
        self.contexts = contexts
        self.results = results
        self.initial_mode = initial_mode

    @property
    def states(self) -> tuple[SpeciesSet, ...]:
        return tuple(c | d for c, d in zip(self.contexts, self.results))

    @property
    def table(self) -> SpeciesTable:
        return self.contexts[0].table

    def __len__(self) -> int:
        return len(self.contexts)

    def __repr__(self) -> str:
        return f"ProcessTrace({len(self)} steps, {self.initial_mode!r} start)"


def validate_system(system: ReactionSystem) -> list[str]:
    """Defensive re-check of every structural invariant; empty list = valid."""
    problems: list[str] = []
    table = system.species
    limit = 1 << len(table)
    labels: set[str] = set()
    for k, r in enumerate(system.reactions):
        who = f"reaction {k}" + (f" ({r.label})" if r.label else "")
        for part, name in (
            (r.reactants, "reactants"),
            (r.inhibitors, "inhibitors"),
            (r.products, "products"),
        ):
            if part.table is not table and part.table.names != table.names:
                problems.append(f"{who}: {name} use a different species table")
            elif not 0 <= part.mask < limit:
                problems.append(f"{who}: {name} mask out of range")
        overlap = r.reactants.mask & r.inhibitors.mask
        if overlap:
            names = SpeciesSet(r.reactants.table, overlap).members
            problems.append(
                f"{who}: reactants and inhibitors overlap: " + ", ".join(names)
            )
        if r.products.mask == 0:
            problems.append(f"{who}: empty product set")
        if r.label is not None:
            if not _valid_name(r.label):
                problems.append(f"{who}: invalid label {r.label!r}")
            elif r.label in labels:
                problems.append(f"{who}: duplicate reaction label {r.label!r}")
            labels.add(r.label)
    return problems


def enabled(reaction: Reaction, state: SpeciesSet) -> bool:
    """True iff all reactants are present and no inhibitor is."""
    _same_table(reaction.reactants, state)
    m = state.mask
    return reaction.reactants.mask & ~m == 0 and reaction.inhibitors.mask & m == 0


def result_reaction(reaction: Reaction, state: SpeciesSet) -> SpeciesSet:
    """The reaction's products if enabled in `state`, else the empty set."""
    if enabled(reaction, state):
        return reaction.products
    return SpeciesSet(state.table, 0)


def result_all(system: ReactionSystem, state: SpeciesSet) -> SpeciesSet:
    """Union of products of all reactions enabled in `state`."""
    probe = SpeciesSet(system.species, 0)
    _same_table(probe, state)
    m = state.mask
    out = 0
    for r in system.reactions:
        if r.reactants.mask & ~m == 0 and r.inhibitors.mask & m == 0:
            out |= r.products.mask
    return SpeciesSet(system.species, out)


def step(system: ReactionSystem, state: SpeciesSet, context: SpeciesSet) -> SpeciesSet:
    """Next full state: the new step's context joined with res(state)."""
    _same_table(state, context)
    return context | result_all(system, state)


def run_process(
    system: ReactionSystem,
    contexts: Union[ContextSequence, Iterable[SpeciesSet]],
    initial_result: Optional[SpeciesSet] = None,
) -> ProcessTrace:
    """Replay the interactive process driven by `contexts`.

    Without `initial_result` the first result set is empty (mode "context");
    with it, the supplied set is installed as D_0 (mode "given"). Either way
    D_i = res(C_{i-1} ∪ D_{i-1}), the trace has one step per context, and the
    final context only pads the final state.
    """
    if isinstance(contexts, ContextSequence):
        ctxs = contexts.contexts
    else:
        ctxs = tuple(contexts)
    if not ctxs:
        raise RsysError("empty context sequence")
    probe = SpeciesSet(system.species, 0)
    for c in ctxs:
        _same_table(probe, c)
    if initial_result is None:
        mode = "context"
        d = SpeciesSet(system.species, 0)
    else:
        mode = "given"
        _same_table(probe, initial_result)
        d = initial_result
    results = [d]
    for c in ctxs[:-1]:
        d = result_all(system, c | d)
        results.append(d)
    return ProcessTrace(ctxs, tuple(results), mode)
