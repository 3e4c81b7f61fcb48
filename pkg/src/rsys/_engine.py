"""Mask-level engine: backend selection, memoized results, closures.

The engine compiles a ReactionSystem into parallel mask tuples once and
routes hot loops to a kernel. Backend choice: an explicit argument wins,
then the RSYS_KERNEL environment variable ("pure" or "compiled"), then
the compiled kernel whenever it is importable and the species table fits
in 64 bits.
"""

from __future__ import annotations

import os
from typing import Optional

from . import _kernel_py
from .core import ReactionSystem, SpeciesSet
from .errors import RsysError

try:
    from . import _kernel_c
except ImportError:
    _kernel_c = None

FOUND = _kernel_py.FOUND
EXHAUSTED = _kernel_py.EXHAUSTED
DEPTH_LIMITED = _kernel_py.DEPTH_LIMITED
BUDGET_STOP = _kernel_py.BUDGET_STOP
GOAL_FULL = _kernel_py.GOAL_FULL
GOAL_PROJECTED = _kernel_py.GOAL_PROJECTED

COMPILED_SPECIES_LIMIT = 64


def compiled_available() -> bool:
    return _kernel_c is not None


def _pick_kernel(n_species: int, backend: Optional[str]):
    if backend is None:
        backend = os.environ.get("RSYS_KERNEL") or None
    if backend is None:
        if _kernel_c is not None and n_species <= COMPILED_SPECIES_LIMIT:
            return _kernel_c
        return _kernel_py
    if backend == "pure":
        return _kernel_py
    if backend == "compiled":
        if _kernel_c is None:
            raise RsysError("compiled kernel requested but not built")
        if n_species > COMPILED_SPECIES_LIMIT:
            raise RsysError(
                f"compiled kernel supports at most {COMPILED_SPECIES_LIMIT} "
                f"species, got {n_species}"
            )
        return _kernel_c
    raise RsysError(f"unknown kernel backend {backend!r} (use 'pure' or 'compiled')")


class Engine:
    """Mask-level view of one system, bound to a kernel backend."""

    __slots__ = (
        "system",
        "table",
        "n",
        "rmasks",
        "imasks",
        "pmasks",
        "resource_mask",
        "kernel",
        "_res_cache",
    )

    def __init__(self, system: ReactionSystem, backend: Optional[str] = None):
        self.system = system
        self.table = system.species
        self.n = len(system.species)
        self.rmasks = tuple(r.reactants.mask for r in system.reactions)
        self.imasks = tuple(r.inhibitors.mask for r in system.reactions)
        self.pmasks = tuple(r.products.mask for r in system.reactions)
        mask = 0
        for r, i in zip(self.rmasks, self.imasks):
            mask |= r | i
        self.resource_mask = mask
        self.kernel = _pick_kernel(self.n, backend)
        self._res_cache: dict[int, int] = {}

    @property
    def backend(self) -> str:
        return self.kernel.BACKEND

    def res(self, state: int) -> int:
        """Memoized result mask; keyed on the sensed part of the state."""
        key = state & self.resource_mask
        cached = self._res_cache.get(key)
        if cached is None:
            cached = self.kernel.res_mask(key, self.rmasks, self.imasks, self.pmasks)
            self._res_cache[key] = cached
        return cached

    def res_set(self, state: SpeciesSet) -> SpeciesSet:
        return SpeciesSet(self.table, self.res(state.mask))

    def bfs_witness(
        self,
        starts: list[int],
        contexts: list[int],
        goal_kind: int,
        goal_mask: int,
        t_mask: int,
        depth_limit: int,
        node_budget: int,
    ) -> tuple[int, int, list[int], int, int]:
        return self.kernel.bfs_witness(
            starts,
            contexts,
            self.rmasks,
            self.imasks,
            self.pmasks,
            goal_kind,
            goal_mask,
            t_mask,
            depth_limit,
            node_budget,
        )

    def bfs_closure(
        self, starts: list[int], contexts: list[int], node_budget: int
    ) -> tuple[list[int], set[int], bool]:
        return self.kernel.bfs_closure(
            starts, contexts, self.rmasks, self.imasks, self.pmasks, node_budget
        )

    def image(self) -> set[int]:
        """All result masks: res over every subset of the sensed species."""
        out = {self.res(0)}
        full = self.resource_mask
        sub = full
        while sub:
            out.add(self.res(sub))
            sub = (sub - 1) & full
        return out


def submasks_ascending(universe: int) -> list[int]:
    """All submasks of `universe`, ascending by (cardinality, value)."""
    subs = [0]
    sub = universe
    while sub:
        subs.append(sub)
        sub = (sub - 1) & universe
    subs.sort(key=lambda m: (m.bit_count(), m))
    return subs
