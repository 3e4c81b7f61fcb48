"""Compare the compiled search kernel against the pure-Python fallback.

Runs identical workloads on both backends and reports wall-clock times:

* result-map sweeps: res over every subset of a mid-sized universe,
* breadth-first witness searches on random systems under a cardinality
  constraint,
* breadth-first closures on the bundled 35-species model.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import time

from rsys._engine import Engine, GOAL_FULL, compiled_available, submasks_ascending
from rsys.control import AllowedSet, ControlQuery, MaxCardinality, find_witness
from rsys.core import Reaction, ReactionSystem, SpeciesTable
from rsys.models import load_builtin


def random_system(n_species: int, n_reactions: int, rng: random.Random) -> ReactionSystem:
    table = SpeciesTable(f"s{k}" for k in range(n_species))
    reactions = []
    for _ in range(n_reactions):
        universe = list(range(n_species))
        rng.shuffle(universe)
        r = universe[: rng.randint(0, 2)]
        i = universe[2:4][: rng.randint(0, 2)]
        p = universe[4 : 4 + rng.randint(1, 3)]
        reactions.append(
            Reaction(
                table.set_of(f"s{k}" for k in r),
                table.set_of(f"s{k}" for k in i),
                table.set_of(f"s{k}" for k in p),
            )
        )
    return ReactionSystem(table, reactions)


def time_call(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_res_sweep(backend: str, repeat: int) -> float:
    rng = random.Random(7)
    system = random_system(16, 40, rng)
    eng = Engine(system, backend=backend)
    full = (1 << 16) - 1

    def work() -> None:
        eng._res_cache.clear()
        acc = 0
        for mask in range(full + 1):
            acc ^= eng.res(mask)

    return time_call(work, repeat)


def bench_witness(backend: str, repeat: int) -> float:
    rng = random.Random(11)
    systems = [random_system(12, 24, rng) for _ in range(20)]

    def work() -> None:
        for system in systems:
            table = system.species
            query = ControlQuery(
                source=table.empty_set,
                target=table.full_set & system.producible,
                constraint=MaxCardinality(2),
            )
            find_witness_on(system, query, backend)

    return time_call(work, repeat)


def find_witness_on(system, query, backend: str):
    # find_witness builds its own Engine; steer the choice via the env hook.
    import os

    old = os.environ.get("RSYS_KERNEL")
    os.environ["RSYS_KERNEL"] = backend
    try:
        return find_witness(system, query)
    finally:
        if old is None:
            os.environ.pop("RSYS_KERNEL", None)
        else:
            os.environ["RSYS_KERNEL"] = old


def bench_closure(backend: str, repeat: int) -> float:
    corpus = load_builtin()
    system = corpus.model.system
    table = system.species
    start = corpus.named_states["S19"] | table.set_of(["GF"])
    contexts = submasks_ascending(
        table.set_of(["GF", "iPI3K", "icycE"]).mask
    )
    eng = Engine(system, backend=backend)

    def work() -> None:
        eng.bfs_closure([start.mask], contexts, 1 << 62)

    return time_call(work, repeat)


BENCHES = [
    ("res sweep (2^16 states, 40 reactions)", bench_res_sweep),
    ("witness search (20 systems, |S|=12, n<=2)", bench_witness),
    ("closure (35-species model, |I|=3)", bench_closure),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if not compiled_available():
        print("compiled kernel not built; nothing to compare")
        return
    width = max(len(name) for name, _ in BENCHES)
    print(f"{'benchmark'.ljust(width)}  {'pure':>10}  {'compiled':>10}  speedup")
    for name, bench in BENCHES:
        pure = bench("pure", args.repeat)
        compiled = bench("compiled", args.repeat)
        print(
            f"{name.ljust(width)}  {pure * 1e3:9.1f}ms  {compiled * 1e3:9.1f}ms"
            f"  {pure / compiled:6.1f}x"
        )


if __name__ == "__main__":
    main()
