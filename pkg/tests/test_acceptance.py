"""Acceptance gate: one test per published criterion, timed and exact.

Expectations come from tests/golden_data.py (frozen output of an
independent plain-set computation) and tests/oracles.py, never from the
package's own bundled data files.
"""

import random
import time

import pytest

import golden_data
import oracles
from rsys.control import (
    AllowedSet,
    ControlQuery,
    MaxCardinality,
    decide_controllable,
    decide_target_controllable,
    find_witness,
    verify_witness,
)
from rsys.core import result_all, run_process
from rsys.dynamics import image_membership, nonce_extension, orbit
from rsys.errors import RefusalError
from rsys.formats import bn_to_reactions, export_trace, parse_boolean_network
from rsys.models import StatusLabel, classify_status, load_builtin
from util import canonical_subsets, make_system, names_of

CORPUS = load_builtin()
SYSTEM = CORPUS.model.system
TABLE = SYSTEM.species


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def report(criterion, detail, sw, limit):
    print(
        f"[acceptance] criterion {criterion}: PASS"
        f" ({sw.elapsed:.2f}s < {limit:.0f}s) {detail}"
    )
    assert sw.elapsed < limit, f"criterion {criterion} exceeded {limit}s"


def named(name):
    return CORPUS.named_states[name]


def ctx(names):
    return TABLE.set_of(names)


def replay(initial, context, steps):
    results = [initial]
    for _ in range(steps):
        results.append(result_all(SYSTEM, context | results[-1]))
    return results


def test_criterion_01_table3_replay():
    with Stopwatch() as sw:
        results = replay(named("S1"), ctx(["GF"]), 18)
        expected = [named(f"S{k}") for k in range(1, 20)]
        assert results == expected
        assert results[18] == results[7]  # S19 closes the cycle at S8
        statuses = [classify_status(d).display for d in results]
        assert statuses == golden_data.TABLE3_STATUS
        trace = run_process(SYSTEM, [ctx(["GF"])] * 19, initial_result=named("S1"))
        assert "step 18 = step 7 (cycle)" in export_trace(trace, "table")
    report(1, "19 result sets, statuses, cycle detected", sw, 1.0)


def test_criterion_02_table4_replay():
    with Stopwatch() as sw:
        results = replay(named("S19"), ctx(["GF", "iPI3K"]), 7)
        expected = [named(f"X{k}") for k in range(8)]
        assert results == expected
        assert results[7] == results[6]  # X7 is the steady state
        assert classify_status(results[7]) is StatusLabel.PROLIFERATION
    report(2, "X1..X7, steady state, final Proliferation", sw, 1.0)


def test_criterion_03_table5_replay():
    with Stopwatch() as sw:
        results = replay(named("S19"), ctx(["GF", "iPI3K", "icycE"]), 7)
        expected = [named(f"Y{k}") for k in range(8)]
        assert results == expected
        assert classify_status(results[7]) is StatusLabel.NO_PROLIFERATION
    report(3, "Y1..Y7, final No proliferation", sw, 1.0)


def test_criterion_04_attractor_counts():
    start = ctx(["GF"]) | named("S19")
    listed = [
        (["GF", "PRAS40"], 10, 10, 0, 0),
        (["GF", "icycE"], 11, 6, 0, 5),
        (["GF", "icycE", "PRAS40"], 10, 0, 0, 10),
    ]
    with Stopwatch() as sw:
        for context_names, period, pro, upro, neither in listed:
            orb = orbit(SYSTEM, start, ctx(context_names))
            got_pro = sum(1 for w in orb.cycle if "Pro" in w)
            got_upro = sum(1 for w in orb.cycle if "uPro" in w)
            got_neither = sum(
                1 for w in orb.cycle if "Pro" not in w and "uPro" not in w
            )
            assert (orb.period, got_pro, got_upro, got_neither) == (
                period,
                pro,
                upro,
                neither,
            ), context_names
        for row in golden_data.ATTRACTORS:
            orb = orbit(SYSTEM, start, ctx(row["context"]))
            assert len(orb.transient) == row["transient"], row
            assert orb.period == row["period"], row
    report(4, "pinned start {GF} | S19 reproduces all cycle counts", sw, 1.0)


def bn_mask_oracle(updates, index):
    """Per-variable (product bit, [(pos mask, neg mask)]) over an index."""
    compiled = []
    for var, terms in updates.items():
        bit = 1 << index[var]
        masks = []
        for pos, neg in terms:
            pmask = 0
            for name in pos:
                pmask |= 1 << index[name]
            nmask = 0
            for name in neg:
                nmask |= 1 << index[name]
            masks.append((pmask, nmask))
        compiled.append((bit, masks))
    return compiled


def test_criterion_05_network_translation_equivalence():
    with Stopwatch() as sw:
        from rsys._engine import Engine

        # The bundled 17-variable network over every input+variable state.
        bn = parse_boolean_network(
            "@inputs GF\n"
            + "\n".join(
                f"{var} = "
                + " | ".join(
                    " & ".join(list(pos) + ["!" + x for x in neg])
                    for pos, neg in terms
                )
                for var, terms in golden_data.BN_UPDATES.items()
            )
        )
        system = bn_to_reactions(bn)
        index = {name: k for k, name in enumerate(system.species.names)}
        compiled = bn_mask_oracle(golden_data.BN_UPDATES, index)
        read_bits = sorted(index[n] for n in list(golden_data.BN_UPDATES) + ["GF"])
        eng = Engine(system)
        for assignment in range(1 << len(read_bits)):
            state = 0
            for k, bit in enumerate(read_bits):
                if assignment >> k & 1:
                    state |= 1 << bit
            want = 0
            for bit, masks in compiled:
                for pmask, nmask in masks:
                    if state & pmask == pmask and not state & nmask:
                        want |= bit
                        break
            assert eng.res(state) == want
        # 100 random flat-DNF networks, every assignment.
        rng = random.Random(505)
        for _ in range(100):
            net = oracles.random_dnf_network(rng, rng.randint(1, 10))
            text = "\n".join(
                f"{var} = "
                + " | ".join(
                    " & ".join(sorted(pos) + ["!" + x for x in sorted(neg)])
                    for pos, neg in terms
                )
                for var, terms in net.items()
            )
            translated = bn_to_reactions(parse_boolean_network(text))
            names = sorted(net)
            for mask in range(1 << len(names)):
                state = frozenset(
                    n for k, n in enumerate(names) if mask >> k & 1
                )
                got = names_of(
                    result_all(translated, translated.species.set_of(state))
                )
                assert got == oracles.bn_step_oracle(net, state)
    report(5, "bundled network and 100 random networks, all states", sw, 30.0)


def random_constraint(rng, table):
    names = list(table.names)
    if rng.random() < 0.5:
        n = rng.randint(0, len(names) - 1)
        return MaxCardinality(n), [
            s for s in canonical_subsets(names) if len(s) <= n
        ]
    chosen = sorted(rng.sample(names, rng.randint(0, len(names))))
    return AllowedSet(table.set_of(chosen)), canonical_subsets(chosen)


def random_subset(rng, names):
    return frozenset(n for n in names if rng.random() < 0.5)


def test_criterion_06_witness_oracle_equivalence():
    rng = random.Random(606)
    with Stopwatch() as sw:
        for _ in range(50):
            n = rng.randint(2, 5)
            names, triples = oracles.random_system(rng, n, rng.randint(1, 6))
            system = make_system(names, triples)
            table = system.species
            constraint, allowed = random_constraint(rng, table)
            for _ in range(4):
                x = random_subset(rng, names)
                y = random_subset(rng, names)
                witness = find_witness(
                    system,
                    ControlQuery(table.set_of(x), table.set_of(y), constraint),
                )
                oracle_len = oracles.shortest_witness_len(
                    triples, allowed, x, y, depth_limit=1 << n
                )
                if witness is None:
                    assert oracle_len is None
                else:
                    assert witness.hit_index == oracle_len
    report(6, "50 systems, presence and shortest length agree", sw, 120.0)


def test_criterion_07_image_membership_oracle_equivalence():
    rng = random.Random(707)
    with Stopwatch() as sw:
        for _ in range(50):
            n = rng.randint(3, 12)
            names, triples = oracles.random_system(rng, n, rng.randint(2, 10))
            system = make_system(names, triples)
            table = system.species
            image = oracles.image_oracle(triples, frozenset(names))
            targets = [rng.choice(sorted(image, key=sorted)) for _ in range(12)]
            targets += [random_subset(rng, names) for _ in range(12)]
            for target in targets:
                cert = image_membership(system, table.set_of(target))
                assert (cert is not None) == (target in image)
                if cert is not None:
                    assert (
                        names_of(result_all(system, cert.preimage)) == target
                    )
    report(7, "50 systems, membership and certificates agree", sw, 120.0)


def test_criterion_08_extension_conservativity():
    rng = random.Random(808)
    with Stopwatch() as sw:
        for _ in range(20):
            n = rng.randint(2, 6)
            names, triples = oracles.random_system(rng, n, rng.randint(1, 5))
            base = make_system(names, triples)
            extra = ["n0", "n1"]
            extended = nonce_extension(base, extra)
            wide_names = list(extended.species.names)
            base_names = set(names)
            for mask in range(1 << len(wide_names)):
                z = frozenset(
                    w for k, w in enumerate(wide_names) if mask >> k & 1
                )
                assert names_of(
                    result_all(extended, extended.species.set_of(z))
                ) == names_of(
                    result_all(base, base.species.set_of(z & base_names))
                )
            fresh_only = decide_target_controllable(
                extended,
                extended.species.set_of(names),
                AllowedSet(extended.species.set_of(extra)),
            )
            base_empty = decide_controllable(
                base, AllowedSet(base.species.empty_set)
            )
            assert fresh_only.decision == base_empty.decision
    report(8, "20 extensions: res conserved, verdicts carry over", sw, 120.0)


def test_criterion_09_monotonicity_and_witness_validity():
    rng = random.Random(909)
    violations = 0
    with Stopwatch() as sw:
        for _ in range(25):
            n = rng.randint(2, 4)
            names, triples = oracles.random_system(rng, n, rng.randint(1, 4))
            system = make_system(names, triples)
            table = system.species
            decisions = [
                decide_controllable(system, MaxCardinality(k)).decision
                for k in range(len(names))
            ]
            for small, large in zip(decisions, decisions[1:]):
                if small and not large:
                    violations += 1
            chain = []
            pool = list(names)
            rng.shuffle(pool)
            for k in range(len(pool) + 1):
                chain.append(
                    decide_controllable(
                        system, AllowedSet(table.set_of(pool[:k]))
                    ).decision
                )
            for small, large in zip(chain, chain[1:]):
                if small and not large:
                    violations += 1
            for _ in range(3):
                constraint, _ = random_constraint(rng, table)
                query = ControlQuery(
                    table.set_of(random_subset(rng, names)),
                    table.set_of(random_subset(rng, names)),
                    constraint,
                )
                witness = find_witness(system, query)
                if witness is not None:
                    check = verify_witness(system, query, witness)
                    if not check.ok:
                        violations += 1
        assert violations == 0
    report(9, "n- and I-monotone on every toy; all witnesses replay", sw, 120.0)


def test_criterion_10_scale_refusal_and_budgeted_witnesses():
    budget = 10**6
    with Stopwatch() as sw:
        with pytest.raises(RefusalError, match=r"4\^35"):
            decide_controllable(SYSTEM, MaxCardinality(1))
        start = ctx(["GF"]) | named("S19")
        queries = [
            ControlQuery(
                start,
                TABLE.set_of(["Pro"]),
                AllowedSet(ctx(["GF", "iPI3K"])),
                targets=TABLE.set_of(["Pro", "uPro"]),
            ),
            ControlQuery(
                start,
                TABLE.empty_set,
                AllowedSet(ctx(["GF", "iPI3K", "icycE"])),
                targets=TABLE.set_of(["Pro", "uPro"]),
            ),
            ControlQuery(
                start,
                ctx(["GF", "iPI3K", "icycE"]) | named("Y6"),
                AllowedSet(ctx(["GF", "iPI3K", "icycE"])),
            ),
        ]
        for query in queries:
            witness = find_witness(SYSTEM, query, node_budget=budget)
            assert witness is not None
            assert witness.visited < budget
            assert verify_witness(SYSTEM, query, witness).ok
    report(
        10,
        "all-pairs scan refused at 4^35; three |I|<=3 witnesses in budget",
        sw,
        120.0,
    )
