"""Bundled golden corpus: a 35-species proliferation-signalling model with
named states, reference traces, and the proliferation-status classifier.

The corpus ships as plain data files (model, Boolean-network source,
context sequences, and a JSON index of named states and expected traces);
`load_builtin` parses and cross-checks them, and `golden_replay` re-runs a
reference trace and diffs it against the stored expectation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import IntEnum
from importlib import resources
from typing import Optional

from .core import (
    ContextSequence,
    ProcessTrace,
    SpeciesSet,
    result_all,
    run_process,
    validate_system,
)
from .errors import RsysError
from .formats import (
    STATUS_NONE,
    STATUS_PROLIFERATION,
    STATUS_UNCONTROLLED,
    ModelDocument,
    parse_context_sequence,
    parse_model,
)

PROLIFERATION_MARKER = "Pro"
UNCONTROLLED_MARKER = "uPro"

DATA_FILES = (
    "oncogenic.rs.txt",
    "oncogenic.bn.txt",
    "table3.ctx.txt",
    "table4.ctx.txt",
    "table5.ctx.txt",
    "golden.json",
)

EXPECTED_SPECIES = 35
EXPECTED_REACTIONS = 25


class StatusLabel(IntEnum):
    """Proliferation status of a state, ordered by severity."""

    NO_PROLIFERATION = 0
    PROLIFERATION = 1
    UNCONTROLLED_PROLIFERATION = 2

    @property
    def display(self) -> str:
        return _DISPLAY[self]


_DISPLAY = {
    StatusLabel.NO_PROLIFERATION: STATUS_NONE,
    StatusLabel.PROLIFERATION: STATUS_PROLIFERATION,
    StatusLabel.UNCONTROLLED_PROLIFERATION: STATUS_UNCONTROLLED,
}
_FROM_DISPLAY = {text: label for label, text in _DISPLAY.items()}


def status_from_display(text: str) -> StatusLabel:
    try:
        return _FROM_DISPLAY[text]
    except KeyError:
        raise RsysError(f"unknown status label {text!r}") from None


def classify_status(state: SpeciesSet) -> StatusLabel:
    """uPro dominates Pro; containing neither means no proliferation."""
    if UNCONTROLLED_MARKER in state:
        return StatusLabel.UNCONTROLLED_PROLIFERATION
    if PROLIFERATION_MARKER in state:
        return StatusLabel.PROLIFERATION
    return StatusLabel.NO_PROLIFERATION


@dataclass(frozen=True)
class GoldenTrace:
    """A reference run: contexts plus the expected results and statuses."""

    name: str
    initial: SpeciesSet
    contexts: ContextSequence
    results: tuple[SpeciesSet, ...]
    statuses: tuple[StatusLabel, ...]


@dataclass(frozen=True)
class GoldenCorpus:
    model: ModelDocument
    named_states: dict
    traces: dict


@dataclass(frozen=True)
class GoldenReplayReport:
    """Diff between a fresh replay and the stored expectation.

    Each mismatch is (step, field, expected, actual) with the values
    rendered as text; `ok` means no mismatches.
    """

    name: str
    ok: bool
    trace: ProcessTrace
    mismatches: tuple[tuple[int, str, str, str], ...]


def data_text(filename: str) -> str:
    """Raw text of one bundled data file."""
    if filename not in DATA_FILES:
        raise RsysError(
            f"unknown corpus file {filename!r}; bundled files: "
            + ", ".join(DATA_FILES)
        )
    return (
        resources.files("rsys.data").joinpath(filename).read_text(encoding="utf-8")
    )


_NAME_ALIAS_RE = re.compile(r"([A-Za-z]+)(\d+)\Z")


def _corrupt(detail: str) -> RsysError:
    return RsysError(f"bundled corpus is corrupted: {detail}")


def load_builtin() -> GoldenCorpus:
    """Parse and cross-check the bundled corpus.

    Checks are structural (species and reaction counts, a clean validation
    report, result counts per trace) plus two semantic anchors: the first
    named state equals the result of the bare growth-factor context, and
    every stored status matches the classifier on its stored result set.
    """
    doc = parse_model(data_text("oncogenic.rs.txt"))
    table = doc.system.species
    if len(table) != EXPECTED_SPECIES:
        raise _corrupt(f"expected {EXPECTED_SPECIES} species, found {len(table)}")
    if len(doc.system.reactions) != EXPECTED_REACTIONS:
        raise _corrupt(
            f"expected {EXPECTED_REACTIONS} reactions, "
            f"found {len(doc.system.reactions)}"
        )
    problems = validate_system(doc.system)
    if problems:
        raise _corrupt("; ".join(problems))

    index = json.loads(data_text("golden.json"))
    named: dict[str, SpeciesSet] = {}
    for name, members in index["named_states"].items():
        sset = table.set_of(members)
        named[name] = sset
        m = _NAME_ALIAS_RE.match(name)
        if m:
            named[f"{m.group(1)}_{m.group(2)}"] = sset

    s1 = named.get("S1")
    if s1 is None or s1 != result_all(doc.system, table.set_of(["GF"])):
        raise _corrupt("S1 does not equal the result of the {GF} context")

    traces: dict[str, GoldenTrace] = {}
    for name, spec in index["traces"].items():
        contexts = parse_context_sequence(data_text(spec["contexts"]), table)
        results = tuple(named[n] for n in spec["results"])
        statuses = tuple(status_from_display(s) for s in spec["statuses"])
        if not (len(contexts) == len(results) == len(statuses)):
            raise _corrupt(f"trace {name!r} has inconsistent lengths")
        for k, (result, status) in enumerate(zip(results, statuses)):
            if classify_status(result) is not status:
                raise _corrupt(
                    f"trace {name!r} step {k}: stored status "
                    f"{status.display!r} contradicts the classifier"
                )
        traces[name] = GoldenTrace(
            name=name,
            initial=named[spec["initial"]],
            contexts=contexts,
            results=results,
            statuses=statuses,
        )
    return GoldenCorpus(model=doc, named_states=named, traces=traces)


def golden_replay(corpus: GoldenCorpus, name: str) -> GoldenReplayReport:
    """Re-run one reference trace and diff results and statuses."""
    try:
        golden = corpus.traces[name]
    except KeyError:
        raise RsysError(
            f"unknown golden trace {name!r}; available: "
            + ", ".join(sorted(corpus.traces))
        ) from None
    trace = run_process(
        corpus.model.system, golden.contexts, initial_result=golden.initial
    )
    mismatches: list[tuple[int, str, str, str]] = []
    for k, (expected, actual) in enumerate(zip(golden.results, trace.results)):
        if expected != actual:
            mismatches.append((k, "result", repr(expected), repr(actual)))
        expected_status = golden.statuses[k]
        actual_status = classify_status(actual)
        if expected_status is not actual_status:
            mismatches.append(
                (k, "status", expected_status.display, actual_status.display)
            )
    return GoldenReplayReport(
        name=name,
        ok=not mismatches,
        trace=trace,
        mismatches=tuple(mismatches),
    )
