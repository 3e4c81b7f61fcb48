"""Reaction-system semantics: exact set dynamics over a fixed species
universe, interactive-process replay, orbit and state-graph analysis,
controllability witness search and decision procedures, a Boolean-network
importer, and a bundled reference model.

States are subsets of a fixed species table, stored as bit masks. A
reaction (R, I, P) fires on a state T iff R ⊆ T and I ∩ T = ∅; the result
of a state is the union of the products of its enabled reactions, and
nothing persists on its own. Hot search loops run on a compiled kernel
when the extension is available (see :mod:`rsys._engine`); set
``RSYS_KERNEL=pure`` or ``RSYS_KERNEL=compiled`` to pin the backend.
"""

from .control import (
    AllowedSet,
    ContextConstraint,
    ControllabilityVerdict,
    ControlQuery,
    ControlWitness,
    Exhaustive,
    MaxCardinality,
    MinimalNReport,
    MinimalSetReport,
    Sampled,
    VerifyResult,
    allowed_contexts,
    constraint_from_json,
    decide_controllable,
    decide_target_controllable,
    find_witness,
    minimal_I,
    minimal_n,
    query_from_json,
    trivial_witness,
    verify_witness,
)
from .core import (
    ContextSequence,
    ProcessTrace,
    Reaction,
    ReactionSystem,
    SpeciesSet,
    SpeciesTable,
    enabled,
    result_all,
    result_reaction,
    run_process,
    step,
    validate_system,
)
from .dynamics import (
    ContextGraph,
    Orbit,
    PreimageCertificate,
    attractor_report,
    context_graph,
    image_membership,
    nonce_extension,
    orbit,
    superset_image_membership,
)
from .errors import (
    BudgetError,
    FormatError,
    ReactionError,
    RefusalError,
    RsysError,
    SpeciesMismatchError,
)
from .formats import (
    BooleanNetwork,
    ModelDocument,
    blocking_name,
    bn_to_reactions,
    export_trace,
    parse_boolean_network,
    parse_context_sequence,
    parse_model,
    serialize_model,
)
from .models import (
    GoldenCorpus,
    GoldenReplayReport,
    GoldenTrace,
    StatusLabel,
    classify_status,
    golden_replay,
    load_builtin,
)

__version__ = "0.1.0"

__all__ = [
    "AllowedSet",
    "BooleanNetwork",
    "BudgetError",
    "ContextConstraint",
    "ContextGraph",
    "ContextSequence",
    "ControlQuery",
    "ControlWitness",
    "ControllabilityVerdict",
    "Exhaustive",
    "FormatError",
    "GoldenCorpus",
    "GoldenReplayReport",
    "GoldenTrace",
    "MaxCardinality",
    "MinimalNReport",
    "MinimalSetReport",
    "ModelDocument",
    "Orbit",
    "PreimageCertificate",
    "ProcessTrace",
    "Reaction",
    "ReactionError",
    "ReactionSystem",
    "RefusalError",
    "RsysError",
    "Sampled",
    "SpeciesMismatchError",
    "SpeciesSet",
    "SpeciesTable",
    "StatusLabel",
    "VerifyResult",
    "allowed_contexts",
    "attractor_report",
    "blocking_name",
    "bn_to_reactions",
    "classify_status",
    "constraint_from_json",
    "context_graph",
    "decide_controllable",
    "decide_target_controllable",
    "enabled",
    "export_trace",
    "find_witness",
    "golden_replay",
    "image_membership",
    "load_builtin",
    "minimal_I",
    "minimal_n",
    "nonce_extension",
    "orbit",
    "parse_boolean_network",
    "parse_context_sequence",
    "parse_model",
    "query_from_json",
    "result_all",
    "result_reaction",
    "run_process",
    "serialize_model",
    "step",
    "superset_image_membership",
    "trivial_witness",
    "validate_system",
    "verify_witness",
    "__version__",
]
