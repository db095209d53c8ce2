"""cutloc: bug localization by binary search over cut-sets of an execution graph."""

from .cuts import (
    Atom,
    Cut,
    CutOrder,
    State,
    bisect,
    compare,
    cut_edges,
    cut_from_downset,
    root_cut,
    state_of,
    vertices_between,
)
from .graph import (
    CONTROL_LABEL,
    ROOT,
    Edge,
    EdgeKey,
    EdgeKind,
    EdgeLabel,
    ExecutionGraph,
    ValidationReport,
    Violation,
    ancestors,
    labels_equal,
    topo_levels,
    validate_graph,
)
from .graphio import dumps_graph, load_graph, loads_graph, save_graph
from .localizer import (
    AwaitingVerdict,
    CulpritSet,
    EdgeAnomaly,
    FaultyVertices,
    Finished,
    GlobalAnomaly,
    LocalizationOutcome,
    LocalizationResult,
    LocalizerConfig,
    LocalizerSession,
    MissingCriticalSections,
    MissingOperation,
    TranscriptEntry,
    classify_terminal,
    feed_verdict,
    init_bounds,
    localize,
    minimize_atoms,
    parse_anomaly_spec,
    query_bound,
    result_to_json,
    scripted_oracle_from_transcript,
    start,
    transcript_to_jsonl,
)
from .oracles import (
    AssertionOracle,
    DifferentialOracle,
    EdgeVerdict,
    GlobalVerdict,
    Oracle,
    PredicateOutcome,
    PredicateResult,
    ScriptedOracle,
    StateVerdict,
    assertion_oracle,
    differential_oracle,
    eval_predicate,
    scripted_oracle,
    state_bindings,
)
from .predicates import GlobalPredicate, parse_predicate, parse_predicates
from .trace import (
    TraceEvent,
    assign,
    branch,
    build_graph,
    dumps_trace,
    load_trace,
    loads_trace,
    mutate_trace,
    output,
    save_trace,
    validate_trace,
)

__version__ = "0.1.0"
