"""The pruning state machine: binary search for culprits between two cuts.

A session keeps a known-clean lower cut and a known-anomalous upper cut.
Each round it proposes a cut halfway between them, waits for an oracle
verdict on the state there, and moves one bound. When at most one vertex
separates the bounds the culprit is classified: coincident bounds mean an
operation is missing outright; a locally anomalous new cut edge blames
its source vertex; otherwise the upper state's atoms are minimized
against the violated predicates and the sources of the necessary atoms
are blamed (missing critical sections).

Sessions are immutable values: feed_verdict returns a new session, so a
front-end can hold one across a network round-trip and replaying a
transcript is trivially deterministic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from .cuts import (
    Atom,
    Cut,
    CutOrder,
    State,
    bisect,
    compare,
    cut_from_downset,
    cut_edges,
    root_cut,
    state_of,
    vertices_between,
)
from .errors import (
    AnomalySpecError,
    CutGraphMismatchError,
    InitialAnomalyError,
    SessionFinishedError,
    UnknownEdgeError,
    VerdictMismatchError,
)
from .graph import EdgeKey, EdgeKind, ExecutionGraph, ancestors
from .oracles import (
    EdgeVerdict,
    Oracle,
    PredicateOutcome,
    StateVerdict,
    eval_predicate,
    scripted_oracle,
)
from .predicates import GlobalPredicate

# -- initial anomalies ---------------------------------------------------------


@dataclass(frozen=True)
class EdgeAnomaly:
    """A specific edge the programmer flagged as wrong."""

    edge_key: EdgeKey
    verdict: EdgeVerdict

    def __post_init__(self):
        if self.verdict is EdgeVerdict.OK:
            raise InitialAnomalyError("an initial edge anomaly cannot be 'ok'")
        wrong_kind = (
            self.verdict is EdgeVerdict.DATA_ANOMALY
            and self.edge_key.kind is not EdgeKind.DATA
        ) or (
            self.verdict is EdgeVerdict.CONTROL_ANOMALY
            and self.edge_key.kind is not EdgeKind.CONTROL
        )
        if wrong_kind:
            raise InitialAnomalyError(
                f"verdict {self.verdict.value} does not fit a {self.edge_key.kind.value} edge"
            )


@dataclass(frozen=True)
class GlobalAnomaly:
    """A cut where the programmer observed a whole-state violation."""

    cut: Cut
    predicate_ids: tuple[str, ...] = ()


InitialAnomaly = Union[EdgeAnomaly, GlobalAnomaly]


# -- results -------------------------------------------------------------------


@dataclass(frozen=True)
class MissingOperation:
    """The bounds met: something that should have happened here never did."""

    at: Cut

    kind = "missing_operation"

    def to_json(self) -> dict:
        return {"kind": self.kind, "at": self.at.to_json()}


@dataclass(frozen=True)
class FaultyVertices:
    """Locally anomalous edges pin the blame on their source vertices."""

    vertices: frozenset[int]
    evidence: tuple[EdgeKey, ...]

    kind = "faulty_vertices"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "vertices": sorted(self.vertices),
            "evidence": [k.to_string() for k in self.evidence],
        }


@dataclass(frozen=True)
class CulpritSet:
    """Atoms whose removal clears the violation: each is necessary to it."""

    atoms: frozenset[Atom]

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms, key=lambda a: a.edge_key)

    def source_vertices(self) -> frozenset[int]:
        return frozenset(a.edge_key.src for a in self.atoms)


@dataclass(frozen=True)
class MissingCriticalSections:
    """The violation needs all of these atoms at once: their sources mark
    where mutual exclusion should have started."""

    atoms: frozenset[Atom]
    vertices: frozenset[int]

    kind = "missing_critical_sections"

    def to_json(self) -> dict:
        ordered = sorted(self.atoms, key=lambda a: a.edge_key)
        return {
            "kind": self.kind,
            "atoms": [a.to_json() for a in ordered],
            "vertices": sorted(self.vertices),
        }


LocalizationResult = Union[MissingOperation, FaultyVertices, MissingCriticalSections]


def result_to_json(result: LocalizationResult) -> dict:
    return result.to_json()


# -- session -------------------------------------------------------------------


@dataclass(frozen=True)
class AwaitingVerdict:
    pending: Cut


@dataclass(frozen=True)
class Finished:
    result: LocalizationResult


Phase = Union[AwaitingVerdict, Finished]


@dataclass(frozen=True)
class TranscriptEntry:
    cut: Cut
    verdict: StateVerdict


@dataclass(frozen=True)
class LocalizerConfig:
    predicates: tuple[GlobalPredicate, ...] = ()


@dataclass(frozen=True)
class LocalizerSession:
    graph: ExecutionGraph = field(compare=False, repr=False)
    c_c: Cut
    c_e: Cut
    phase: Phase
    verdict_at_ce: Optional[StateVerdict]
    transcript: tuple[TranscriptEntry, ...]
    predicates: tuple[GlobalPredicate, ...]
    initial_between: int

    @property
    def finished(self) -> bool:
        return isinstance(self.phase, Finished)

    @property
    def result(self) -> Optional[LocalizationResult]:
        return self.phase.result if isinstance(self.phase, Finished) else None

    @property
    def pending_cut(self) -> Optional[Cut]:
        return self.phase.pending if isinstance(self.phase, AwaitingVerdict) else None

    @property
    def between_count(self) -> int:
        return len(vertices_between(self.c_c, self.c_e))


def init_bounds(g: ExecutionGraph, anomaly: InitialAnomaly) -> tuple[Cut, Cut]:
    """Lower bound: the root cut. Upper bound: the flagged edge's source
    ancestry, or the cut the violation was observed on."""
    g.ensure_valid()
    c_c = root_cut(g)
    if isinstance(anomaly, EdgeAnomaly):
        if anomaly.edge_key not in g.edge_by_key:
            raise UnknownEdgeError(f"edge {anomaly.edge_key} not in graph")
        c_e = cut_from_downset(g, ancestors(g, anomaly.edge_key.src))
    else:
        if anomaly.cut.graph is not g and anomaly.cut.graph != g:
            raise CutGraphMismatchError("anomaly cut belongs to a different graph")
        c_e = anomaly.cut
    assert compare(c_c, c_e) in (CutOrder.LESS, CutOrder.EQUAL)
    return c_c, c_e


def _synthetic_edge_verdict(g: ExecutionGraph, c_e: Cut, anomaly: EdgeAnomaly) -> StateVerdict:
    state = state_of(g, c_e)
    per_edge = {k: EdgeVerdict.OK for k in state.edge_keys()}
    assert anomaly.edge_key in per_edge, "flagged edge must cross its own bound"
    per_edge[anomaly.edge_key] = anomaly.verdict
    return StateVerdict(per_edge)


def _next_phase(
    g: ExecutionGraph,
    c_c: Cut,
    c_e: Cut,
    verdict_at_ce: Optional[StateVerdict],
    predicates: Sequence[GlobalPredicate],
) -> Phase:
    middle = bisect(g, c_c, c_e)
    if middle is not None:
        return AwaitingVerdict(middle)
    if c_c.downset == c_e.downset:
        return Finished(MissingOperation(at=c_c))
    if verdict_at_ce is None:
        # Terminal classification needs to know what is wrong at the upper
        # bound; ask for one examination of it.
        return AwaitingVerdict(c_e)
    return Finished(classify_terminal(g, c_c, c_e, verdict_at_ce, predicates))


def start(
    g: ExecutionGraph,
    anomaly: InitialAnomaly,
    config: LocalizerConfig | None = None,
    *,
    verdict_at_ce: Optional[StateVerdict] = None,
) -> LocalizerSession:
    """Open a session. `verdict_at_ce`, when given, is a verdict already
    obtained for the state at the upper bound (it must report an anomaly);
    otherwise an edge anomaly supplies its own and a global anomaly leaves
    the upper state to be examined if classification ends up needing it."""
    config = config or LocalizerConfig()
    c_c, c_e = init_bounds(g, anomaly)
    if verdict_at_ce is not None:
        _check_verdict_covers(verdict_at_ce, state_of(g, c_e))
        if not verdict_at_ce.has_anomaly:
            raise InitialAnomalyError("supplied verdict for the upper bound reports no anomaly")
    elif isinstance(anomaly, EdgeAnomaly):
        verdict_at_ce = _synthetic_edge_verdict(g, c_e, anomaly)
    return LocalizerSession(
        graph=g,
        c_c=c_c,
        c_e=c_e,
        phase=_next_phase(g, c_c, c_e, verdict_at_ce, config.predicates),
        verdict_at_ce=verdict_at_ce,
        transcript=(),
        predicates=config.predicates,
        initial_between=len(vertices_between(c_c, c_e)),
    )


def _check_verdict_covers(verdict: StateVerdict, state: State) -> None:
    expected = state.edge_keys()
    got = frozenset(verdict.per_edge)
    if got != expected:
        missing = sorted(k.to_string() for k in expected - got)
        extra = sorted(k.to_string() for k in got - expected)
        raise VerdictMismatchError(
            f"verdict does not cover the pending state (missing {missing}, extra {extra})"
        )
    for key, v in verdict.per_edge.items():
        if v is EdgeVerdict.DATA_ANOMALY and key.kind is not EdgeKind.DATA:
            raise VerdictMismatchError(f"data anomaly on control edge {key}")
        if v is EdgeVerdict.CONTROL_ANOMALY and key.kind is not EdgeKind.CONTROL:
            raise VerdictMismatchError(f"control anomaly on data edge {key}")


def feed_verdict(session: LocalizerSession, verdict: StateVerdict) -> LocalizerSession:
    """Advance the session with the oracle's verdict for the pending cut."""
    if not isinstance(session.phase, AwaitingVerdict):
        raise SessionFinishedError("session is not awaiting a verdict")
    pending = session.phase.pending
    g = session.graph
    _check_verdict_covers(verdict, state_of(g, pending))

    if verdict.has_anomaly:
        c_c, c_e = session.c_c, pending
        verdict_at_ce: Optional[StateVerdict] = verdict
    else:
        c_c, c_e = pending, session.c_e
        verdict_at_ce = session.verdict_at_ce

    return replace(
        session,
        c_c=c_c,
        c_e=c_e,
        verdict_at_ce=verdict_at_ce,
        transcript=session.transcript + (TranscriptEntry(pending, verdict),),
        phase=_next_phase(g, c_c, c_e, verdict_at_ce, session.predicates),
    )


# -- terminal classification ---------------------------------------------------


def minimize_atoms(
    state: State, predicates: Sequence[GlobalPredicate]
) -> CulpritSet:
    """Keep the atoms whose removal clears every violation.

    Each atom is tested on its own: the predicates are re-evaluated on the
    state minus that one atom, so the result does not depend on iteration
    order. Removing an atom may unbind a referenced variable; that makes
    the predicates unevaluable, which counts as not violated, so such an
    atom is necessary and is kept.
    """
    culprits = []
    for atom in state.sorted_atoms():
        reduced = state.without(atom)
        still_violated = any(
            eval_predicate(p, reduced).outcome is PredicateOutcome.VIOLATED
            for p in predicates
        )
        if not still_violated:
            culprits.append(atom)
    return CulpritSet(frozenset(culprits))


def _violated_predicates(
    verdict: StateVerdict,
    predicates: Sequence[GlobalPredicate],
    state: State,
) -> list[GlobalPredicate]:
    ids = set(verdict.global_verdict.predicate_ids)
    if ids:
        return [p for p in predicates if p.id in ids]
    # A violation reported without predicate ids (a human answer): fall back
    # to whatever declared predicates actually fail on this state.
    return [
        p
        for p in predicates
        if eval_predicate(p, state).outcome is PredicateOutcome.VIOLATED
    ]


def classify_terminal(
    g: ExecutionGraph,
    c_c: Cut,
    c_e: Cut,
    verdict_at_ce: StateVerdict,
    predicates: Sequence[GlobalPredicate] = (),
) -> LocalizationResult:
    """Decide the culprit once at most one vertex separates the bounds."""
    between = vertices_between(c_c, c_e)
    if len(between) > 1:
        raise ValueError("terminal classification needs at most one vertex between bounds")
    if c_c.downset == c_e.downset:
        return MissingOperation(at=c_c)

    lower_keys = {e.key for e in cut_edges(g, c_c)}
    new_edges = [e for e in cut_edges(g, c_e) if e.key not in lower_keys]
    bad = [
        e.key
        for e in new_edges
        if verdict_at_ce.per_edge.get(e.key, EdgeVerdict.OK) is not EdgeVerdict.OK
    ]
    if bad:
        return FaultyVertices(
            vertices=frozenset(k.src for k in bad), evidence=tuple(bad)
        )

    state = state_of(g, c_e)
    violated = _violated_predicates(verdict_at_ce, predicates, state)
    culprits = minimize_atoms(state, violated)
    return MissingCriticalSections(
        atoms=culprits.atoms, vertices=culprits.source_vertices()
    )


# -- driving -------------------------------------------------------------------


@dataclass(frozen=True)
class LocalizationOutcome:
    result: LocalizationResult
    transcript: tuple[TranscriptEntry, ...]
    oracle_calls: int
    initial_between: int

    @property
    def call_bound(self) -> int:
        return query_bound(self.initial_between)


def query_bound(initial_between: int) -> int:
    """The examination budget for a run: ceil(log2(m)) + 2."""
    return math.ceil(math.log2(max(1, initial_between))) + 2


def localize(
    g: ExecutionGraph,
    anomaly: InitialAnomaly,
    oracle: Oracle,
    config: LocalizerConfig | None = None,
    *,
    verdict_at_ce: Optional[StateVerdict] = None,
) -> LocalizationOutcome:
    """Drive a session with the oracle until it finishes."""
    session = start(g, anomaly, config, verdict_at_ce=verdict_at_ce)
    calls = 0
    limit = len(g.vertex_ids) + 2  # the search halves; this is generous
    while isinstance(session.phase, AwaitingVerdict):
        if calls > limit:
            raise AssertionError("localization failed to terminate")
        pending = session.phase.pending
        try:
            verdict = oracle.examine(pending, state_of(g, pending))
        except Exception as exc:
            # let callers see how far the search got before the oracle failed
            exc.transcript_so_far = session.transcript  # type: ignore[attr-defined]
            raise
        calls += 1
        session = feed_verdict(session, verdict)
    assert isinstance(session.phase, Finished)
    return LocalizationOutcome(
        result=session.phase.result,
        transcript=session.transcript,
        oracle_calls=calls,
        initial_between=session.initial_between,
    )


# -- transcripts & wire formats -------------------------------------------------


def transcript_entry_to_json(step: int, entry: TranscriptEntry) -> dict:
    return {
        "step": step,
        "cut": entry.cut.to_json(),
        "verdict": entry.verdict.to_json(),
    }


def transcript_to_jsonl(outcome: LocalizationOutcome) -> str:
    """Line-delimited transcript: one examined cut per line, result last."""
    lines = [
        json.dumps(transcript_entry_to_json(i, entry), sort_keys=True)
        for i, entry in enumerate(outcome.transcript, start=1)
    ]
    lines.append(json.dumps({"result": result_to_json(outcome.result)}, sort_keys=True))
    return "\n".join(lines) + "\n"


def scripted_oracle_from_transcript(transcript: Iterable[TranscriptEntry]):
    """An oracle that replays a previous run's answers."""
    return scripted_oracle({e.cut.downset: e.verdict for e in transcript})


def parse_anomaly_spec(g: ExecutionGraph, spec: str) -> InitialAnomaly:
    """Parse the textual anomaly spec shared by the CLI and the service.

    `edge:SRC,DST,KIND[,VAR]` flags one edge (the anomaly kind follows the
    edge kind); `global:ID,ID,...:PRED,PRED` names the downset of the cut
    the violation was seen on and, optionally, the violated predicate ids.
    """
    kind, _, rest = spec.partition(":")
    if kind == "edge":
        try:
            key = EdgeKey.from_string(rest)
        except ValueError as exc:
            raise AnomalySpecError(str(exc)) from None
        verdict = (
            EdgeVerdict.DATA_ANOMALY
            if key.kind is EdgeKind.DATA
            else EdgeVerdict.CONTROL_ANOMALY
        )
        if key not in g.edge_by_key:
            raise AnomalySpecError(f"edge {key} not in graph")
        return EdgeAnomaly(key, verdict)
    if kind == "global":
        downset_text, _, ids_text = rest.partition(":")
        try:
            downset = [int(v) for v in downset_text.split(",") if v != ""]
        except ValueError:
            raise AnomalySpecError(f"bad downset in {spec!r}") from None
        if not downset:
            raise AnomalySpecError("global anomaly needs a downset")
        cut = cut_from_downset(g, downset)
        ids = tuple(i for i in ids_text.split(",") if i)
        return GlobalAnomaly(cut, ids)
    raise AnomalySpecError(f"unknown anomaly spec {spec!r} (expected edge:... or global:...)")
