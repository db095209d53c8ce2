"""Oracles: the judges that decide whether a state at a cut looks right.

An oracle examines the state crossing one cut and returns a verdict: one
local verdict per edge plus a global verdict. Three implementations are
provided: assertion (evaluates declared predicates), differential
(compares against a known-good reference run) and scripted (replays
canned answers; also the stand-in for a human in tests).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Protocol, Sequence

from .cuts import Atom, Cut, State
from .errors import DuplicatePredicateIdError, UnscriptedCutError
from .graph import EdgeKey, EdgeKind, ExecutionGraph, Scalar, labels_equal
from .predicates import EvalTypeError, GlobalPredicate, evaluate


class EdgeVerdict(str, Enum):
    OK = "ok"
    DATA_ANOMALY = "data_anomaly"
    CONTROL_ANOMALY = "control_anomaly"


class PredicateOutcome(Enum):
    VIOLATED = "violated"
    NOT_VIOLATED = "not_violated"
    UNEVALUABLE = "unevaluable"


@dataclass(frozen=True)
class PredicateResult:
    outcome: PredicateOutcome
    diagnostic: str | None = None


@dataclass(frozen=True)
class GlobalVerdict:
    """Whole-state judgment: ok, or violated with the offending predicate ids.

    An empty id tuple is a legitimate violated verdict (a human can report
    a violation without naming a predicate).
    """

    is_violated: bool
    predicate_ids: tuple[str, ...] = ()

    @staticmethod
    def ok() -> "GlobalVerdict":
        return GlobalVerdict(False)

    @staticmethod
    def violated(ids: Iterable[str] = ()) -> "GlobalVerdict":
        return GlobalVerdict(True, tuple(ids))

    def to_json(self):
        if not self.is_violated:
            return "ok"
        return {"violated": sorted(self.predicate_ids)}

    @staticmethod
    def from_json(obj) -> "GlobalVerdict":
        if obj == "ok":
            return GlobalVerdict.ok()
        if obj == "violated":
            return GlobalVerdict.violated()
        if isinstance(obj, Mapping) and "violated" in obj:
            return GlobalVerdict.violated(obj["violated"])
        raise ValueError(f"not a global verdict: {obj!r}")


@dataclass(frozen=True)
class StateVerdict:
    """Per-edge verdicts covering exactly one state, plus the global verdict."""

    per_edge: Mapping[EdgeKey, EdgeVerdict]
    global_verdict: GlobalVerdict = GlobalVerdict.ok()

    @property
    def has_anomaly(self) -> bool:
        return self.global_verdict.is_violated or any(
            v is not EdgeVerdict.OK for v in self.per_edge.values()
        )

    def anomalous_keys(self) -> list[EdgeKey]:
        return sorted(k for k, v in self.per_edge.items() if v is not EdgeVerdict.OK)

    @staticmethod
    def all_ok(state: State) -> "StateVerdict":
        return StateVerdict({k: EdgeVerdict.OK for k in state.edge_keys()})

    def to_json(self) -> dict:
        return {
            "per_edge": {
                k.to_string(): v.value for k, v in sorted(self.per_edge.items())
            },
            "global": self.global_verdict.to_json(),
        }

    @staticmethod
    def from_json(obj: Mapping) -> "StateVerdict":
        per_edge = {
            EdgeKey.from_string(k): EdgeVerdict(v)
            for k, v in obj.get("per_edge", {}).items()
        }
        return StateVerdict(per_edge, GlobalVerdict.from_json(obj.get("global", "ok")))


def state_bindings(state: State) -> dict[str, Scalar]:
    """Variable bindings read off a state's data atoms.

    When several atoms carry the same variable, the one written latest
    wins: greatest source vertex id, edge key as the final tie-break.
    """
    best: dict[str, Atom] = {}
    for atom in sorted(state.atoms, key=lambda a: (a.edge_key.src, a.edge_key)):
        if atom.label.kind is EdgeKind.DATA:
            best[atom.label.var] = atom
    return {var: atom.label.value for var, atom in best.items()}


def eval_predicate(pred: GlobalPredicate, state: State) -> PredicateResult:
    """Evaluate one predicate against a state.

    Violated only when every referenced variable is bound and the
    expression is false; a missing binding or an operand type mismatch
    yields Unevaluable, never Violated.
    """
    bindings = state_bindings(state)
    missing = sorted(pred.referenced_vars() - set(bindings))
    if missing:
        return PredicateResult(
            PredicateOutcome.UNEVALUABLE, f"unbound: {', '.join(missing)}"
        )
    try:
        value = evaluate(pred.expr, bindings)
    except EvalTypeError as exc:
        return PredicateResult(PredicateOutcome.UNEVALUABLE, str(exc))
    if not isinstance(value, bool):
        return PredicateResult(
            PredicateOutcome.UNEVALUABLE, "expression is not boolean-valued"
        )
    if value:
        return PredicateResult(PredicateOutcome.NOT_VIOLATED)
    return PredicateResult(PredicateOutcome.VIOLATED)


class Oracle(Protocol):
    def examine(self, cut: Cut, state: State) -> StateVerdict: ...


class AssertionOracle:
    """Judges states purely by the declared predicates; edges are never blamed."""

    def __init__(self, predicates: Sequence[GlobalPredicate]):
        ids = [p.id for p in predicates]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise DuplicatePredicateIdError(f"duplicate predicate ids: {dupes}")
        self.predicates = tuple(predicates)

    def examine(self, cut: Cut, state: State) -> StateVerdict:
        violated = [
            p.id
            for p in self.predicates
            if eval_predicate(p, state).outcome is PredicateOutcome.VIOLATED
        ]
        per_edge = {k: EdgeVerdict.OK for k in state.edge_keys()}
        if violated:
            return StateVerdict(per_edge, GlobalVerdict.violated(violated))
        return StateVerdict(per_edge)


class DifferentialOracle:
    """Judges states against a known-good reference run, aligned by edge key."""

    def __init__(self, reference: ExecutionGraph):
        reference.ensure_valid()
        self.reference = reference
        self._ref_labels = {e.key: e.label for e in reference.edges}

    def examine(self, cut: Cut, state: State) -> StateVerdict:
        per_edge = {}
        for atom in state.sorted_atoms():
            ref = self._ref_labels.get(atom.edge_key)
            if ref is not None and labels_equal(ref, atom.label):
                per_edge[atom.edge_key] = EdgeVerdict.OK
            elif atom.edge_key.kind is EdgeKind.CONTROL:
                per_edge[atom.edge_key] = EdgeVerdict.CONTROL_ANOMALY
            else:
                per_edge[atom.edge_key] = EdgeVerdict.DATA_ANOMALY
        return StateVerdict(per_edge)


class ScriptedOracle:
    """Replays canned verdicts keyed by the cut's downset."""

    def __init__(self, script: Mapping[Iterable[int], StateVerdict]):
        self._script = {frozenset(k): v for k, v in script.items()}

    def examine(self, cut: Cut, state: State) -> StateVerdict:
        try:
            return self._script[cut.downset]
        except KeyError:
            raise UnscriptedCutError(
                f"no scripted verdict for cut {sorted(cut.downset)}"
            ) from None


def assertion_oracle(predicates: Sequence[GlobalPredicate]) -> AssertionOracle:
    return AssertionOracle(predicates)


def differential_oracle(reference: ExecutionGraph) -> DifferentialOracle:
    return DifferentialOracle(reference)


def scripted_oracle(script: Mapping[Iterable[int], StateVerdict]) -> ScriptedOracle:
    return ScriptedOracle(script)
