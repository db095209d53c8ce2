// Pure view-model: verdict selections, submit gating and result text.
// Nothing here touches the DOM or the network, so it is all unit-testable.
// The one hard rule: the request body sent to the server is exactly what
// the user picked, never a default filled in on their behalf.

import type { AnswerBody, AtomJson, QueryPayload, ResultJson } from "./api.js";
import { ApiError } from "./api.js";

export type EdgeChoice = "ok" | "data_anomaly" | "control_anomaly";
export type GlobalChoice = "ok" | "violated";

export interface Selections {
  perEdge: Map<string, EdgeChoice | null>;
  global: GlobalChoice;
}

export function freshSelections(query: QueryPayload): Selections {
  return {
    perEdge: new Map(query.atoms.map((a) => [a.edge_key, null])),
    global: "ok",
  };
}

export function setEdgeChoice(
  sel: Selections,
  key: string,
  choice: EdgeChoice,
): Selections {
  if (!sel.perEdge.has(key)) {
    throw new Error(`unknown atom ${key}`);
  }
  const perEdge = new Map(sel.perEdge);
  perEdge.set(key, choice);
  return { ...sel, perEdge };
}

export function setGlobalChoice(sel: Selections, choice: GlobalChoice): Selections {
  return { ...sel, global: choice };
}

export function canSubmit(sel: Selections): boolean {
  if (sel.perEdge.size === 0) {
    return false; // degenerate: nothing to judge
  }
  for (const choice of sel.perEdge.values()) {
    if (choice === null) return false;
  }
  return true;
}

export function answerBody(sel: Selections): AnswerBody {
  if (!canSubmit(sel)) {
    throw new Error("every atom needs a verdict before submitting");
  }
  const per_edge: Record<string, string> = {};
  for (const [key, choice] of sel.perEdge) {
    per_edge[key] = choice as EdgeChoice;
  }
  return { per_edge, global: sel.global };
}

/** The verdicts a user may pick for one atom: ok plus the kind-matching anomaly. */
export function choicesFor(atom: AtomJson): EdgeChoice[] {
  return atom.label.kind === "data"
    ? ["ok", "data_anomaly"]
    : ["ok", "control_anomaly"];
}

export function choiceText(choice: EdgeChoice): string {
  switch (choice) {
    case "ok":
      return "ok";
    case "data_anomaly":
      return "wrong value";
    case "control_anomaly":
      return "should not exist";
  }
}

/** Human text for one atom: `x = 1` for data, `executed: v0 -> v3` for control. */
export function atomText(atom: AtomJson): string {
  const [src, dst] = atom.edge_key.split(",");
  if (atom.label.kind === "data") {
    return `${atom.label.var} = ${JSON.stringify(atom.label.value)}`;
  }
  return `executed: v${src} → v${dst}`;
}

export function describeResult(result: ResultJson): string {
  switch (result.kind) {
    case "missing_operation":
      return `Missing operation: something that should have run after cut {${(result.at?.downset ?? []).join(", ")}} never did.`;
    case "faulty_vertices":
      return `Faulty vertices: ${(result.vertices ?? []).map((v) => `v${v}`).join(", ")} (evidence: ${(result.evidence ?? []).join("; ")})`;
    case "missing_critical_sections":
      return `Missing critical sections starting at: ${(result.vertices ?? []).map((v) => `v${v}`).join(", ")}`;
  }
}

export function culpritVertices(result: ResultJson): number[] {
  return result.vertices ?? [];
}

export function errorBanner(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 422
      ? `The server rejected the answer (${err.message}); your selections are unchanged.`
      : err.message;
  }
  return String(err);
}

/** Tracks the between-vertices counter; it must never grow within a session. */
export class ProgressLog {
  readonly counts: number[] = [];

  push(betweenCount: number): void {
    this.counts.push(betweenCount);
  }

  get nonIncreasing(): boolean {
    for (let i = 1; i < this.counts.length; i++) {
      if (this.counts[i] > this.counts[i - 1]) return false;
    }
    return true;
  }
}
