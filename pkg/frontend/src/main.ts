// DOM wiring for the session UI. All state transitions are driven by
// server responses; the browser never advances the search on its own.

import {
  ApiError,
  SessionApi,
  type QueryPayload,
  type GraphJson,
  type ResultJson,
} from "./api.js";
import {
  ProgressLog,
  type Selections,
  answerBody,
  atomText,
  canSubmit,
  choiceText,
  choicesFor,
  culpritVertices,
  describeResult,
  errorBanner,
  freshSelections,
  setEdgeChoice,
  setGlobalChoice,
} from "./model.js";
import { renderSvg } from "./dagview.js";

const api = new SessionApi("");

interface UiState {
  sessionId: string | null;
  query: QueryPayload | null;
  selections: Selections | null;
  graph: GraphJson | null;
  progress: ProgressLog;
}

const state: UiState = {
  sessionId: null,
  query: null,
  selections: null,
  graph: null,
  progress: new ProgressLog(),
};

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function setBanner(text: string | null): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = text ?? "";
  banner.hidden = !text;
}

function show(id: string, visible: boolean): void {
  el(id).hidden = !visible;
}

// -- create / open ------------------------------------------------------------

async function createSession(): Promise<void> {
  setBanner(null);
  const graph = el<HTMLTextAreaElement>("graph-input").value;
  const anomaly = el<HTMLInputElement>("anomaly-input").value.trim();
  const predicates = el<HTMLTextAreaElement>("predicates-input").value;
  try {
    const created = await api.createSession({
      graph,
      anomaly,
      predicates: predicates.trim() ? predicates : undefined,
    });
    history.replaceState(null, "", `?session=${created.id}`);
    await openSession(created.id);
  } catch (err) {
    setBanner(errorBanner(err));
  }
}

async function openSession(id: string): Promise<void> {
  setBanner(null);
  state.sessionId = id;
  state.progress = new ProgressLog();
  el<HTMLSpanElement>("session-id").textContent = id;
  try {
    state.graph = await api.getGraph(id);
  } catch (err) {
    setBanner(errorBanner(err));
    return;
  }
  show("create-panel", false);
  show("session-panel", true);
  await refresh();
}

// -- query / answer loop --------------------------------------------------------

async function refresh(): Promise<void> {
  if (!state.sessionId) return;
  try {
    state.query = await api.getQuery(state.sessionId);
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      await showResult();
      return;
    }
    setBanner(errorBanner(err));
    return;
  }
  state.selections = freshSelections(state.query);
  state.progress.push(state.query.progress.between_count);
  renderQuery();
}

function renderQuery(): void {
  const query = state.query;
  const sel = state.selections;
  if (!query || !sel) return;
  show("query-panel", true);
  show("result-panel", false);

  const { between_count, step, bound } = query.progress;
  el<HTMLDivElement>("progress-text").textContent =
    `step ${step} of at most ${bound}; ${between_count} suspect ` +
    `vertex${between_count === 1 ? "" : "es"} between the bounds` +
    (state.progress.nonIncreasing ? "" : " (warning: counter grew?)");
  const fraction = bound > 0 ? Math.min(1, step / (bound + 1)) : 1;
  el<HTMLDivElement>("progress-fill").style.width = `${Math.round(fraction * 100)}%`;

  el<HTMLDivElement>("cut-text").textContent =
    `examining cut {${query.cut.downset.join(", ")}}`;

  const list = el<HTMLDivElement>("atom-list");
  list.innerHTML = "";
  if (query.atoms.length === 0) {
    const note = document.createElement("p");
    note.className = "note";
    note.textContent = "This state has no atoms to judge.";
    list.appendChild(note);
  }
  for (const atom of query.atoms) {
    const row = document.createElement("div");
    row.className = "atom-row";
    const label = document.createElement("span");
    label.className = "atom-text";
    label.textContent = atomText(atom);
    row.appendChild(label);
    for (const choice of choicesFor(atom)) {
      const wrap = document.createElement("label");
      wrap.className = "choice";
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = `atom:${atom.edge_key}`;
      radio.value = choice;
      radio.checked = sel.perEdge.get(atom.edge_key) === choice;
      radio.addEventListener("change", () => {
        if (!state.selections) return;
        state.selections = setEdgeChoice(state.selections, atom.edge_key, choice);
        syncSubmit();
      });
      wrap.appendChild(radio);
      wrap.appendChild(document.createTextNode(choiceText(choice)));
      row.appendChild(wrap);
    }
    list.appendChild(row);
  }

  for (const choice of ["ok", "violated"] as const) {
    const radio = el<HTMLInputElement>(`global-${choice}`);
    radio.checked = sel.global === choice;
    radio.onchange = () => {
      if (!state.selections) return;
      state.selections = setGlobalChoice(state.selections, choice);
    };
  }

  syncSubmit();
  renderDag();
}

function syncSubmit(): void {
  el<HTMLButtonElement>("submit-answer").disabled =
    !state.selections || !canSubmit(state.selections);
}

async function submitAnswer(): Promise<void> {
  if (!state.sessionId || !state.selections) return;
  setBanner(null);
  let body;
  try {
    body = answerBody(state.selections);
  } catch (err) {
    setBanner(String(err));
    return;
  }
  try {
    const reply = await api.postAnswer(state.sessionId, body);
    if (reply.status === "finished") {
      await showResult();
    } else {
      await refresh();
    }
  } catch (err) {
    // A rejected answer (e.g. 422) leaves the user's selections untouched.
    setBanner(errorBanner(err));
  }
}

// -- result ---------------------------------------------------------------------

async function showResult(): Promise<void> {
  if (!state.sessionId) return;
  const payload = await api.getResult(state.sessionId);
  show("query-panel", false);
  show("result-panel", true);
  el<HTMLDivElement>("result-text").textContent = describeResult(payload.result);
  el<HTMLPreElement>("result-json").textContent = JSON.stringify(payload.result, null, 2);
  renderDag(payload.result);
}

function renderDag(result?: ResultJson): void {
  if (!state.graph) return;
  const highlights = {
    clean: new Set(state.query?.bounds?.clean ?? []),
    pending: new Set(state.query?.cut.downset ?? []),
    culprits: new Set(result ? culpritVertices(result) : []),
  };
  el<HTMLDivElement>("dag-holder").innerHTML = renderSvg(state.graph, highlights);
}

// -- boot -------------------------------------------------------------------------

function boot(): void {
  el<HTMLButtonElement>("create-session").addEventListener("click", () => {
    void createSession();
  });
  el<HTMLButtonElement>("open-session").addEventListener("click", () => {
    const id = el<HTMLInputElement>("session-id-input").value.trim();
    if (id) void openSession(id);
  });
  el<HTMLButtonElement>("submit-answer").addEventListener("click", () => {
    void submitAnswer();
  });
  const params = new URLSearchParams(location.search);
  const id = params.get("session");
  if (id) void openSession(id);
}

document.addEventListener("DOMContentLoaded", boot);
