import { ApiClient, ServiceError } from "./api.js";
import { UpdateDispatcher } from "./dispatch.js";
import { renderDocument, renderPanel } from "./render.js";
import { updateForInput, windowWords } from "./words.js";

const WINDOW_LIMIT = 20;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function start(): void {
  const editor = byId<HTMLTextAreaElement>("editor");
  const expanderSelect = byId<HTMLSelectElement>("expander");
  const badge = byId<HTMLElement>("stale-badge");
  const status = byId<HTMLElement>("status");
  const latency = byId<HTMLElement>("latency");
  const targets = {
    inputWords: byId<HTMLElement>("input-words"),
    predictions: byId<HTMLElement>("predictions"),
    recommendations: byId<HTMLElement>("recommendations"),
    note: byId<HTMLElement>("note"),
  };
  const docView = byId<HTMLElement>("doc-view");

  const api = new ApiClient("");
  let sessionId: string | null = null;
  let lastRoundTrip = 0;

  async function openSession(): Promise<void> {
    const old = sessionId;
    sessionId = null;
    if (old) {
      api.deleteSession(old).catch(() => undefined);
    }
    try {
      sessionId = await api.createSession(expanderSelect.value);
      status.textContent = `session ${sessionId.slice(0, 8)} (${expanderSelect.value})`;
    } catch (error) {
      const detail = error instanceof ServiceError ? error.message : "service unreachable";
      status.textContent = `session failed: ${detail}`;
    }
  }

  const dispatcher = new UpdateDispatcher(
    async (update) => {
      if (!sessionId) {
        throw new Error("no session");
      }
      const started = performance.now();
      const response = await api.updateContext(sessionId, update.word, update.completed);
      lastRoundTrip = performance.now() - started;
      return response;
    },
    (response) => {
      badge.hidden = true;
      latency.textContent = `${lastRoundTrip.toFixed(0)} ms`;
      const words = windowWords(editor.value, editor.selectionStart, WINDOW_LIMIT);
      renderPanel(targets, words, response);
    },
    () => {
      // typing must keep working offline; the panel just goes stale
      badge.hidden = false;
    }
  );

  editor.addEventListener("input", (event) => {
    const inputEvent = event as InputEvent;
    const typed =
      inputEvent.data ?? (inputEvent.inputType === "insertLineBreak" ? "\n" : null);
    const update = updateForInput(editor.value, editor.selectionStart, typed);
    if (update) {
      dispatcher.push(update);
    }
  });

  targets.recommendations.addEventListener("click", (event) => {
    const anchor = (event.target as HTMLElement).closest("a");
    if (!anchor || !anchor.dataset.docId) {
      return;
    }
    event.preventDefault();
    api
      .getDocument(anchor.dataset.docId)
      .then((record) => renderDocument(docView, record))
      .catch(() => {
        badge.hidden = false;
      });
  });

  expanderSelect.addEventListener("change", () => {
    void openSession();
  });

  void openSession();
}

document.addEventListener("DOMContentLoaded", start);
