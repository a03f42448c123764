import type { ContextResponse, DocumentRecord, Hit } from "./api.js";

export interface PanelTargets {
  inputWords: HTMLElement;
  predictions: HTMLElement;
  recommendations: HTMLElement;
  note: HTMLElement;
}

function isHit(value: unknown): value is Hit {
  const hit = value as Hit;
  return (
    typeof hit === "object" && hit !== null &&
    typeof hit.doc_id === "string" && typeof hit.title === "string" &&
    typeof hit.score === "number" && typeof hit.link === "string"
  );
}

export function isContextResponse(value: unknown): value is ContextResponse {
  const r = value as ContextResponse;
  return (
    typeof r === "object" && r !== null &&
    Array.isArray(r.recommendations) && r.recommendations.every(isHit) &&
    Array.isArray(r.predictions) &&
    r.predictions.every(
      (level) => Array.isArray(level) && level.every((w) => typeof w === "string")
    ) &&
    typeof r.fallback === "boolean"
  );
}

function clear(element: HTMLElement): void {
  element.textContent = "";
}

function wordBox(doc: Document, word: string, cls: string): HTMLElement {
  const span = doc.createElement("span");
  span.className = `word ${cls}`;
  span.textContent = word;
  return span;
}

/**
 * Redraw the side panel from one response. The panel is a pure function of
 * (window words, response): targets are cleared and rebuilt every call, so
 * the same inputs always produce the same markup.
 */
export function renderPanel(
  targets: PanelTargets,
  windowWords: string[],
  response: unknown
): void {
  clear(targets.inputWords);
  clear(targets.predictions);
  clear(targets.recommendations);
  targets.note.textContent = "";

  if (!isContextResponse(response)) {
    targets.note.textContent = "malformed response, panel cleared";
    return;
  }

  const doc = targets.inputWords.ownerDocument;
  for (const word of windowWords) {
    targets.inputWords.appendChild(wordBox(doc, word, "input-word"));
  }

  for (const level of response.predictions) {
    const row = doc.createElement("div");
    row.className = "prediction-level";
    for (const word of level) {
      row.appendChild(wordBox(doc, word, "predicted-word"));
    }
    targets.predictions.appendChild(row);
  }

  const list = doc.createElement("ol");
  list.className = "cards";
  for (const hit of response.recommendations) {
    const item = doc.createElement("li");
    item.className = "card";
    const link = doc.createElement("a");
    link.href = hit.link;
    link.dataset.docId = hit.doc_id;
    link.textContent = hit.title;
    const score = doc.createElement("span");
    score.className = "score";
    score.textContent = hit.score.toFixed(4);
    item.appendChild(link);
    item.appendChild(score);
    list.appendChild(item);
  }
  targets.recommendations.appendChild(list);

  if (response.fallback) {
    targets.note.textContent = "expansion unavailable, plain window query used";
  }
}

export function renderDocument(target: HTMLElement, record: DocumentRecord): void {
  clear(target);
  const doc = target.ownerDocument;
  const title = doc.createElement("h3");
  title.textContent = record.title;
  const topics = doc.createElement("p");
  topics.className = "topics";
  topics.textContent = record.topics.join(", ");
  const body = doc.createElement("p");
  body.className = "doc-text";
  body.textContent = record.text;
  target.appendChild(title);
  target.appendChild(topics);
  target.appendChild(body);
}
