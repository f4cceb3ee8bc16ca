// Pure view functions: state in, HTML string out. Every number rendered
// here is copied verbatim from a backend response field.

import type {
  Diagnostics,
  Explanation,
  ItemOut,
  RankedItem,
} from "./types.js";
import { ATTRIBUTE_ORDER } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function imageSrc(imageRef: string, imageBase: string): string {
  if (imageRef.startsWith("http")) return imageRef;
  return `${imageBase.replace(/\/$/, "")}/${imageRef}`;
}

export function renderItemGrid(
  items: ItemOut[],
  picked: string[],
  imageBase: string,
): string {
  const cells = items.map((item) => {
    const selected = picked.includes(item.item_id) ? " selected" : "";
    return (
      `<button class="item-cell${selected}" data-action="toggle" ` +
      `data-item-id="${escapeHtml(item.item_id)}">` +
      `<img src="${escapeHtml(imageSrc(item.image_ref, imageBase))}" alt="">` +
      `<span class="item-name">${escapeHtml(item.item_id)}</span>` +
      `<span class="item-desc">${escapeHtml(item.description)}</span>` +
      `</button>`
    );
  });
  return `<div class="item-grid">${cells.join("")}</div>`;
}

export function renderDraft(picked: string[], itemsById: Map<string, ItemOut>, imageBase: string): string {
  if (picked.length === 0) return `<p class="draft-empty">No items picked yet.</p>`;
  const thumbs = picked.map((id) => {
    const item = itemsById.get(id);
    const img = item
      ? `<img src="${escapeHtml(imageSrc(item.image_ref, imageBase))}" alt="">`
      : "";
    return (
      `<span class="draft-thumb" data-action="toggle" data-item-id="${escapeHtml(id)}">` +
      `${img}<span>${escapeHtml(id)}</span></span>`
    );
  });
  return `<div class="draft-row">${thumbs.join("")}</div>`;
}

export function renderResultCards(items: RankedItem[], imageBase: string): string {
  const cards = items.map(
    (item, index) =>
      `<div class="result-card" data-item-id="${escapeHtml(item.item_id)}">` +
      `<span class="rank">#${index + 1}</span>` +
      `<img src="${escapeHtml(imageSrc(item.image_ref, imageBase))}" alt="">` +
      `<span class="result-name">${escapeHtml(item.item_id)}</span>` +
      `<span class="result-score">score ${item.score.toFixed(4)}</span>` +
      `<button data-action="add" data-item-id="${escapeHtml(item.item_id)}">add to outfit</button>` +
      `</div>`,
  );
  return `<div class="result-cards">${cards.join("")}</div>`;
}

export function renderExplanation(explanation: Explanation): string {
  const rows = ATTRIBUTE_ORDER.filter((name) => explanation.attributes[name]).map(
    (name) => {
      const thought = explanation.attributes[name];
      return (
        `<div class="attribute-row" data-attribute="${name}">` +
        `<span class="attribute-name">${name}</span>` +
        `<span class="attribute-keyword">${escapeHtml(thought.keyword)}</span>` +
        `<span class="attribute-reason">${escapeHtml(thought.reason)}</span>` +
        `</div>`
      );
    },
  );
  return (
    `<div class="explanation">` +
    `<p class="target-description">${escapeHtml(explanation.target_description)}</p>` +
    rows.join("") +
    `</div>`
  );
}

export function renderDiagnostics(diagnostics: Diagnostics): string {
  const gateRows = Object.entries(diagnostics.gates)
    .map(([cue, gate]) =>
      `<li>${escapeHtml(cue)}: gate ${gate.toFixed(4)}, entropy ` +
      `${(diagnostics.cue_entropies[cue] ?? 0).toFixed(4)}</li>`)
    .join("");
  const saliency = diagnostics.saliency_weights
    .map((w) => w.toFixed(4))
    .join(", ");
  return (
    `<details class="diagnostics"><summary>fusion diagnostics</summary>` +
    `<ul>${gateRows}</ul>` +
    `<p>saliency: [${saliency}]</p>` +
    `</details>`
  );
}

export function renderBanner(message: string, retryable: boolean): string {
  const retry = retryable ? `<button data-action="retry">retry</button>` : "";
  return `<div class="banner error">${escapeHtml(message)}${retry}</div>`;
}
