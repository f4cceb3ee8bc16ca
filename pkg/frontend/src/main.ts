// DOM glue: wires the store, the API client, and the views together.

import { ApiClient, ApiError } from "./api.js";
import {
  renderBanner,
  renderDiagnostics,
  renderDraft,
  renderExplanation,
  renderItemGrid,
  renderResultCards,
} from "./render.js";
import { OutfitDraft } from "./state.js";
import type { ItemOut } from "./types.js";

declare global {
  interface Window {
    STYLEFUSE_API_URL?: string;
    STYLEFUSE_IMAGE_BASE?: string;
  }
}

const apiUrl = window.STYLEFUSE_API_URL ?? "http://127.0.0.1:8300";
const imageBase = window.STYLEFUSE_IMAGE_BASE ?? "/catalog";

const api = new ApiClient(apiUrl);
const draft = new OutfitDraft(api, window.localStorage);

const el = (id: string) => document.getElementById(id)!;
const itemsById = new Map<string, ItemOut>();
let categories: string[] = [];
let bannerHtml = "";

function renderAll(): void {
  el("banner").innerHTML = bannerHtml;
  el("draft").innerHTML = renderDraft(draft.picked, itemsById, imageBase);
  el("grid").innerHTML = renderItemGrid([...itemsById.values()], draft.picked, imageBase);
  el("category").innerHTML = categories
    .map(
      (c) =>
        `<option value="${c}"${c === draft.targetCategory ? " selected" : ""}>${c}</option>`,
    )
    .join("");
  (el("k-slider") as HTMLInputElement).value = String(draft.k);
  el("k-value").textContent = String(draft.k);
  (el("complete") as HTMLButtonElement).disabled = !draft.canRequest;
  const response = draft.lastResponse;
  if (response) {
    el("results").innerHTML = renderResultCards(response.items, imageBase);
    el("explanation").innerHTML =
      renderExplanation(response.explanation) + renderDiagnostics(response.diagnostics);
  } else {
    el("results").innerHTML = "";
    el("explanation").innerHTML = "";
  }
}

async function requestCompletion(): Promise<void> {
  bannerHtml = "";
  try {
    await draft.requestCompletion();
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return;
    if (err instanceof ApiError) {
      bannerHtml = renderBanner(
        err.isDependencyFailure
          ? `backend dependency trouble (${err.code}): ${err.message}`
          : `request rejected (${err.code}): ${err.message}`,
        err.isDependencyFailure,
      );
    } else {
      bannerHtml = renderBanner(String(err), true);
    }
  }
  renderAll();
}

async function loadItems(): Promise<void> {
  try {
    const page = await api.items(null, 1, 200);
    itemsById.clear();
    for (const item of page.items) itemsById.set(item.item_id, item);
    categories = [...new Set(page.items.map((i) => i.category))].sort();
    if (!draft.targetCategory && categories.length > 0) {
      draft.setCategory(categories[0]);
    }
    bannerHtml = "";
  } catch (err) {
    bannerHtml = renderBanner(`backend unreachable: ${err}`, true);
  }
  renderAll();
}

document.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!target) return;
  const action = target.dataset.action;
  const itemId = target.dataset.itemId;
  if (action === "toggle" && itemId) {
    draft.toggleItem(itemId);
    renderAll();
  } else if (action === "add" && itemId) {
    draft.addItem(itemId);
    void requestCompletion();
  } else if (action === "retry") {
    void loadItems();
  }
});

el("category").addEventListener("change", (event) => {
  draft.setCategory((event.target as HTMLSelectElement).value);
  renderAll();
});

el("k-slider").addEventListener("input", (event) => {
  draft.setK(Number((event.target as HTMLInputElement).value));
  renderAll();
});

el("complete").addEventListener("click", () => void requestCompletion());

draft.subscribe(() => {});
void loadItems();
