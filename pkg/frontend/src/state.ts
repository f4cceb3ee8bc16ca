// Draft state: the growing outfit, the target category, and the last
// answer. Picks and category survive reloads via storage; the request
// history is ephemeral by design. One recommendation request is in
// flight at a time — newer requests abort older ones.

import { ApiClient } from "./api.js";
import type { RecommendRequest, RecommendResponse } from "./types.js";

export interface HistoryEntry {
  request: RecommendRequest;
  request_id: string;
}

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const STORAGE_KEY = "stylefuse.draft.v1";

interface PersistedDraft {
  picked: string[];
  targetCategory: string;
  k: number;
  lastResponse: RecommendResponse | null;
}

export class OutfitDraft {
  picked: string[] = [];
  targetCategory = "";
  k = 5;
  lastResponse: RecommendResponse | null = null;
  history: HistoryEntry[] = []; // ephemeral: never persisted

  private controller: AbortController | null = null;
  private listeners: Array<() => void> = [];

  constructor(
    private api: ApiClient,
    private storage: StorageLike | null = null,
  ) {
    this.restore();
  }

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    this.persist();
    for (const listener of this.listeners) listener();
  }

  private restore(): void {
    if (!this.storage) return;
    const raw = this.storage.getItem(STORAGE_KEY);
    if (!raw) return;
    try {
      const saved = JSON.parse(raw) as PersistedDraft;
      this.picked = Array.isArray(saved.picked) ? saved.picked : [];
      this.targetCategory = saved.targetCategory ?? "";
      this.k = saved.k ?? 5;
      this.lastResponse = saved.lastResponse ?? null;
    } catch {
      // corrupt storage: start fresh
    }
  }

  private persist(): void {
    if (!this.storage) return;
    const saved: PersistedDraft = {
      picked: this.picked,
      targetCategory: this.targetCategory,
      k: this.k,
      lastResponse: this.lastResponse,
    };
    this.storage.setItem(STORAGE_KEY, JSON.stringify(saved));
  }

  /** Click semantics in the grid: first click picks, second unpicks. */
  toggleItem(itemId: string): void {
    const at = this.picked.indexOf(itemId);
    if (at >= 0) this.picked.splice(at, 1);
    else this.picked.push(itemId);
    this.emit();
  }

  /** "Add to outfit" on a result card; no duplicates. */
  addItem(itemId: string): void {
    if (!this.picked.includes(itemId)) {
      this.picked.push(itemId);
      this.emit();
    }
  }

  setCategory(category: string): void {
    this.targetCategory = category;
    this.emit();
  }

  setK(k: number): void {
    this.k = Math.min(Math.max(Math.trunc(k), 1), 100);
    this.emit();
  }

  get canRequest(): boolean {
    return this.picked.length > 0 && this.targetCategory !== "";
  }

  async requestCompletion(): Promise<RecommendResponse> {
    if (!this.canRequest) throw new Error("pick at least one item and a category");
    this.controller?.abort();
    this.controller = new AbortController();
    const request: RecommendRequest = {
      outfit_item_ids: [...this.picked],
      target_category: this.targetCategory,
      k: this.k,
    };
    const response = await this.api.recommend(request, this.controller.signal);
    this.lastResponse = response;
    this.history.push({ request, request_id: response.request_id });
    this.emit();
    return response;
  }
}
