// Wire types mirroring the service's request/response models.

export interface ItemOut {
  item_id: string;
  category: string;
  description: string;
  image_ref: string;
}

export interface ItemPage {
  items: ItemOut[];
  page: number;
  size: number;
  total: number;
}

export interface RankedItem {
  item_id: string;
  score: number;
  image_ref: string;
  category: string;
}

export interface AttributeThought {
  keyword: string;
  reason: string;
}

export interface Explanation {
  identification: string;
  target_description: string;
  attributes: Record<string, AttributeThought>;
}

export interface Diagnostics {
  saliency_weights: number[];
  attribute_scores: Record<string, number>;
  attribute_weights: Record<string, number>;
  cue_entropies: Record<string, number>;
  gates: Record<string, number>;
}

export interface RecommendRequest {
  outfit_item_ids: string[];
  target_category: string;
  k: number;
}

export interface RecommendResponse {
  request_id: string;
  items: RankedItem[];
  explanation: Explanation;
  diagnostics: Diagnostics;
}

export interface HealthResponse {
  status: string;
  catalog_size: number;
  dimension: number;
  components: { embedder: string; mllm: string; cache_mode: string };
}

export const ATTRIBUTE_ORDER = [
  "color",
  "style",
  "occasion",
  "season",
  "material",
  "balance",
] as const;
