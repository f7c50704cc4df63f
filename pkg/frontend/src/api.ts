// Typed client for the session API. All validation happens server-side;
// callers re-render from whatever the server returns.

import type {
  JobView,
  KeywordBatchView,
  KeywordChoiceView,
  LinkView,
  RecallPathView,
  SemanticNodeView,
  SemanticSuggestionView,
  SessionView,
  WordCardRecordView,
  WordEntryView,
} from "./types";

export class ApiError extends Error {
  code: string;
  details: Record<string, unknown>;

  constructor(code: string, message: string, details: Record<string, unknown>) {
    super(message);
    this.code = code;
    this.details = details;
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const err = (payload as { error?: { code?: string; message?: string; details?: Record<string, unknown> } }).error ?? {};
      throw new ApiError(err.code ?? "INTERNAL_ERROR", err.message ?? response.statusText, err.details ?? {});
    }
    return payload as T;
  }

  health(): Promise<{ status: string; provider_mode: string; profile: string }> {
    return this.request("GET", "/healthz");
  }

  searchWords(query: string): Promise<{ words: WordEntryView[] }> {
    return this.request("GET", `/lexicon/words?q=${encodeURIComponent(query)}`);
  }

  createSession(wordId: string, senseId: string): Promise<SessionView> {
    return this.request("POST", "/sessions", { word_id: wordId, sense_id: senseId });
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  recallPath(id: string): Promise<RecallPathView> {
    return this.request("GET", `/sessions/${id}/recall-path`);
  }

  tick(id: string, deltaMs: number): Promise<{ total_active_ms: number }> {
    return this.request("POST", `/sessions/${id}/tick`, { delta_ms: deltaMs });
  }

  brushSegment(id: string, start: number, end: number): Promise<unknown> {
    return this.request("POST", `/sessions/${id}/segments`, { start, end });
  }

  clearSegments(id: string): Promise<unknown> {
    return this.request("DELETE", `/sessions/${id}/segments`);
  }

  addTreeNode(
    id: string,
    body: {
      anchor_id: string;
      concept: string;
      parent_id?: string | null;
      cue?: string;
      translation?: string;
      origin?: string;
    },
  ): Promise<SemanticNodeView> {
    return this.request("POST", `/sessions/${id}/tree/nodes`, body);
  }

  suggestTreeNodes(id: string, anchorId: string, count = 4): Promise<{ suggestions: SemanticSuggestionView[] }> {
    return this.request("POST", `/sessions/${id}/tree/${anchorId}/suggest`, { count });
  }

  suggestKeywords(id: string, segmentId: string, nodeIds: string[]): Promise<KeywordBatchView> {
    return this.request("POST", `/sessions/${id}/segments/${segmentId}/keywords/suggest`, {
      node_ids: nodeIds,
    });
  }

  selectKeyword(
    id: string,
    segmentId: string,
    body: { card_id?: string; keyword?: string; explanation?: string; chain_node_ids?: string[] },
  ): Promise<{ choice: KeywordChoiceView; session: SessionView }> {
    return this.request("POST", `/sessions/${id}/segments/${segmentId}/keywords/select`, body);
  }

  upsertLink(id: string, nodeA: string, nodeB: string): Promise<LinkView> {
    return this.request("POST", `/sessions/${id}/map/links`, { node_a: nodeA, node_b: nodeB });
  }

  patchLink(id: string, linkId: string, body: { chain?: string; note?: string }): Promise<LinkView> {
    return this.request("PATCH", `/sessions/${id}/map/links/${linkId}`, body);
  }

  deleteLink(id: string, linkId: string): Promise<unknown> {
    return this.request("DELETE", `/sessions/${id}/map/links/${linkId}`);
  }

  linkHints(id: string, linkId: string): Promise<{ hints: string[] }> {
    return this.request("POST", `/sessions/${id}/map/links/${linkId}/hints`);
  }

  addElement(
    id: string,
    bbox: { x: number; y: number; w: number; h: number },
    tags: string[],
    description: string,
  ): Promise<unknown> {
    return this.request("POST", `/sessions/${id}/canvas/elements`, { bbox, tags, description });
  }

  updateElement(
    id: string,
    elementId: string,
    body: { bbox?: { x: number; y: number; w: number; h: number }; tags?: string[]; description?: string },
  ): Promise<unknown> {
    return this.request("PATCH", `/sessions/${id}/canvas/elements/${elementId}`, body);
  }

  deleteElement(id: string, elementId: string): Promise<unknown> {
    return this.request("DELETE", `/sessions/${id}/canvas/elements/${elementId}`);
  }

  addRelation(id: string, elementA: string, elementB: string, text: string): Promise<unknown> {
    return this.request("POST", `/sessions/${id}/canvas/relations`, {
      element_a: elementA,
      element_b: elementB,
      text,
    });
  }

  deleteRelation(id: string, relationId: string): Promise<unknown> {
    return this.request("DELETE", `/sessions/${id}/canvas/relations/${relationId}`);
  }

  suggestElements(id: string, nodeIds: string[]): Promise<{ suggestions: string[] }> {
    return this.request("POST", `/sessions/${id}/canvas/suggest-elements`, { node_ids: nodeIds });
  }

  suggestRelations(id: string, elementA: string, elementB: string): Promise<{ suggestions: string[] }> {
    return this.request("POST", `/sessions/${id}/canvas/suggest-relations`, {
      element_a: elementA,
      element_b: elementB,
    });
  }

  styles(): Promise<{ styles: Record<string, string> }> {
    return this.request("GET", "/styles");
  }

  startImage(id: string, style: string): Promise<JobView> {
    return this.request("POST", `/sessions/${id}/image`, { style });
  }

  job(jobId: string): Promise<JobView> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  recordCard(id: string, allowMissingImage = false): Promise<WordCardRecordView> {
    return this.request("POST", `/sessions/${id}/card`, { allow_missing_image: allowMissingImage });
  }

  cards(): Promise<{ cards: WordCardRecordView[] }> {
    return this.request("GET", "/cards");
  }
}
