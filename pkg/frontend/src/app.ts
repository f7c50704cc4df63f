// Application shell: server state cache, pending-action chain, view routing.
//
// The client never commits state on its own: every action posts to the API,
// then re-renders from a fresh session + recall-path fetch, so the indicators
// always equal what the server would report.

import { ApiClient, ApiError } from "./api";
import { el } from "./dom";
import type {
  KeywordBatchView,
  RecallPathView,
  SemanticSuggestionView,
  SessionView,
  WordCardRecordView,
  WordEntryView,
} from "./types";
import { renderAssociation } from "./views/association";
import { renderGallery } from "./views/gallery";
import { renderImagery } from "./views/imagery";
import { renderKeywords } from "./views/keywords";
import { renderOverview } from "./views/overview";

export type ViewName = "overview" | "keywords" | "association" | "imagery" | "gallery";
export type CanvasTool = "select" | "add" | "associate" | "delete" | "inspire";

export interface AppOptions {
  baseUrl?: string;
  pollIntervalMs?: number;
  tickIntervalMs?: number;
}

const VIEW_LABELS: Record<ViewName, string> = {
  overview: "Word Overview",
  keywords: "Keyword Selection",
  association: "Association Map",
  imagery: "Imagery Canvas",
  gallery: "Word Cards",
};

export class App {
  readonly api: ApiClient;
  readonly root: HTMLElement;
  readonly pollIntervalMs: number;

  view: ViewName = "overview";
  session: SessionView | null = null;
  recall: RecallPathView | null = null;
  styles: Record<string, string> = {};
  cards: WordCardRecordView[] = [];
  lastError: string | null = null;

  // overview
  searchQuery = "";
  searchResults: WordEntryView[] = [];

  // keyword selection
  brushAnchor: number | null = null;
  checkedNodes: string[] = [];
  treeSuggestions: Record<string, SemanticSuggestionView[]> = {};
  batches: Record<string, KeywordBatchView> = {};

  // association
  selectedLink: string | null = null;
  hints: string[] = [];
  linkDraftA: string | null = null;

  // imagery
  tool: CanvasTool = "select";
  dragStart: { x: number; y: number } | null = null;
  elementDraft: { x: number; y: number; w: number; h: number } | null = null;
  draftTags: Set<string> = new Set();
  draftDescription = "";
  elementSuggestions: string[] = [];
  assocFirst: string | null = null;
  relationDraft: { a: string; b: string } | null = null;
  relationDraftText = "";
  relationSuggestions: string[] = [];
  selectedElement: string | null = null;
  selectedStyle = "pixar_animation";
  jobPending = false;

  private chain: Promise<void> = Promise.resolve();
  private tickTimer: ReturnType<typeof setInterval> | null = null;

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.root = root;
    this.api = new ApiClient(options.baseUrl ?? "");
    this.pollIntervalMs = options.pollIntervalMs ?? 2000;
    const tickEvery = options.tickIntervalMs ?? 0;
    if (tickEvery > 0) {
      this.tickTimer = setInterval(() => {
        if (this.session && this.session.stage !== "recorded") {
          void this.api.tick(this.session.session_id, tickEvery).catch(() => undefined);
        }
      }, tickEvery);
    }
  }

  dispose(): void {
    if (this.tickTimer) clearInterval(this.tickTimer);
  }

  /** Queue an action; failures land in the error banner, never thrown away. */
  run(action: () => Promise<void>): void {
    this.chain = this.chain
      .then(() => {
        this.lastError = null;
        return action();
      })
      .catch((error: unknown) => {
        this.lastError =
          error instanceof ApiError
            ? `${error.code}: ${error.message}`
            : String(error);
        this.render();
      });
  }

  /** Resolve once every queued action has finished (used by tests). */
  settle(): Promise<void> {
    return this.chain;
  }

  async init(): Promise<void> {
    this.styles = (await this.api.styles()).styles;
    this.render();
  }

  async sync(): Promise<void> {
    if (this.session) {
      this.session = await this.api.getSession(this.session.session_id);
      this.recall = await this.api.recallPath(this.session.session_id);
    }
    this.render();
  }

  async startSession(wordId: string, senseId: string): Promise<void> {
    this.session = await this.api.createSession(wordId, senseId);
    this.recall = await this.api.recallPath(this.session.session_id);
    this.view = "overview";
    this.checkedNodes = [];
    this.treeSuggestions = {};
    this.batches = {};
    this.selectedLink = null;
    this.hints = [];
    this.render();
  }

  switchView(view: ViewName): void {
    this.view = view;
    if (view === "gallery") {
      this.run(async () => {
        this.cards = (await this.api.cards()).cards;
        this.render();
      });
      return;
    }
    this.render();
  }

  nodeLabel(nodeId: string): string {
    const node = this.session?.map.nodes.find((n) => n.node_id === nodeId);
    return node ? node.label : nodeId;
  }

  render(): void {
    const body = el("div", { class: "app" });
    body.append(this.renderNav());
    if (this.lastError) {
      body.append(el("div", { class: "error-banner", id: "error-banner", text: this.lastError }));
    }
    switch (this.view) {
      case "overview":
        body.append(renderOverview(this));
        break;
      case "keywords":
        body.append(renderKeywords(this));
        break;
      case "association":
        body.append(renderAssociation(this));
        break;
      case "imagery":
        body.append(renderImagery(this));
        break;
      case "gallery":
        body.append(renderGallery(this));
        break;
    }
    this.root.replaceChildren(body);
  }

  private renderNav(): HTMLElement {
    const tabs = (Object.keys(VIEW_LABELS) as ViewName[]).map((name) => {
      const needsSession = name !== "overview" && name !== "gallery";
      return el(
        "button",
        {
          class: `tab${this.view === name ? " active" : ""}`,
          id: `tab-${name}`,
          disabled: needsSession && !this.session,
          onclick: () => this.switchView(name),
        },
        [VIEW_LABELS[name]],
      );
    });
    const status = this.session
      ? `${this.session.surface} (${this.session.sense_gloss}) · ${this.session.stage}`
      : "no session";
    return el("nav", { class: "nav" }, [
      el("span", { class: "brand", text: "wordcraft" }),
      ...tabs,
      el("span", { class: "session-status", id: "session-status", text: status }),
    ]);
  }
}
