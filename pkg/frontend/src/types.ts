// Wire types for the session API.

export interface WordSense {
  sense_id: string;
  gloss_l1: string;
  gloss_l2: string;
  examples: string[];
}

export interface WordEntryView {
  word_id: string;
  surface: string;
  phonemes: string[];
  syllable_count: number;
  imageability: number | null;
  senses: WordSense[];
  audio_ref: string | null;
}

export interface SegmentView {
  segment_id: string;
  start: number;
  end: number;
  color_index: number;
  state: "active" | "archived";
}

export interface SemanticAnchorView {
  anchor_id: string;
  concept: string;
  kind: "meaning" | "keyword";
}

export interface SemanticNodeView {
  node_id: string;
  anchor_id: string;
  parent_id: string | null;
  concept: string;
  cue: string;
  translation: string;
  origin: "user" | "suggested";
  depth: number;
}

export interface SemanticSuggestionView {
  concept: string;
  cue: string;
  translation: string;
}

export interface KeywordCardView {
  card_id: string;
  keyword: string;
  explanation: string;
  reasoning: string;
  source_segment_id: string;
  source_node_ids: string[];
  batch_id: string;
}

export interface KeywordBatchView {
  batch_id: string;
  segment_id: string;
  cards: KeywordCardView[];
}

export interface KeywordChoiceView {
  keyword_id: string;
  segment_id: string;
  keyword: string;
  explanation: string;
  origin: "user" | "card";
  chain: string[];
}

export interface ConceptNodeView {
  node_id: string;
  kind: "meaning" | "keyword";
  label: string;
  color_index: number;
  source_ref: string;
}

export interface LinkView {
  link_id: string;
  endpoints: [string, string];
  chain: { text: string };
  notes: { note_id: string; text: string; created_at: number }[];
}

export interface BBoxView {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface ElementView {
  element_id: string;
  bbox: BBoxView;
  tags: string[];
  description: string;
}

export interface RelationView {
  relation_id: string;
  endpoints: [string, string];
  text: string;
}

export interface ImageRecordView {
  image_id: string;
  image_ref: string;
  style: string;
  width: number;
  height: number;
  at: number;
}

export interface SessionView {
  session_id: string;
  word_id: string;
  sense_id: string;
  surface: string;
  phonemes: string[];
  sense_gloss: string;
  stage: string;
  started_at: number;
  total_active_ms: number;
  segments: SegmentView[];
  archived_segments: SegmentView[];
  keyword_choices: KeywordChoiceView[];
  archived_choices: KeywordChoiceView[];
  tree: { anchors: SemanticAnchorView[]; nodes: SemanticNodeView[] };
  map: { nodes: ConceptNodeView[]; links: LinkView[] };
  canvas: { elements: ElementView[]; relations: RelationView[] };
  batches: KeywordBatchView[];
  images: ImageRecordView[];
  card_id: string | null;
  event_count: number;
}

export interface RecallPathView {
  nodes: { node_id: string; label: string; kind: string; color_index: number; active: boolean }[];
  links: { link_id: string; endpoints: [string, string]; active: boolean }[];
  is_complete: boolean;
  missing_nodes: string[];
  missing_links: [string, string][];
}

export interface JobView {
  job_id: string;
  session_id: string;
  style: string;
  status: "pending" | "done" | "failed";
  image_ref: string | null;
  error: { code: string; message: string } | null;
}

export interface WordCardRecordView {
  card_id: string;
  word: string;
  sense: { sense_id: string; gloss: string };
  keywords: {
    keyword_id: string;
    keyword: string;
    explanation: string;
    origin: string;
    chain: string[];
    segment: { start: number | null; end: number | null; ipa: string | null };
  }[];
  association: string | null;
  links: { endpoints: [string, string]; chain: string; notes: string[] }[];
  style: string | null;
  image_ref: string | null;
  total_active_ms: number;
  created_at: number;
  event_log_ref: string;
}
