// Shapes of the search service's JSON payloads. The UI never recomputes any
// of these numbers; it renders them as received.

export interface ChannelScores {
  L: number | null;
  a: number | null;
  b: number | null;
  d: number | null;
  t_in: number | null;
  t_co: number | null;
}

export interface ClassBreakdown {
  s_c: number;
  channels: ChannelScores;
}

export interface SearchResult {
  image_id: string;
  score: number;
  person_id: number | null;
  camera_id: number | null;
  shared_classes: string[];
  no_shared_classes: boolean;
  s_sim: number;
  s_simn: number;
  classes: Record<string, ClassBreakdown>;
}

export interface QueryEntryPayload {
  class: string;
  rgb: [number, number, number];
  texture_preset: string | null;
}

export interface AttributeSearchResponse {
  query: { entries: QueryEntryPayload[]; k: number };
  descriptor: unknown;
  results: SearchResult[];
}

export interface ImageSearchResponse {
  query_id: string;
  k: number;
  results: SearchResult[];
}

export interface ClassInfo {
  id: number;
  key: string;
  weight: number;
}

export interface ClassesResponse {
  classes: ClassInfo[];
}

export interface PresetsResponse {
  presets: string[];
}

export const CHANNEL_ORDER: (keyof ChannelScores)[] = ["L", "a", "b", "d", "t_in", "t_co"];
