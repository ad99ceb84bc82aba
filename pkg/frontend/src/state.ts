import type { QueryEntryPayload } from "./types.js";

export interface DraftEntry {
  classKey: string;
  color: string; // #rrggbb
  preset: string | null;
}

export interface QueryDraft {
  entries: DraftEntry[];
  k: number;
}

export const HISTORY_LIMIT = 5;

export function hexToRgb(hex: string): [number, number, number] | null {
  const m = /^#([0-9a-fA-F]{6})$/.exec(hex.trim());
  if (!m) return null;
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

/** Human-readable reasons the draft cannot be submitted; empty when valid. */
export function draftProblems(draft: QueryDraft): string[] {
  const problems: string[] = [];
  if (draft.entries.length === 0) problems.push("describe at least one class");
  const seen = new Set<string>();
  for (const entry of draft.entries) {
    if (seen.has(entry.classKey)) problems.push(`duplicate class ${entry.classKey}`);
    seen.add(entry.classKey);
    if (!hexToRgb(entry.color)) problems.push(`bad color ${entry.color} for ${entry.classKey}`);
  }
  if (!Number.isInteger(draft.k) || draft.k < 1) problems.push("k must be a positive integer");
  return problems;
}

export function canSubmit(draft: QueryDraft): boolean {
  return draftProblems(draft).length === 0;
}

export function entriesPayload(draft: QueryDraft): QueryEntryPayload[] {
  return draft.entries.map((e) => ({
    class: e.classKey,
    rgb: hexToRgb(e.color) ?? [0, 0, 0],
    texture_preset: e.preset,
  }));
}

/** Canonical cache/history key: entry order does not matter, k does. */
export function draftKey(draft: QueryDraft): string {
  const entries = [...draft.entries]
    .sort((a, b) => a.classKey.localeCompare(b.classKey))
    .map((e) => [e.classKey, e.color.toLowerCase(), e.preset ?? ""].join(":"));
  return `k=${draft.k}|${entries.join("|")}`;
}

export function cloneDraft(draft: QueryDraft): QueryDraft {
  return { entries: draft.entries.map((e) => ({ ...e })), k: draft.k };
}

/** The last few submitted drafts, newest first, deduplicated by key. */
export class DraftHistory {
  private drafts: QueryDraft[] = [];

  constructor(private limit = HISTORY_LIMIT) {}

  push(draft: QueryDraft): void {
    const key = draftKey(draft);
    this.drafts = this.drafts.filter((d) => draftKey(d) !== key);
    this.drafts.unshift(cloneDraft(draft));
    if (this.drafts.length > this.limit) this.drafts.length = this.limit;
  }

  list(): QueryDraft[] {
    return this.drafts.map(cloneDraft);
  }

  get(index: number): QueryDraft | null {
    const d = this.drafts[index];
    return d ? cloneDraft(d) : null;
  }
}

/** Small LRU of search responses so revisiting a draft re-renders instantly. */
export class ResultCache<T> {
  private entries = new Map<string, T>();

  constructor(private limit = 20) {}

  get(key: string): T | undefined {
    const value = this.entries.get(key);
    if (value !== undefined) {
      this.entries.delete(key);
      this.entries.set(key, value);
    }
    return value;
  }

  set(key: string, value: T): void {
    this.entries.delete(key);
    this.entries.set(key, value);
    if (this.entries.size > this.limit) {
      const oldest = this.entries.keys().next().value as string;
      this.entries.delete(oldest);
    }
  }
}

export interface CachedSearch<T> {
  response: T;
  fromCache: boolean;
}

/**
 * Resolve a draft to a response, preferring the cache: navigating back to a
 * recent draft re-renders its results without another request.
 */
export async function searchWithCache<T>(
  draft: QueryDraft,
  cache: ResultCache<T>,
  search: (entries: QueryEntryPayload[], k: number) => Promise<T>,
): Promise<CachedSearch<T>> {
  const key = draftKey(draft);
  const hit = cache.get(key);
  if (hit !== undefined) return { response: hit, fromCache: true };
  const response = await search(entriesPayload(draft), draft.k);
  cache.set(key, response);
  return { response, fromCache: false };
}

/**
 * Which form field a service 400 is complaining about, so the error lands
 * next to the control it came from rather than in a global banner.
 */
export function fieldForError(detail: string): "class" | "color" | "preset" | "k" | null {
  const text = detail.toLowerCase();
  if (text.includes("preset")) return "preset";
  if (text.includes("class")) return "class";
  if (text.includes("rgb") || text.includes("color")) return "color";
  if (/\bk\b/.test(text)) return "k";
  return null;
}
