import { Api, ApiError, isAbort } from "./api.js";
import {
  DraftHistory,
  ResultCache,
  canSubmit,
  cloneDraft,
  draftProblems,
  fieldForError,
  searchWithCache,
} from "./state.js";
import type { QueryDraft } from "./state.js";
import {
  renderClassChips,
  renderDescriptor,
  renderEntryList,
  renderHistory,
  renderInlineError,
  renderPresetOptions,
  renderResults,
} from "./render.js";
import type { AttributeSearchResponse, ClassInfo } from "./types.js";

const api = new Api("");

const els = {
  chips: byId("class-chips"),
  color: byId("color-input") as HTMLInputElement,
  preset: byId("preset-select") as HTMLSelectElement,
  k: byId("k-input") as HTMLInputElement,
  add: byId("add-entry") as HTMLButtonElement,
  entries: byId("entry-list"),
  submit: byId("submit") as HTMLButtonElement,
  error: byId("form-error"),
  history: byId("history"),
  resultsTitle: byId("results-title"),
  descriptor: byId("descriptor"),
  results: byId("results"),
};

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

let classes: ClassInfo[] = [];
let selectedClass: string | null = null;
let draft: QueryDraft = { entries: [], k: 10 };
const history = new DraftHistory();
const cache = new ResultCache<AttributeSearchResponse>();

function refreshForm(): void {
  els.chips.innerHTML = renderClassChips(classes, selectedClass);
  for (const chip of els.chips.querySelectorAll<HTMLButtonElement>(".chip")) {
    chip.addEventListener("click", () => {
      selectedClass = chip.dataset.class ?? null;
      refreshForm();
    });
  }
  els.entries.innerHTML = renderEntryList(draft.entries);
  for (const btn of els.entries.querySelectorAll<HTMLButtonElement>(".entry-remove")) {
    btn.addEventListener("click", () => {
      draft.entries.splice(Number(btn.dataset.index), 1);
      refreshForm();
    });
  }
  els.submit.disabled = !canSubmit(draft);
  els.history.innerHTML = renderHistory(history.list());
  for (const item of els.history.querySelectorAll<HTMLButtonElement>(".history-item")) {
    item.addEventListener("click", () => {
      const past = history.get(Number(item.dataset.index));
      if (past) {
        draft = past;
        els.k.value = String(draft.k);
        refreshForm();
        void submitDraft();
      }
    });
  }
}

function clearFieldErrors(): void {
  els.error.innerHTML = "";
  for (const el of [els.chips, els.color, els.preset, els.k]) el.classList.remove("field-bad");
}

function showError(detail: string): void {
  els.error.innerHTML = renderInlineError(detail);
  const field = fieldForError(detail);
  const target = { class: els.chips, color: els.color, preset: els.preset, k: els.k }[field ?? "class"];
  if (field && target) target.classList.add("field-bad");
}

function addEntry(): void {
  clearFieldErrors();
  if (!selectedClass) {
    showError("pick a class chip first");
    return;
  }
  if (draft.entries.some((e) => e.classKey === selectedClass)) {
    showError(`class ${selectedClass} already described; remove it to change it`);
    return;
  }
  draft.entries.push({
    classKey: selectedClass,
    color: els.color.value,
    preset: els.preset.value || null,
  });
  refreshForm();
}

function showResponse(response: AttributeSearchResponse): void {
  els.resultsTitle.textContent = "attribute search";
  els.descriptor.innerHTML = renderDescriptor(response.descriptor);
  els.results.innerHTML = renderResults(response.results, (id) => api.imageUrl(id));
  attachSimilarButtons();
}

function attachSimilarButtons(): void {
  for (const btn of els.results.querySelectorAll<HTMLButtonElement>(".similar-btn")) {
    btn.addEventListener("click", () => void searchSimilar(btn.dataset.imageId ?? ""));
  }
}

async function submitDraft(): Promise<void> {
  clearFieldErrors();
  const problems = draftProblems(draft);
  if (problems.length > 0) {
    showError(problems.join("; "));
    return;
  }
  history.push(cloneDraft(draft));
  refreshForm();
  els.submit.classList.add("busy");
  try {
    const { response } = await searchWithCache(draft, cache, (entries, k) =>
      api.searchAttributes(entries, k),
    );
    showResponse(response);
  } catch (err) {
    if (isAbort(err)) return; // superseded by a newer search
    showError(err instanceof ApiError ? err.message : String(err));
  } finally {
    els.submit.classList.remove("busy");
  }
}

async function searchSimilar(imageId: string): Promise<void> {
  if (!imageId) return;
  clearFieldErrors();
  try {
    const response = await api.searchByImage(imageId, draft.k);
    els.resultsTitle.textContent = `similar to ${response.query_id}`;
    els.descriptor.innerHTML = "";
    els.results.innerHTML = renderResults(response.results, (id) => api.imageUrl(id));
    attachSimilarButtons();
  } catch (err) {
    if (isAbort(err)) return;
    showError(err instanceof ApiError ? err.message : String(err));
  }
}

async function boot(): Promise<void> {
  try {
    const [classesResp, presetsResp] = await Promise.all([api.classes(), api.presets()]);
    classes = classesResp.classes;
    els.preset.innerHTML = renderPresetOptions(presetsResp.presets, null);
  } catch (err) {
    showError(`service unreachable: ${err instanceof Error ? err.message : String(err)}`);
    return;
  }
  els.add.addEventListener("click", addEntry);
  els.submit.addEventListener("click", () => void submitDraft());
  els.k.addEventListener("change", () => {
    draft.k = Number(els.k.value);
    refreshForm();
  });
  refreshForm();
}

void boot();
