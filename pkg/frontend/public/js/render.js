import { CHANNEL_ORDER } from "./types.js";
export function escapeHtml(str) {
    return str.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}
function attr(value) {
    return escapeHtml(value).replace(/'/g, "&#39;");
}
/**
 * Bar fill width. The displayed value itself is always the verbatim API
 * number (data-value / visible text); only the fill is clamped so a bar can
 * never paint outside its track.
 */
export function barWidth(value) {
    const clamped = Math.max(0, Math.min(1, value));
    return `${clamped * 100}%`;
}
function channelBar(name, value) {
    if (value === null) {
        return `<div class="chan chan-absent"><span class="chan-name">${name}</span><span class="chan-missing">absent</span></div>`;
    }
    const verbatim = String(value);
    return `
    <div class="chan" title="${name} = ${attr(verbatim)}">
      <span class="chan-name">${name}</span>
      <span class="bar"><span class="fill" data-channel="${name}" data-value="${attr(verbatim)}" style="width:${barWidth(value)}"></span></span>
    </div>`;
}
function classSection(key, sC, channels) {
    return `
    <div class="class-block" data-class="${attr(key)}">
      <div class="class-head">
        <span class="class-key">${escapeHtml(key)}</span>
        <span class="class-score" data-s-c="${attr(String(sC))}">${escapeHtml(String(sC))}</span>
      </div>
      ${CHANNEL_ORDER.map((c) => channelBar(c, channels[c])).join("")}
    </div>`;
}
export function renderResultCard(result, imageUrl) {
    const person = result.person_id === null ? "person ?" : `person ${escapeHtml(String(result.person_id))}`;
    const camera = result.camera_id === null ? "" : ` &middot; cam ${escapeHtml(String(result.camera_id))}`;
    const thumb = imageUrl
        ? `<img class="thumb" src="${attr(imageUrl)}" alt="${attr(result.image_id)}" loading="lazy" onerror="this.style.visibility='hidden'" />`
        : `<div class="thumb thumb-none"></div>`;
    const classes = Object.entries(result.classes)
        .map(([key, b]) => classSection(key, b.s_c, b.channels))
        .join("");
    const note = result.no_shared_classes ? `<div class="no-shared">no shared classes</div>` : "";
    return `
    <article class="card" data-image-id="${attr(result.image_id)}">
      ${thumb}
      <div class="card-body">
        <div class="card-title">${escapeHtml(result.image_id)}</div>
        <div class="card-sub">${person}${camera}</div>
        <div class="card-scores">
          <span class="score-label">s_sim</span>
          <span class="score-value" data-s-sim="${attr(String(result.s_sim))}">${escapeHtml(String(result.s_sim))}</span>
          <span class="score-label">s_simn</span>
          <span class="score-value" data-s-simn="${attr(String(result.s_simn))}">${escapeHtml(String(result.s_simn))}</span>
        </div>
        ${note}
        <div class="class-list">${classes}</div>
        <button class="similar-btn" data-image-id="${attr(result.image_id)}" type="button">search similar</button>
      </div>
    </article>`;
}
export function renderResults(results, imageUrlFor) {
    if (results.length === 0) {
        return `<div class="empty">No results.</div>`;
    }
    return `<div class="grid">${results.map((r) => renderResultCard(r, imageUrlFor(r.image_id))).join("")}</div>`;
}
export function renderDescriptor(descriptor) {
    return `
    <details class="descriptor">
      <summary>synthesized query descriptor</summary>
      <pre>${escapeHtml(JSON.stringify(descriptor, null, 2))}</pre>
    </details>`;
}
export function renderClassChips(classes, selected) {
    return classes
        .map((c) => `<button type="button" class="chip${c.key === selected ? " chip-on" : ""}" data-class="${attr(c.key)}" title="weight ${attr(String(c.weight))}">${escapeHtml(c.key)}</button>`)
        .join("");
}
export function renderPresetOptions(presets, selected) {
    const none = `<option value=""${selected === null ? " selected" : ""}>no texture</option>`;
    return (none +
        presets
            .map((p) => `<option value="${attr(p)}"${p === selected ? " selected" : ""}>${escapeHtml(p)}</option>`)
            .join(""));
}
export function renderEntryList(entries) {
    if (entries.length === 0) {
        return `<div class="entry-empty">no classes described yet</div>`;
    }
    return entries
        .map((e, i) => `
    <div class="entry" data-index="${i}">
      <span class="swatch" style="background:${attr(e.color)}"></span>
      <span class="entry-class">${escapeHtml(e.classKey)}</span>
      <span class="entry-color">${escapeHtml(e.color)}</span>
      <span class="entry-preset">${e.preset ? escapeHtml(e.preset) : "&mdash;"}</span>
      <button type="button" class="entry-remove" data-index="${i}" aria-label="remove">&times;</button>
    </div>`)
        .join("");
}
export function renderHistory(drafts) {
    if (drafts.length === 0)
        return "";
    const items = drafts
        .map((d, i) => {
        const label = d.entries.map((e) => `${e.classKey} ${e.color}`).join(", ");
        return `<button type="button" class="history-item" data-index="${i}">${escapeHtml(label)} (k=${d.k})</button>`;
    })
        .join("");
    return `<span class="history-label">recent:</span>${items}`;
}
export function renderInlineError(detail) {
    return `<div class="form-error" role="alert">${escapeHtml(detail)}</div>`;
}
