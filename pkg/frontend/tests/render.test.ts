import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, test } from "vitest";
import {
  barWidth,
  renderClassChips,
  renderDescriptor,
  renderEntryList,
  renderHistory,
  renderPresetOptions,
  renderResultCard,
  renderResults,
} from "../src/render.js";
import { CHANNEL_ORDER } from "../src/types.js";
import type {
  AttributeSearchResponse,
  ClassesResponse,
  ImageSearchResponse,
  SearchResult,
} from "../src/types.js";

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf8")) as T;
}

const attribute = fixture<AttributeSearchResponse>("attribute_search.json");
const byImage = fixture<ImageSearchResponse>("image_search.json");
const classes = fixture<ClassesResponse>("classes.json");

describe("result cards render recorded responses verbatim", () => {
  const allResults = [...attribute.results, ...byImage.results];

  test("fixtures carry enough precision to catch rounding", () => {
    // if every value were short, String() vs toFixed() would be
    // indistinguishable and these contract tests would prove nothing
    const longValues = allResults.filter((r) => String(r.s_sim).length > 10);
    expect(longValues.length).toBeGreaterThan(0);
  });

  test.each(allResults.map((r) => [r.image_id, r] as const))(
    "scores of %s appear exactly as the API sent them",
    (_id, result) => {
      const html = renderResultCard(result, null);
      expect(html).toContain(`data-s-sim="${String(result.s_sim)}"`);
      expect(html).toContain(`data-s-simn="${String(result.s_simn)}"`);
      expect(html).toContain(`>${String(result.s_sim)}<`);
      expect(html).toContain(`>${String(result.s_simn)}<`);
      for (const [key, breakdown] of Object.entries(result.classes)) {
        expect(html).toContain(`data-class="${key}"`);
        expect(html).toContain(`data-s-c="${String(breakdown.s_c)}"`);
      }
    },
  );

  test.each(allResults.map((r) => [r.image_id, r] as const))(
    "channel bars of %s carry verbatim values and scaled widths",
    (_id, result) => {
      const html = renderResultCard(result, null);
      for (const breakdown of Object.values(result.classes)) {
        for (const channel of CHANNEL_ORDER) {
          const value = breakdown.channels[channel];
          if (value === null) continue;
          expect(html).toContain(`data-channel="${channel}" data-value="${String(value)}"`);
          expect(html).toContain(`data-value="${String(value)}" style="width:${value * 100}%"`);
        }
      }
    },
  );

  test("absent channels render as absent, with no bar", () => {
    const withNulls = attribute.results.find((r) =>
      Object.values(r.classes).some((b) => b.channels.t_in === null),
    );
    expect(withNulls).toBeDefined();
    const html = renderResultCard(withNulls as SearchResult, null);
    expect(html).toContain("chan-absent");
    expect(html).toContain(">absent<");
    expect(html).not.toContain('data-value="null"');
  });

  test("cards keep the API's order", () => {
    const html = renderResults(attribute.results, () => null);
    const positions = attribute.results.map((r) => html.indexOf(`data-image-id="${r.image_id}"`));
    expect(positions.every((p) => p >= 0)).toBe(true);
    expect([...positions].sort((a, b) => a - b)).toEqual(positions);
  });

  test("thumbnail url and search-similar button target the card's image", () => {
    const result = byImage.results[0];
    const html = renderResultCard(result, `/api/images/${result.image_id}/image`);
    expect(html).toContain(`src="/api/images/${result.image_id}/image"`);
    expect(html).toContain(`class="similar-btn" data-image-id="${result.image_id}"`);
  });
});

describe("bar fill stays inside the track", () => {
  test("values in [0,1] scale linearly", () => {
    expect(barWidth(0)).toBe("0%");
    expect(barWidth(1)).toBe("100%");
    expect(barWidth(0.25)).toBe("25%");
  });

  test("out-of-range values clamp, but the data attribute stays verbatim", () => {
    const doctored: SearchResult = {
      ...byImage.results[0],
      classes: {
        hair: { s_c: 2, channels: { L: 1.5, a: -0.2, b: 0.5, d: null, t_in: null, t_co: null } },
      },
    };
    const html = renderResultCard(doctored, null);
    expect(html).toContain('data-value="1.5" style="width:100%"');
    expect(html).toContain('data-value="-0.2" style="width:0%"');
    expect(html).toContain('data-value="0.5" style="width:50%"');
  });
});

describe("query form fragments", () => {
  test("class chips list every class and mark the selected one", () => {
    const html = renderClassChips(classes.classes, "pants");
    for (const c of classes.classes) {
      expect(html).toContain(`data-class="${c.key}"`);
    }
    expect(html).toContain('chip chip-on" data-class="pants"');
    expect(html.match(/chip-on/g)).toHaveLength(1);
  });

  test("preset dropdown offers no-texture plus each preset", () => {
    const html = renderPresetOptions(["coarse", "smooth"], "smooth");
    expect(html).toContain('<option value="">no texture</option>');
    expect(html).toContain('value="coarse"');
    expect(html).toContain('value="smooth" selected');
    const none = renderPresetOptions(["coarse"], null);
    expect(none).toContain('<option value="" selected>no texture</option>');
  });

  test("entry list rows show swatch, class, color, preset, remove", () => {
    const html = renderEntryList([
      { classKey: "upper_clothes", color: "#d22b2b", preset: "smooth" },
      { classKey: "pants", color: "#141414", preset: null },
    ]);
    expect(html).toContain("upper_clothes");
    expect(html).toContain("#d22b2b");
    expect(html).toContain("smooth");
    expect(html).toContain('class="entry-remove" data-index="1"');
    expect(html).toContain("background:#141414");
  });

  test("history renders one button per draft, newest first", () => {
    const html = renderHistory([
      { entries: [{ classKey: "hat", color: "#00ff00", preset: null }], k: 5 },
      { entries: [{ classKey: "pants", color: "#101010", preset: null }], k: 10 },
    ]);
    expect(html.indexOf("hat #00ff00")).toBeLessThan(html.indexOf("pants #101010"));
    expect(html).toContain("(k=5)");
  });
});

describe("untrusted strings are escaped", () => {
  test("hostile image id cannot inject markup", () => {
    const hostile: SearchResult = {
      ...byImage.results[0],
      image_id: '<img onerror=alert(1)>"',
      classes: {},
    };
    const html = renderResultCard(hostile, null);
    expect(html).not.toContain("<img onerror");
    expect(html).toContain("&lt;img onerror");
  });

  test("descriptor JSON is escaped", () => {
    const html = renderDescriptor({ note: "<script>" });
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});
