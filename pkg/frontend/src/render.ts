/** SVG rendering as plain element trees.
 *
 * Every probability shown here is read straight out of the last service
 * response; the only client-side arithmetic is summing posterior entries
 * into the displayed carrier probability and formatting.
 */

import { carrierProbability } from "./genetics.js";
import type { Layout } from "./layout.js";
import { NODE_RADIUS } from "./layout.js";
import type { ViewState } from "./state.js";
import type { PatternName, PredictResponse } from "./types.js";
import { PATTERNS, fromWire, isImpossible } from "./types.js";

export interface VNode {
  tag: string;
  attrs: Record<string, string | number>;
  children: (VNode | string)[];
}

export function el(
  tag: string,
  attrs: Record<string, string | number> = {},
  ...children: (VNode | string)[]
): VNode {
  return { tag, attrs, children };
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function toMarkup(node: VNode): string {
  const attrs = Object.entries(node.attrs)
    .map(([k, v]) => ` ${k}="${escapeXml(String(v))}"`)
    .join("");
  const body = node.children
    .map((c) => (typeof c === "string" ? escapeXml(c) : toMarkup(c)))
    .join("");
  return `<${node.tag}${attrs}>${body}</${node.tag}>`;
}

function shapeFor(sex: string, x: number, y: number, r: number): VNode {
  if (sex === "female") {
    return el("circle", { cx: x, cy: y, r, class: "person-shape" });
  }
  if (sex === "male") {
    return el("rect", {
      x: x - r,
      y: y - r,
      width: 2 * r,
      height: 2 * r,
      class: "person-shape",
    });
  }
  const points = [
    `${x},${y - r}`,
    `${x + r},${y}`,
    `${x},${y + r}`,
    `${x - r},${y}`,
  ].join(" ");
  return el("polygon", { points, class: "person-shape" });
}

function posteriorTitle(posterior: Record<string, number>): string {
  return Object.entries(posterior)
    .map(([label, p]) => `${label}: ${p.toFixed(4)}`)
    .join("\n");
}

/** The interactive diagram; falls back to a plain listing without layout. */
export function renderPedigree(state: ViewState, layout: Layout | null): VNode {
  if (!state.pedigree) {
    return el("div", { class: "empty" }, "Load a pedigree to begin.");
  }
  if (!layout || !Object.keys(layout.nodes).length) {
    return renderFallbackList(state);
  }
  const children: VNode[] = [];
  for (const c of layout.connectors) {
    children.push(
      el("polyline", {
        points: `${c.from[0]},${c.from[1]} ${c.from[0]},${(c.from[1] + c.to[1]) / 2} ` +
          `${c.to[0]},${(c.from[1] + c.to[1]) / 2} ${c.to[0]},${c.to[1]}`,
        class: `connector connector-${c.kind}`,
      }),
    );
  }
  for (const person of state.pedigree.persons) {
    const node = layout.nodes[person.id];
    if (!node) continue;
    const posterior = state.smooth?.posteriors?.[person.id];
    const carrier = posterior
      ? carrierProbability(state.pattern, posterior)
      : 0;
    const group = el("g", {
      class: "person" +
        (person.phenotype === "affected" ? " affected" : "") +
        (state.stale ? " stale" : ""),
      "data-person": person.id,
      "data-carrier": posterior ? carrier.toFixed(6) : "none",
    });
    const shape = shapeFor(person.sex, node.x, node.y, NODE_RADIUS);
    shape.attrs["fill-opacity"] = posterior ? (0.05 + 0.95 * carrier).toFixed(4) : 0.05;
    group.children.push(shape);
    if (posterior) {
      group.children.push(el("title", {}, posteriorTitle(posterior)));
    }
    if (state.evidence[person.id]) {
      group.children.push(
        el("circle", {
          cx: node.x + NODE_RADIUS * 0.85,
          cy: node.y - NODE_RADIUS * 0.85,
          r: 6,
          class: "evidence-badge",
        }),
      );
    }
    group.children.push(
      el(
        "text",
        { x: node.x, y: node.y + NODE_RADIUS + 14, class: "person-label" },
        person.id,
      ),
    );
    children.push(group);
  }
  return el(
    "svg",
    {
      viewBox: `0 0 ${layout.width} ${layout.height}`,
      width: layout.width,
      height: layout.height,
      class: "pedigree" + (state.stale ? " stale" : ""),
    },
    ...children,
  );
}

export function renderFallbackList(state: ViewState): VNode {
  const rows = (state.pedigree?.persons ?? []).map((p) => {
    const posterior = state.smooth?.posteriors?.[p.id];
    const carrier = posterior
      ? carrierProbability(state.pattern, posterior).toFixed(3)
      : "–";
    return el(
      "li",
      { "data-person": p.id },
      `${p.id} (${p.sex}, ${p.phenotype}) carrier: ${carrier}`,
    );
  });
  return el("ul", { class: "pedigree-fallback" }, ...rows);
}

export function renderPredictionPanel(state: ViewState): VNode {
  const prediction: PredictResponse | null = state.prediction;
  if (!prediction) {
    return el("div", { class: "prediction empty" }, "No prediction yet.");
  }
  const bars: VNode[] = [];
  for (const pattern of PATTERNS) {
    const raw = prediction.log_marginals[pattern];
    const impossible = isImpossible(raw);
    const share = prediction.posterior?.[pattern] ?? 0;
    const height = Math.max(2, Math.round(100 * share));
    const classes = ["bar"];
    if (impossible) classes.push("impossible");
    if (prediction.predicted === pattern) classes.push("winner");
    bars.push(
      el(
        "div",
        { class: classes.join(" "), "data-pattern": pattern },
        el("div", {
          class: "bar-fill",
          style: `height:${height}px`,
          "data-share": share.toFixed(6),
        }),
        el(
          "div",
          { class: "bar-label" + (impossible ? " struck" : "") },
          impossible ? `${pattern} (impossible)` : `${pattern} ${(100 * share).toFixed(1)}%`,
        ),
      ),
    );
  }
  const chip = prediction.error
    ? el("span", { class: "chip impossible" }, "impossible")
    : prediction.confident
      ? el("span", { class: "chip confident" }, "confident")
      : el("span", { class: "chip inconclusive" }, "inconclusive");
  return el(
    "div",
    { class: "prediction" + (state.stale ? " stale" : "") },
    el("div", { class: "bars" }, ...bars),
    el(
      "div",
      { class: "verdict" },
      prediction.predicted ? `prediction: ${prediction.predicted} ` : "no prediction ",
      chip,
    ),
  );
}

export function renderBanner(state: ViewState): VNode | null {
  if (state.banner) {
    return el("div", { class: "banner impossible" }, state.banner);
  }
  if (state.error) {
    return el(
      "div",
      { class: "banner error" },
      `request failed: ${state.error} `,
      el("button", { class: "retry", "data-action": "retry" }, "retry"),
    );
  }
  return null;
}

export function patternTabs(active: PatternName): VNode {
  return el(
    "div",
    { class: "tabs" },
    ...PATTERNS.map((p) =>
      el(
        "button",
        {
          class: "tab" + (p === active ? " active" : ""),
          "data-pattern": p,
        },
        p,
      ),
    ),
  );
}

export function formatLogMarginal(state: ViewState): string {
  if (!state.smooth) return "";
  const value = fromWire(state.smooth.log_marginal);
  if (value === -Infinity) return "log P = -inf (impossible)";
  return `log P = ${value.toFixed(4)} (audit spread ${state.smooth.audit.anchor_spread.toExponential(1)})`;
}
