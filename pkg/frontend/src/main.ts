/** DOM wiring: rendering into the page and translating events into state
 * transitions plus API request pairs. All inference numbers on screen come
 * from the service responses held in the view state.
 */

import { Client } from "./api.js";
import { evidenceDocument } from "./genetics.js";
import { computeLayout, type Layout } from "./layout.js";
import {
  RequestCoordinator,
  applyFailure,
  applyResponses,
  clearEvidence,
  initialState,
  toggleEvidence,
  validLabels,
  withPattern,
  withPedigree,
  type ViewState,
} from "./state.js";
import {
  formatLogMarginal,
  patternTabs,
  renderBanner,
  renderPedigree,
  renderPredictionPanel,
  toMarkup,
  type VNode,
} from "./render.js";
import type { PatternName, PedigreeDoc, PersonDoc, UnionDoc } from "./types.js";

const client = new Client({
  baseUrl: (window as { PEDIGREE_API?: string }).PEDIGREE_API ??
    `http://${location.hostname || "127.0.0.1"}:8000`,
});

let state: ViewState = initialState();
let selectedPerson: string | null = null;

const coordinator = new RequestCoordinator((seq) => {
  const pedigree = state.pedigree;
  if (!pedigree) return;
  const evidence = evidenceDocument(state.evidence);
  Promise.all([
    client.smooth(pedigree, state.pattern, evidence, state.seed),
    client.predict(pedigree, evidence, state.pattern, state.seed),
  ])
    .then(([smooth, prediction]) => {
      if (coordinator.settle(seq)) {
        state = applyResponses(state, smooth, prediction);
        render();
      }
    })
    .catch((err: unknown) => {
      coordinator.settle(seq);
      state = applyFailure(state, err instanceof Error ? err.message : String(err));
      render();
    });
});

function refresh(): void {
  state = { ...state, stale: true };
  render();
  coordinator.request();
}

// ----------------------------------------------------------------------
// sample family shown before any file is loaded

const SAMPLE: PedigreeDoc = {
  persons: [
    { id: "gm", sex: "female", phenotype: "unobserved" },
    { id: "gf", sex: "male", phenotype: "unaffected" },
    { id: "mother", sex: "female", phenotype: "unobserved" },
    { id: "father", sex: "male", phenotype: "unaffected" },
    { id: "son_a", sex: "male", phenotype: "affected" },
    { id: "son_b", sex: "male", phenotype: "unaffected" },
    { id: "daughter", sex: "female", phenotype: "unobserved" },
    { id: "uncle", sex: "male", phenotype: "affected" },
  ],
  unions: [
    { id: "e0", mother: "gm", father: "gf", children: ["mother", "uncle"] },
    {
      id: "e1",
      mother: "mother",
      father: "father",
      children: ["son_a", "son_b", "daughter"],
    },
  ],
};

// ----------------------------------------------------------------------
// rendering

function evidencePanel(): VNode {
  const panel: VNode = { tag: "div", attrs: { class: "evidence-panel" }, children: [] };
  if (!selectedPerson || !state.pedigree) {
    panel.children.push("Select a person to set hypothetical evidence.");
    return panel;
  }
  const labels = validLabels(state, selectedPerson);
  const active = new Set(state.evidence[selectedPerson] ?? []);
  panel.children.push({
    tag: "div",
    attrs: { class: "evidence-title" },
    children: [`${selectedPerson}: allowed genotypes`],
  });
  for (const label of labels) {
    panel.children.push({
      tag: "label",
      attrs: { class: "evidence-option" },
      children: [
        {
          tag: "input",
          attrs: {
            type: "checkbox",
            "data-evidence": `${selectedPerson}:${label}`,
            ...(active.has(label) ? { checked: "checked" } : {}),
          },
          children: [],
        },
        ` ${label}`,
      ],
    });
  }
  panel.children.push({
    tag: "button",
    attrs: { class: "clear", "data-action": "clear-evidence" },
    children: ["clear all evidence"],
  });
  return panel;
}

function render(): void {
  const app = document.getElementById("app");
  if (!app) return;
  let layout: Layout | null = null;
  if (state.pedigree) {
    try {
      layout = computeLayout(state.pedigree);
    } catch {
      layout = null; // fallback listing takes over
    }
  }
  const banner = renderBanner(state);
  const pieces: string[] = [];
  pieces.push(toMarkup(patternTabs(state.pattern)));
  if (banner) pieces.push(toMarkup(banner));
  pieces.push(`<div class="status">${formatLogMarginal(state)}</div>`);
  pieces.push('<div class="columns"><div class="diagram">');
  pieces.push(toMarkup(renderPedigree(state, layout)));
  pieces.push('</div><div class="sidebar">');
  pieces.push(toMarkup(renderPredictionPanel(state)));
  pieces.push(toMarkup(evidencePanel()));
  pieces.push("</div></div>");
  app.innerHTML = pieces.join("");
}

// ----------------------------------------------------------------------
// event delegation

function onClick(event: MouseEvent): void {
  const target = event.target as HTMLElement;
  const personEl = target.closest("[data-person]");
  if (personEl) {
    selectedPerson = personEl.getAttribute("data-person");
    render();
    return;
  }
  const tab = target.closest(".tab");
  if (tab) {
    state = withPattern(state, tab.getAttribute("data-pattern") as PatternName);
    refresh();
    return;
  }
  const action = target.closest("[data-action]")?.getAttribute("data-action");
  if (action === "clear-evidence") {
    state = clearEvidence(state);
    refresh();
  } else if (action === "retry") {
    refresh();
  }
}

function onChange(event: Event): void {
  const target = event.target as HTMLInputElement;
  const spec = target.getAttribute("data-evidence");
  if (spec) {
    const [pid, label] = spec.split(":");
    state = toggleEvidence(state, pid, label);
    refresh();
  }
}

// ----------------------------------------------------------------------
// toolbar: load/save/session export, seed, editing

function downloadJson(name: string, payload: unknown): void {
  const blob = new Blob([JSON.stringify(payload, null, 1)], {
    type: "application/json",
  });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = name;
  a.click();
  URL.revokeObjectURL(a.href);
}

function sessionDocument(): unknown {
  return {
    pedigree: state.pedigree,
    pattern: state.pattern,
    evidence: evidenceDocument(state.evidence),
    seed: state.seed,
    samples: client.samples,
    strength: client.strength,
  };
}

function loadPedigree(doc: PedigreeDoc): void {
  client
    .validate(doc)
    .then(({ violations }) => {
      const errors = violations.filter((v) => v.severity === "error");
      if (errors.length) {
        state = applyFailure(state, errors.map((v) => v.message).join("; "));
        render();
        return;
      }
      selectedPerson = null;
      state = withPedigree(state, doc);
      refresh();
    })
    .catch((err: unknown) => {
      state = applyFailure(state, err instanceof Error ? err.message : String(err));
      render();
    });
}

function wireToolbar(): void {
  const fileInput = document.getElementById("file") as HTMLInputElement | null;
  fileInput?.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    file.text().then((text) => loadPedigree(JSON.parse(text) as PedigreeDoc));
  });
  document.getElementById("sample")?.addEventListener("click", () => {
    loadPedigree(structuredClone(SAMPLE));
  });
  document.getElementById("save")?.addEventListener("click", () => {
    if (state.pedigree) downloadJson("pedigree.json", state.pedigree);
  });
  document.getElementById("session")?.addEventListener("click", () => {
    downloadJson("session.json", sessionDocument());
  });
  const seedInput = document.getElementById("seed") as HTMLInputElement | null;
  seedInput?.addEventListener("change", () => {
    state = { ...state, seed: Number(seedInput.value) || 0 };
    refresh();
  });
  document.getElementById("add-person")?.addEventListener("click", () => {
    if (!state.pedigree) return;
    const id = prompt("new person id?");
    if (!id || state.pedigree.persons.some((p) => p.id === id)) return;
    const sex = (prompt("sex (female/male/unknown)?", "unknown") ||
      "unknown") as PersonDoc["sex"];
    const phenotype = (prompt(
      "phenotype (affected/unaffected/unobserved)?",
      "unobserved",
    ) || "unobserved") as PersonDoc["phenotype"];
    const doc = structuredClone(state.pedigree);
    doc.persons.push({ id, sex, phenotype });
    loadPedigree(doc);
  });
  document.getElementById("add-union")?.addEventListener("click", () => {
    if (!state.pedigree) return;
    const mother = prompt("mother id?");
    const father = prompt("father id?");
    const children = prompt("children ids (comma separated)?");
    if (!mother || !father || !children) return;
    const doc = structuredClone(state.pedigree);
    const union: UnionDoc = {
      id: `e${doc.unions.length}_${Date.now() % 1000}`,
      mother,
      father,
      children: children.split(",").map((s) => s.trim()).filter(Boolean),
    };
    doc.unions.push(union);
    loadPedigree(doc);
  });
  document.getElementById("remove")?.addEventListener("click", () => {
    if (!state.pedigree || !selectedPerson) return;
    const doc = structuredClone(state.pedigree);
    doc.persons = doc.persons.filter((p) => p.id !== selectedPerson);
    doc.unions = doc.unions
      .filter((u) => u.mother !== selectedPerson && u.father !== selectedPerson)
      .map((u) => ({
        ...u,
        children: u.children.filter((c) => c !== selectedPerson),
      }))
      .filter((u) => u.children.length > 0);
    selectedPerson = null;
    loadPedigree(doc);
  });
}

// ----------------------------------------------------------------------

export function start(): void {
  const app = document.getElementById("app");
  if (!app) return;
  app.addEventListener("click", onClick);
  app.addEventListener("change", onChange);
  wireToolbar();
  client.health().then((ok) => {
    const status = document.getElementById("health");
    if (status) status.textContent = ok ? "service: connected" : "service: offline";
  });
  render();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
