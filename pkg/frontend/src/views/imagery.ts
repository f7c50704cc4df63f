// Imagery canvas: recall path with live activation, the five canvas tools,
// bounding-box elements drawn as concept-colored pies, layout-guided
// generation behind the completeness gate, and card recording.

import type { App, CanvasTool } from "../app";
import { el, paletteColor } from "../dom";
import type { ElementView } from "../types";

const TOOLS: CanvasTool[] = ["select", "add", "associate", "delete", "inspire"];

const LOGICAL_WIDTH = 800;
const LOGICAL_HEIGHT = 600;

function canvasPoint(canvas: HTMLElement, event: MouseEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  const width = rect.width || LOGICAL_WIDTH;
  const height = rect.height || LOGICAL_HEIGHT;
  return {
    x: Math.min(1, Math.max(0, (event.clientX - rect.left) / width)),
    y: Math.min(1, Math.max(0, (event.clientY - rect.top) / height)),
  };
}

function renderRecallPath(app: App): HTMLElement {
  const recall = app.recall;
  const wrap = el("div", { class: "recall-path", id: "recall-path" });
  if (!recall) return wrap;
  const nodeRow = el("div", { class: "recall-nodes" });
  for (const node of recall.nodes) {
    const chip = el("span", {
      class: `recall-node${node.active ? " active" : " inactive"}`,
      "data-node": node.node_id,
      text: node.label,
    });
    chip.style.borderColor = paletteColor(node.color_index);
    nodeRow.append(chip);
  }
  const linkRow = el("div", { class: "recall-links" });
  for (const link of recall.links) {
    linkRow.append(
      el("span", {
        class: `recall-link${link.active ? " active" : " inactive"}`,
        "data-link": link.link_id,
        text: `${app.nodeLabel(link.endpoints[0])} – ${app.nodeLabel(link.endpoints[1])}`,
      }),
    );
  }
  wrap.append(el("h3", { text: "Recall path" }), nodeRow, linkRow);
  return wrap;
}

function pieBackground(app: App, element: ElementView): string {
  const colors = element.tags.map((tag) => {
    const node = app.session!.map.nodes.find((n) => n.node_id === tag);
    return paletteColor(node ? node.color_index : 0);
  });
  if (colors.length === 1) return colors[0];
  const step = 360 / colors.length;
  const stops = colors
    .map((color, i) => `${color} ${i * step}deg ${(i + 1) * step}deg`)
    .join(", ");
  return `conic-gradient(${stops})`;
}

function handleElementClick(app: App, element: ElementView): void {
  const session = app.session!;
  switch (app.tool) {
    case "select":
      app.selectedElement = element.element_id;
      app.render();
      break;
    case "delete":
      app.run(async () => {
        await app.api.deleteElement(session.session_id, element.element_id);
        if (app.selectedElement === element.element_id) app.selectedElement = null;
        await app.sync();
      });
      break;
    case "associate":
      if (app.assocFirst === null) {
        app.assocFirst = element.element_id;
        app.render();
      } else if (app.assocFirst !== element.element_id) {
        app.relationDraft = { a: app.assocFirst, b: element.element_id };
        app.relationDraftText = "";
        app.relationSuggestions = [];
        app.assocFirst = null;
        app.render();
      }
      break;
    case "inspire":
      app.selectedElement = element.element_id;
      app.run(async () => {
        app.elementSuggestions = (
          await app.api.suggestElements(session.session_id, element.tags)
        ).suggestions;
        app.render();
      });
      break;
    case "add":
      break;
  }
}

function renderCanvas(app: App): HTMLElement {
  const session = app.session!;
  const canvas = el("div", { class: "canvas", id: "canvas" });
  canvas.addEventListener("mousedown", (event) => {
    if (app.tool !== "add") return;
    app.dragStart = canvasPoint(canvas, event as MouseEvent);
  });
  canvas.addEventListener("mouseup", (event) => {
    if (app.tool !== "add" || !app.dragStart) return;
    const start = app.dragStart;
    const end = canvasPoint(canvas, event as MouseEvent);
    app.dragStart = null;
    const bbox = {
      x: Math.min(start.x, end.x),
      y: Math.min(start.y, end.y),
      w: Math.abs(end.x - start.x),
      h: Math.abs(end.y - start.y),
    };
    if (bbox.w < 0.01 || bbox.h < 0.01) return;
    app.elementDraft = bbox;
    app.draftTags = new Set();
    app.draftDescription = "";
    app.elementSuggestions = [];
    app.render();
  });

  for (const element of session.canvas.elements) {
    const div = el("div", {
      class: `canvas-element${app.selectedElement === element.element_id ? " selected" : ""}${
        app.assocFirst === element.element_id ? " pending-assoc" : ""
      }`,
      "data-element": element.element_id,
      title: element.description,
      onclick: () => handleElementClick(app, element),
    });
    div.style.left = `${element.bbox.x * 100}%`;
    div.style.top = `${element.bbox.y * 100}%`;
    div.style.width = `${element.bbox.w * 100}%`;
    div.style.height = `${element.bbox.h * 100}%`;
    div.style.background = pieBackground(app, element);
    div.append(
      el("span", {
        class: "element-label",
        text: element.tags.map((t) => app.nodeLabel(t)).join(" + "),
      }),
    );
    canvas.append(div);
  }
  return canvas;
}

function renderElementDialog(app: App): HTMLElement | null {
  if (!app.elementDraft) return null;
  const session = app.session!;
  const draft = app.elementDraft;
  const tagBoxes = session.map.nodes.map((node) => {
    const checkbox = el("input", {
      type: "checkbox",
      class: "draft-tag",
      "data-node": node.node_id,
      onchange: (event) => {
        if ((event.target as HTMLInputElement).checked) app.draftTags.add(node.node_id);
        else app.draftTags.delete(node.node_id);
      },
    }) as HTMLInputElement;
    checkbox.checked = app.draftTags.has(node.node_id);
    return el("label", { class: "tag-option" }, [checkbox, node.label]);
  });
  const description = el("textarea", {
    id: "element-desc",
    placeholder: "describe what to draw here...",
    oninput: (event) => {
      app.draftDescription = (event.target as HTMLTextAreaElement).value;
    },
  }) as HTMLTextAreaElement;
  description.value = app.draftDescription;

  return el("div", { class: "dialog", id: "element-dialog" }, [
    el("h3", { text: "Image content" }),
    el("div", { class: "tag-options" }, tagBoxes),
    description,
    el(
      "button",
      {
        id: "element-inspire",
        onclick: () => {
          const tags = [...app.draftTags];
          if (!tags.length) return;
          app.run(async () => {
            app.elementSuggestions = (
              await app.api.suggestElements(session.session_id, tags)
            ).suggestions;
            app.render();
          });
        },
      },
      ["Inspire"],
    ),
    el(
      "div",
      { class: "element-suggestions", id: "element-suggestions" },
      app.elementSuggestions.map((s) =>
        el("button", {
          class: "suggestion-chip",
          text: s,
          onclick: () => {
            app.draftDescription = app.draftDescription ? `${app.draftDescription}, ${s}` : s;
            app.render();
          },
        }),
      ),
    ),
    el(
      "button",
      {
        id: "element-save",
        onclick: () => {
          const tags = [...app.draftTags];
          app.run(async () => {
            await app.api.addElement(session.session_id, draft, tags, app.draftDescription);
            app.elementDraft = null;
            app.elementSuggestions = [];
            await app.sync();
          });
        },
      },
      ["Add element"],
    ),
    el(
      "button",
      {
        id: "element-cancel",
        onclick: () => {
          app.elementDraft = null;
          app.elementSuggestions = [];
          app.render();
        },
      },
      ["Cancel"],
    ),
  ]);
}

function renderRelationDialog(app: App): HTMLElement | null {
  if (!app.relationDraft) return null;
  const session = app.session!;
  const draft = app.relationDraft;
  const input = el("input", {
    id: "relation-text",
    placeholder: "how do these relate? (optional)",
    oninput: (event) => {
      app.relationDraftText = (event.target as HTMLInputElement).value;
    },
  }) as HTMLInputElement;
  input.value = app.relationDraftText;
  return el("div", { class: "dialog", id: "relation-dialog" }, [
    el("h3", { text: "Associate elements" }),
    input,
    el(
      "button",
      {
        id: "relation-inspire",
        onclick: () =>
          app.run(async () => {
            app.relationSuggestions = (
              await app.api.suggestRelations(session.session_id, draft.a, draft.b)
            ).suggestions;
            app.render();
          }),
      },
      ["Inspire"],
    ),
    el(
      "div",
      { class: "relation-suggestions", id: "relation-suggestions" },
      app.relationSuggestions.map((s) =>
        el("button", {
          class: "suggestion-chip",
          text: s,
          onclick: () => {
            app.relationDraftText = s;
            app.render();
          },
        }),
      ),
    ),
    el(
      "button",
      {
        id: "relation-save",
        onclick: () =>
          app.run(async () => {
            await app.api.addRelation(
              session.session_id,
              draft.a,
              draft.b,
              app.relationDraftText.trim(),
            );
            app.relationDraft = null;
            app.relationSuggestions = [];
            await app.sync();
          }),
      },
      ["Save relation"],
    ),
    el(
      "button",
      {
        id: "relation-cancel",
        onclick: () => {
          app.relationDraft = null;
          app.relationSuggestions = [];
          app.render();
        },
      },
      ["Cancel"],
    ),
  ]);
}

function describeElement(app: App, elementId: string): string {
  const element = app.session!.canvas.elements.find((e) => e.element_id === elementId);
  if (!element) return elementId;
  return element.tags.map((t) => app.nodeLabel(t)).join(" + ");
}

function renderRelations(app: App): HTMLElement {
  const session = app.session!;
  const list = el("div", { class: "relation-list", id: "relation-list" });
  for (const relation of session.canvas.relations) {
    list.append(
      el("div", { class: "relation-item", "data-relation": relation.relation_id }, [
        el("span", {
          text: `${describeElement(app, relation.endpoints[0])} ↔ ${describeElement(
            app,
            relation.endpoints[1],
          )}: ${relation.text || "(spatial)"}`,
        }),
        el(
          "button",
          {
            class: "delete-relation",
            onclick: () =>
              app.run(async () => {
                await app.api.deleteRelation(session.session_id, relation.relation_id);
                await app.sync();
              }),
          },
          ["delete"],
        ),
      ]),
    );
  }
  return list;
}

function missingTooltip(app: App): string {
  const recall = app.recall;
  if (!recall || recall.is_complete) return "";
  const parts: string[] = [];
  for (const label of recall.missing_nodes) parts.push(`node ${label}`);
  for (const [a, b] of recall.missing_links) parts.push(`link ${a} – ${b}`);
  return `missing: ${parts.join(", ")}`;
}

function renderGenerate(app: App): HTMLElement {
  const session = app.session!;
  const complete = app.recall?.is_complete ?? false;
  const styleSelect = el("select", {
    id: "style-select",
    onchange: (event) => {
      app.selectedStyle = (event.target as HTMLSelectElement).value;
    },
  }) as HTMLSelectElement;
  for (const [styleId, phrase] of Object.entries(app.styles)) {
    const option = el("option", { value: styleId, text: phrase }) as HTMLOptionElement;
    option.selected = styleId === app.selectedStyle;
    styleSelect.append(option);
  }

  const generate = el(
    "button",
    {
      id: "generate-btn",
      disabled: !complete || app.jobPending,
      title: complete ? "" : missingTooltip(app),
      onclick: () =>
        app.run(async () => {
          app.jobPending = true;
          app.render();
          try {
            let job = await app.api.startImage(session.session_id, app.selectedStyle);
            while (job.status === "pending") {
              await new Promise((resolve) => setTimeout(resolve, app.pollIntervalMs));
              job = await app.api.job(job.job_id);
            }
            if (job.status === "failed" && job.error) {
              app.lastError = `${job.error.code}: ${job.error.message}`;
            }
          } finally {
            app.jobPending = false;
          }
          await app.sync();
        }),
    },
    [app.jobPending ? "Generating..." : "Generate image"],
  );

  const record = el(
    "button",
    {
      id: "record-btn",
      disabled: session.images.length === 0,
      onclick: () =>
        app.run(async () => {
          await app.api.recordCard(session.session_id);
          app.cards = (await app.api.cards()).cards;
          app.view = "gallery";
          await app.sync();
        }),
    },
    ["Record word card"],
  );

  const row = el("div", { class: "generate-row" }, [styleSelect, generate, record]);
  const latest = session.images[session.images.length - 1];
  if (latest) {
    row.append(
      el("img", {
        id: "generated-image",
        class: "generated-image",
        src: `${app.api.baseUrl}/${latest.image_ref}`,
        alt: `generated scene (${latest.style})`,
      }),
    );
  }
  return row;
}

export function renderImagery(app: App): HTMLElement {
  if (!app.session) return el("section", { class: "panel", text: "no active session" });
  const panel = el("section", { class: "panel imagery" });
  panel.append(renderRecallPath(app));

  const toolbar = el("div", { class: "toolbar", id: "toolbar" });
  for (const tool of TOOLS) {
    toolbar.append(
      el(
        "button",
        {
          class: `tool${app.tool === tool ? " active" : ""}`,
          id: `tool-${tool}`,
          onclick: () => {
            app.tool = tool;
            app.assocFirst = null;
            app.render();
          },
        },
        [tool],
      ),
    );
  }
  panel.append(toolbar);
  panel.append(renderCanvas(app));
  const elementDialog = renderElementDialog(app);
  if (elementDialog) panel.append(elementDialog);
  const relationDialog = renderRelationDialog(app);
  if (relationDialog) panel.append(relationDialog);
  panel.append(el("h3", { text: "Relations" }));
  panel.append(renderRelations(app));
  panel.append(renderGenerate(app));
  return panel;
}
