// Keyword selection: IPA brushing with color-coded underlines, the
// depth-capped brainstorming tree, and batches of four keyword cards with
// hover-revealed reasoning.

import type { App } from "../app";
import { el, paletteColor } from "../dom";
import type { SegmentView, SemanticNodeView } from "../types";

function segmentFor(app: App, index: number): SegmentView | undefined {
  return app.session?.segments.find((s) => s.start <= index && index < s.end);
}

function renderIpaRow(app: App): HTMLElement {
  const session = app.session!;
  const row = el("div", { class: "ipa-row", id: "ipa-row" });
  session.phonemes.forEach((token, index) => {
    const segment = segmentFor(app, index);
    const span = el("span", {
      class: "ipa-token",
      "data-index": String(index),
      text: token,
      onmousedown: (event) => {
        event.preventDefault();
        app.brushAnchor = index;
      },
      onmouseup: () => {
        if (app.brushAnchor === null) return;
        const start = Math.min(app.brushAnchor, index);
        const end = Math.max(app.brushAnchor, index) + 1;
        app.brushAnchor = null;
        app.run(async () => {
          await app.api.brushSegment(session.session_id, start, end);
          await app.sync();
        });
      },
    });
    if (segment) {
      span.style.borderBottom = `3px solid ${paletteColor(segment.color_index)}`;
    }
    row.append(span);
  });
  return row;
}

function chainNodeIds(app: App): string[] {
  // The learner's preferred chain: the path from the anchor down to the most
  // recently checked node.
  const last = app.checkedNodes[app.checkedNodes.length - 1];
  if (!last || !app.session) return [];
  const byId = new Map(app.session.tree.nodes.map((n) => [n.node_id, n]));
  const path: string[] = [];
  let cursor: SemanticNodeView | undefined = byId.get(last);
  while (cursor) {
    path.unshift(cursor.node_id);
    cursor = cursor.parent_id ? byId.get(cursor.parent_id) : undefined;
  }
  return path;
}

function renderTree(app: App): HTMLElement {
  const session = app.session!;
  const tree = el("div", { class: "tree", id: "semantic-tree" });
  for (const anchor of session.tree.anchors) {
    const block = el("div", { class: "tree-anchor", "data-anchor": anchor.anchor_id });
    block.append(
      el("div", { class: "anchor-head" }, [
        el("strong", { text: anchor.concept }),
        el("span", { class: "anchor-kind", text: anchor.kind }),
        el(
          "button",
          {
            class: "suggest-tree",
            "data-anchor": anchor.anchor_id,
            onclick: () =>
              app.run(async () => {
                const { suggestions } = await app.api.suggestTreeNodes(
                  session.session_id,
                  anchor.anchor_id,
                );
                app.treeSuggestions[anchor.anchor_id] = suggestions;
                app.render();
              }),
          },
          ["Inspire"],
        ),
      ]),
    );

    const nodes = session.tree.nodes.filter((n) => n.anchor_id === anchor.anchor_id);
    for (const node of nodes) {
      const checkbox = el("input", {
        type: "checkbox",
        class: "node-check",
        "data-node": node.node_id,
        onchange: (event) => {
          const checked = (event.target as HTMLInputElement).checked;
          app.checkedNodes = app.checkedNodes.filter((id) => id !== node.node_id);
          if (checked) app.checkedNodes.push(node.node_id);
        },
      }) as HTMLInputElement;
      checkbox.checked = app.checkedNodes.includes(node.node_id);
      block.append(
        el("div", { class: `tree-node depth-${node.depth}`, "data-node": node.node_id }, [
          checkbox,
          el("span", {
            class: "node-concept",
            text: node.translation ? `${node.concept} (${node.translation})` : node.concept,
            title: node.cue,
          }),
          el("span", { class: `origin origin-${node.origin}`, text: node.origin }),
        ]),
      );
    }

    const pending = app.treeSuggestions[anchor.anchor_id] ?? [];
    if (pending.length) {
      const list = el("div", { class: "tree-suggestions" });
      for (const suggestion of pending) {
        list.append(
          el("span", { class: "suggestion-chip" }, [
            suggestion.translation
              ? `${suggestion.concept} (${suggestion.translation})`
              : suggestion.concept,
            el(
              "button",
              {
                class: "accept-suggestion",
                "data-concept": suggestion.concept,
                onclick: () =>
                  app.run(async () => {
                    await app.api.addTreeNode(session.session_id, {
                      anchor_id: anchor.anchor_id,
                      concept: suggestion.concept,
                      cue: suggestion.cue,
                      translation: suggestion.translation,
                      origin: "suggested",
                    });
                    app.treeSuggestions[anchor.anchor_id] = pending.filter(
                      (s) => s.concept !== suggestion.concept,
                    );
                    await app.sync();
                  }),
              },
              ["accept"],
            ),
            el(
              "button",
              {
                class: "dismiss-suggestion",
                onclick: () => {
                  app.treeSuggestions[anchor.anchor_id] = pending.filter(
                    (s) => s.concept !== suggestion.concept,
                  );
                  app.render();
                },
              },
              ["x"],
            ),
          ]),
        );
      }
      block.append(list);
    }

    const conceptInput = el("input", {
      class: "new-concept",
      placeholder: "your own idea...",
    }) as HTMLInputElement;
    block.append(
      el("div", { class: "add-node-row" }, [
        conceptInput,
        el(
          "button",
          {
            class: "add-node",
            "data-anchor": anchor.anchor_id,
            onclick: () => {
              const concept = conceptInput.value.trim();
              if (!concept) return;
              app.run(async () => {
                await app.api.addTreeNode(session.session_id, {
                  anchor_id: anchor.anchor_id,
                  concept,
                });
                await app.sync();
              });
            },
          },
          ["Add"],
        ),
      ]),
    );
    tree.append(block);
  }
  return tree;
}

function renderSegments(app: App): HTMLElement {
  const session = app.session!;
  const wrap = el("div", { class: "segments", id: "segments" });
  for (const segment of session.segments) {
    const ipa = session.phonemes.slice(segment.start, segment.end).join("");
    const block = el("div", {
      class: "segment-block",
      "data-segment": segment.segment_id,
    });
    const choice = session.keyword_choices.find((c) => c.segment_id === segment.segment_id);
    block.append(
      el("div", { class: "segment-head" }, [
        el("span", {
          class: "segment-swatch",
          text: `/${ipa}/`,
        }),
        choice
          ? el("span", {
              class: "segment-choice",
              text: `keyword: ${choice.keyword} (${choice.explanation})`,
            })
          : el("span", { class: "segment-choice none", text: "no keyword yet" }),
        el(
          "button",
          {
            class: "suggest-keywords",
            "data-segment": segment.segment_id,
            onclick: () =>
              app.run(async () => {
                const batch = await app.api.suggestKeywords(
                  session.session_id,
                  segment.segment_id,
                  app.checkedNodes,
                );
                app.batches[segment.segment_id] = batch;
                app.render();
              }),
          },
          ["Suggest keywords"],
        ),
      ]),
    );
    const swatch = block.querySelector(".segment-swatch") as HTMLElement;
    swatch.style.borderBottom = `3px solid ${paletteColor(segment.color_index)}`;

    const batch = app.batches[segment.segment_id];
    if (batch) {
      const cardsRow = el("div", { class: "cards-row" });
      for (const card of batch.cards) {
        cardsRow.append(
          el(
            "div",
            { class: "keyword-card", "data-card": card.card_id, title: card.reasoning },
            [
              el("div", { class: "card-keyword", text: card.keyword }),
              el("div", { class: "card-explanation", text: card.explanation }),
              el(
                "button",
                {
                  class: "select-card",
                  "data-card": card.card_id,
                  onclick: () =>
                    app.run(async () => {
                      await app.api.selectKeyword(session.session_id, segment.segment_id, {
                        card_id: card.card_id,
                        chain_node_ids: chainNodeIds(app),
                      });
                      await app.sync();
                    }),
                },
                ["Select"],
              ),
            ],
          ),
        );
      }
      block.append(cardsRow);
    }

    const keywordInput = el("input", {
      class: "own-keyword",
      placeholder: "keyword",
    }) as HTMLInputElement;
    const explanationInput = el("input", {
      class: "own-explanation",
      placeholder: "why it fits",
    }) as HTMLInputElement;
    block.append(
      el("div", { class: "own-keyword-row" }, [
        keywordInput,
        explanationInput,
        el(
          "button",
          {
            class: "select-own",
            "data-segment": segment.segment_id,
            onclick: () => {
              const keyword = keywordInput.value.trim();
              if (!keyword) return;
              app.run(async () => {
                await app.api.selectKeyword(session.session_id, segment.segment_id, {
                  keyword,
                  explanation: explanationInput.value.trim(),
                  chain_node_ids: chainNodeIds(app),
                });
                await app.sync();
              });
            },
          },
          ["Use my keyword"],
        ),
      ]),
    );
    wrap.append(block);
  }
  return wrap;
}

export function renderKeywords(app: App): HTMLElement {
  if (!app.session) return el("section", { class: "panel", text: "no active session" });
  const panel = el("section", { class: "panel keywords" });
  panel.append(el("h2", { text: "Phonological segments" }));
  panel.append(renderIpaRow(app));
  panel.append(
    el(
      "button",
      {
        id: "clear-segments",
        onclick: () =>
          app.run(async () => {
            await app.api.clearSegments(app.session!.session_id);
            await app.sync();
          }),
      },
      ["Clear segments"],
    ),
  );
  panel.append(renderSegments(app));
  panel.append(el("h2", { text: "Semantic brainstorming" }));
  panel.append(renderTree(app));
  return panel;
}
