// Association map: concept nodes, links, and the right-side panel for
// chain/note editing plus indirect hint suggestions.

import type { App } from "../app";
import { el, paletteColor } from "../dom";

export function renderAssociation(app: App): HTMLElement {
  if (!app.session) return el("section", { class: "panel", text: "no active session" });
  const session = app.session;
  const panel = el("section", { class: "panel association" });

  const nodesRow = el("div", { class: "map-nodes", id: "map-nodes" });
  for (const node of session.map.nodes) {
    const chip = el("span", {
      class: `concept-chip kind-${node.kind}`,
      "data-node": node.node_id,
      text: node.label,
      onclick: () => {
        if (app.linkDraftA === null) {
          app.linkDraftA = node.node_id;
          app.render();
          return;
        }
        const first = app.linkDraftA;
        app.linkDraftA = null;
        if (first === node.node_id) {
          app.render();
          return;
        }
        app.run(async () => {
          await app.api.upsertLink(session.session_id, first, node.node_id);
          await app.sync();
        });
      },
    });
    chip.style.background = paletteColor(node.color_index);
    if (app.linkDraftA === node.node_id) chip.classList.add("pending-link");
    nodesRow.append(chip);
  }
  panel.append(el("h2", { text: "Concept nodes" }));
  panel.append(
    el("p", {
      class: "hint-text",
      text: "Click two nodes to connect them; click a link below to edit its chain and notes.",
    }),
  );
  panel.append(nodesRow);

  const linkList = el("div", { class: "link-list", id: "link-list" });
  for (const link of session.map.links) {
    const [a, b] = link.endpoints;
    const item = el(
      "div",
      {
        class: `link-item${app.selectedLink === link.link_id ? " selected" : ""}`,
        "data-link": link.link_id,
      },
      [
        el("span", {
          class: "link-title",
          text: `${app.nodeLabel(a)} ↔ ${app.nodeLabel(b)}`,
          onclick: () => {
            app.selectedLink = link.link_id;
            app.hints = [];
            app.render();
          },
        }),
        el("span", { class: "link-chain", text: link.chain.text || "(no chain yet)" }),
        el(
          "button",
          {
            class: "delete-link",
            onclick: () =>
              app.run(async () => {
                await app.api.deleteLink(session.session_id, link.link_id);
                if (app.selectedLink === link.link_id) app.selectedLink = null;
                await app.sync();
              }),
          },
          ["delete"],
        ),
      ],
    );
    linkList.append(item);
  }
  panel.append(el("h2", { text: "Association links" }));
  panel.append(linkList);

  const selected = session.map.links.find((l) => l.link_id === app.selectedLink);
  if (selected) {
    const chainInput = el("input", {
      id: "chain-input",
      placeholder: "associative chain...",
    }) as HTMLInputElement;
    chainInput.value = selected.chain.text;
    const noteInput = el("input", {
      id: "note-input",
      placeholder: "add a note...",
    }) as HTMLInputElement;

    const detail = el("div", { class: "link-detail", id: "link-detail" }, [
      el("h3", {
        text: `${app.nodeLabel(selected.endpoints[0])} ↔ ${app.nodeLabel(selected.endpoints[1])}`,
      }),
      el("div", { class: "chain-row" }, [
        chainInput,
        el(
          "button",
          {
            id: "save-chain",
            onclick: () =>
              app.run(async () => {
                await app.api.patchLink(session.session_id, selected.link_id, {
                  chain: chainInput.value,
                });
                await app.sync();
              }),
          },
          ["Save chain"],
        ),
      ]),
      el(
        "ul",
        { class: "note-list", id: "note-list" },
        selected.notes.map((note) => el("li", { class: "note-item", text: note.text })),
      ),
      el("div", { class: "note-row" }, [
        noteInput,
        el(
          "button",
          {
            id: "add-note",
            onclick: () => {
              const text = noteInput.value.trim();
              if (!text) return;
              app.run(async () => {
                await app.api.patchLink(session.session_id, selected.link_id, { note: text });
                await app.sync();
              });
            },
          },
          ["Add note"],
        ),
      ]),
      el(
        "button",
        {
          id: "link-hints",
          onclick: () =>
            app.run(async () => {
              app.hints = (await app.api.linkHints(session.session_id, selected.link_id)).hints;
              app.render();
            }),
        },
        ["Inspire"],
      ),
      el(
        "ul",
        { class: "hint-list", id: "hint-list" },
        app.hints.map((hint) => el("li", { class: "hint-item", text: hint })),
      ),
    ]);
    panel.append(detail);
  }
  return panel;
}
