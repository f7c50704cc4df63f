// Recorded word cards, newest first: word, keywords, association, image,
// and the time invested.

import type { App } from "../app";
import { el, formatDuration } from "../dom";

export function renderGallery(app: App): HTMLElement {
  const panel = el("section", { class: "panel gallery", id: "gallery" });
  panel.append(el("h2", { text: "Word cards" }));
  if (!app.cards.length) {
    panel.append(el("p", { class: "hint-text", text: "No cards recorded yet." }));
    return panel;
  }
  for (const card of app.cards) {
    const keywords = card.keywords.map((k) =>
      el("li", {
        class: "card-kw",
        text: `${k.keyword} (${k.explanation})${
          k.segment.ipa ? ` · /${k.segment.ipa}/` : ""
        }`,
      }),
    );
    const chains = card.links
      .filter((link) => link.chain)
      .map((link) =>
        el("li", {
          class: "card-chain",
          text: `${link.endpoints[0]} ↔ ${link.endpoints[1]}: ${link.chain}`,
        }),
      );
    const tile = el("div", { class: "card-tile", "data-card": card.card_id }, [
      el("h3", { class: "card-word", text: card.word }),
      el("p", { class: "card-sense", text: card.sense.gloss }),
      el("ul", { class: "card-keywords" }, keywords),
      el("ul", { class: "card-chains" }, chains),
      card.association
        ? el("p", { class: "card-association", text: card.association })
        : null,
      card.image_ref
        ? el("img", {
            class: "card-image",
            src: `${app.api.baseUrl}/cards/${card.card_id}/image`,
            alt: card.word,
          })
        : null,
      el("p", { class: "card-time", text: `time spent: ${formatDuration(card.total_active_ms)}` }),
    ]);
    panel.append(tile);
  }
  return panel;
}
