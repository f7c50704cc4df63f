// Word overview: search, definitions, phonetic transcription, examples,
// and the per-sense entry point that anchors a learning session.

import type { App } from "../app";
import { el } from "../dom";

export function renderOverview(app: App): HTMLElement {
  const panel = el("section", { class: "panel overview" });

  const input = el("input", {
    id: "word-search",
    placeholder: "search a word...",
    value: app.searchQuery,
    oninput: (event) => {
      app.searchQuery = (event.target as HTMLInputElement).value;
    },
  }) as HTMLInputElement;
  input.value = app.searchQuery;
  const searchButton = el(
    "button",
    {
      id: "word-search-btn",
      onclick: () =>
        app.run(async () => {
          app.searchResults = (await app.api.searchWords(app.searchQuery)).words;
          app.render();
        }),
    },
    ["Search"],
  );
  panel.append(el("div", { class: "search-row" }, [input, searchButton]));

  const results = el("div", { class: "search-results", id: "search-results" });
  for (const word of app.searchResults) {
    const senses = word.senses.map((sense) =>
      el("div", { class: "sense-row" }, [
        el("span", { class: "sense-gloss", text: `${sense.gloss_l1} · ${sense.gloss_l2}` }),
        el(
          "button",
          {
            class: "start-sense",
            "data-word": word.word_id,
            "data-sense": sense.sense_id,
            onclick: () => app.run(() => app.startSession(word.word_id, sense.sense_id)),
          },
          ["Learn this meaning"],
        ),
      ]),
    );
    results.append(
      el("div", { class: "word-result" }, [
        el("h3", { text: `${word.surface} /${word.phonemes.join("")}/` }),
        ...senses,
      ]),
    );
  }
  panel.append(results);

  if (app.session) {
    const session = app.session;
    panel.append(
      el("div", { class: "word-card-info", id: "active-word" }, [
        el("h2", { text: session.surface }),
        el("p", { class: "ipa", text: `/${session.phonemes.join(" ")}/` }),
        el("p", { class: "gloss", text: session.sense_gloss }),
        el("p", {
          class: "hint-text",
          text: "Move to Keyword Selection to brush the transcription and pick keywords.",
        }),
      ]),
    );
  }
  return panel;
}
