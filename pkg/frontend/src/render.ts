// Prompt rendering: a pure function of the PromptSpec, so identical specs
// produce identical DOM (snapshot-tested).

import { SECTION_HEADINGS } from "./messages";
import type { PromptSpec } from "./types";

const KNOWN_CONDITIONS = new Set([
  "baseline",
  "word_recommend",
  "taboo_words",
  "patterns_by_example",
  "patterns_by_example_constrained",
  "taboo_patterns",
  "patterns_by_words",
  "patterns_fill_blanks",
]);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function section(heading: string, className: string): HTMLElement {
  const box = el("section", className);
  box.appendChild(el("h3", "section-heading", heading));
  return box;
}

export function renderPrompt(prompt: PromptSpec): HTMLElement {
  if (!KNOWN_CONDITIONS.has(prompt.condition)) {
    const panel = el("div", "error-panel");
    panel.appendChild(el("p", "error-text", `Unknown task type: ${prompt.condition}`));
    return panel;
  }

  const root = el("div", `prompt prompt-${prompt.condition}`);
  root.appendChild(el("p", "instructions", prompt.instructions));

  const seedBox = el("div", "seed");
  seedBox.appendChild(el("span", "seed-label", "Original sentence:"));
  seedBox.appendChild(el("blockquote", "seed-text", prompt.seed.text));
  root.appendChild(seedBox);

  const headings = SECTION_HEADINGS[prompt.condition];

  if (prompt.examples.length > 0 && headings.examples) {
    const box = section(headings.examples, "examples");
    const list = el("ul", "example-list");
    for (const example of prompt.examples) {
      list.appendChild(el("li", "example", example));
    }
    box.appendChild(list);
    root.appendChild(box);
  }

  if (prompt.words.length > 0 && headings.words) {
    const box = section(headings.words, "words");
    for (const word of prompt.words) {
      box.appendChild(el("span", "chip word-chip", word));
    }
    root.appendChild(box);
  }

  if (prompt.condition === "taboo_words" && prompt.taboo.length > 0 && headings.taboo) {
    const box = section(headings.taboo, "taboo warning");
    for (const word of prompt.taboo) {
      const chip = el("s", "chip taboo-chip", word);
      box.appendChild(chip);
    }
    root.appendChild(box);
  }

  if (prompt.condition === "patterns_fill_blanks" && prompt.blanks && headings.blanks) {
    const box = section(headings.blanks, "blanks");
    const row = el("div", "blank-row");
    prompt.blanks.forEach((slot, index) => {
      if (slot !== null) {
        const fixed = el("span", "blank-fixed", slot);
        fixed.dataset.slot = String(index);
        row.appendChild(fixed);
      } else {
        const input = el("input", "blank-free");
        input.type = "text";
        input.dataset.slot = String(index);
        row.appendChild(input);
      }
    });
    box.appendChild(row);
    root.appendChild(box);
  }

  return root;
}
