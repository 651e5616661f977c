// All worker-facing copy in one table so experiment wording is easy to tweak.

import type { CheckCode, Condition } from "./types";

export const SECTION_HEADINGS: Record<Condition, Partial<Record<string, string>>> = {
  baseline: {},
  word_recommend: { words: "Suggested words (optional)" },
  taboo_words: { taboo: "Forbidden words" },
  patterns_by_example: { examples: "Example rewordings for inspiration" },
  patterns_by_example_constrained: {
    examples: "Shape your sentences like these examples",
  },
  taboo_patterns: { examples: "Avoid the sentence shape of these examples" },
  patterns_by_words: { words: "Use all of these words" },
  patterns_fill_blanks: { blanks: "Fill in the blanks" },
};

export const CHECK_MESSAGES: Record<CheckCode, string> = {
  copy_of_example: "Too similar to an example or the original sentence.",
  duplicate: "Duplicate of a paraphrase we already have.",
  gibberish: "This does not look like a real sentence.",
  taboo_word_present: "Uses a forbidden word.",
  required_word_missing: "A required word is missing.",
  blank_mismatch: "The fixed words must stay in their given positions.",
  pattern_not_in_targets: "The sentence structure does not match any example.",
  pattern_in_taboo: "The sentence structure matches a forbidden example.",
  pattern_unknown: "Structure will be reviewed after submission.",
};

export const RETRY_MESSAGE = "Could not reach the server; will retry.";
export const DONE_MESSAGE = "All done. No more tasks for you right now.";
export const EXPIRED_MESSAGE = "This task expired; fetching a fresh one.";
