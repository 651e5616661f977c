// Wire types mirroring the task service's JSON bodies.

export type Condition =
  | "baseline"
  | "word_recommend"
  | "taboo_words"
  | "patterns_by_example"
  | "patterns_by_example_constrained"
  | "taboo_patterns"
  | "patterns_by_words"
  | "patterns_fill_blanks";

export interface SeedUtterance {
  id: string;
  intent: string;
  text: string;
  tree: string | null;
}

export interface PromptSpec {
  condition: Condition;
  seed: SeedUtterance;
  n_required: number;
  instructions: string;
  examples: string[];
  words: string[];
  /** Ordered slots: a string pins that word, null is a free input. */
  blanks: (string | null)[] | null;
  taboo: string[];
  target_patterns: string[];
}

export interface TaskAssignment {
  task_id: string;
  prompt: PromptSpec;
  expires_at: string;
  worker_id: string;
}

export type CheckCode =
  | "copy_of_example"
  | "duplicate"
  | "gibberish"
  | "taboo_word_present"
  | "required_word_missing"
  | "blank_mismatch"
  | "pattern_not_in_targets"
  | "pattern_in_taboo"
  | "pattern_unknown";

export interface CheckFailure {
  check: CheckCode;
  detail: string;
}

export interface ValidationVerdict {
  accepted: boolean;
  failures: CheckFailure[];
}

export interface SubmitResponse {
  verdicts: ValidationVerdict[];
}

export interface ApiError {
  error: string;
  message: string;
}

/** Client-side state of one draft input slot. */
export type SlotState =
  | { kind: "empty" }
  | { kind: "editing" }
  | { kind: "checking" }
  | { kind: "unvalidated" } // network failure, retry pending
  | { kind: "checked"; verdict: ValidationVerdict };
