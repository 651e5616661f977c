// Submit gating: a pure function of the slot states, nothing else.

import type { CheckFailure, SlotState } from "./types";

const NON_FATAL = new Set(["pattern_unknown"]);

export function fatalFailures(failures: CheckFailure[]): CheckFailure[] {
  return failures.filter((f) => !NON_FATAL.has(f.check));
}

export function slotBlocksSubmit(slot: SlotState): boolean {
  switch (slot.kind) {
    case "empty":
    case "editing":
    case "checking":
    case "unvalidated":
      return true;
    case "checked":
      return fatalFailures(slot.verdict.failures).length > 0;
  }
}

/** Enabled only when every slot is nonempty, validated, and fatal-free. */
export function canSubmit(slots: SlotState[], texts: string[]): boolean {
  if (slots.length !== texts.length) return false;
  if (texts.some((t) => t.trim().length === 0)) return false;
  return slots.every((slot) => !slotBlocksSubmit(slot));
}
