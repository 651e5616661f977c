// Task flow controller: fetch assignment, render the prompt, wire one
// debounced checker per draft slot, gate the submit button, and walk to
// the next task after a successful submission.

import { ApiClient, ServiceError, SlotChecker } from "./api";
import { canSubmit, fatalFailures } from "./gating";
import {
  CHECK_MESSAGES,
  DONE_MESSAGE,
  EXPIRED_MESSAGE,
  RETRY_MESSAGE,
} from "./messages";
import { renderPrompt } from "./render";
import type { SlotState, TaskAssignment, ValidationVerdict } from "./types";

interface Slot {
  state: SlotState;
  input: HTMLTextAreaElement;
  note: HTMLElement;
  checker: SlotChecker;
}

export class TaskFlow {
  private assignment: TaskAssignment | null = null;
  private slots: Slot[] = [];
  private submitButton: HTMLButtonElement | null = null;
  private statusLine: HTMLElement | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly workerId: string,
    private readonly mount: HTMLElement,
    private readonly debounceMs?: number,
  ) {}

  async start(): Promise<void> {
    await this.loadNextTask();
  }

  private async loadNextTask(): Promise<void> {
    this.teardownSlots();
    this.mount.replaceChildren();
    try {
      this.assignment = await this.client.nextTask(this.workerId);
    } catch (error) {
      if (error instanceof ServiceError && error.code === "no_task") {
        this.mount.appendChild(this.banner("done", DONE_MESSAGE));
        return;
      }
      this.mount.appendChild(this.banner("error", RETRY_MESSAGE));
      return;
    }
    this.renderTask();
  }

  private renderTask(): void {
    const assignment = this.assignment!;
    this.mount.appendChild(renderPrompt(assignment.prompt));

    const form = document.createElement("div");
    form.className = "drafts";
    this.slots = [];
    for (let i = 0; i < assignment.prompt.n_required; i++) {
      form.appendChild(this.buildSlot(i));
    }
    this.mount.appendChild(form);

    const button = document.createElement("button");
    button.className = "submit";
    button.textContent = "Submit paraphrases";
    button.disabled = true;
    button.addEventListener("click", () => void this.submit());
    this.submitButton = button;
    this.mount.appendChild(button);

    this.statusLine = this.banner("status", "");
    this.mount.appendChild(this.statusLine);
  }

  private buildSlot(index: number): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "slot";

    const input = document.createElement("textarea");
    input.className = "slot-input";
    input.dataset.slot = String(index);

    const note = document.createElement("p");
    note.className = "slot-note";

    const checker = new SlotChecker(
      this.client,
      this.assignment!.task_id,
      (draft, verdict) => this.onVerdict(index, draft, verdict),
      (_draft, error) => this.onUnvalidated(index, error),
      () => this.setSlotState(index, { kind: "checking" }, "Checking..."),
      this.debounceMs,
    );

    const slot: Slot = { state: { kind: "empty" }, input, note, checker };
    input.addEventListener("input", () => {
      if (input.value.trim().length === 0) {
        this.setSlotState(index, { kind: "empty" }, "");
        return;
      }
      this.setSlotState(index, { kind: "editing" }, "");
      checker.input(input.value);
    });

    wrap.appendChild(input);
    wrap.appendChild(note);
    this.slots.push(slot);
    return wrap;
  }

  private onVerdict(index: number, draft: string, verdict: ValidationVerdict): void {
    const slot = this.slots[index];
    if (slot.input.value !== draft) return; // stale response, a newer edit exists
    const fatal = fatalFailures(verdict.failures);
    let note: string;
    let cls: string;
    if (fatal.length > 0) {
      note = fatal.map((f) => CHECK_MESSAGES[f.check] ?? f.check).join(" ");
      cls = "slot-note failure";
    } else if (verdict.failures.length > 0) {
      note = verdict.failures.map((f) => CHECK_MESSAGES[f.check] ?? f.check).join(" ");
      cls = "slot-note info";
    } else {
      note = "Looks good.";
      cls = "slot-note ok";
    }
    slot.note.className = cls;
    this.setSlotState(index, { kind: "checked", verdict }, note);
  }

  private onUnvalidated(index: number, error: unknown): void {
    if (error instanceof ServiceError && error.code === "task_expired") {
      void this.restartAfterExpiry();
      return;
    }
    this.slots[index].note.className = "slot-note retry";
    this.setSlotState(index, { kind: "unvalidated" }, RETRY_MESSAGE);
  }

  private setSlotState(index: number, state: SlotState, note: string): void {
    const slot = this.slots[index];
    slot.state = state;
    slot.note.textContent = note;
    this.refreshGate();
  }

  private refreshGate(): void {
    if (!this.submitButton) return;
    const texts = this.slots.map((s) => s.input.value);
    this.submitButton.disabled = !canSubmit(
      this.slots.map((s) => s.state),
      texts,
    );
  }

  private async submit(): Promise<void> {
    const assignment = this.assignment;
    if (!assignment || !this.submitButton) return;
    // the gate is a pure function of slot state; re-assert it here so a
    // set with any client-visible fatal check can never leave the page
    if (!canSubmit(this.slots.map((s) => s.state), this.slots.map((s) => s.input.value))) {
      return;
    }
    this.submitButton.disabled = true;
    try {
      const response = await this.client.submit(
        assignment.task_id,
        this.slots.map((s) => s.input.value),
      );
      const rejected = response.verdicts
        .map((verdict, index) => ({ verdict, index }))
        .filter(({ verdict }) => !verdict.accepted);
      if (rejected.length === 0) {
        await this.loadNextTask();
        return;
      }
      // the task closed server-side; fetch a fresh one but surface what failed
      for (const { verdict, index } of rejected) {
        this.onVerdict(index, this.slots[index].input.value, verdict);
      }
      this.setStatus(
        `${rejected.length} paraphrase(s) were rejected; the rest were stored.`,
      );
    } catch (error) {
      if (error instanceof ServiceError && error.code === "task_expired") {
        await this.restartAfterExpiry();
        return;
      }
      this.setStatus(RETRY_MESSAGE);
      this.refreshGate();
    }
  }

  private async restartAfterExpiry(): Promise<void> {
    this.setStatus(EXPIRED_MESSAGE);
    await this.loadNextTask();
  }

  private setStatus(text: string): void {
    if (this.statusLine) this.statusLine.textContent = text;
  }

  private banner(kind: string, text: string): HTMLElement {
    const node = document.createElement("p");
    node.className = `banner banner-${kind}`;
    node.textContent = text;
    return node;
  }

  private teardownSlots(): void {
    for (const slot of this.slots) slot.checker.cancel();
    this.slots = [];
    this.submitButton = null;
    this.statusLine = null;
  }
}

export function boot(): void {
  const mount = document.getElementById("app");
  if (!mount) return;
  const params = new URLSearchParams(window.location.search);
  const workerId = params.get("worker_id") ?? `anon-${Date.now()}`;
  const flow = new TaskFlow(new ApiClient(""), workerId, mount);
  void flow.start();
}
