// Typed client for the task service, plus the debounced latest-wins
// checker each input slot owns.

import type {
  ApiError,
  SubmitResponse,
  TaskAssignment,
  ValidationVerdict,
} from "./types";

export const CHECK_DEBOUNCE_MS = 400;

export class ServiceError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

async function request<T>(input: string, init?: RequestInit): Promise<T> {
  const response = await fetch(input, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    const body = (await response.json().catch(() => null)) as ApiError | null;
    throw new ServiceError(
      body?.error ?? "http_error",
      body?.message ?? response.statusText,
      response.status,
    );
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  nextTask(workerId: string): Promise<TaskAssignment> {
    return request(`${this.base}/tasks/next?worker_id=${encodeURIComponent(workerId)}`);
  }

  check(taskId: string, draft: string, signal?: AbortSignal): Promise<ValidationVerdict> {
    return request(`${this.base}/tasks/${taskId}/check`, {
      method: "POST",
      body: JSON.stringify({ draft }),
      signal,
    });
  }

  submit(taskId: string, drafts: string[]): Promise<SubmitResponse> {
    return request(`${this.base}/tasks/${taskId}/submit`, {
      method: "POST",
      body: JSON.stringify({ drafts }),
    });
  }
}

/**
 * Debounced draft checker for one slot: waits out the debounce window,
 * aborts any in-flight request when a newer draft arrives (latest wins),
 * and reports outcomes through callbacks.
 */
export class SlotChecker {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly taskId: string,
    private readonly onVerdict: (draft: string, verdict: ValidationVerdict) => void,
    private readonly onUnvalidated: (draft: string, error: unknown) => void,
    private readonly onChecking: (draft: string) => void,
    private readonly debounceMs: number = CHECK_DEBOUNCE_MS,
  ) {}

  input(draft: string): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => void this.fire(draft), this.debounceMs);
  }

  private async fire(draft: string): Promise<void> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    this.onChecking(draft);
    try {
      const verdict = await this.client.check(this.taskId, draft, controller.signal);
      if (!controller.signal.aborted) this.onVerdict(draft, verdict);
    } catch (error) {
      if (controller.signal.aborted) return; // superseded by a newer draft
      this.onUnvalidated(draft, error);
    }
  }

  cancel(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.controller?.abort();
  }
}
