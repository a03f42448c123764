import type { ContextResponse } from "./api.js";
import type { ContextUpdate } from "./words.js";

/**
 * Serializes context updates: at most one request is ever in flight, and
 * while one is pending the newest queued update replaces any older one.
 * Responses carry the sequence number of their request; a response is
 * dropped when newer input is already waiting, so the panel only ever
 * shows the latest state the user produced.
 */
export class UpdateDispatcher {
  private seq = 0;
  private applied = 0;
  private inFlight = false;
  private pending: ContextUpdate | null = null;

  constructor(
    private send: (update: ContextUpdate) => Promise<ContextResponse>,
    private apply: (response: ContextResponse, seq: number) => void,
    private onError: (error: unknown) => void
  ) {}

  push(update: ContextUpdate): void {
    this.pending = update;
    void this.pump();
  }

  /** Number of the most recently dispatched request. */
  get dispatched(): number {
    return this.seq;
  }

  private async pump(): Promise<void> {
    if (this.inFlight || this.pending === null) {
      return;
    }
    const update = this.pending;
    this.pending = null;
    const seq = ++this.seq;
    this.inFlight = true;
    try {
      const response = await this.send(update);
      // stale if the user typed again while this request was out
      if (this.pending === null && seq > this.applied) {
        this.applied = seq;
        this.apply(response, seq);
      }
    } catch (error) {
      this.onError(error);
    } finally {
      this.inFlight = false;
      void this.pump();
    }
  }
}
