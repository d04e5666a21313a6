/** Input-to-render loop: debounced fetches, strictly ordered paints.
 *
 * Every keystroke schedules one request after a short debounce. Requests
 * carry a monotonically increasing sequence number; a response only paints
 * when its sequence number is newer than the last painted one, so a slow
 * response for an old prefix can never overwrite suggestions for what the
 * user is typing now.
 */

import { ApiClient, Completion } from "./api.js";

export type Status =
  | "idle" // nothing typed yet
  | "loading" // request in flight, nothing painted for this prefix yet
  | "ok" // suggestions painted
  | "empty" // service answered with no suggestions
  | "dead" // prefix can no longer become an interpretable query
  | "error"; // request failed

export interface ViewState {
  prefix: string;
  status: Status;
  completions: Completion[];
  deadAt: number | null;
}

export const INITIAL_STATE: ViewState = {
  prefix: "",
  status: "idle",
  completions: [],
  deadAt: null,
};

export interface ControllerOptions {
  debounceMs?: number;
  k?: number;
  setTimeoutFn?: (fn: () => void, ms: number) => unknown;
  clearTimeoutFn?: (handle: unknown) => void;
}

export class TypeaheadController {
  private seq = 0; // last issued request
  private painted = 0; // newest request that has painted
  private timer: unknown = null;
  private readonly debounceMs: number;
  private readonly k: number;
  private readonly setTimeoutFn: (fn: () => void, ms: number) => unknown;
  private readonly clearTimeoutFn: (handle: unknown) => void;

  constructor(
    private readonly api: ApiClient,
    private readonly onState: (state: ViewState) => void,
    options: ControllerOptions = {},
  ) {
    this.debounceMs = options.debounceMs ?? 50;
    this.k = options.k ?? 10;
    this.setTimeoutFn = options.setTimeoutFn ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimeoutFn = options.clearTimeoutFn ?? ((h) => clearTimeout(h as number));
  }

  /** Call on every input event. */
  input(prefix: string): void {
    if (this.timer !== null) {
      this.clearTimeoutFn(this.timer);
      this.timer = null;
    }
    if (prefix.trim() === "") {
      this.seq += 1; // invalidate anything in flight
      this.painted = this.seq;
      this.onState({ ...INITIAL_STATE });
      return;
    }
    this.timer = this.setTimeoutFn(() => {
      this.timer = null;
      void this.request(prefix);
    }, this.debounceMs);
  }

  /** Paint orders are half-integers: request seq n paints its loading
   * state at n - 0.5 and its result at n, so a result always outranks its
   * own loading state but nothing from an older request ever repaints. */
  private paint(order: number, state: ViewState): boolean {
    if (order <= this.painted) {
      return false; // something newer already painted: discard
    }
    this.painted = order;
    this.onState(state);
    return true;
  }

  private async request(prefix: string): Promise<void> {
    const seq = ++this.seq;
    this.paint(seq - 0.5, { prefix, status: "loading", completions: [], deadAt: null });
    try {
      const res = await this.api.complete(prefix, this.k);
      if (res.completions.length > 0) {
        this.paint(seq, {
          prefix,
          status: "ok",
          completions: res.completions,
          deadAt: null,
        });
        return;
      }
      // nothing to suggest: distinguish "keep typing" from "dead prefix"
      const live = await this.api.completability(prefix);
      this.paint(seq, {
        prefix,
        status: live.completable ? "empty" : "dead",
        completions: [],
        deadAt: live.dead_at,
      });
    } catch {
      this.paint(seq, { prefix, status: "error", completions: [], deadAt: null });
    }
  }
}
