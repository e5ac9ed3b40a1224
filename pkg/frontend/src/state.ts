/** Explorer state and its URL encoding.
 *
 * The ranking view is deep-linkable: (ingredient, k, filter) round-trip
 * through the query string, so any view is reproducible by link.
 */

export type Filter = "all" | "known" | "unknown";

export const FILTERS: readonly Filter[] = ["all", "known", "unknown"];

export interface ViewState {
  ingredient: string;
  k: number;
  filter: Filter;
}

export const DEFAULT_VIEW: ViewState = { ingredient: "", k: 10, filter: "all" };

// mirror the API's k bounds so a decoded link is always requestable
const K_MIN = 1;
const K_MAX = 1000;

export function encodeView(view: ViewState): string {
  const q = new URLSearchParams();
  if (view.ingredient !== "") {
    q.set("ingredient", view.ingredient);
  }
  if (view.k !== DEFAULT_VIEW.k) {
    q.set("k", String(view.k));
  }
  if (view.filter !== DEFAULT_VIEW.filter) {
    q.set("filter", view.filter);
  }
  const s = q.toString();
  return s === "" ? "" : `?${s}`;
}

export function decodeView(search: string): ViewState {
  const q = new URLSearchParams(search.startsWith("?") ? search.slice(1) : search);
  const ingredient = q.get("ingredient") ?? DEFAULT_VIEW.ingredient;
  let k = DEFAULT_VIEW.k;
  const rawK = q.get("k");
  if (rawK !== null && /^\d+$/.test(rawK)) {
    k = Math.max(K_MIN, Math.min(K_MAX, parseInt(rawK, 10)));
  }
  const rawFilter = q.get("filter");
  const filter = (FILTERS as readonly string[]).includes(rawFilter ?? "")
    ? (rawFilter as Filter)
    : DEFAULT_VIEW.filter;
  return { ingredient, k, filter };
}

/** At most one in-flight request per view. */
export class PendingFlag {
  private busy = false;

  tryAcquire(): boolean {
    if (this.busy) {
      return false;
    }
    this.busy = true;
    return true;
  }

  release(): void {
    this.busy = false;
  }

  get pending(): boolean {
    return this.busy;
  }
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
