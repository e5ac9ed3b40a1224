/** Typed client for the pairing-score JSON API.
 *
 * Every number shown anywhere in the UI comes from these payloads;
 * nothing is recomputed client-side. Responses that arrive after a
 * newer request was issued are discarded via RequestGate tokens.
 */

export interface IngredientEntry {
  token: string;
  occurrence: number;
}

export type PairStatus = "known" | "unknown";

/** One scored pair; /api/score, /api/rank entries, and compare-grid
 * cells all share this shape (score uses a/b, rank ingredient/partner). */
export interface ScoreCell {
  a: string;
  b: string;
  predicted_score: number;
  status: PairStatus;
  true_score: number | null;
  cooccurrence: number | null;
}

export interface RankEntry {
  ingredient: string;
  partner: string;
  predicted_score: number;
  status: PairStatus;
  true_score: number | null;
  cooccurrence: number | null;
}

export interface CompareResponse {
  targets: string[];
  probes: string[];
  grid: ScoreCell[][];
}

export interface ErrorEnvelope {
  error: string;
  detail?: string;
  token?: string;
  tokens?: string[];
  // /api/score and /api/rank send a list; /api/compare a per-token map
  suggestions?: string[] | Record<string, string[]>;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly body: ErrorEnvelope) {
    super(body.detail ?? body.error);
  }
}

/** Monotonic token source; only the latest token is current. */
export class RequestGate {
  private latest = 0;

  next(): number {
    this.latest += 1;
    return this.latest;
  }

  isCurrent(token: number): boolean {
    return token === this.latest;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

/** Fetch through a gate: returns null when a newer request was issued
 * while this one was in flight (stale errors are swallowed too). */
export async function guardedFetch<T>(
  gate: RequestGate,
  url: string,
  doFetch: FetchLike,
  init?: RequestInit,
): Promise<T | null> {
  const token = gate.next();
  const resp = await doFetch(url, init);
  const body = (await resp.json()) as unknown;
  if (!gate.isCurrent(token)) {
    return null;
  }
  if (!resp.ok) {
    throw new ApiError(resp.status, body as ErrorEnvelope);
  }
  return body as T;
}

/** API client bound to a base URL; one gate per view keeps a slow old
 * query from overwriting a newer answer. */
export class Client {
  constructor(
    private readonly base: string,
    private readonly doFetch: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private gates = {
    ingredients: new RequestGate(),
    score: new RequestGate(),
    rank: new RequestGate(),
    compare: new RequestGate(),
  };

  ingredients(prefix: string, limit = 20): Promise<IngredientEntry[] | null> {
    const q = new URLSearchParams({ prefix, limit: String(limit) });
    return guardedFetch(this.gates.ingredients,
      `${this.base}/api/ingredients?${q}`, this.doFetch);
  }

  score(a: string, b: string): Promise<ScoreCell | null> {
    const q = new URLSearchParams({ a, b });
    return guardedFetch(this.gates.score,
      `${this.base}/api/score?${q}`, this.doFetch);
  }

  rank(ingredient: string, k: number, filter: string):
      Promise<RankEntry[] | null> {
    const q = new URLSearchParams({ ingredient, k: String(k), filter });
    return guardedFetch(this.gates.rank,
      `${this.base}/api/rank?${q}`, this.doFetch);
  }

  compare(targets: string[], probes: string[]):
      Promise<CompareResponse | null> {
    return guardedFetch(this.gates.compare,
      `${this.base}/api/compare`, this.doFetch, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ targets, probes }),
      });
  }
}
