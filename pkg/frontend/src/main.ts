/** DOM wiring for the explorer. All logic that can live without a DOM
 * sits in api/state/format/render; this file only moves strings between
 * elements and the client. */

import { ApiError, Client } from "./api.js";
import {
  renderError,
  renderGrid,
  renderIngredientList,
  renderRankingRows,
  renderScoreCell,
  renderSuggestions,
} from "./render.js";
import {
  DEFAULT_VIEW,
  PendingFlag,
  ViewState,
  debounce,
  decodeView,
  encodeView,
} from "./state.js";

const here = new URLSearchParams(window.location.search);
// same-origin by default; ?api=http://host:port when served separately
const apiBase = here.get("api") ?? "";
const rawThreshold = here.get("threshold");
const threshold = rawThreshold !== null && !Number.isNaN(Number(rawThreshold))
  ? Number(rawThreshold)
  : null;

const client = new Client(apiBase);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const searchBox = el<HTMLInputElement>("search");
const searchList = el<HTMLUListElement>("search-results");
const rankBody = el<HTMLTableSectionElement>("rank-body");
const rankTitle = el<HTMLElement>("rank-title");
const kInput = el<HTMLInputElement>("k");
const filterSelect = el<HTMLSelectElement>("filter");
const banner = el<HTMLDivElement>("banner");
const pairA = el<HTMLInputElement>("pair-a");
const pairB = el<HTMLInputElement>("pair-b");
const pairOut = el<HTMLDivElement>("pair-out");
const targetsBox = el<HTMLInputElement>("targets");
const probesBox = el<HTMLInputElement>("probes");
const gridOut = el<HTMLDivElement>("grid-out");

let view: ViewState = { ...DEFAULT_VIEW };
const rankPending = new PendingFlag();
const pairPending = new PendingFlag();
const gridPending = new PendingFlag();

let retryAction: (() => void) | null = null;

function showError(message: string, retry: (() => void) | null): void {
  banner.innerHTML = renderError(message);
  banner.hidden = false;
  retryAction = retry;
}

function clearError(): void {
  banner.hidden = true;
  banner.innerHTML = "";
  retryAction = null;
}

banner.addEventListener("click", (ev) => {
  const target = ev.target as HTMLElement;
  if (target.classList.contains("retry") && retryAction !== null) {
    const again = retryAction;
    clearError();
    again();
  }
});

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.body.detail ?? err.body.error;
  }
  return "service unreachable";
}

/** Rewrite the address bar from the view, keeping api/threshold knobs. */
function syncUrl(): void {
  const q = new URLSearchParams(encodeView(view).replace(/^\?/, ""));
  for (const key of ["api", "threshold"]) {
    const v = here.get(key);
    if (v !== null) {
      q.set(key, v);
    }
  }
  const qs = q.toString();
  history.replaceState(null, "",
    qs === "" ? window.location.pathname : `?${qs}`);
}

async function loadRanking(): Promise<void> {
  if (view.ingredient === "" || !rankPending.tryAcquire()) {
    return;
  }
  try {
    const rows = await client.rank(view.ingredient, view.k, view.filter);
    if (rows === null) {
      return; // superseded by a newer query
    }
    clearError();
    rankTitle.textContent = `partners for ${view.ingredient}`;
    rankBody.innerHTML = renderRankingRows(rows);
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      const chips = (err.body.suggestions as string[] | undefined) ?? [];
      rankBody.innerHTML = "";
      rankTitle.textContent = `no ingredient ${view.ingredient}`;
      showError(describe(err), null);
      searchList.innerHTML = renderSuggestions(chips);
    } else {
      showError(describe(err), loadRanking);
    }
  } finally {
    rankPending.release();
  }
}

function pivotTo(token: string): void {
  view = { ...view, ingredient: token };
  searchBox.value = token;
  syncUrl();
  void loadRanking();
}

const runSearch = debounce(async () => {
  try {
    const rows = await client.ingredients(searchBox.value.trim());
    if (rows !== null) {
      clearError();
      searchList.innerHTML = renderIngredientList(rows);
    }
  } catch (err) {
    searchList.innerHTML = "";
    showError(describe(err), () => runSearch());
  }
}, 150);

searchBox.addEventListener("input", () => runSearch());
searchList.addEventListener("click", (ev) => {
  const item = (ev.target as HTMLElement).closest<HTMLElement>("[data-token]");
  if (item?.dataset.token) {
    pivotTo(item.dataset.token);
  }
});

rankBody.addEventListener("click", (ev) => {
  const row = (ev.target as HTMLElement).closest<HTMLElement>("[data-partner]");
  if (row?.dataset.partner) {
    pivotTo(row.dataset.partner);
  }
});

kInput.addEventListener("change", () => {
  const k = parseInt(kInput.value, 10);
  view = { ...view, k: Number.isNaN(k) ? DEFAULT_VIEW.k : k };
  syncUrl();
  void loadRanking();
});

filterSelect.addEventListener("change", () => {
  view = { ...view, filter: decodeView(`filter=${filterSelect.value}`).filter };
  syncUrl();
  void loadRanking();
});

el<HTMLButtonElement>("pair-go").addEventListener("click", async () => {
  if (!pairPending.tryAcquire()) {
    return;
  }
  try {
    const cell = await client.score(pairA.value.trim(), pairB.value.trim());
    if (cell !== null) {
      clearError();
      pairOut.innerHTML = renderScoreCell(cell);
    }
  } catch (err) {
    pairOut.innerHTML = "";
    if (err instanceof ApiError && err.status === 404) {
      const chips = (err.body.suggestions as string[] | undefined) ?? [];
      pairOut.innerHTML = renderSuggestions(chips);
    }
    showError(describe(err), null);
  } finally {
    pairPending.release();
  }
});

function parseTokens(raw: string): string[] {
  return raw.split(/[\s,]+/).filter((t) => t !== "");
}

el<HTMLButtonElement>("grid-go").addEventListener("click", async () => {
  if (!gridPending.tryAcquire()) {
    return;
  }
  try {
    const resp = await client.compare(parseTokens(targetsBox.value),
                                      parseTokens(probesBox.value));
    if (resp !== null) {
      clearError();
      gridOut.innerHTML = renderGrid(resp, threshold);
    }
  } catch (err) {
    gridOut.innerHTML = "";
    showError(describe(err), null);
  } finally {
    gridPending.release();
  }
});

gridOut.addEventListener("click", (ev) => {
  const cell = (ev.target as HTMLElement).closest<HTMLElement>("[data-a]");
  if (cell?.dataset.a) {
    pairA.value = cell.dataset.a;
    pairB.value = cell.dataset.b ?? "";
  }
});

window.addEventListener("popstate", () => {
  applyView(decodeView(window.location.search));
});

function applyView(next: ViewState): void {
  view = next;
  searchBox.value = view.ingredient;
  kInput.value = String(view.k);
  filterSelect.value = view.filter;
  void loadRanking();
}

// boot: restore any deep-linked view, then prime the search list
applyView(decodeView(window.location.search));
void runSearch();
