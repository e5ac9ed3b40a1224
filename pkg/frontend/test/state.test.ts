import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import {
  DEFAULT_VIEW,
  PendingFlag,
  ViewState,
  debounce,
  decodeView,
  encodeView,
} from "../src/state.js";

describe("view deep links", () => {
  const cases: ViewState[] = [
    { ingredient: "vanilla", k: 10, filter: "all" },
    { ingredient: "olive_oil", k: 25, filter: "known" },
    { ingredient: "staple_00", k: 1, filter: "unknown" },
    { ingredient: "", k: 1000, filter: "all" },
    { ingredient: "salt & pepper?", k: 3, filter: "known" },
  ];

  it("round-trips every view through the query string", () => {
    for (const view of cases) {
      expect(decodeView(encodeView(view))).toEqual(view);
    }
  });

  it("decodes an empty link to the default view", () => {
    expect(decodeView("")).toEqual(DEFAULT_VIEW);
    expect(decodeView("?")).toEqual(DEFAULT_VIEW);
  });

  it("encodes the default view as an empty string", () => {
    expect(encodeView(DEFAULT_VIEW)).toBe("");
  });

  it("falls back to defaults on junk k or filter", () => {
    expect(decodeView("?k=abc").k).toBe(10);
    expect(decodeView("?k=-4").k).toBe(10);
    expect(decodeView("?filter=weird").filter).toBe("all");
  });

  it("clamps k to the API's accepted range", () => {
    expect(decodeView("?k=0").k).toBe(1);
    expect(decodeView("?k=99999").k).toBe(1000);
  });

  it("ignores unrelated query parameters", () => {
    const got = decodeView("?api=http%3A%2F%2Flocalhost%3A8080&ingredient=nut");
    expect(got.ingredient).toBe("nut");
    expect(got.k).toBe(10);
  });
});

describe("PendingFlag", () => {
  it("admits one request at a time per view", () => {
    const flag = new PendingFlag();
    expect(flag.tryAcquire()).toBe(true);
    expect(flag.tryAcquire()).toBe(false);
    expect(flag.pending).toBe(true);
    flag.release();
    expect(flag.tryAcquire()).toBe(true);
  });
});

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("collapses a burst into the trailing call", () => {
    const calls: string[] = [];
    const fire = debounce((s: string) => calls.push(s), 150);
    fire("v");
    fire("va");
    fire("van");
    vi.advanceTimersByTime(149);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(1);
    expect(calls).toEqual(["van"]);
  });

  it("fires again for separated bursts", () => {
    const calls: string[] = [];
    const fire = debounce((s: string) => calls.push(s), 150);
    fire("a");
    vi.advanceTimersByTime(150);
    fire("b");
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["a", "b"]);
  });
});
