import { describe, expect, it } from "vitest";

import type { QueryResponse } from "../src/api";
import {
  beginQuery,
  completeQuery,
  failQuery,
  initialState,
  rankedRows,
  toggleIsolation,
  validateQueryText,
} from "../src/state";

const responseA: QueryResponse = {
  results: [{ id: 1, kind: "segment", score: 0.8, point_count: 3 }],
};
const responseB: QueryResponse = {
  results: [{ id: 2, kind: "segment", score: 0.6, point_count: 5 }],
};

describe("query lifecycle", () => {
  it("applies a completed query", () => {
    let state = initialState();
    let ticket: number;
    [state, ticket] = beginQuery(state);
    state = completeQuery(state, ticket, responseA);
    expect(state.lastResponse).toBe(responseA);
    expect(state.pendingRequest).toBeNull();
  });

  it("a newer submission supersedes the older in-flight one", () => {
    let state = initialState();
    let first: number;
    let second: number;
    [state, first] = beginQuery(state);
    [state, second] = beginQuery(state);
    // the stale completion arrives late and must be dropped
    state = completeQuery(state, first, responseA);
    expect(state.lastResponse).toBeNull();
    state = completeQuery(state, second, responseB);
    expect(state.lastResponse).toBe(responseB);
  });

  it("stale failures are dropped too", () => {
    let state = initialState();
    let first: number;
    [state, first] = beginQuery(state);
    [state] = beginQuery(state);
    state = failQuery(state, first, "boom");
    expect(state.error).toBeNull();
  });

  it("completing a query clears isolation", () => {
    let state = initialState();
    state = toggleIsolation(state, 7);
    expect(state.isolatedNode).toBe(7);
    let ticket: number;
    [state, ticket] = beginQuery(state);
    state = completeQuery(state, ticket, responseA);
    expect(state.isolatedNode).toBeNull();
  });
});

describe("input validation", () => {
  it("rejects empty queries so no request is sent", () => {
    expect(validateQueryText("")).toBeNull();
    expect(validateQueryText("   ")).toBeNull();
    expect(validateQueryText("  seat ")).toBe("seat");
  });
});

describe("ranked rows", () => {
  it("renders exactly the response order", () => {
    expect(rankedRows(responseA).map((r) => r.id)).toEqual([1]);
    expect(rankedRows(null)).toEqual([]);
  });
});

describe("isolation toggle", () => {
  it("toggles on and off per node", () => {
    let state = initialState();
    state = toggleIsolation(state, 3);
    expect(state.isolatedNode).toBe(3);
    state = toggleIsolation(state, 3);
    expect(state.isolatedNode).toBeNull();
    state = toggleIsolation(state, 3);
    state = toggleIsolation(state, 5);
    expect(state.isolatedNode).toBe(5);
  });
});
