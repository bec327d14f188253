/**
 * Pure view-state transitions, kept free of DOM and WebGL so they are
 * directly testable. At most one query is in flight; a newer submission
 * supersedes the pending one.
 */

import type { QueryResponse, RankedNode, ScoreMode } from "./api";

export interface ViewerState {
  queryText: string;
  mode: ScoreMode;
  k: number;
  requestCounter: number;
  pendingRequest: number | null;
  lastResponse: QueryResponse | null;
  isolatedNode: number | null;
  error: string | null;
}

export function initialState(): ViewerState {
  return {
    queryText: "",
    mode: "avg",
    k: 10,
    requestCounter: 0,
    pendingRequest: null,
    lastResponse: null,
    isolatedNode: null,
    error: null,
  };
}

/** Begin a query; returns the ticket that must accompany its completion. */
export function beginQuery(state: ViewerState): [ViewerState, number] {
  const ticket = state.requestCounter + 1;
  return [
    { ...state, requestCounter: ticket, pendingRequest: ticket, error: null },
    ticket,
  ];
}

/** Apply a finished query unless a newer one superseded it. */
export function completeQuery(
  state: ViewerState,
  ticket: number,
  response: QueryResponse,
): ViewerState {
  if (state.pendingRequest !== ticket) {
    return state; // superseded: drop silently
  }
  return {
    ...state,
    pendingRequest: null,
    lastResponse: response,
    isolatedNode: null,
  };
}

export function failQuery(state: ViewerState, ticket: number, message: string): ViewerState {
  if (state.pendingRequest !== ticket) {
    return state;
  }
  return { ...state, pendingRequest: null, error: message };
}

/** Toggle isolation of one ranked node's points. */
export function toggleIsolation(state: ViewerState, nodeId: number): ViewerState {
  return { ...state, isolatedNode: state.isolatedNode === nodeId ? null : nodeId };
}

export function validateQueryText(text: string): string | null {
  return text.trim().length > 0 ? text.trim() : null;
}

/** Rows for the ranked list, in exactly the order the service returned. */
export function rankedRows(response: QueryResponse | null): RankedNode[] {
  return response ? response.results : [];
}
