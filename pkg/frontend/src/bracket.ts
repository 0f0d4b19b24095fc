/** Pure view data derived from a service state + best response.
 * Game cards come straight from the service pairings so the rendered
 * bracket can never drift from what the backend is advising on. */

import type { BestResponsePayload, SessionState, TreeNode } from "./api.js";

export type Badge = "PLAY" | "THROW" | null;

export interface GameCard {
  index: number;
  a: string;
  b: string;
  aCoalition: boolean;
  bCoalition: boolean;
  aBadge: Badge;
  bBadge: Badge;
  selected: string | null;
}

export interface HeaderView {
  favorite: string;
  round: number;
  value: string; // canonical rational from the service
  finished: boolean;
  winner: string | null;
}

export interface BracketColumn {
  depth: number;
  labels: string[];
}

export function gameCards(
  state: SessionState,
  response: BestResponsePayload | null,
  selections: Map<number, string>,
): GameCard[] {
  const coalition = new Set(state.coalition);
  const profile = response?.profile ?? {};
  return state.pairings.map(([a, b], index) => ({
    index,
    a,
    b,
    aCoalition: coalition.has(a),
    bCoalition: coalition.has(b),
    aBadge: (profile[a] as Badge) ?? null,
    bBadge: (profile[b] as Badge) ?? null,
    selected: selections.get(index) ?? null,
  }));
}

export function header(state: SessionState, value: string | null): HeaderView {
  return {
    favorite: state.favorite,
    round: state.round,
    value: value ?? state.t_opt,
    finished: state.finished,
    winner: state.winner,
  };
}

/** Residual-tree layout: one column per depth, labels left to right.
 * Internal nodes show as pending slots ("?"). */
export function columns(tree: TreeNode): BracketColumn[] {
  const byDepth = new Map<number, string[]>();
  const walk = (node: TreeNode, depth: number): void => {
    const bucket = byDepth.get(depth) ?? [];
    byDepth.set(depth, bucket);
    if (typeof node === "string") {
      bucket.push(node);
    } else {
      bucket.push("?");
      walk(node.l, depth + 1);
      walk(node.r, depth + 1);
    }
  };
  walk(tree, 0);
  return [...byDepth.entries()]
    .sort(([a], [b]) => a - b)
    .map(([depth, labels]) => ({ depth, labels }));
}

/** A submission is complete when every open game has one selected winner. */
export function submitEnabled(
  state: SessionState,
  selections: Map<number, string>,
): boolean {
  if (state.finished) {
    return false;
  }
  return state.pairings.every((_, index) => selections.has(index));
}

/** The winners document for the service, in pairing order. */
export function winnersPayload(
  state: SessionState,
  selections: Map<number, string>,
): string[] {
  return state.pairings.map((_, index) => {
    const winner = selections.get(index);
    if (winner === undefined) {
      throw new Error(`game ${index} has no selected winner`);
    }
    return winner;
  });
}

/** Render the recommendation exactly as the command-line advisor prints it,
 * so transcripts are comparable across the two front ends. */
export function recommendationLine(response: BestResponsePayload): string {
  const parts = Object.entries(response.profile)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([name, action]) => `${name}=${action}`);
  return parts.length ? parts.join(", ") : "none";
}
