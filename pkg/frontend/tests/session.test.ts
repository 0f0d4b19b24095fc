import { describe, expect, test } from "vitest";

import { AdvisorClient } from "../src/api.js";
import { ConsoleSession } from "../src/session.js";

/** Scripted stand-in for the service: exact canned payloads per route. */
function fakeService(): { fetch: typeof fetch } {
  const round1 = {
    id: "s1",
    round: 1,
    finished: false,
    winner: null,
    favorite: "e*",
    coalition: ["c"],
    tree: { l: { l: "e*", r: "a" }, r: { l: "c", r: "b" } },
    pairings: [
      ["e*", "a"],
      ["c", "b"],
    ],
    eliminated: [],
    t_opt: "1/2",
  };
  const round2 = {
    ...round1,
    round: 2,
    tree: { l: "e*", r: "b" },
    pairings: [["e*", "b"]],
    eliminated: ["a", "c"],
    t_opt: "1",
  };
  let state: unknown = round1;
  const responses: Record<string, unknown> = {
    "1": { profile: { c: "THROW" }, value: "1/2" },
    "2": { profile: {}, value: "1" },
  };

  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    const json = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), { status });
    if (url.endsWith("/api/instances") && init?.method === "POST") {
      const text = String(init.body);
      if (!text.trim().startsWith("{")) {
        return json({ detail: "invalid JSON" }, 400);
      }
      return json({ id: "s1" }, 201);
    }
    if (url.endsWith("/api/instances/s1/best-response")) {
      const round = (state as { round: number }).round;
      return json(responses[String(round)]);
    }
    if (url.endsWith("/api/instances/s1/outcomes")) {
      const { winners } = JSON.parse(String(init?.body)) as { winners: string[] };
      const expected = (state as { pairings: string[][] }).pairings.length;
      if (winners.length !== expected) {
        return json({ detail: "IncompleteRound" }, 422);
      }
      state = round2;
      return json(state);
    }
    if (url.endsWith("/api/instances/s1")) {
      return json(state);
    }
    return json({ detail: "unknown route" }, 404);
  };
  return { fetch: impl as typeof fetch };
}

function makeSession(): ConsoleSession {
  const service = fakeService();
  return new ConsoleSession(new AdvisorClient("http://stub", service.fetch));
}

describe("console session", () => {
  test("load renders round one with a recommendation", async () => {
    const session = makeSession();
    await session.load("{}");
    expect(session.error).toBeNull();
    expect(session.head).toMatchObject({ round: 1, value: "1/2" });
    expect(session.cards).toHaveLength(2);
    expect(session.cards[1].aBadge).toBe("THROW");
    expect(session.transcript).toEqual([
      { round: 1, recommendation: "c=THROW", value: "1/2" },
    ]);
  });

  test("invalid document surfaces an error panel", async () => {
    const session = makeSession();
    await session.load("not a document");
    expect(session.error).toContain("invalid JSON");
    expect(session.state).toBeNull();
  });

  test("submit stays disabled until every game has a winner", async () => {
    const session = makeSession();
    await session.load("{}");
    expect(session.canSubmit).toBe(false);
    session.select(0, "e*");
    expect(session.canSubmit).toBe(false);
    session.select(1, "b");
    expect(session.canSubmit).toBe(true);
  });

  test("submitting advances the round and refetches the recommendation", async () => {
    const session = makeSession();
    await session.load("{}");
    session.select(0, "e*");
    session.select(1, "b");
    await session.submit();
    expect(session.error).toBeNull();
    expect(session.head).toMatchObject({ round: 2, value: "1" });
    expect(session.selections.size).toBe(0);
    expect(session.transcript.map((r) => r.value)).toEqual(["1/2", "1"]);
  });
});
