/** Console session view-model: a thin state machine over the service.
 * Every mutation round-trips; nothing is computed optimistically. */

import { AdvisorClient, ApiError, BestResponsePayload, SessionState } from "./api.js";
import {
  GameCard,
  HeaderView,
  gameCards,
  header,
  recommendationLine,
  submitEnabled,
  winnersPayload,
} from "./bracket.js";

export interface RoundRecord {
  round: number;
  recommendation: string;
  value: string;
}

export class ConsoleSession {
  private sessionId: string | null = null;
  state: SessionState | null = null;
  response: BestResponsePayload | null = null;
  selections = new Map<number, string>();
  error: string | null = null;
  /** One (recommendation, value) entry per round, advisor-transcript style. */
  transcript: RoundRecord[] = [];

  constructor(private client: AdvisorClient) {}

  async load(instanceDocument: string): Promise<void> {
    this.error = null;
    this.transcript = [];
    try {
      this.sessionId = await this.client.createSession(instanceDocument);
      await this.refresh(true);
    } catch (err) {
      this.state = null;
      this.response = null;
      this.error = describe(err);
    }
  }

  private async refresh(recordRound: boolean): Promise<void> {
    if (!this.sessionId) {
      return;
    }
    this.state = await this.client.getState(this.sessionId);
    this.selections = new Map();
    if (this.state.finished) {
      this.response = null;
      return;
    }
    this.response = await this.client.getBestResponse(this.sessionId);
    if (recordRound) {
      this.transcript.push({
        round: this.state.round,
        recommendation: recommendationLine(this.response),
        value: this.response.value,
      });
    }
  }

  select(gameIndex: number, winner: string): void {
    this.selections.set(gameIndex, winner);
  }

  get canSubmit(): boolean {
    return this.state !== null && submitEnabled(this.state, this.selections);
  }

  async submit(): Promise<void> {
    if (!this.sessionId || !this.state || !this.canSubmit) {
      return;
    }
    this.error = null;
    try {
      await this.client.postOutcomes(
        this.sessionId,
        winnersPayload(this.state, this.selections),
      );
      await this.refresh(true);
    } catch (err) {
      this.error = describe(err);
    }
  }

  /** Drive a whole scripted tournament; used by tests and demos. */
  async playScript(rounds: string[][]): Promise<RoundRecord[]> {
    for (const winners of rounds) {
      if (!this.sessionId || !this.state || this.state.finished) {
        break;
      }
      winners.forEach((winner, index) => this.select(index, winner));
      await this.submit();
      if (this.error) {
        throw new Error(this.error);
      }
    }
    return this.transcript;
  }

  get cards(): GameCard[] {
    if (!this.state) {
      return [];
    }
    return gameCards(this.state, this.response, this.selections);
  }

  get head(): HeaderView | null {
    if (!this.state) {
      return null;
    }
    return header(this.state, this.response?.value ?? null);
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    const lines = err.payload.report?.map((v) => `${v.code}: ${v.detail}`) ?? [];
    return [err.payload.detail, ...lines].filter(Boolean).join("; ");
  }
  return err instanceof Error ? err.message : String(err);
}
