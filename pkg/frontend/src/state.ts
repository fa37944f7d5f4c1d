// Session state: the chronological event list entered during live play,
// and its serialization to/from the advice-request view. All scoring comes
// from the server; this module never computes confidences.

import type { AdviceResponse, AssassinViewWire, MissionWire, Vote } from "./types.js";

export const NUM_SEATS = 5;
export const TEAM_SIZES = [2, 3, 2, 3, 3];
export const MAJORITY = 3;

export interface ProposalEvent {
  kind: "proposal";
  team: number[];
  votes: Vote[]; // seats 0..4
}

export interface MissionResultEvent {
  kind: "mission_result";
  failCount: number;
}

export type GameEvent = ProposalEvent | MissionResultEvent;

export interface SessionState {
  seatLabels: string[];
  spySeats: number[];
  events: GameEvent[];
  lastAdvice: AdviceResponse | null;
}

export class EventShapeError extends Error {
  constructor(
    public readonly eventIndex: number,
    message: string,
  ) {
    super(`event ${eventIndex + 1}: ${message}`);
  }
}

export function newSession(): SessionState {
  return {
    seatLabels: ["Seat 0", "Seat 1", "Seat 2", "Seat 3", "Seat 4"],
    spySeats: [],
    events: [],
    lastAdvice: null,
  };
}

export function approvedByMajority(votes: Vote[]): boolean {
  return votes.filter((v) => v === "Approve").length >= MAJORITY;
}

/** Leader of the next proposal: rotation starts at seat 0 (canonical view)
 *  and advances after every proposal, approved or not. */
export function nextLeader(events: GameEvent[]): number {
  const proposals = events.filter((e) => e.kind === "proposal").length;
  return proposals % NUM_SEATS;
}

interface Cursor {
  missionIndex: number;
  awaitingResult: boolean; // last proposal approved, result not recorded yet
}

function cursorAfter(events: GameEvent[]): Cursor {
  let missionIndex = 0;
  let awaitingResult = false;
  for (let i = 0; i < events.length; i++) {
    const ev = events[i];
    if (ev.kind === "proposal") {
      if (awaitingResult) {
        throw new EventShapeError(i, "mission result pending before next proposal");
      }
      if (missionIndex >= TEAM_SIZES.length) {
        throw new EventShapeError(i, "all five missions already played");
      }
      if (approvedByMajority(ev.votes)) awaitingResult = true;
    } else {
      if (!awaitingResult) {
        throw new EventShapeError(i, "mission result without an approved team");
      }
      awaitingResult = false;
      missionIndex += 1;
    }
  }
  return { missionIndex, awaitingResult };
}

/** Mission index the next proposal would belong to, or null when the game
 *  is structurally over / a result is pending. */
export function currentMission(events: GameEvent[]): number | null {
  const c = cursorAfter(events);
  if (c.awaitingResult || c.missionIndex >= TEAM_SIZES.length) return null;
  return c.missionIndex;
}

export function awaitingMissionResult(events: GameEvent[]): boolean {
  return cursorAfter(events).awaitingResult;
}

/** Append an event after local shape checks. Semantic validation (team
 *  sizes, vote counts, rotation, fail counts) is the server's job via
 *  POST /api/v1/validate — see AdvisorClient. */
export function recordEvent(state: SessionState, event: GameEvent): SessionState {
  const events = [...state.events, event];
  cursorAfter(events); // throws EventShapeError on structural misuse
  return { ...state, events, lastAdvice: null };
}

export function undo(state: SessionState): SessionState {
  if (state.events.length === 0) return state;
  return { ...state, events: state.events.slice(0, -1), lastAdvice: null };
}

/** Serialize the event list to the advice-request view (canonical seat 0
 *  first leader; leaders reconstructed from the rotation rule). */
export function toView(state: SessionState): AssassinViewWire {
  const missions: MissionWire[] = [];
  let mission: MissionWire | null = null;
  let proposalCount = 0;
  for (let i = 0; i < state.events.length; i++) {
    const ev = state.events[i];
    if (ev.kind === "proposal") {
      if (mission === null) {
        mission = {
          index: missions.length,
          team_size: TEAM_SIZES[missions.length] ?? ev.team.length,
          proposals: [],
          fail_count: null,
          succeeded: null,
        };
        missions.push(mission);
      }
      mission.proposals.push({
        leader: proposalCount % NUM_SEATS,
        team: [...ev.team],
        votes: [...ev.votes],
        approved: approvedByMajority(ev.votes),
      });
      proposalCount += 1;
    } else {
      if (mission === null) {
        throw new EventShapeError(i, "mission result without an approved team");
      }
      mission.fail_count = ev.failCount;
      mission.succeeded = ev.failCount === 0;
      mission = null;
    }
  }
  return {
    spy_seats: [...state.spySeats].sort((a, b) => a - b),
    first_leader: 0,
    missions,
  };
}

/** Inverse of toView: rebuild the event list from an exported view. */
export function eventsFromView(view: AssassinViewWire): GameEvent[] {
  const events: GameEvent[] = [];
  for (const mission of view.missions) {
    for (const p of mission.proposals) {
      events.push({ kind: "proposal", team: [...p.team], votes: [...p.votes] });
    }
    if (mission.fail_count !== null && mission.fail_count !== undefined) {
      events.push({ kind: "mission_result", failCount: mission.fail_count });
    }
  }
  return events;
}

// ---------------------------------------------------------------------------
// Export / import: sessions serialize as advice-request JSON so they double
// as API test fixtures.

export function exportSession(state: SessionState): string {
  return JSON.stringify(toView(state), null, 2);
}

export function importSession(json: string, base?: SessionState): SessionState {
  const view = JSON.parse(json) as AssassinViewWire;
  if (!Array.isArray(view.spy_seats) || !Array.isArray(view.missions)) {
    throw new Error("not an advice-request document");
  }
  const state = base ?? newSession();
  return {
    ...state,
    spySeats: [...view.spy_seats],
    events: eventsFromView(view),
    lastAdvice: null,
  };
}

// ---------------------------------------------------------------------------
// Persistence across page reloads.

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export const STORAGE_KEY = "avalon-assassin-session";

export function saveSession(state: SessionState, storage: StorageLike): void {
  storage.setItem(
    STORAGE_KEY,
    JSON.stringify({
      seatLabels: state.seatLabels,
      spySeats: state.spySeats,
      events: state.events,
    }),
  );
}

export function loadSession(storage: StorageLike): SessionState {
  const raw = storage.getItem(STORAGE_KEY);
  if (raw === null) return newSession();
  try {
    const saved = JSON.parse(raw);
    const state: SessionState = {
      ...newSession(),
      seatLabels: saved.seatLabels,
      spySeats: saved.spySeats,
      events: saved.events,
    };
    cursorAfter(state.events); // corrupt storage falls back to a fresh session
    return state;
  } catch {
    return newSession();
  }
}
