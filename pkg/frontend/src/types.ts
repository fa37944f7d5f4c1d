// Wire types for the local advisor HTTP API (api_version "1").

export type Vote = "Approve" | "Reject";

export interface ProposalWire {
  leader: number;
  team: number[];
  votes: Vote[];
  approved: boolean;
}

export interface MissionWire {
  index: number;
  team_size: number;
  proposals: ProposalWire[];
  fail_count: number | null;
  succeeded: boolean | null;
}

/** The advice request body: the Assassin's view of a (possibly mid-) game. */
export interface AssassinViewWire {
  spy_seats: number[];
  first_leader: number;
  missions: MissionWire[];
}

export interface RankedSeat {
  seat: number;
  score: number;
}

export interface AdviceResponse {
  api_version: string;
  ranking: RankedSeat[];
  target: number;
  scores: number[];
  meta: { no_signal: boolean; partial: boolean };
  model_meta: {
    type: string;
    feature_schema: Record<string, unknown>;
    checksum: string;
  };
}

export interface Violation {
  rule: string;
  location: string;
  message: string;
}

export interface ApiError {
  api_version: string;
  error: string;
  field: string;
}
