// Client-side mirrors of the server's JSON schema.

export type SessionStatus =
  | "analyzing"
  | "awaiting_feedback"
  | "refining"
  | "finalized"
  | "failed";

export interface SessionSummary {
  id: string;
  status: SessionStatus;
  gesture: string | null;
  iterations: number;
  refinements_used: number;
  i_max: number;
  created_at: string;
}

export interface PerHand {
  left: number;
  right: number;
}

export interface Metrics {
  mean_hand_height: PerHand;
  path_length: PerHand;
  jerk_rms: PerHand;
  peak_speed: PerHand;
  bilateral_symmetry: number;
}

export interface Iteration {
  index: number;
  sequence: { keyframe_dt: number; states: number[][]; notes: string[] };
  reasoning: string;
  feedback: string | null;
  feasibility: { feasible: boolean; first_failure: number | null };
  metrics: Metrics;
}

export interface SessionRecord {
  id: string;
  status: SessionStatus;
  gesture: { name: string; category: string; description: string } | null;
  analysis: { narrative: string; gesture: string; novel: boolean } | null;
  iterations: Iteration[];
  i_max: number;
  refinements_used: number;
  notes: string[];
  created_at: string;
  artifacts: string[];
}

/** One point triple per joint: shoulder, elbow, wrist, hand tip. */
export type ArmPoints = [number, number, number][];

export interface TrajectoryPayload {
  id: string;
  iteration: number;
  rate: number;
  duration: number;
  sample_count: number;
  samples: number[][]; // 22 channels per row
  collision_flags: boolean[];
  ik_failures: number;
  joints: { left: (ArmPoints | null)[]; right: (ArmPoints | null)[] };
  metrics: Metrics;
}

export interface GestureInfo {
  name: string;
  category: string;
  description: string;
}
