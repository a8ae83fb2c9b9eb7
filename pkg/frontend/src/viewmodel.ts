// Pure view logic: everything the DOM layer renders is decided here so the
// behavior is unit-testable without a browser.

import type { Iteration, Metrics, SessionRecord, SessionStatus } from "./types.js";

export const STATUS_LABELS: Record<SessionStatus, string> = {
  analyzing: "analyzing",
  awaiting_feedback: "awaiting feedback",
  refining: "refining",
  finalized: "finalized",
  failed: "failed",
};

export function statusBadgeClass(status: SessionStatus): string {
  return `badge badge-${status}`;
}

/** "2 of 5 used" next to the feedback form. */
export function refinementCounter(record: {
  refinements_used: number;
  i_max: number;
}): string {
  return `${record.refinements_used} of ${record.i_max} used`;
}

export interface FeedbackFormState {
  disabled: boolean;
  reason: string | null;
  pending: boolean;
}

export function feedbackFormState(record: SessionRecord): FeedbackFormState {
  if (record.status === "refining") {
    return { disabled: true, pending: true, reason: "refinement in progress" };
  }
  if (record.status === "failed") {
    return { disabled: true, pending: false, reason: "session failed" };
  }
  if (record.status === "finalized") {
    return { disabled: true, pending: false, reason: "session is finalized" };
  }
  if (record.refinements_used >= record.i_max) {
    return {
      disabled: true,
      pending: false,
      reason: `feedback limit reached (${record.i_max} of ${record.i_max} used)`,
    };
  }
  return { disabled: false, pending: false, reason: null };
}

export interface MetricRow {
  name: string;
  left: string;
  right: string;
}

const METRIC_KEYS = [
  "mean_hand_height",
  "path_length",
  "jerk_rms",
  "peak_speed",
] as const;

export function metricRows(metrics: Metrics): MetricRow[] {
  const rows: MetricRow[] = METRIC_KEYS.map((key) => ({
    name: key.replaceAll("_", " "),
    left: metrics[key].left.toFixed(4),
    right: metrics[key].right.toFixed(4),
  }));
  rows.push({
    name: "bilateral symmetry",
    left: metrics.bilateral_symmetry.toFixed(4),
    right: "",
  });
  return rows;
}

export interface MetricDeltaRow {
  name: string;
  a: string;
  b: string;
  delta: string;
}

export function metricDeltas(a: Metrics, b: Metrics): MetricDeltaRow[] {
  const rows: MetricDeltaRow[] = METRIC_KEYS.map((key) => {
    const va = (a[key].left + a[key].right) / 2;
    const vb = (b[key].left + b[key].right) / 2;
    return {
      name: key.replaceAll("_", " "),
      a: va.toFixed(4),
      b: vb.toFixed(4),
      delta: (vb - va).toFixed(4),
    };
  });
  rows.push({
    name: "bilateral symmetry",
    a: a.bilateral_symmetry.toFixed(4),
    b: b.bilateral_symmetry.toFixed(4),
    delta: (b.bilateral_symmetry - a.bilateral_symmetry).toFixed(4),
  });
  return rows;
}

export interface TimelineEntry {
  index: number;
  feedback: string | null;
  feasible: boolean;
  isLatest: boolean;
}

export function timeline(record: SessionRecord): TimelineEntry[] {
  return record.iterations.map((it: Iteration) => ({
    index: it.index,
    feedback: it.feedback,
    feasible: it.feasibility.feasible,
    isLatest: it.index === record.iterations.length,
  }));
}

/** Warning highlight applies exactly at collision-flagged sample indices. */
export function isCollisionSample(flags: boolean[], index: number): boolean {
  return index >= 0 && index < flags.length && flags[index] === true;
}

export function failureBanner(record: SessionRecord): string | null {
  if (record.status !== "failed") return null;
  const note = record.notes.at(-1);
  return note ? `Session failed: ${note}` : "Session failed.";
}
