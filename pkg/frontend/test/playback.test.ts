import { describe, expect, it } from "vitest";

import {
  advance,
  initialPlayback,
  sampleIndex,
  seekFraction,
  setSpeed,
  toggle,
  wallDuration,
} from "../src/playback.js";

describe("playback clock", () => {
  it("completes a 4.5 s trajectory in 2.25 s of wall time at speed 2", () => {
    let state = setSpeed({ ...initialPlayback(4.5), playing: true }, 2);
    expect(wallDuration(state)).toBeCloseTo(2.25, 10);
    let wall = 0;
    const step = 1 / 60;
    while (state.playing) {
      state = advance(state, step);
      wall += step;
    }
    expect(state.time).toBe(4.5);
    expect(wall).toBeGreaterThanOrEqual(2.25 - step);
    expect(wall).toBeLessThanOrEqual(2.25 + step);
  });

  it("advances in proportion to speed", () => {
    const base = { ...initialPlayback(10), playing: true };
    expect(advance(base, 1).time).toBeCloseTo(1);
    expect(advance(setSpeed(base, 0.5), 1).time).toBeCloseTo(0.5);
    expect(advance(setSpeed(base, 4), 1).time).toBeCloseTo(4);
  });

  it("does not move while paused", () => {
    const state = initialPlayback(4.5);
    expect(advance(state, 1).time).toBe(0);
  });

  it("seeks deterministically", () => {
    const state = initialPlayback(4.5);
    expect(seekFraction(state, 0.5).time).toBeCloseTo(2.25, 12);
    expect(seekFraction(state, -1).time).toBe(0);
    expect(seekFraction(state, 2).time).toBe(4.5);
    // same fraction always lands on the same sample
    const a = seekFraction(state, 0.337);
    const b = seekFraction(state, 0.337);
    expect(sampleIndex(a.time, 50, 226)).toBe(sampleIndex(b.time, 50, 226));
  });

  it("maps time to sample indices within range", () => {
    expect(sampleIndex(0, 50, 226)).toBe(0);
    expect(sampleIndex(4.5, 50, 226)).toBe(225);
    expect(sampleIndex(99, 50, 226)).toBe(225);
    expect(sampleIndex(0.5, 50, 226)).toBe(25);
  });

  it("replays from the start after finishing", () => {
    let state = { ...initialPlayback(1), playing: true };
    state = advance(state, 5);
    expect(state.playing).toBe(false);
    expect(state.time).toBe(1);
    state = toggle(state);
    expect(state.playing).toBe(true);
    expect(state.time).toBe(0);
  });
});
