// Playback clock: wall time x speed maps onto trajectory time; pure and
// deterministic so scrubbing and speed changes are exactly reproducible.

export interface PlaybackState {
  time: number; // seconds into the trajectory
  speed: number; // wall-clock multiplier
  playing: boolean;
  duration: number;
  loop: boolean;
}

export function initialPlayback(duration: number, speed = 1): PlaybackState {
  return { time: 0, speed, playing: false, duration, loop: false };
}

/** Advance by a wall-clock delta; clamps (or wraps, when looping) at the end. */
export function advance(state: PlaybackState, wallDt: number): PlaybackState {
  if (!state.playing || wallDt <= 0) return state;
  let time = state.time + wallDt * state.speed;
  let playing: boolean = state.playing;
  if (time >= state.duration) {
    if (state.loop) {
      time = state.duration > 0 ? time % state.duration : 0;
    } else {
      time = state.duration;
      playing = false;
    }
  }
  return { ...state, time, playing };
}

/** Wall-clock seconds a full run takes at the current speed. */
export function wallDuration(state: PlaybackState): number {
  return state.duration / state.speed;
}

export function seekFraction(state: PlaybackState, fraction: number): PlaybackState {
  const clamped = Math.min(Math.max(fraction, 0), 1);
  return { ...state, time: clamped * state.duration };
}

/** Index of the sample shown at the current time. */
export function sampleIndex(time: number, rate: number, sampleCount: number): number {
  const index = Math.round(time * rate);
  return Math.min(Math.max(index, 0), sampleCount - 1);
}

export function setSpeed(state: PlaybackState, speed: number): PlaybackState {
  return { ...state, speed: Math.max(speed, 1e-6) };
}

export function toggle(state: PlaybackState): PlaybackState {
  if (!state.playing && state.time >= state.duration) {
    return { ...state, time: 0, playing: true }; // replay from the start
  }
  return { ...state, playing: !state.playing };
}
