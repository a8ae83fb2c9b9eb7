import { describe, expect, it } from "vitest";

import { defaultCamera, orbit, project, zoomBy } from "../src/projection.js";

const camera = { yaw: 0, pitch: 0, zoom: 100, centerX: 320, centerY: 210 };

describe("orthographic projection", () => {
  it("puts the origin at the canvas center", () => {
    const p = project(camera, [0, 0, 0]);
    expect(p.x).toBe(320);
    expect(p.y).toBe(210);
  });

  it("maps +z up and robot-left to screen-left at zero yaw", () => {
    const up = project(camera, [0, 0, 0.5]);
    expect(up.y).toBeLessThan(210);
    expect(up.x).toBe(320);
    const left = project(camera, [0, 0.5, 0]);
    expect(left.x).toBeLessThan(320); // robot's left appears on screen left (facing us)
  });

  it("treats +x (toward the viewer) as closer at zero yaw", () => {
    const near = project(camera, [0.5, 0, 0]);
    const far = project(camera, [-0.5, 0, 0]);
    expect(near.depth).toBeGreaterThan(far.depth);
  });

  it("scales with zoom", () => {
    const p1 = project(camera, [0, 0.3, 0]);
    const p2 = project(zoomBy(camera, 2), [0, 0.3, 0]);
    expect(Math.abs(p2.x - 320)).toBeCloseTo(2 * Math.abs(p1.x - 320), 6);
  });

  it("a quarter-turn yaw swings x into the lateral axis", () => {
    const turned = orbit(camera, Math.PI / 2, 0);
    const p = project(turned, [0.5, 0, 0]);
    // x-axis now points along the old -y: appears to one side, same height
    expect(Math.abs(p.x - 320)).toBeGreaterThan(10);
    expect(p.y).toBeCloseTo(210, 6);
  });

  it("clamps pitch to avoid flipping over the pole", () => {
    const tipped = orbit(camera, 0, 10);
    expect(tipped.pitch).toBeLessThanOrEqual(1.4);
  });

  it("default camera centers on the torso area", () => {
    const cam = defaultCamera(640, 420);
    expect(cam.centerX).toBe(320);
    expect(cam.zoom).toBeGreaterThan(100);
  });
});
