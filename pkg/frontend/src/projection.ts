// Orthographic orbit camera: torso-frame points (x forward, y robot-left,
// z up) onto canvas pixels. Pure math, testable without a canvas.

export interface Camera {
  yaw: number; // radians around +z
  pitch: number; // radians of tilt toward the viewer
  zoom: number; // pixels per meter
  centerX: number; // canvas pixels
  centerY: number;
}

export interface Projected {
  x: number;
  y: number;
  depth: number; // larger = closer to the viewer
}

export function defaultCamera(width: number, height: number): Camera {
  return {
    yaw: 0.5,
    pitch: 0.25,
    zoom: Math.min(width, height) * 0.55,
    centerX: width / 2,
    centerY: height * 0.52,
  };
}

export function project(camera: Camera, point: [number, number, number]): Projected {
  const [px, py, pz] = point;
  const cy = Math.cos(camera.yaw);
  const sy = Math.sin(camera.yaw);
  // rotate around z, then tilt: screen-right is the rotated -y, screen-up is z
  const rx = px * cy + py * sy; // toward the viewer
  const ry = -px * sy + py * cy;
  const cp = Math.cos(camera.pitch);
  const sp = Math.sin(camera.pitch);
  const screenX = -ry;
  const screenY = pz * cp - rx * sp;
  const depth = rx * cp + pz * sp;
  return {
    x: camera.centerX + screenX * camera.zoom,
    y: camera.centerY - screenY * camera.zoom,
    depth,
  };
}

export function orbit(camera: Camera, dYaw: number, dPitch: number): Camera {
  const pitch = Math.min(Math.max(camera.pitch + dPitch, -1.4), 1.4);
  return { ...camera, yaw: camera.yaw + dYaw, pitch };
}

export function zoomBy(camera: Camera, factor: number): Camera {
  return { ...camera, zoom: Math.min(Math.max(camera.zoom * factor, 20), 4000) };
}
