// App wiring: hash routing, DOM assembly, playback loop. View decisions live
// in viewmodel.ts; pose math in projection.ts; drawing in render.ts.

import { ApiClient, ApiError } from "./api.js";
import {
  advance,
  initialPlayback,
  PlaybackState,
  sampleIndex,
  seekFraction,
  setSpeed,
  toggle,
} from "./playback.js";
import { Camera, defaultCamera, orbit, zoomBy } from "./projection.js";
import { COLORS, drawHandPaths, drawSample } from "./render.js";
import type { SessionRecord, TrajectoryPayload } from "./types.js";
import {
  failureBanner,
  feedbackFormState,
  isCollisionSample,
  metricDeltas,
  metricRows,
  refinementCounter,
  statusBadgeClass,
  STATUS_LABELS,
  timeline,
} from "./viewmodel.js";

const api = new ApiClient("");
const root = document.getElementById("app")!;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function errorBox(err: unknown): HTMLElement {
  const message =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  return el("div", { class: "error-banner" }, message);
}

// --- session list ------------------------------------------------------------

async function renderSessionList(): Promise<void> {
  root.replaceChildren(el("p", { class: "muted" }, "loading sessions..."));
  try {
    const sessions = await api.listSessions();
    const list = el("div", { class: "session-list" });
    list.append(el("h1", {}, "Sessions"));
    if (!sessions.length) {
      list.append(
        el("p", { class: "muted" }, "No sessions yet. Create one with the CLI or POST /api/sessions."),
      );
    }
    for (const s of sessions) {
      const row = el(
        "a",
        { class: "session-row", href: `#/session/${s.id}` },
        el("span", { class: statusBadgeClass(s.status) }, STATUS_LABELS[s.status]),
        el("span", { class: "session-gesture" }, s.gesture ?? "(analyzing)"),
        el("span", { class: "muted" }, `${s.iterations} iteration${s.iterations === 1 ? "" : "s"}`),
        el("span", { class: "muted session-id" }, s.id),
      );
      list.append(row);
    }
    root.replaceChildren(list);
  } catch (err) {
    root.replaceChildren(errorBox(err));
  }
}

// --- session view -------------------------------------------------------------

interface PlayerHandles {
  stop(): void;
}

function mountPlayer(
  canvas: HTMLCanvasElement,
  payload: TrajectoryPayload,
  controls: HTMLElement,
): PlayerHandles {
  const ctx = canvas.getContext("2d")!;
  let camera: Camera = defaultCamera(canvas.width, canvas.height);
  let playback: PlaybackState = initialPlayback(payload.duration);

  const playButton = el("button", {}, "play");
  const speedSelect = el("select", {});
  for (const speed of ["0.5", "1", "2", "4"]) {
    const option = el("option", { value: speed }, `${speed}x`);
    if (speed === "1") option.setAttribute("selected", "");
    speedSelect.append(option);
  }
  const scrubber = el("input", {
    type: "range",
    min: "0",
    max: "1000",
    value: "0",
    class: "scrubber",
  });
  const clock = el("span", { class: "muted clock" }, "0.00 s");
  controls.replaceChildren(playButton, speedSelect, scrubber, clock);

  playButton.addEventListener("click", () => {
    playback = toggle(playback);
    playButton.textContent = playback.playing ? "pause" : "play";
  });
  speedSelect.addEventListener("change", () => {
    playback = setSpeed(playback, Number(speedSelect.value));
  });
  scrubber.addEventListener("input", () => {
    playback = seekFraction(
      { ...playback, playing: false },
      Number(scrubber.value) / 1000,
    );
    playButton.textContent = "play";
  });

  let dragging = false;
  canvas.addEventListener("mousedown", () => (dragging = true));
  window.addEventListener("mouseup", () => (dragging = false));
  canvas.addEventListener("mousemove", (event) => {
    if (dragging) camera = orbit(camera, -event.movementX * 0.01, event.movementY * 0.01);
  });
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    camera = zoomBy(camera, event.deltaY < 0 ? 1.1 : 0.9);
  });

  let last = performance.now();
  let raf = 0;
  const frame = (now: number) => {
    const wallDt = (now - last) / 1000;
    last = now;
    playback = advance(playback, wallDt);
    if (!playback.playing) playButton.textContent = "play";
    const index = sampleIndex(playback.time, payload.rate, payload.sample_count);
    drawSample(ctx, camera, payload, index, {
      collision: isCollisionSample(payload.collision_flags, index),
    });
    if (playback.duration > 0) {
      scrubber.value = String(Math.round((playback.time / playback.duration) * 1000));
    }
    clock.textContent = `${playback.time.toFixed(2)} / ${payload.duration.toFixed(2)} s (sample ${index})`;
    raf = requestAnimationFrame(frame);
  };
  raf = requestAnimationFrame(frame);
  return { stop: () => cancelAnimationFrame(raf) };
}

function metricsTable(rows: { name: string; left: string; right: string }[]): HTMLElement {
  const table = el("table", { class: "metrics" });
  table.append(
    el("tr", {}, el("th", {}, "metric"), el("th", {}, "left"), el("th", {}, "right")),
  );
  for (const row of rows) {
    table.append(
      el("tr", {}, el("td", {}, row.name), el("td", {}, row.left), el("td", {}, row.right)),
    );
  }
  return table;
}

let activePlayer: PlayerHandles | null = null;

async function renderSession(id: string): Promise<void> {
  activePlayer?.stop();
  root.replaceChildren(el("p", { class: "muted" }, `loading session ${id}...`));
  let record: SessionRecord;
  try {
    record = await api.getSession(id);
  } catch (err) {
    root.replaceChildren(errorBox(err));
    return;
  }

  const view = el("div", { class: "session-view" });
  view.append(
    el(
      "div",
      { class: "header" },
      el("a", { href: "#/" }, "← sessions"),
      el("h1", {}, record.gesture?.name ?? "(no gesture yet)"),
      el("span", { class: statusBadgeClass(record.status) }, STATUS_LABELS[record.status]),
    ),
  );

  const banner = failureBanner(record);
  if (banner) {
    view.append(el("div", { class: "error-banner" }, banner));
    root.replaceChildren(view);
    return; // failed sessions have nothing to play
  }

  if (record.analysis) {
    view.append(
      el(
        "details",
        { class: "analysis" },
        el("summary", {}, "context analysis"),
        el("p", {}, record.analysis.narrative),
      ),
    );
  }

  // iteration timeline
  const chips = el("div", { class: "timeline" });
  const entries = timeline(record);
  let selected = record.iterations.length;
  const canvas = el("canvas", {
    width: "640",
    height: "420",
    class: "scene",
  }) as HTMLCanvasElement;
  const controls = el("div", { class: "controls" });
  const metricsHost = el("div", {});

  const selectIteration = async (index: number) => {
    selected = index;
    for (const child of chips.children) {
      child.classList.toggle("selected", child.getAttribute("data-index") === String(index));
    }
    const iteration = record.iterations.find((it) => it.index === index)!;
    metricsHost.replaceChildren(metricsTable(metricRows(iteration.metrics)));
    try {
      const payload = await api.getTrajectory(id, { rate: 50, iteration: index });
      activePlayer?.stop();
      activePlayer = mountPlayer(canvas, payload, controls);
    } catch (err) {
      controls.replaceChildren(errorBox(err));
    }
  };

  for (const entry of entries) {
    const chip = el(
      "button",
      { class: "chip", "data-index": String(entry.index) },
      el("strong", {}, `#${entry.index}`),
      el("span", {}, entry.feasible ? "" : " ⚠"),
      el("span", { class: "muted" }, entry.feedback ? ` ${entry.feedback}` : ""),
    );
    chip.addEventListener("click", () => void selectIteration(entry.index));
    chips.append(chip);
  }
  view.append(chips, canvas, controls, metricsHost);

  // feedback form
  const form = feedbackFormState(record);
  const textarea = el("textarea", {
    placeholder: "natural-language feedback, e.g. “put your hands higher”",
  }) as HTMLTextAreaElement;
  const submit = el("button", {}, form.pending ? "refining..." : "send feedback");
  const counter = el("span", { class: "muted" }, refinementCounter(record));
  if (form.disabled) {
    textarea.setAttribute("disabled", "");
    submit.setAttribute("disabled", "");
  }
  const formBox = el(
    "div",
    { class: "feedback-form" },
    el("h2", {}, "Feedback"),
    counter,
    textarea,
    submit,
  );
  if (form.reason) formBox.append(el("p", { class: "muted" }, form.reason));

  submit.addEventListener("click", async () => {
    const text = textarea.value.trim();
    if (!text) return;
    submit.setAttribute("disabled", "");
    submit.textContent = "refining...";
    try {
      await api.postFeedback(id, text);
      const wanted = record.iterations.length + 1;
      await api.pollSession(id, (r) => r.iterations.length >= wanted || r.status === "failed", {
        intervalMs: 500,
      });
      await renderSession(id); // re-render; newest iteration auto-selected
    } catch (err) {
      formBox.append(errorBox(err));
      submit.textContent = "send feedback";
      if (!(err instanceof ApiError && err.code === "ITERATION_LIMIT")) {
        submit.removeAttribute("disabled");
      }
    }
  });
  view.append(formBox);

  // footer actions
  const actions = el("div", { class: "actions" });
  const finalizeButton = el("button", {}, "finalize");
  finalizeButton.addEventListener("click", async () => {
    try {
      const result = await api.finalize(id);
      actions.append(el("span", { class: "muted" }, ` exported ${result.artifacts.length} artifacts`));
    } catch (err) {
      actions.append(errorBox(err));
    }
  });
  actions.append(finalizeButton);
  if (record.iterations.length >= 2) {
    const a = record.iterations.length - 1;
    const b = record.iterations.length;
    actions.append(
      el("a", { href: `#/compare/${id}/${a}/${b}`, class: "compare-link" }, `compare #${a} vs #${b}`),
    );
  }
  view.append(actions);

  root.replaceChildren(view);
  if (record.iterations.length) await selectIteration(selected);
}

// --- compare view ---------------------------------------------------------------

async function renderCompare(id: string, a: number, b: number): Promise<void> {
  activePlayer?.stop();
  root.replaceChildren(el("p", { class: "muted" }, "loading comparison..."));
  try {
    const [ta, tb] = await Promise.all([
      api.getTrajectory(id, { rate: 50, iteration: a }),
      api.getTrajectory(id, { rate: 50, iteration: b }),
    ]);
    const canvas = el("canvas", { width: "640", height: "420", class: "scene" }) as HTMLCanvasElement;
    const ctx = canvas.getContext("2d")!;
    const camera = defaultCamera(canvas.width, canvas.height);
    ctx.fillStyle = COLORS.background;
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    drawHandPaths(ctx, camera, ta, COLORS.pathA);
    drawHandPaths(ctx, camera, tb, COLORS.pathB);

    const table = el("table", { class: "metrics" });
    table.append(
      el(
        "tr",
        {},
        el("th", {}, "metric"),
        el("th", {}, `#${a}`),
        el("th", {}, `#${b}`),
        el("th", {}, "delta"),
      ),
    );
    for (const row of metricDeltas(ta.metrics, tb.metrics)) {
      table.append(
        el(
          "tr",
          {},
          el("td", {}, row.name),
          el("td", {}, row.a),
          el("td", {}, row.b),
          el("td", {}, row.delta),
        ),
      );
    }
    root.replaceChildren(
      el(
        "div",
        { class: "compare-view" },
        el("div", { class: "header" }, el("a", { href: `#/session/${id}` }, "← session")),
        el("h1", {}, `iteration #${a} vs #${b}`),
        el(
          "p",
          { class: "muted" },
          el("span", { class: "swatch", style: `background:${COLORS.pathA}` }),
          ` #${a}   `,
          el("span", { class: "swatch", style: `background:${COLORS.pathB}` }),
          ` #${b}`,
        ),
        canvas,
        table,
      ),
    );
  } catch (err) {
    root.replaceChildren(errorBox(err));
  }
}

// --- router -----------------------------------------------------------------------

function route(): void {
  const hash = window.location.hash || "#/";
  const compare = hash.match(/^#\/compare\/([^/]+)\/(\d+)\/(\d+)$/);
  if (compare) {
    void renderCompare(compare[1]!, Number(compare[2]), Number(compare[3]));
    return;
  }
  const session = hash.match(/^#\/session\/([^/]+)$/);
  if (session) {
    void renderSession(session[1]!);
    return;
  }
  void renderSessionList();
}

window.addEventListener("hashchange", route);
route();
