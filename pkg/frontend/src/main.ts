import { ApiClient, ApiError } from "./api.js";
import { FitnessChart } from "./chart.js";
import { TracePlayback } from "./playback.js";
import { renderScene, Viewport } from "./scene.js";
import { EditorStore, type EditorMode } from "./state.js";
import {
  FITNESS_FORM_DEFAULTS,
  GA_FORM_DEFAULTS,
  type GaForm,
  type PlanDoc,
} from "./types.js";

const KICKABLE_RADIUS = 1.085;

const api = new ApiClient();
const store = new EditorStore(api);
const chart = new FitnessChart();
const playback = new TracePlayback();

let overlayPlan: PlanDoc | null = null;
let activeJobId: string | null = null;
let closeStream: (() => void) | null = null;

const field = document.querySelector<HTMLCanvasElement>("#field")!;
const chartCanvas = document.querySelector<HTMLCanvasElement>("#chart")!;
const view = new Viewport(field.width, field.height, 32);

function $(id: string): HTMLElement {
  return document.getElementById(id)!;
}

function setStatus(text: string, cssClass = ""): void {
  const badge = $("job-status");
  badge.textContent = text;
  badge.className = `badge ${cssClass}`;
}

function toast(message: string): void {
  const el = $("toast");
  el.textContent = message;
  el.classList.add("visible");
  window.setTimeout(() => el.classList.remove("visible"), 4000);
}

// ---------------------------------------------------------------------------
// plan view

function render(): void {
  const ctx = field.getContext("2d")!;
  renderScene(ctx, view, {
    plan: store.draft,
    triangulation: store.triangulation,
    selectedNode: store.selectedNode,
    invalidNodes: store.invalidNodes(),
    trace: playback.trace?.states ?? null,
    traceCursor: store.mode === "play" ? playback.cursor : null,
    kickableRadius: KICKABLE_RADIUS,
    overlay: overlayPlan,
  });
  chart.draw(chartCanvas.getContext("2d")!, chartCanvas.width, chartCanvas.height);
  syncPanel();
}

function syncPanel(): void {
  $("node-count").textContent = String(store.draft?.nodes.length ?? 0);
  $("triangle-count").textContent = String(
    store.triangulation?.triangles.length ?? 0,
  );
  $("save-state").textContent = store.dirty ? "unsaved edits" : "saved";

  const problems = $("problems");
  problems.innerHTML = "";
  for (const detail of store.lastValidation) {
    const li = document.createElement("li");
    li.textContent =
      detail.node !== null
        ? `node ${detail.node} (${detail.field}): ${detail.message}`
        : detail.message;
    problems.appendChild(li);
  }

  const clamp = store.lastClamp;
  $("clamp-warning").textContent = clamp
    ? `node ${clamp.node} ${clamp.field} clamped to ${clamp.applied.toFixed(3)}`
    : "";

  const editor = $("node-editor");
  const i = store.selectedNode;
  if (i === null || !store.draft) {
    editor.classList.add("hidden");
    return;
  }
  editor.classList.remove("hidden");
  $("selected-label").textContent = `node ${i}`;
  const node = store.draft.nodes[i];
  for (const name of ["acceleration", "body_dir", "ball_dir"] as const) {
    const input = document.querySelector<HTMLInputElement>(`#edit-${name}`)!;
    if (document.activeElement !== input) {
      input.value = node[name].toFixed(3);
    }
  }
}

store.onChange = render;

for (const name of ["acceleration", "body_dir", "ball_dir"] as const) {
  document
    .querySelector<HTMLInputElement>(`#edit-${name}`)!
    .addEventListener("change", (ev) => {
      const i = store.selectedNode;
      if (i === null) {
        return;
      }
      const value = Number((ev.target as HTMLInputElement).value);
      if (Number.isFinite(value)) {
        store.updateNodeParams(i, { [name]: value });
      }
    });
}

$("save-plan").addEventListener("click", () => {
  void store.save().then((ok) => {
    if (!ok) {
      toast("plan rejected; see problems list");
    }
  });
});
$("revert-plan").addEventListener("click", () => void store.revert());
$("delete-node").addEventListener("click", () => {
  if (store.selectedNode !== null) {
    void store.removeNode(store.selectedNode);
  }
});

// mode buttons
for (const mode of ["insert", "edit", "play"] as EditorMode[]) {
  $(`mode-${mode}`).addEventListener("click", () => {
    let ok = store.setMode(mode);
    if (!ok) {
      if (window.confirm("Discard unsaved node edits?")) {
        ok = store.setMode(mode, { discardEdits: true });
      }
    }
    if (ok) {
      document
        .querySelectorAll(".mode-button")
        .forEach((b) => b.classList.remove("active"));
      $(`mode-${mode}`).classList.add("active");
    }
  });
}

// canvas interaction: INSERT adds at the cursor, EDIT selects and drags
// the body direction of the selected node toward the cursor.
let dragging = false;

field.addEventListener("mousedown", (ev) => {
  const rect = field.getBoundingClientRect();
  const [wx, wy] = view.screenToWorld(ev.clientX - rect.left, ev.clientY - rect.top);
  if (store.mode === "insert") {
    void store.insertNode(wx, wy).then((ok) => {
      if (!ok) {
        toast("insert rejected; see problems list");
      }
    });
  } else if (store.mode === "edit") {
    store.selectNode(store.nearestNodeIndex(wx, wy));
    dragging = true;
  }
});

field.addEventListener("mousemove", (ev) => {
  if (!dragging || store.mode !== "edit" || store.selectedNode === null) {
    return;
  }
  const rect = field.getBoundingClientRect();
  const [wx, wy] = view.screenToWorld(ev.clientX - rect.left, ev.clientY - rect.top);
  const node = store.draft!.nodes[store.selectedNode];
  store.updateNodeParams(store.selectedNode, {
    body_dir: Math.atan2(wy - node.y, wx - node.x),
  });
});

window.addEventListener("mouseup", () => {
  dragging = false;
});

// ---------------------------------------------------------------------------
// optimization

function readGaForm(): Partial<GaForm> {
  const form: Record<string, number | string> = {};
  for (const key of Object.keys(GA_FORM_DEFAULTS) as (keyof GaForm)[]) {
    const input = document.querySelector<HTMLInputElement | HTMLSelectElement>(
      `#ga-${key}`,
    )!;
    form[key] =
      key === "selection_method" ? input.value : Number(input.value);
  }
  return form as Partial<GaForm>;
}

function fillGaForm(): void {
  for (const [key, value] of Object.entries(GA_FORM_DEFAULTS)) {
    const input = document.querySelector<HTMLInputElement | HTMLSelectElement>(
      `#ga-${key}`,
    )!;
    input.value = String(value);
  }
  (document.querySelector<HTMLInputElement>("#fit-alpha")!).value = String(
    FITNESS_FORM_DEFAULTS.alpha_user,
  );
  (document.querySelector<HTMLInputElement>("#fit-beta")!).value = String(
    FITNESS_FORM_DEFAULTS.beta_user,
  );
}

$("start-optimize").addEventListener("click", () => {
  closeStream?.();
  closeStream = null;
  chart.reset();
  overlayPlan = null;
  const fitness = {
    alpha_user: Number(
      document.querySelector<HTMLInputElement>("#fit-alpha")!.value,
    ),
    beta_user: Number(
      document.querySelector<HTMLInputElement>("#fit-beta")!.value,
    ),
  };
  api
    .startOptimize(readGaForm(), fitness)
    .then((jobId) => {
      activeJobId = jobId;
      setStatus("running", "running");
      closeStream = api.streamJob(jobId, {
        onGeneration: (ev) => {
          chart.append(ev);
          if (!chart.bestIsNonDecreasing()) {
            toast("best fitness decreased — optimizer invariant broken");
          }
          render();
        },
        onTerminal: (status) => {
          setStatus(status, status);
          closeStream = null;
          if (status === "done" || status === "cancelled") {
            void api.getJob(jobId).then((job) => {
              if (job.result) {
                overlayPlan = job.result.best_plan;
                render();
              }
            });
          }
        },
      });
    })
    .catch((err) => {
      if (err instanceof ApiError && err.status === 409) {
        toast("an optimization is already running");
      } else {
        toast(String(err));
      }
      setStatus("idle");
    });
});

$("cancel-optimize").addEventListener("click", () => {
  if (activeJobId) {
    void api.cancelJob(activeJobId).catch(() => undefined);
  }
});

$("adopt-result").addEventListener("click", () => {
  if (!overlayPlan) {
    toast("no optimized plan yet");
    return;
  }
  void api.putPlan(overlayPlan).then(() => {
    overlayPlan = null;
    return store.load();
  });
});

// ---------------------------------------------------------------------------
// play mode

function playLoop(): void {
  const running = playback.tick(performance.now());
  render();
  updateReadouts();
  if (running) {
    window.requestAnimationFrame(playLoop);
  }
}

function updateReadouts(): void {
  const r = playback.readouts(KICKABLE_RADIUS);
  $("readout-distance").textContent =
    r.minObstacleDistance === null
      ? "–"
      : `${r.minObstacleDistance.toFixed(3)} m ${r.cleared ? "(clear)" : "(too close!)"}`;
  $("readout-finish").textContent =
    r.finishTime === null ? (r.termination ?? "–") : `${r.finishTime.toFixed(1)} s`;
}

$("run-sim").addEventListener("click", () => {
  const start = (
    document.querySelector<HTMLInputElement>("#sim-start")!.value || "-12,0"
  )
    .split(",")
    .map(Number) as [number, number];
  const v0 = (document.querySelector<HTMLInputElement>("#sim-v0")!.value || "4,0")
    .split(",")
    .map(Number) as [number, number];
  api
    .simulate({ start, v0 })
    .then((trace) => {
      playback.load(trace);
      playback.play(performance.now());
      updateReadouts();
      window.requestAnimationFrame(playLoop);
    })
    .catch((err) => toast(`simulation failed: ${err}`));
});

// ---------------------------------------------------------------------------

fillGaForm();
setStatus("idle");
void store.load().catch((err) => toast(`failed to load plan: ${err}`));
