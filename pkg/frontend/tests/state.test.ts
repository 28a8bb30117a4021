import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { EditorStore } from "../src/state";
import { FakeServer, FIXTURE_PLAN, FIXTURE_TRIANGULATION } from "./helpers";

describe("EditorStore", () => {
  let server: FakeServer;
  let store: EditorStore;

  beforeEach(async () => {
    server = new FakeServer();
    store = new EditorStore(new ApiClient({ fetchFn: server.fetch }));
    await store.load();
  });

  it("mirrors the fixture plan and triangulation", () => {
    expect(store.draft?.nodes).toHaveLength(25);
    expect(store.triangulation?.triangles).toHaveLength(32);
    expect(JSON.stringify(store.serverPlan)).toBe(JSON.stringify(FIXTURE_PLAN));
    expect(store.dirty).toBe(false);
  });

  it("edit-save-reload reproduces the document bit-exact", async () => {
    store.updateNodeParams(0, { acceleration: 2.25, body_dir: -0.4 });
    expect(store.dirty).toBe(true);
    expect(await store.save()).toBe(true);
    expect(store.dirty).toBe(false);

    const savedText = JSON.stringify(store.serverPlan);
    const reloaded = new EditorStore(
      new ApiClient({ fetchFn: server.fetch }),
    );
    await reloaded.load();
    expect(JSON.stringify(reloaded.serverPlan)).toBe(savedText);
    expect(JSON.stringify(reloaded.draft)).toBe(savedText);
  });

  it("clamps dragged body_dir at the range edge and warns", () => {
    store.updateNodeParams(3, { body_dir: 2.4 });
    const hi = FIXTURE_PLAN.limits.body_dir_range[1];
    expect(store.draft!.nodes[3].body_dir).toBe(hi);
    expect(store.lastClamp).toEqual({
      node: 3,
      field: "body_dir",
      requested: 2.4,
      applied: hi,
    });
  });

  it("clamps acceleration to [0, max]", () => {
    store.updateNodeParams(1, { acceleration: -5 });
    expect(store.draft!.nodes[1].acceleration).toBe(0);
    store.updateNodeParams(1, { acceleration: 99 });
    expect(store.draft!.nodes[1].acceleration).toBe(
      FIXTURE_PLAN.limits.max_acceleration,
    );
  });

  it("refuses to leave edit mode with unsaved edits unless forced", () => {
    store.updateNodeParams(0, { acceleration: 2.0 });
    expect(store.setMode("play")).toBe(false);
    expect(store.mode).toBe("edit");
    expect(store.setMode("play", { discardEdits: true })).toBe(true);
    expect(store.mode).toBe("play");
    // forced switch reverted the draft to the server document
    expect(store.dirty).toBe(false);
    expect(store.draft!.nodes[0].acceleration).toBe(
      FIXTURE_PLAN.nodes[0].acceleration,
    );
  });

  it("insert pushes a node through PUT and keeps the echo", async () => {
    const before = store.draft!.nodes.length;
    expect(await store.insertNode(2.5, -1.5)).toBe(true);
    expect(server.putCount).toBe(1);
    expect(store.draft!.nodes).toHaveLength(before + 1);
    const added = store.draft!.nodes[before];
    expect(added.x).toBe(2.5);
    expect(added.y).toBe(-1.5);
    expect(store.dirty).toBe(false);
  });

  it("rolls the insert back when the server rejects it", async () => {
    // a draft already out of range makes the PUT fail server-side
    store.draft!.nodes[2].acceleration = 42;
    const before = store.draft!.nodes.length;
    expect(await store.insertNode(0, 0)).toBe(false);
    expect(store.draft!.nodes).toHaveLength(before);
    expect(store.invalidNodes().has(2)).toBe(true);
  });

  it("keeps validation details from a rejected save", async () => {
    store.draft!.nodes[7].ball_dir = 9;
    expect(await store.save()).toBe(false);
    expect(store.lastValidation[0].node).toBe(7);
    expect(store.lastValidation[0].field).toBe("ball_dir");
    // server copy untouched
    expect(server.plan.nodes[7].ball_dir).toBe(FIXTURE_PLAN.nodes[7].ball_dir);
  });

  it("revert drops draft edits", async () => {
    store.updateNodeParams(0, { acceleration: 2.0 });
    await store.revert();
    expect(store.dirty).toBe(false);
    expect(store.draft!.nodes[0].acceleration).toBe(
      FIXTURE_PLAN.nodes[0].acceleration,
    );
  });

  it("finds the nearest node to a world position", () => {
    const node = FIXTURE_PLAN.nodes[12];
    expect(store.nearestNodeIndex(node.x + 0.2, node.y - 0.1)).toBe(12);
  });

  it("remove deletes via PUT and clears the selection", async () => {
    store.selectNode(4);
    expect(await store.removeNode(4)).toBe(true);
    expect(store.draft!.nodes).toHaveLength(24);
    expect(store.selectedNode).toBe(null);
  });

  it("triangulation refreshes after a save", async () => {
    server.triangulation = { triangles: [[0, 1, 2]] };
    await store.save();
    expect(store.triangulation?.triangles).toHaveLength(1);
  });
});

describe("fixture consistency", () => {
  it("triangle indices all point at fixture nodes", () => {
    for (const tri of FIXTURE_TRIANGULATION.triangles) {
      for (const i of tri) {
        expect(i).toBeGreaterThanOrEqual(0);
        expect(i).toBeLessThan(FIXTURE_PLAN.nodes.length);
      }
    }
  });
});
