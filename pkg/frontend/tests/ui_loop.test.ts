/**
 * Scripted end-to-end loop against a live backend.
 *
 * Spawns `irp serve`, then drives the same ViewModel and renderers the
 * browser uses: teach by macro demonstration, toggle a condition (English
 * rendering), enter a goal, solve, step through execution with confirm, and
 * check the debug panel's verbatim hint for an unachievable goal.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { WorkbenchApi } from "../src/api";
import { renderConditions, renderDebugPanel, renderPlanPanel } from "../src/render";
import { ViewModel } from "../src/state";
import type { SceneView } from "../src/types";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let vm: ViewModel;

const TEST_SCENE: SceneView = {
  objects: [
    { id: "c1", pose: [0.35, -0.3, 0], dims: [0.05, 0.05, 0.05], type: "CUBE" },
    { id: "c2", pose: [0.35, 0.0, 0], dims: [0.05, 0.05, 0.05], type: "CUBE" },
    { id: "b1", pose: [0.65, 0.0, 0], dims: [0.18, 0.12, 0.03], type: "BASE" },
  ],
  positions: [
    { id: "A", pose: [0.35, -0.3] },
    { id: "B", pose: [0.35, 0.0] },
    { id: "C", pose: [0.35, 0.3] },
  ],
  attachments: {},
};

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/session`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("backend did not come up in time");
}

beforeAll(async () => {
  server = spawn("irp", ["serve", "--port", String(PORT)], {
    stdio: "ignore",
    detached: false,
  });
  await waitForServer();
  vm = new ViewModel(new WorkbenchApi(BASE));
  await vm.refreshAll();
}, 40_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("teach, correct, solve, execute", () => {
  it("teaches a pick-and-place by macro demonstration", async () => {
    await vm.api.loadScene(TEST_SCENE);
    await vm.refreshAll();
    await vm.demoBegin();
    expect(vm.demo.active).toBe(true);
    await vm.demoPickPlace("c1", "C");
    const action = await vm.demoFinish("move_claw");
    expect(action.name).toBe("move_claw");
    const pres = action.preconditions.map((l) => l.english);
    expect(pres).toContain("obj is on A");
    expect(pres).toContain("obj is not on B");
    // the demonstration itself moved c1 onto C in the live scene
    const scene = await vm.api.getScene();
    const c1 = scene.objects.find((o) => o.id === "c1")!;
    expect(Math.abs(c1.pose[1] - 0.3)).toBeLessThan(1e-6);
  }, 20_000);

  it("renders the condition checklist in English and toggles a literal", async () => {
    let html = renderConditions(vm.action("move_claw"), vm.session!.types, null);
    expect(html).toContain("obj is on A");
    expect(html).toContain('type="checkbox" checked');

    // widen the parameters the way the interface's dropdowns would
    await vm.setParamType("move_claw", "?A", "ELEMENT");
    await vm.setParamType("move_claw", "?B", "ELEMENT");
    expect(vm.inlineError).toBeNull();

    // add clear-on-top, then toggle it off and back on
    await vm.addCondition("move_claw", "pre", {
      pred: "clear",
      args: ["?obj"],
      positive: true,
    });
    expect(
      vm.action("move_claw")!.preconditions.some((l) => l.english === "obj is clear"),
    ).toBe(true);

    await vm.removeCondition("move_claw", "pre", {
      pred: "clear",
      args: ["?obj"],
      positive: true,
    });
    expect(
      vm.action("move_claw")!.preconditions.some((l) => l.english === "obj is clear"),
    ).toBe(false);

    await vm.addCondition("move_claw", "pre", {
      pred: "clear",
      args: ["?obj"],
      positive: true,
    });
    html = renderConditions(vm.action("move_claw"), vm.session!.types, vm.inlineError);
    expect(html).toContain("obj is clear");
  }, 20_000);

  it("rejected edits revert and pin an inline error", async () => {
    await vm.setParamType("move_claw", "?obj", "ELEMENT"); // on() needs OBJECT
    expect(vm.inlineError?.kind).toBe("TypeViolation");
    expect(vm.action("move_claw")!.params.find((p) => p.name === "?obj")!.type).toBe(
      "CUBE",
    );
    const html = renderConditions(
      vm.action("move_claw"),
      vm.session!.types,
      vm.inlineError,
    );
    expect(html).toContain("error-badge");
  }, 20_000);

  it("builds a goal, solves, and steps through execution with confirm", async () => {
    vm.goalDraft = [];
    vm.addGoalLiteral({ pred: "on", args: ["c2", "c1"], positive: true });
    expect(vm.solveEnabled).toBe(true);
    await vm.createProblem("stack_one");
    await vm.solve();
    expect(vm.plan).not.toBeNull();
    expect(vm.plan!.plan.cost).toBe(1);
    expect(vm.plan!.rendered[0]).toMatch(/^1\. move_claw\(c2, /);

    let html = renderPlanPanel(vm.plan, vm.stepLog, vm.lastGoalSatisfied);
    expect(html).toContain('data-execute-step="ok"');

    let guard = 0;
    while (vm.plan && vm.plan.status === "pending" && guard < 5) {
      await vm.executeStep("ok");
      guard += 1;
    }
    expect(vm.lastGoalSatisfied).toBe(true);
    expect(vm.plan!.status).toBe("executed");
    html = renderPlanPanel(vm.plan, vm.stepLog, vm.lastGoalSatisfied);
    expect(html).toContain("goal satisfied");

    // the scene view reflects the executed stacking (c2 now above c1)
    const scene = await vm.api.getScene();
    const c2 = scene.objects.find((o) => o.id === "c2")!;
    expect(c2.pose[2]).toBeGreaterThan(0.04);
  }, 20_000);

  it("shows the verbatim hint for an unachievable goal in the debug panel", async () => {
    vm.goalDraft = [];
    // nothing ever adds thin(...) and the base plate is not thin
    vm.addGoalLiteral({ pred: "thin", args: ["b1"], positive: true });
    await vm.createProblem("impossible");
    const plan = await vm.solve();
    expect(plan).toBeNull();
    expect(vm.debug).not.toBeNull();
    const html = renderDebugPanel(vm.debug);
    expect(html).toContain(
      "make sure the action effects can achieve the goal states",
    );
  }, 20_000);

  it("reconstructs the whole view from the API alone after a reload", async () => {
    const fresh = new ViewModel(new WorkbenchApi(BASE));
    await fresh.refreshAll();
    expect(fresh.session!.actions).toContain("move_claw");
    expect(fresh.session!.problems).toEqual(
      expect.arrayContaining(["stack_one", "impossible"]),
    );
    expect(fresh.session!.plans.length).toBeGreaterThan(0);
    const html = renderConditions(
      fresh.action("move_claw"),
      fresh.session!.types,
      null,
    );
    expect(html).toContain("obj is clear");
  }, 20_000);
});
