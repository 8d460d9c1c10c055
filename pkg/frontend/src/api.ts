/**
 * Typed client for the workbench REST API.
 *
 * Every method maps 1:1 to a documented endpoint; there is no UI-only
 * endpoint and no endpoint without a control somewhere in the interface.
 */

import type {
  ActionView,
  ApiErrorBody,
  DebugReport,
  GoalLiteral,
  KeyframeAck,
  PlanView,
  ProblemView,
  SceneView,
  SessionSummary,
  StepResponse,
} from "./types.js";

/** A domain error returned by the server (TypeViolation, NoSolution, ...). */
export class ApiFailure extends Error {
  readonly kind: string;
  readonly status: number;
  readonly body: unknown;

  constructor(status: number, body: ApiErrorBody & Record<string, unknown>) {
    super(body.message ?? `HTTP ${status}`);
    this.kind = body.error ?? "Unknown";
    this.status = status;
    this.body = body;
  }
}

export interface EditOp {
  op:
    | "set_param_type"
    | "add_pre"
    | "remove_pre"
    | "add_eff_plus"
    | "add_eff_minus"
    | "remove_eff"
    | "rename";
  [key: string]: unknown;
}

export class WorkbenchApi {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const data = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiFailure(response.status, data ?? { error: "Unknown", message: text });
    }
    return data as T;
  }

  getSession(): Promise<SessionSummary> {
    return this.request("GET", "/api/session");
  }

  listActions(): Promise<ActionView[]> {
    return this.request("GET", "/api/actions");
  }

  getAction(name: string): Promise<ActionView> {
    return this.request("GET", `/api/actions/${encodeURIComponent(name)}`);
  }

  createAction(body: unknown): Promise<ActionView> {
    return this.request("POST", "/api/actions", body);
  }

  copyAction(name: string, newName: string): Promise<ActionView> {
    return this.request("POST", `/api/actions/${encodeURIComponent(name)}/copy`, {
      new_name: newName,
    });
  }

  editAction(name: string, edits: EditOp[]): Promise<ActionView> {
    return this.request("PATCH", `/api/actions/${encodeURIComponent(name)}`, { edits });
  }

  demoBegin(): Promise<{ o1: string[] }> {
    return this.request("POST", "/api/demo/begin", {});
  }

  demoKeyframe(
    arm: string,
    position: [number, number, number],
    gripper: "OPEN" | "CLOSE",
  ): Promise<KeyframeAck> {
    return this.request("POST", "/api/demo/keyframe", { arm, position, gripper });
  }

  demoFinish(name: string): Promise<ActionView> {
    return this.request("POST", "/api/demo/finish", { name });
  }

  getScene(): Promise<SceneView> {
    return this.request("GET", "/api/scene");
  }

  loadScene(scene: SceneView): Promise<SceneView> {
    return this.request("POST", "/api/scene", scene);
  }

  randomizeScene(seed: number, objects = 3, positions = 4): Promise<SceneView> {
    return this.request("POST", "/api/scene", {
      randomize: { seed, objects, positions },
    });
  }

  listProblems(): Promise<ProblemView[]> {
    return this.request("GET", "/api/problems");
  }

  createProblem(body: {
    name: string;
    goal: GoalLiteral[];
    source?: "scene" | "mental-model";
    update_goal_only?: boolean;
    perception?: "FULL" | "STACK_BLIND";
    corrections?: { add?: { pred: string; args: string[] }[] };
  }): Promise<ProblemView> {
    return this.request("POST", "/api/problems", body);
  }

  solve(problem: string, optimal = false): Promise<PlanView> {
    return this.request("POST", `/api/problems/${encodeURIComponent(problem)}/solve`, {
      optimal,
    });
  }

  getPlan(planId: string): Promise<PlanView> {
    return this.request("GET", `/api/plans/${encodeURIComponent(planId)}`);
  }

  executeStep(planId: string, confirm: "ok" | "reject"): Promise<StepResponse> {
    return this.request(
      "POST",
      `/api/plans/${encodeURIComponent(planId)}/execute/step`,
      { confirm },
    );
  }

  debugReport(problem: string): Promise<DebugReport> {
    return this.request("GET", `/api/debug/${encodeURIComponent(problem)}`);
  }

  saveSession(path: string): Promise<{ saved: string }> {
    return this.request("POST", "/api/save", { path });
  }

  downloadSession(): Promise<unknown> {
    return this.request("GET", "/api/save");
  }

  loadSession(path: string): Promise<SessionSummary> {
    return this.request("POST", "/api/load", { path });
  }
}
