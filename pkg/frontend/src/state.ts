/**
 * ViewModel: the single client-side store.
 *
 * Everything here is a projection of API responses — reloading the page and
 * calling refreshAll() reconstructs the exact same view.  Mutations await
 * the server's answer before any state changes (no optimistic updates; the
 * session's single-writer queue is the truth).
 */

import { ApiFailure, WorkbenchApi } from "./api.js";
import type {
  ActionView,
  DebugReport,
  GoalLiteral,
  LogEntryView,
  PlanView,
  ProblemView,
  SceneObject,
  SessionSummary,
} from "./types.js";

/** Error pinned next to the control that caused it. */
export interface InlineError {
  scope: string; // e.g. "condition:claw_top:clear(?obj)" or "param:claw_top:?B"
  kind: string;
  message: string;
}

export interface DemoDraft {
  active: boolean;
  recorded: number;
  pickId: string | null;
  placeId: string | null;
}

export class ViewModel {
  session: SessionSummary | null = null;
  actions: ActionView[] = [];
  problems: ProblemView[] = [];
  selectedAction: string | null = null;
  selectedProblem: string | null = null;
  plan: PlanView | null = null;
  debug: DebugReport | null = null;
  stepLog: LogEntryView[] = [];
  goalDraft: GoalLiteral[] = [];
  inlineError: InlineError | null = null;
  demo: DemoDraft = { active: false, recorded: 0, pickId: null, placeId: null };
  lastGoalSatisfied: boolean | null = null;

  constructor(readonly api: WorkbenchApi) {}

  /** Rebuild the whole view from the API alone (statelessness invariant). */
  async refreshAll(): Promise<void> {
    this.session = await this.api.getSession();
    this.actions = await this.api.listActions();
    this.problems = await this.api.listProblems();
    if (this.selectedAction && !this.actions.some((a) => a.name === this.selectedAction)) {
      this.selectedAction = null;
    }
    if (!this.selectedAction && this.actions.length) {
      this.selectedAction = this.actions[0].name;
    }
    if (
      this.selectedProblem &&
      !this.problems.some((p) => p.name === this.selectedProblem)
    ) {
      this.selectedProblem = null;
    }
    if (this.plan) {
      this.plan = this.session.plans.find((p) => p.id === this.plan!.id) ?? null;
    }
    this.demo.active = this.session.demo_active;
  }

  action(name: string | null = null): ActionView | null {
    const wanted = name ?? this.selectedAction;
    return this.actions.find((a) => a.name === wanted) ?? null;
  }

  problem(name: string | null = null): ProblemView | null {
    const wanted = name ?? this.selectedProblem;
    return this.problems.find((p) => p.name === wanted) ?? null;
  }

  // -- condition checklist ---------------------------------------------------

  /**
   * Uncheck a condition row: remove the literal from the action.
   * On a server rejection the row stays (we re-fetch) and the error is
   * pinned next to it.
   */
  async removeCondition(
    actionName: string,
    section: "pre" | "eff",
    literal: { pred: string; args: string[]; positive: boolean },
  ): Promise<void> {
    const payload =
      section === "pre"
        ? { op: "remove_pre" as const, literal }
        : { op: "remove_eff" as const, atom: { pred: literal.pred, args: literal.args } };
    await this.mutateAction(actionName, payload, `condition:${actionName}:${literal.pred}(${literal.args.join(", ")})`);
  }

  /** Check a new condition into the action. */
  async addCondition(
    actionName: string,
    section: "pre" | "eff+" | "eff-",
    literal: { pred: string; args: string[]; positive: boolean },
  ): Promise<void> {
    const payload =
      section === "pre"
        ? { op: "add_pre" as const, literal }
        : section === "eff+"
          ? { op: "add_eff_plus" as const, atom: { pred: literal.pred, args: literal.args } }
          : { op: "add_eff_minus" as const, atom: { pred: literal.pred, args: literal.args } };
    await this.mutateAction(actionName, payload, `add:${actionName}:${section}`);
  }

  async setParamType(actionName: string, param: string, type: string): Promise<void> {
    await this.mutateAction(
      actionName,
      { op: "set_param_type", param, type },
      `param:${actionName}:${param}`,
    );
  }

  private async mutateAction(
    actionName: string,
    edit: Record<string, unknown>,
    scope: string,
  ): Promise<void> {
    this.inlineError = null;
    try {
      await this.api.editAction(actionName, [edit as never]);
    } catch (err) {
      if (err instanceof ApiFailure) {
        this.inlineError = { scope, kind: err.kind, message: err.message };
      } else {
        throw err;
      }
    }
    await this.refreshAll(); // revert or confirm from the source of truth
  }

  // -- demonstration macros ---------------------------------------------------

  async demoBegin(): Promise<void> {
    await this.api.demoBegin();
    this.demo = { active: true, recorded: 0, pickId: null, placeId: null };
    await this.refreshAll();
  }

  /**
   * Macro keyframes: the browser has no arm to guide, so a demonstration is
   * "click the object to pick, click the landmark to place on", which the
   * ViewModel expands into approach / grasp / retreat / transfer / release
   * poses computed from the scene geometry the API reported.
   */
  async demoPickPlace(pickId: string, placeId: string, arm = "LEFT_CLAW"): Promise<void> {
    const scene = this.session?.scene;
    if (!scene) throw new Error("no scene loaded");
    const pick = scene.objects.find((o) => o.id === pickId);
    if (!pick) throw new Error(`no object ${pickId}`);
    const target =
      scene.objects.find((o) => o.id === placeId) ??
      scene.positions.find((p) => p.id === placeId);
    if (!target) throw new Error(`no landmark ${placeId}`);

    const grasp: [number, number, number] = [
      pick.pose[0],
      pick.pose[1],
      pick.pose[2] + pick.dims[2] / 2,
    ];
    const targetTop =
      "dims" in target ? target.pose[2] + target.dims[2] : 0;
    const [tx, ty] = [target.pose[0], target.pose[1]];
    const release: [number, number, number] = [tx, ty, targetTop + pick.dims[2] / 2];

    await this.api.demoKeyframe(arm, [grasp[0], grasp[1], grasp[2] + 0.12], "OPEN");
    await this.api.demoKeyframe(arm, grasp, "CLOSE");
    await this.api.demoKeyframe(arm, [grasp[0], grasp[1], grasp[2] + 0.18], "CLOSE");
    await this.api.demoKeyframe(arm, [tx, ty, targetTop + 0.18], "CLOSE");
    await this.api.demoKeyframe(arm, release, "OPEN");
    this.demo.recorded = 5;
    this.demo.pickId = pickId;
    this.demo.placeId = placeId;
  }

  async demoFinish(name: string): Promise<ActionView> {
    const action = await this.api.demoFinish(name);
    this.demo = { active: false, recorded: 0, pickId: null, placeId: null };
    this.selectedAction = action.name;
    await this.refreshAll();
    return action;
  }

  // -- problems and goals -------------------------------------------------------

  addGoalLiteral(lit: GoalLiteral): void {
    const key = (l: GoalLiteral) => `${l.positive}:${l.pred}(${l.args.join(",")})`;
    if (!this.goalDraft.some((l) => key(l) === key(lit))) {
      this.goalDraft = [...this.goalDraft, lit];
    }
  }

  removeGoalLiteral(index: number): void {
    this.goalDraft = this.goalDraft.filter((_, i) => i !== index);
  }

  get solveEnabled(): boolean {
    return this.goalDraft.length > 0;
  }

  async createProblem(
    name: string,
    source: "scene" | "mental-model" = "scene",
  ): Promise<void> {
    await this.api.createProblem({ name, goal: this.goalDraft, source });
    this.selectedProblem = name;
    await this.refreshAll();
  }

  async solve(optimal = false): Promise<PlanView | null> {
    if (!this.selectedProblem) return null;
    this.debug = null;
    try {
      this.plan = await this.api.solve(this.selectedProblem, optimal);
      this.stepLog = [];
      this.lastGoalSatisfied = null;
    } catch (err) {
      if (err instanceof ApiFailure && err.kind === "NoSolution") {
        // the server attaches the full debug report; the panel auto-opens
        const body = err.body as { debug?: DebugReport };
        this.debug = body.debug ?? (await this.api.debugReport(this.selectedProblem));
        this.plan = null;
      } else {
        throw err;
      }
    }
    await this.refreshAll();
    return this.plan;
  }

  // -- execution stepper -----------------------------------------------------------

  async executeStep(verdict: "ok" | "reject"): Promise<void> {
    if (!this.plan) return;
    const response = await this.api.executeStep(this.plan.id, verdict);
    this.stepLog = [...this.stepLog, ...response.entries];
    this.lastGoalSatisfied = response.goal_satisfied;
    this.plan = response.plan;
    await this.refreshAll(); // scene view refreshes from the API, not locally
  }

  async openDebug(): Promise<void> {
    if (!this.selectedProblem) return;
    this.debug = await this.api.debugReport(this.selectedProblem);
  }
}
