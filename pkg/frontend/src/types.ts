/**
 * Shapes of the REST API's JSON responses.
 *
 * These mirror the server's serializers one to one; the client never
 * derives symbolic facts itself, it only displays what the API returns.
 */

export interface ParamView {
  name: string;
  type: string;
}

export interface LiteralView {
  pred: string;
  args: string[];
  positive: boolean;
  text: string;
  english: string;
}

export interface ActionView {
  name: string;
  params: ParamView[];
  preconditions: LiteralView[];
  effects: LiteralView[];
  has_motion: boolean;
}

export interface SceneObject {
  id: string;
  pose: [number, number, number];
  dims: [number, number, number];
  type: string;
}

export interface ScenePosition {
  id: string;
  pose: [number, number];
}

export interface SceneView {
  objects: SceneObject[];
  positions: ScenePosition[];
  attachments: Record<string, string>;
}

export interface GoalLiteral {
  pred: string;
  args: string[];
  positive: boolean;
  english?: string;
}

export interface ProblemView {
  name: string;
  init: string[];
  goal: GoalLiteral[];
  init_source: string;
  scene: SceneView;
}

export interface PlanStep {
  name: string;
  args: string[];
}

export interface PlanView {
  id: string;
  problem: string;
  mode: string;
  status: string;
  next_step: number;
  plan: { cost: number; steps: PlanStep[] };
  rendered: string[];
}

export interface LogEntryView {
  index: number;
  action: string;
  bindings: Record<string, string>;
  pre_state: string[];
  post_state: string[];
  outcome: "OK" | "REJECTED" | "FAILED";
  detail: string;
}

export interface StepResponse {
  done: boolean;
  goal_satisfied: boolean | null;
  entries: LogEntryView[];
  scene: SceneView;
  plan: PlanView;
}

export interface DebugHint {
  code: string;
  message: string;
}

export interface DebugReport {
  problem: string;
  actions: ActionView[];
  init: string[];
  goal: string[];
  hints: DebugHint[];
}

export interface PredicateView {
  name: string;
  params: string[];
}

export interface SessionSummary {
  domain: string;
  domain_version: number;
  actions: string[];
  problems: string[];
  plans: PlanView[];
  scene: SceneView;
  types: string[];
  predicates: PredicateView[];
  has_mental_model: boolean;
  demo_active: boolean;
}

export interface KeyframeAck {
  frame: { kind: string; landmark?: string; type?: string };
  recorded: number;
}

/** Error body the server sends for every domain failure. */
export interface ApiErrorBody {
  error: string;
  message: string;
}
