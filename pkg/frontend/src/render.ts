/**
 * Pure HTML renderers.
 *
 * Every panel is a function from API data to an HTML string; the app shell
 * injects the strings and delegates events via data attributes.  Keeping
 * renderers pure makes the whole view testable without a browser.
 */

import type { InlineError, ViewModel } from "./state.js";
import type {
  ActionView,
  DebugReport,
  GoalLiteral,
  LiteralView,
  LogEntryView,
  PlanView,
  ProblemView,
  SceneView,
  SessionSummary,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function attr(value: unknown): string {
  return escapeHtml(JSON.stringify(value));
}

// -- scene: top-down table with stack badges ---------------------------------

const TABLE = { minX: 0.2, maxX: 0.8, minY: -0.45, maxY: 0.45, w: 640, h: 420 };

function sx(x: number): number {
  return ((x - TABLE.minX) / (TABLE.maxX - TABLE.minX)) * TABLE.w;
}

function sy(y: number): number {
  return ((y - TABLE.minY) / (TABLE.maxY - TABLE.minY)) * TABLE.h;
}

function scale(len: number): number {
  return (len / (TABLE.maxX - TABLE.minX)) * TABLE.w;
}

/**
 * Objects sharing a column (same footprint center within 6 cm) render as one
 * footprint with a stack badge; the topmost object's label wins.
 */
export function renderScene(scene: SceneView, selectable = false): string {
  const held = new Set(Object.values(scene.attachments));
  const columns: { base: (typeof scene.objects)[number]; ids: string[] }[] = [];
  const sorted = [...scene.objects].sort((a, b) => a.pose[2] - b.pose[2]);
  for (const obj of sorted) {
    if (held.has(obj.id)) continue;
    const near = columns.find(
      (c) =>
        Math.hypot(c.base.pose[0] - obj.pose[0], c.base.pose[1] - obj.pose[1]) < 0.06,
    );
    if (near) near.ids.push(obj.id);
    else columns.push({ base: obj, ids: [obj.id] });
  }

  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${TABLE.w} ${TABLE.h}" class="scene-svg" role="img" aria-label="tabletop">`,
    `<rect x="0" y="0" width="${TABLE.w}" height="${TABLE.h}" class="table"/>`,
  );
  for (const pos of scene.positions) {
    const [x, y] = pos.pose;
    parts.push(
      `<g class="position${selectable ? " selectable" : ""}" data-landmark="${escapeHtml(pos.id)}">`,
      `<circle cx="${sx(x).toFixed(1)}" cy="${sy(y).toFixed(1)}" r="26" />`,
      `<text x="${sx(x).toFixed(1)}" y="${(sy(y) + 4).toFixed(1)}">${escapeHtml(pos.id)}</text>`,
      `</g>`,
    );
  }
  for (const column of columns) {
    const top = column.ids[column.ids.length - 1];
    const o = column.base;
    const w = scale(o.dims[0]);
    const l = scale(o.dims[1]);
    const x = sx(o.pose[0]) - w / 2;
    const y = sy(o.pose[1]) - l / 2;
    parts.push(
      `<g class="object type-${escapeHtml(o.type.toLowerCase())}${selectable ? " selectable" : ""}" data-landmark="${escapeHtml(top)}">`,
      `<rect x="${x.toFixed(1)}" y="${y.toFixed(1)}" width="${w.toFixed(1)}" height="${l.toFixed(1)}" rx="3"/>`,
      `<text x="${sx(o.pose[0]).toFixed(1)}" y="${(sy(o.pose[1]) + 4).toFixed(1)}">${escapeHtml(top)}</text>`,
      column.ids.length > 1
        ? `<text class="stack-badge" x="${(x + w).toFixed(1)}" y="${y.toFixed(1)}">x${column.ids.length}</text>`
        : "",
      `</g>`,
    );
  }
  for (const [arm, oid] of Object.entries(scene.attachments)) {
    if (oid) {
      parts.push(
        `<text class="held" x="8" y="${TABLE.h - 10}">held by ${escapeHtml(arm)}: ${escapeHtml(oid)}</text>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

// -- action condition checklist -------------------------------------------------

function conditionRow(
  action: string,
  section: "pre" | "eff",
  literal: LiteralView,
  error: InlineError | null,
): string {
  const scope = `condition:${action}:${literal.pred}(${literal.args.join(", ")})`;
  const badge =
    error && error.scope === scope
      ? `<span class="error-badge" title="${escapeHtml(error.message)}">${escapeHtml(error.kind)}</span>`
      : "";
  const payload = attr({
    pred: literal.pred,
    args: literal.args,
    positive: literal.positive,
  });
  return (
    `<li class="condition-row">` +
    `<label><input type="checkbox" checked data-toggle-condition="${payload}" ` +
    `data-action="${escapeHtml(action)}" data-section="${section}"/> ` +
    `<span class="english">${escapeHtml(literal.english)}</span></label>` +
    `<code class="literal">${escapeHtml(literal.text)}</code>${badge}</li>`
  );
}

export function renderActionList(vm: ViewModel): string {
  const items = vm.actions
    .map(
      (a) =>
        `<li class="${a.name === vm.selectedAction ? "selected" : ""}">` +
        `<button data-select-action="${escapeHtml(a.name)}">${escapeHtml(a.name)}</button>` +
        `<small>${a.has_motion ? "taught" : "manual"}</small></li>`,
    )
    .join("");
  return `<ul class="action-list">${items}</ul>`;
}

export function renderConditions(
  action: ActionView | null,
  types: string[],
  error: InlineError | null,
): string {
  if (!action) return `<p class="empty">No action selected — teach one first.</p>`;
  const params = action.params
    .map((p) => {
      const scope = `param:${action.name}:${p.name}`;
      const badge =
        error && error.scope === scope
          ? `<span class="error-badge" title="${escapeHtml(error.message)}">${escapeHtml(error.kind)}</span>`
          : "";
      const options = types
        .map(
          (t) =>
            `<option value="${escapeHtml(t)}" ${t === p.type ? "selected" : ""}>${escapeHtml(t.toLowerCase())}</option>`,
        )
        .join("");
      return (
        `<li class="param-row"><code>${escapeHtml(p.name)}</code> : ` +
        `<select data-param-type="${escapeHtml(p.name)}" data-action="${escapeHtml(action.name)}">${options}</select>${badge}</li>`
      );
    })
    .join("");
  const pres = action.preconditions
    .map((l) => conditionRow(action.name, "pre", l, error))
    .join("");
  const effs = action.effects
    .map((l) => conditionRow(action.name, "eff", l, error))
    .join("");
  const argOptions = action.params
    .map((p) => `<option value="${escapeHtml(p.name)}">${escapeHtml(p.name)}</option>`)
    .join("");
  return (
    `<div class="conditions" data-action-name="${escapeHtml(action.name)}">` +
    `<h3>${escapeHtml(action.name)}</h3>` +
    `<h4>parameters</h4><ul class="params">${params}</ul>` +
    `<h4>preconditions</h4><ul class="checklist">${pres}</ul>` +
    `<h4>effects</h4><ul class="checklist">${effs}</ul>` +
    `<div class="add-condition">` +
    `<select data-add-pred>` +
    `<option value="clear">clear</option><option value="on">on</option>` +
    `<option value="stackable">stackable</option><option value="flat">flat</option>` +
    `<option value="thin">thin</option></select>` +
    `<select data-add-arg1>${argOptions}</select>` +
    `<select data-add-arg2><option value="">—</option>${argOptions}</select>` +
    `<label><input type="checkbox" data-add-negated/> negated</label>` +
    `<button data-add-condition="${escapeHtml(action.name)}">add precondition</button>` +
    `</div></div>`
  );
}

// -- goal builder ------------------------------------------------------------------

export function renderGoalBuilder(
  vm: ViewModel,
  problem: ProblemView | null,
): string {
  const scene = vm.session?.scene;
  const ids = [
    ...(scene?.objects.map((o) => o.id) ?? []),
    ...(scene?.positions.map((p) => p.id) ?? []),
  ];
  const idOptions = ids
    .map((i) => `<option value="${escapeHtml(i)}">${escapeHtml(i)}</option>`)
    .join("");
  const draft = vm.goalDraft
    .map(
      (l, i) =>
        `<li>${escapeHtml(renderGoalText(l))} ` +
        `<button data-remove-goal="${i}">remove</button></li>`,
    )
    .join("");
  const existing = problem
    ? problem.goal
        .map((l) => `<li class="current-goal">${escapeHtml(l.english ?? renderGoalText(l))}</li>`)
        .join("")
    : "";
  const solveDisabled = vm.solveEnabled ? "" : ` disabled title="add at least one goal literal first"`;
  return (
    `<div class="goal-builder">` +
    `<h3>goal</h3>` +
    (existing ? `<ul class="goal-list">${existing}</ul>` : "") +
    `<ul class="goal-draft">${draft}</ul>` +
    `<div class="goal-entry">` +
    `<select data-goal-pred><option value="on">on</option><option value="clear">clear</option>` +
    `<option value="stackable">stackable</option><option value="flat">flat</option>` +
    `<option value="thin">thin</option></select>` +
    `<select data-goal-arg1>${idOptions}</select>` +
    `<select data-goal-arg2><option value="">—</option>${idOptions}</select>` +
    `<label><input type="checkbox" data-goal-negated/> not</label>` +
    `<button data-add-goal>add goal literal</button>` +
    `</div>` +
    `<div class="solve-row">` +
    `<input data-problem-name placeholder="problem name" value="${escapeHtml(problem?.name ?? "problem1")}"/>` +
    `<label><input type="checkbox" data-solve-optimal/> optimal</label>` +
    `<button data-solve${solveDisabled}>Solve</button>` +
    `</div></div>`
  );
}

function renderGoalText(l: GoalLiteral): string {
  const base = `${l.pred}(${l.args.join(", ")})`;
  return l.positive ? base : `not ${base}`;
}

// -- plan panel ----------------------------------------------------------------------

export function renderPlanPanel(
  plan: PlanView | null,
  stepLog: LogEntryView[],
  goalSatisfied: boolean | null,
): string {
  if (!plan) return `<p class="empty">No plan yet — define a goal and solve.</p>`;
  const outcomes = new Map(stepLog.map((e) => [e.index, e]));
  const rows = plan.rendered
    .map((line, i) => {
      const entry = outcomes.get(i);
      const status = entry
        ? `<span class="outcome outcome-${entry.outcome.toLowerCase()}">${entry.outcome}</span>`
        : "";
      const current =
        i === plan.next_step && plan.status === "pending"
          ? `<button data-execute-step="ok">Execute &amp; Confirm</button>` +
            `<button data-execute-step="reject">Execute &amp; Reject</button>`
          : "";
      return `<li class="${i === plan.next_step ? "next-step" : ""}">${escapeHtml(line)} ${status} ${current}</li>`;
    })
    .join("");
  const verdict =
    goalSatisfied === null
      ? ""
      : `<p class="goal-verdict">goal ${goalSatisfied ? "satisfied" : "not satisfied"}</p>`;
  return (
    `<div class="plan-panel"><h3>plan ${escapeHtml(plan.id)} ` +
    `<small>(${escapeHtml(plan.mode)}, ${plan.plan.cost} steps, ${escapeHtml(plan.status)})</small></h3>` +
    `<ol class="plan-steps">${rows}</ol>${verdict}</div>`
  );
}

// -- debug panel ------------------------------------------------------------------------

export function renderDebugPanel(report: DebugReport | null): string {
  if (!report) return "";
  const hints = report.hints
    .map(
      (h) =>
        `<li class="hint hint-${escapeHtml(h.code)}">${escapeHtml(h.message)}</li>`,
    )
    .join("");
  const actions = report.actions
    .map((a) => {
      const pres = a.preconditions.map((l) => escapeHtml(l.english)).join("; ");
      const effs = a.effects.map((l) => escapeHtml(l.english)).join("; ");
      return `<li><strong>${escapeHtml(a.name)}</strong> — needs: ${pres || "nothing"}; changes: ${effs || "nothing"}</li>`;
    })
    .join("");
  return (
    `<div class="debug-panel"><h3>debug: ${escapeHtml(report.problem)}</h3>` +
    `<h4>hints</h4><ul class="hints">${hints || "<li>no issues found</li>"}</ul>` +
    `<h4>actions</h4><ul>${actions}</ul>` +
    `<h4>initial state</h4><code>${escapeHtml(report.init.join(", "))}</code>` +
    `<h4>goal</h4><code>${escapeHtml(report.goal.join(", "))}</code></div>`
  );
}

// -- demo (teaching) panel -----------------------------------------------------------------

export function renderDemoPanel(vm: ViewModel): string {
  if (!vm.demo.active) {
    return (
      `<div class="demo-panel"><button data-demo-begin>Start demonstration</button>` +
      `<p class="muted">Teach by demonstration: start, click the object to pick, ` +
      `click the landmark to place it on, then name the action.</p></div>`
    );
  }
  const stage =
    vm.demo.recorded === 0
      ? vm.demo.pickId
        ? "now click the landmark to place on"
        : "click the object to pick"
      : "keyframes recorded — name the action and finish";
  return (
    `<div class="demo-panel demo-active"><p>demonstration in progress: ${escapeHtml(stage)}</p>` +
    `<input data-demo-name placeholder="action name"/>` +
    `<button data-demo-finish ${vm.demo.recorded ? "" : "disabled"}>Finish demo</button></div>`
  );
}

// -- whole page --------------------------------------------------------------------------

export function renderApp(vm: ViewModel): string {
  const scene = vm.session?.scene ?? { objects: [], positions: [], attachments: {} };
  return (
    `<header><h1>robot programming workbench</h1>` +
    `<nav><button data-refresh>refresh</button>` +
    `<button data-randomize>randomize scene</button></nav></header>` +
    `<main>` +
    `<section class="pane scene-pane"><h2>scene</h2>${renderScene(scene, vm.demo.active)}` +
    renderDemoPanel(vm) +
    `</section>` +
    `<section class="pane actions-pane"><h2>actions</h2>${renderActionList(vm)}` +
    renderConditions(vm.action(), vm.session?.types ?? [], vm.inlineError) +
    `</section>` +
    `<section class="pane problem-pane"><h2>problem</h2>` +
    renderGoalBuilder(vm, vm.problem()) +
    renderPlanPanel(vm.plan, vm.stepLog, vm.lastGoalSatisfied) +
    `<button data-open-debug ${vm.selectedProblem ? "" : "disabled"}>debug menu</button>` +
    renderDebugPanel(vm.debug) +
    `</section>` +
    `</main>`
  );
}
