/**
 * DOM shell: mounts the rendered view and delegates events to the ViewModel.
 *
 * Every handler awaits the API round trip and then re-renders from fresh
 * state; nothing updates optimistically.
 */

import { WorkbenchApi } from "./api.js";
import { renderApp } from "./render.js";
import { ViewModel } from "./state.js";
import type { GoalLiteral } from "./types.js";

export function createApp(root: HTMLElement, baseUrl = ""): ViewModel {
  const vm = new ViewModel(new WorkbenchApi(baseUrl));

  const rerender = () => {
    root.innerHTML = renderApp(vm);
  };

  const act = async (work: () => Promise<unknown>) => {
    try {
      await work();
    } catch (err) {
      console.error(err);
      window.alert(err instanceof Error ? err.message : String(err));
      await vm.refreshAll();
    }
    rerender();
  };

  root.addEventListener("click", (event) => {
    const el = (event.target as HTMLElement).closest("[data-select-action],[data-refresh],[data-randomize],[data-demo-begin],[data-demo-finish],[data-add-goal],[data-remove-goal],[data-solve],[data-execute-step],[data-open-debug],[data-add-condition],[data-landmark]") as HTMLElement | null;
    if (!el) return;

    if (el.dataset.selectAction) {
      vm.selectedAction = el.dataset.selectAction;
      rerender();
    } else if (el.dataset.refresh !== undefined) {
      void act(() => vm.refreshAll());
    } else if (el.dataset.randomize !== undefined) {
      void act(async () => {
        await vm.api.randomizeScene(Date.now() % 100000);
        await vm.refreshAll();
      });
    } else if (el.dataset.demoBegin !== undefined) {
      void act(() => vm.demoBegin());
    } else if (el.dataset.landmark && vm.demo.active && vm.demo.recorded === 0) {
      const id = el.dataset.landmark;
      if (!vm.demo.pickId) {
        vm.demo.pickId = id;
        rerender();
      } else {
        void act(() => vm.demoPickPlace(vm.demo.pickId as string, id));
      }
    } else if (el.dataset.demoFinish !== undefined) {
      const name =
        (root.querySelector("[data-demo-name]") as HTMLInputElement)?.value || "action1";
      void act(() => vm.demoFinish(name));
    } else if (el.dataset.addCondition) {
      const action = el.dataset.addCondition;
      const pred = (root.querySelector("[data-add-pred]") as HTMLSelectElement).value;
      const arg1 = (root.querySelector("[data-add-arg1]") as HTMLSelectElement).value;
      const arg2 = (root.querySelector("[data-add-arg2]") as HTMLSelectElement).value;
      const negated = (root.querySelector("[data-add-negated]") as HTMLInputElement)
        .checked;
      const args = arg2 ? [arg1, arg2] : [arg1];
      void act(() =>
        vm.addCondition(action, "pre", { pred, args, positive: !negated }),
      );
    } else if (el.dataset.addGoal !== undefined) {
      const pred = (root.querySelector("[data-goal-pred]") as HTMLSelectElement).value;
      const arg1 = (root.querySelector("[data-goal-arg1]") as HTMLSelectElement).value;
      const arg2 = (root.querySelector("[data-goal-arg2]") as HTMLSelectElement).value;
      const negated = (root.querySelector("[data-goal-negated]") as HTMLInputElement)
        .checked;
      const literal: GoalLiteral = {
        pred,
        args: arg2 ? [arg1, arg2] : [arg1],
        positive: !negated,
      };
      vm.addGoalLiteral(literal);
      rerender();
    } else if (el.dataset.removeGoal !== undefined) {
      vm.removeGoalLiteral(Number(el.dataset.removeGoal));
      rerender();
    } else if (el.dataset.solve !== undefined) {
      const name =
        (root.querySelector("[data-problem-name]") as HTMLInputElement)?.value ||
        "problem1";
      const optimal = (root.querySelector("[data-solve-optimal]") as HTMLInputElement)
        ?.checked;
      void act(async () => {
        await vm.createProblem(name);
        await vm.solve(optimal);
        if (!vm.plan && vm.debug) {
          // NoSolution: the debug panel is already populated and will render
        }
      });
    } else if (el.dataset.executeStep) {
      void act(() => vm.executeStep(el.dataset.executeStep as "ok" | "reject"));
    } else if (el.dataset.openDebug !== undefined) {
      void act(() => vm.openDebug());
    }
  });

  root.addEventListener("change", (event) => {
    const el = event.target as HTMLElement;
    if (el.matches("[data-toggle-condition]")) {
      const input = el as HTMLInputElement;
      const literal = JSON.parse(input.dataset.toggleCondition as string);
      const action = input.dataset.action as string;
      const section = input.dataset.section as "pre" | "eff";
      void act(() => vm.removeCondition(action, section, literal));
    } else if (el.matches("[data-param-type]")) {
      const select = el as HTMLSelectElement;
      void act(() =>
        vm.setParamType(
          select.dataset.action as string,
          select.dataset.paramType as string,
          select.value,
        ),
      );
    }
  });

  void act(() => vm.refreshAll());
  return vm;
}
