/**
 * Sequence locks between resolution tabs.
 *
 * A tab is enabled only once every prerequisite production has been edited
 * at least once, mirroring the statement's lock declarations.
 */

import type { Flow } from "./model.js";

export function prerequisitesOf(flow: Flow, productionId: string): string[] {
  return flow.locks.filter(([blocked]) => blocked === productionId).map(([, prereq]) => prereq);
}

export function isTabEnabled(flow: Flow, productionId: string, edited: Set<string>): boolean {
  return prerequisitesOf(flow, productionId).every((prereq) => edited.has(prereq));
}

export function enabledTabs(flow: Flow, edited: Set<string>): string[] {
  return flow.productions
    .slice()
    .sort((a, b) => a.order - b.order)
    .filter((p) => isTabEnabled(flow, p.id, edited))
    .map((p) => p.id);
}
