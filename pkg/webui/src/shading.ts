/** Executed-line shading: more recently executed lines are more saturated. */

import type { GoalViewJson } from './model.js';

export interface LineShade {
  line: number;
  /** 0..1, the most recently executed line gets 1. */
  saturation: number;
  active: boolean;
}

export function computeLineShading(view: GoalViewJson): LineShade[] {
  const executed = [...view.executedLines].sort((a, b) => a.recencyRank - b.recencyRank);
  if (executed.length === 0) return [];
  const maxRank = Math.max(...executed.map((e) => e.recencyRank));
  const shades = executed.map((e) => ({
    line: e.line,
    saturation: maxRank === 0 ? 1 : 0.25 + 0.75 * (e.recencyRank / maxRank),
    active: view.activeExecuted && view.activeLine === e.line,
  }));
  if (!view.activeExecuted && view.activeLine !== null) {
    shades.push({ line: view.activeLine, saturation: 1, active: true });
  }
  // stable order by line number so equal ranks render deterministically
  return shades.sort((a, b) => a.line - b.line || Number(a.active) - Number(b.active));
}

export function shadeColor(shade: LineShade): string {
  if (shade.active) return 'hsl(120 70% 72%)';
  const light = 97 - Math.round(shade.saturation * 17);
  return `hsl(120 55% ${light}%)`;
}
