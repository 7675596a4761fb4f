/** The four emotion corners of the valence/arousal square. */

export type Bit = 0 | 1;

export interface Quadrant {
  v: Bit;
  a: Bit;
}

export const QUADRANTS: readonly Quadrant[] = [
  { v: 0, a: 0 },
  { v: 0, a: 1 },
  { v: 1, a: 0 },
  { v: 1, a: 1 },
];

const LABELS: Record<string, string> = {
  "0,0": "Suspenseful",
  "0,1": "Agitated",
  "1,0": "Calm",
  "1,1": "Happy",
};

export function emotionLabel(q: Quadrant): string {
  const label = LABELS[`${q.v},${q.a}`];
  if (label === undefined) throw new Error(`not a corner: (${q.v}, ${q.a})`);
  return label;
}

export function sameQuadrant(x: Quadrant | null, y: Quadrant | null): boolean {
  if (x === null || y === null) return x === y;
  return x.v === y.v && x.a === y.a;
}
