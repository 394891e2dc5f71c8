/** The 16 dinucleotide sliders (k=2 only) are log-scaled: a slider at
 * position p contributes weight 10^p, except at the bottom of the range where
 * the weight snaps to exactly zero so a k-mer can be excluded outright. The
 * weights are sent to the server unnormalized; all simplex math happens
 * server-side. */

import { allKmers } from "./kmers.js";

export const SLIDER_MIN = -4;
export const SLIDER_MAX = 2;
export const SLIDER_STEP = 0.05;
export const SLIDER_DEFAULT = 0;

export const DINUCLEOTIDES: readonly string[] = allKmers(2);

export function weightFromPosition(position: number): number {
  if (position <= SLIDER_MIN) return 0;
  return 10 ** position;
}

/** Inverse of weightFromPosition for restoring slider state; zero maps to the
 * bottom stop. */
export function positionFromWeight(weight: number): number {
  if (weight <= 0) return SLIDER_MIN;
  return Math.min(SLIDER_MAX, Math.max(SLIDER_MIN, Math.log10(weight)));
}

export function weightsFromPositions(positions: readonly number[]): number[] {
  return positions.map(weightFromPosition);
}
