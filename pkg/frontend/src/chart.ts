/** Bar-chart geometry for the thetaUsed panel (shown for k <= 3). The layout
 * math is pure; only drawBars touches a canvas. */

import { kmerFromIndex } from "./kmers.js";

export interface Bar {
  x: number;
  y: number;
  width: number;
  height: number;
  label: string;
  value: number;
}

export function barGeometry(
  theta: readonly number[],
  k: number,
  plotWidth: number,
  plotHeight: number
): Bar[] {
  const count = theta.length;
  const peak = Math.max(...theta, 1e-12);
  const slot = plotWidth / count;
  const barWidth = Math.max(1, slot * 0.8);
  return theta.map((value, i) => {
    const height = (value / peak) * plotHeight;
    return {
      x: i * slot + (slot - barWidth) / 2,
      y: plotHeight - height,
      width: barWidth,
      height,
      label: kmerFromIndex(i, k),
      value,
    };
  });
}

export function drawBars(
  canvas: HTMLCanvasElement,
  theta: readonly number[],
  k: number
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const labelBand = 14;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const bars = barGeometry(theta, k, canvas.width, canvas.height - labelBand);
  ctx.fillStyle = "#3a6ea5";
  for (const bar of bars) {
    ctx.fillRect(bar.x, bar.y, bar.width, bar.height);
  }
  if (k <= 2) {
    ctx.fillStyle = "#333";
    ctx.font = "9px monospace";
    ctx.textAlign = "center";
    for (const bar of bars) {
      ctx.fillText(bar.label, bar.x + bar.width / 2, canvas.height - 3);
    }
  }
}
