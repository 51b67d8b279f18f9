/**
 * Two-panel figure assembly: panel (a) mean fidelity per iteration, one
 * line per epsilon, y fixed to [0, 1]; panel (b) the exploration range
 * per iteration, linear or log.  Pure function of the parsed rows — the
 * style cycle is pinned in code so figures from different runs line up,
 * with the smallest epsilon first.
 */

import { ResultRow } from "./schema";
import { Series, buildSeries } from "./series";
import { LinearScale, LogScale, Scale, SvgBuilder, coord, tickLabel } from "./svg";

export type Panel = "fidelity" | "delta" | "both";

export interface RenderOptions {
  panel: Panel;
  logDelta: boolean;
}

export interface RenderResult {
  svg: string;
  warnings: string[];
}

// one visual slot per epsilon, smallest epsilon first
const COLORS = ["#1f77b4", "#d62728", "#e6b800", "#7b2d8b", "#2ca02c", "#6b6b6b"];
const MARKERS = ["cross", "circle", "plus", "triangle", "diamond", "square"] as const;

const PLOT_W = 400;
const PLOT_H = 300;
const MARGIN = { left: 64, right: 18, top: 30, bottom: 48 };
const LEGEND_H = 26;
const PANEL_W = MARGIN.left + PLOT_W + MARGIN.right;
const PANEL_H = MARGIN.top + PLOT_H + MARGIN.bottom;

function styleFor(index: number) {
  return {
    color: COLORS[index % COLORS.length],
    marker: MARKERS[index % MARKERS.length],
  };
}

function drawMarker(
  svg: SvgBuilder,
  kind: (typeof MARKERS)[number],
  x: number,
  y: number,
  color: string,
): void {
  const r = 3;
  const attrs = `fill="none" stroke="${color}" stroke-width="1.2"`;
  switch (kind) {
    case "cross":
      svg.path(
        `M${coord(x - r)} ${coord(y - r)}L${coord(x + r)} ${coord(y + r)}` +
          `M${coord(x - r)} ${coord(y + r)}L${coord(x + r)} ${coord(y - r)}`,
        attrs,
      );
      break;
    case "circle":
      svg.circle(x, y, r, attrs);
      break;
    case "plus":
      svg.path(
        `M${coord(x - r)} ${coord(y)}L${coord(x + r)} ${coord(y)}` +
          `M${coord(x)} ${coord(y - r)}L${coord(x)} ${coord(y + r)}`,
        attrs,
      );
      break;
    case "triangle":
      svg.path(
        `M${coord(x)} ${coord(y - r)}L${coord(x + r)} ${coord(y + r)}` +
          `L${coord(x - r)} ${coord(y + r)}Z`,
        attrs,
      );
      break;
    case "diamond":
      svg.path(
        `M${coord(x)} ${coord(y - r)}L${coord(x + r)} ${coord(y)}` +
          `L${coord(x)} ${coord(y + r)}L${coord(x - r)} ${coord(y)}Z`,
        attrs,
      );
      break;
    case "square":
      svg.rect(x - r, y - r, 2 * r, 2 * r, attrs);
      break;
  }
}

interface PanelSpec {
  title: string;
  yLabel: string;
  series: Series[];
  yScale: Scale;
  skipNonPositive: boolean;
}

function drawPanel(svg: SvgBuilder, originX: number, originY: number, spec: PanelSpec): number {
  const left = originX + MARGIN.left;
  const top = originY + MARGIN.top;
  const bottom = top + PLOT_H;
  const right = left + PLOT_W;

  const maxIteration = Math.max(1, ...spec.series.flatMap((s) => s.iterations));
  const x = new LinearScale(0, maxIteration, left, right);

  svg.rect(left, top, PLOT_W, PLOT_H, 'fill="none" stroke="#222222" stroke-width="1"');
  for (const tick of x.ticks()) {
    const px = x.at(tick);
    svg.line(px, bottom, px, bottom + 4, "#222222");
    svg.line(px, top, px, bottom, "#eeeeee");
    svg.text(px, bottom + 17, tickLabel(tick), 'text-anchor="middle" font-size="11"');
  }
  for (const tick of spec.yScale.ticks()) {
    const py = spec.yScale.at(tick);
    svg.line(left - 4, py, left, py, "#222222");
    svg.line(left, py, right, py, "#eeeeee");
    svg.text(left - 7, py + 3.5, tickLabel(tick), 'text-anchor="end" font-size="11"');
  }
  svg.text((left + right) / 2, bottom + 35, "iteration", 'text-anchor="middle" font-size="12"');
  svg.raw(
    `<text x="${coord(originX + 16)}" y="${coord((top + bottom) / 2)}" text-anchor="middle" ` +
      `font-size="12" transform="rotate(-90 ${coord(originX + 16)} ${coord((top + bottom) / 2)})">` +
      `${spec.yLabel}</text>`,
  );
  svg.text((left + right) / 2, top - 10, spec.title, 'text-anchor="middle" font-size="13"');

  let skipped = 0;
  spec.series.forEach((series, index) => {
    const { color, marker } = styleFor(index);
    let segment: Array<[number, number]> = [];
    const flush = () => {
      svg.polyline(segment, color);
      segment = [];
    };
    const points: Array<[number, number]> = [];
    for (let k = 0; k < series.iterations.length; k += 1) {
      const value = series.values[k];
      if (spec.skipNonPositive && value <= 0) {
        skipped += 1;
        flush();
        continue;
      }
      const px = x.at(series.iterations[k]);
      const py = spec.yScale.at(value);
      segment.push([px, py]);
      points.push([px, py]);
    }
    flush();
    const stride = Math.max(1, Math.floor(points.length / 20));
    for (let k = 0; k < points.length; k += stride) {
      drawMarker(svg, marker, points[k][0], points[k][1], color);
    }
  });
  return skipped;
}

function drawLegend(svg: SvgBuilder, series: Series[], width: number): void {
  const entryWidth = 86;
  const total = series.length * entryWidth;
  let cursor = (width - total) / 2;
  const y = 14;
  series.forEach((s, index) => {
    const { color, marker } = styleFor(index);
    svg.line(cursor, y, cursor + 22, y, color, 1.5);
    drawMarker(svg, marker, cursor + 11, y, color);
    svg.text(cursor + 27, y + 3.5, `eps = ${s.epsilon}`, 'font-size="11"');
    cursor += entryWidth;
  });
}

export function renderFigure(rows: ResultRow[], options: RenderOptions): RenderResult {
  const warnings: string[] = [];
  const fidelity = buildSeries(rows, "meanFidelity");
  const delta = buildSeries(rows, "meanDelta");
  const panels = options.panel === "both" ? 2 : 1;
  const width = panels * PANEL_W;
  const height = LEGEND_H + PANEL_H;
  const svg = new SvgBuilder(width, height);
  drawLegend(svg, fidelity, width);

  const panelSpecs: PanelSpec[] = [];
  if (options.panel === "fidelity" || options.panel === "both") {
    panelSpecs.push({
      title: options.panel === "both" ? "(a) mean fidelity" : "mean fidelity",
      yLabel: "mean fidelity",
      series: fidelity,
      yScale: new LinearScale(0, 1, LEGEND_H + MARGIN.top + PLOT_H, LEGEND_H + MARGIN.top),
      skipNonPositive: false,
    });
  }
  if (options.panel === "delta" || options.panel === "both") {
    const values = delta.flatMap((s) => s.values);
    const positive = values.filter((v) => v > 0);
    let yScale: Scale;
    let skip = false;
    if (options.logDelta) {
      if (positive.length === 0) {
        warnings.push("log-delta requested but no positive range values; panel left empty");
        yScale = new LogScale(0.1, 10, LEGEND_H + MARGIN.top + PLOT_H, LEGEND_H + MARGIN.top);
      } else {
        yScale = new LogScale(
          Math.min(...positive),
          Math.max(...positive),
          LEGEND_H + MARGIN.top + PLOT_H,
          LEGEND_H + MARGIN.top,
        );
      }
      skip = true;
    } else {
      const top = values.length > 0 ? Math.max(...values) : 1;
      yScale = new LinearScale(0, top > 0 ? top : 1, LEGEND_H + MARGIN.top + PLOT_H, LEGEND_H + MARGIN.top);
    }
    panelSpecs.push({
      title: options.panel === "both" ? "(b) mean exploration range" : "mean exploration range",
      yLabel: options.logDelta ? "mean delta (log)" : "mean delta",
      series: delta,
      yScale,
      skipNonPositive: skip,
    });
  }

  panelSpecs.forEach((spec, index) => {
    const skipped = drawPanel(svg, index * PANEL_W, LEGEND_H, spec);
    if (skipped > 0) {
      warnings.push(`log scale skipped ${skipped} non-positive range values`);
    }
  });
  return { svg: svg.render(), warnings };
}
