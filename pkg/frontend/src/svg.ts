import { CsvError, SweepRow, UpsilonRow } from "./schema.js";

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { top: 24, right: 24, bottom: 52, left: 74 } as const;
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

/** Fixed palette; protocols are assigned colors in sorted-label order. */
const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

type Attrs = Record<string, string | number>;

function tag(name: string, attrs: Attrs, children: string[] = []): string {
  const rendered = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${esc(String(v))}"`)
    .join("");
  if (children.length === 0) return `<${name}${rendered}/>`;
  return `<${name}${rendered}>${children.join("")}</${name}>`;
}

function text(content: string, attrs: Attrs): string {
  const rendered = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${esc(String(v))}"`)
    .join("");
  return `<text${rendered}>${content}</text>`;
}

function fmt(v: number): string {
  return v.toFixed(2);
}

interface Scale {
  (value: number): number;
  domain: [number, number];
}

function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const f = ((value: number) => r0 + ((value - d0) / (d1 - d0)) * (r1 - r0)) as Scale;
  f.domain = domain;
  return f;
}

function log10Scale(domain: [number, number], range: [number, number]): Scale {
  const inner = linearScale(
    [Math.log10(domain[0]), Math.log10(domain[1])],
    range,
  );
  const f = ((value: number) => inner(Math.log10(value))) as Scale;
  f.domain = domain;
  return f;
}

/** Decade ticks covering a positive domain. */
function decadeTicks(domain: [number, number]): number[] {
  const lo = Math.ceil(Math.log10(domain[0]) - 1e-9);
  const hi = Math.floor(Math.log10(domain[1]) + 1e-9);
  const ticks = [];
  for (let k = lo; k <= hi; k++) ticks.push(Math.pow(10, k));
  return ticks;
}

/** Round linear ticks using a 1/2/5 step that yields about `count` ticks. */
function linearTicks(domain: [number, number], count = 6): number[] {
  const span = domain[1] - domain[0];
  const rawStep = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count)!;
  const ticks = [];
  for (
    let v = Math.ceil(domain[0] / step) * step;
    v <= domain[1] + step * 1e-9;
    v += step
  ) {
    ticks.push(Number(v.toFixed(12)));
  }
  return ticks;
}

function decadeLabel(value: number): string {
  const k = Math.round(Math.log10(value));
  return `10<tspan baseline-shift="super" font-size="9">${k}</tspan>`;
}

function svgDocument(children: string[], kind: string): string {
  return (
    `<?xml version="1.0" encoding="UTF-8"?>\n` +
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif" ` +
    `font-size="12" data-kind="${kind}">` +
    children.join("") +
    `</svg>\n`
  );
}

function frame(): string {
  return tag("rect", {
    x: MARGIN.left,
    y: MARGIN.top,
    width: PLOT_W,
    height: PLOT_H,
    fill: "none",
    stroke: "#000000",
    "stroke-width": 1,
  });
}

function xAxis(
  scale: Scale,
  ticks: number[],
  label: string,
  format: (v: number) => string,
): string[] {
  const y0 = MARGIN.top + PLOT_H;
  const parts = ticks.flatMap((v) => [
    tag("line", {
      x1: fmt(scale(v)),
      y1: y0,
      x2: fmt(scale(v)),
      y2: y0 + 5,
      stroke: "#000000",
    }),
    text(format(v), {
      x: fmt(scale(v)),
      y: y0 + 20,
      "text-anchor": "middle",
    }),
  ]);
  parts.push(
    text(esc(label), {
      x: MARGIN.left + PLOT_W / 2,
      y: HEIGHT - 10,
      "text-anchor": "middle",
    }),
  );
  return parts;
}

function yAxis(
  scale: Scale,
  ticks: number[],
  label: string,
  format: (v: number) => string,
): string[] {
  const parts = ticks.flatMap((v) => [
    tag("line", {
      x1: MARGIN.left - 5,
      y1: fmt(scale(v)),
      x2: MARGIN.left,
      y2: fmt(scale(v)),
      stroke: "#000000",
    }),
    text(format(v), {
      x: MARGIN.left - 8,
      y: fmt(scale(v) + 4),
      "text-anchor": "end",
    }),
  ]);
  parts.push(
    text(esc(label), {
      x: 16,
      y: MARGIN.top + PLOT_H / 2,
      "text-anchor": "middle",
      transform: `rotate(-90 16 ${MARGIN.top + PLOT_H / 2})`,
    }),
  );
  return parts;
}

function groupByProtocol(rows: SweepRow[]): Map<string, SweepRow[]> {
  const groups = new Map<string, SweepRow[]>();
  for (const row of rows) {
    const list = groups.get(row.protocol) ?? [];
    list.push(row);
    groups.set(row.protocol, list);
  }
  return new Map([...groups.entries()].sort(([a], [b]) => (a < b ? -1 : 1)));
}

function legend(labels: string[]): string[] {
  return labels.flatMap((label, i) => [
    tag("line", {
      x1: MARGIN.left + PLOT_W - 130,
      y1: MARGIN.top + 14 + 16 * i,
      x2: MARGIN.left + PLOT_W - 110,
      y2: MARGIN.top + 14 + 16 * i,
      stroke: PALETTE[i % PALETTE.length]!,
      "stroke-width": 2,
    }),
    text(esc(label), {
      x: MARGIN.left + PLOT_W - 104,
      y: MARGIN.top + 18 + 16 * i,
      fill: PALETTE[i % PALETTE.length]!,
    }),
  ]);
}

/** Series markers + connecting line + error bars for one protocol. */
function seriesMarks(
  rows: SweepRow[],
  color: string,
  xscale: Scale,
  yscale: Scale,
  xValue: (r: SweepRow) => number,
  xAttr: (r: SweepRow) => [string, string],
  floor: number,
): string[] {
  const pts = rows.map((r) => [xscale(xValue(r)), yscale(r.meanInfidelity)]);
  const parts: string[] = [];
  if (pts.length > 1) {
    parts.push(
      tag("polyline", {
        points: pts.map(([x, y]) => `${fmt(x!)},${fmt(y!)}`).join(" "),
        fill: "none",
        stroke: color,
        "stroke-width": 1.5,
      }),
    );
  }
  rows.forEach((r, i) => {
    const [x, y] = pts[i]!;
    if (r.sdOfMean > 0) {
      const hi = r.meanInfidelity + r.sdOfMean;
      const lo = Math.max(r.meanInfidelity - r.sdOfMean, floor);
      parts.push(
        tag("line", {
          class: "errbar",
          x1: fmt(x!),
          y1: fmt(yscale(hi)),
          x2: fmt(x!),
          y2: fmt(yscale(lo)),
          stroke: color,
          "stroke-width": 1,
        }),
      );
    }
    const [attrName, attrValue] = xAttr(r);
    parts.push(
      tag("circle", {
        class: "mark",
        cx: fmt(x!),
        cy: fmt(y!),
        r: 3.5,
        fill: color,
        "data-protocol": r.protocol,
        [attrName]: attrValue,
        "data-mean-infidelity": r.raw["mean_infidelity"]!,
        "data-sd-of-mean": r.raw["sd_of_mean"]!,
      }),
    );
  });
  return parts;
}

/**
 * Mean infidelity versus copy budget, log-log, one series per protocol,
 * with error bars and the quadratic lower-bound line.
 */
export function renderInfidelityVsCopies(rows: SweepRow[]): string {
  for (const r of rows) {
    if (r.meanInfidelity <= 0 || r.nCopies <= 0 || r.gmBound <= 0) {
      throw new CsvError(
        `log-log figure needs positive values; got mean_infidelity=${r.meanInfidelity}, n_copies=${r.nCopies}`,
      );
    }
  }
  const bounds = new Map<number, string>();
  for (const r of rows) {
    const existing = bounds.get(r.nCopies);
    if (existing !== undefined && existing !== r.raw["gm_bound"]!) {
      throw new CsvError(
        `inconsistent gm_bound at n_copies=${r.nCopies}: ${existing} vs ${r.raw["gm_bound"]}`,
      );
    }
    bounds.set(r.nCopies, r.raw["gm_bound"]!);
  }
  const ns = [...bounds.keys()].sort((a, b) => a - b);
  const yValues = rows
    .flatMap((r) => [
      r.meanInfidelity,
      r.meanInfidelity + r.sdOfMean,
      r.meanInfidelity - r.sdOfMean,
      r.gmBound,
    ])
    .filter((v) => v > 0);
  const yLo = Math.min(...yValues) / 1.5;
  const yHi = Math.max(...yValues) * 1.5;
  const xscale = log10Scale(
    [ns[0]! / 1.5, ns[ns.length - 1]! * 1.5],
    [MARGIN.left, MARGIN.left + PLOT_W],
  );
  const yscale = log10Scale([yLo, yHi], [MARGIN.top + PLOT_H, MARGIN.top]);

  const children = [frame()];
  children.push(
    tag("polyline", {
      class: "bound",
      points: ns
        .map((n) => `${fmt(xscale(n))},${fmt(yscale(Number(bounds.get(n)!)))}`)
        .join(" "),
      fill: "none",
      stroke: "#555555",
      "stroke-dasharray": "6 4",
      "stroke-width": 1.5,
    }),
  );
  for (const n of ns) {
    children.push(
      tag("rect", {
        class: "bound-point",
        x: fmt(xscale(n) - 2),
        y: fmt(yscale(Number(bounds.get(n)!)) - 2),
        width: 4,
        height: 4,
        fill: "#555555",
        "data-n-copies": String(n),
        "data-gm-bound": bounds.get(n)!,
      }),
    );
  }
  const groups = groupByProtocol(rows);
  let i = 0;
  for (const [, series] of groups) {
    const color = PALETTE[i % PALETTE.length]!;
    series.sort((a, b) => a.nCopies - b.nCopies);
    children.push(
      ...seriesMarks(
        series,
        color,
        xscale,
        yscale,
        (r) => r.nCopies,
        (r) => ["data-n-copies", r.raw["n_copies"]!],
        yLo,
      ),
    );
    i += 1;
  }
  children.push(...legend([...groups.keys(), "bound"]));
  children.push(
    ...xAxis(xscale, decadeTicks(xscale.domain), "copies measured, N", decadeLabel),
  );
  children.push(
    ...yAxis(yscale, decadeTicks(yscale.domain), "mean infidelity", decadeLabel),
  );
  return svgDocument(children, "infidelity-vs-copies");
}

/**
 * Mean infidelity versus true purity (linear x, log y), one series per
 * protocol, with error bars.
 */
export function renderInfidelityVsPurity(rows: SweepRow[]): string {
  for (const r of rows) {
    if (r.meanInfidelity <= 0) {
      throw new CsvError("log-scale figure needs positive mean_infidelity");
    }
  }
  const purities = rows.map((r) => r.purityTrue);
  const span = Math.max(...purities) - Math.min(...purities) || 0.1;
  const xscale = linearScale(
    [Math.min(...purities) - 0.05 * span, Math.max(...purities) + 0.05 * span],
    [MARGIN.left, MARGIN.left + PLOT_W],
  );
  const yValues = rows
    .flatMap((r) => [
      r.meanInfidelity,
      r.meanInfidelity + r.sdOfMean,
      r.meanInfidelity - r.sdOfMean,
    ])
    .filter((v) => v > 0);
  const yLo = Math.min(...yValues) / 1.5;
  const yHi = Math.max(...yValues) * 1.5;
  const yscale = log10Scale([yLo, yHi], [MARGIN.top + PLOT_H, MARGIN.top]);

  const children = [frame()];
  const groups = groupByProtocol(rows);
  let i = 0;
  for (const [, series] of groups) {
    const color = PALETTE[i % PALETTE.length]!;
    series.sort((a, b) => a.purityTrue - b.purityTrue);
    children.push(
      ...seriesMarks(
        series,
        color,
        xscale,
        yscale,
        (r) => r.purityTrue,
        (r) => ["data-purity-true", r.raw["purity_true"]!],
        yLo,
      ),
    );
    i += 1;
  }
  children.push(...legend([...groups.keys()]));
  children.push(
    ...xAxis(xscale, linearTicks(xscale.domain), "true state purity", (v) =>
      String(v),
    ),
  );
  children.push(
    ...yAxis(yscale, decadeTicks(yscale.domain), "mean infidelity", decadeLabel),
  );
  return svgDocument(children, "infidelity-vs-purity");
}

export interface HistogramBin {
  ensemble: string;
  /** Lower edge of the bin; width is always 0.1. */
  binStart: number;
  count: number;
}

/** Bin improvement-index values into width-0.1 bins aligned to multiples of 0.1. */
export function binUpsilon(rows: UpsilonRow[]): HistogramBin[] {
  const ensembles = [...new Set(rows.map((r) => r.ensemble))].sort();
  const indices = rows.map((r) => Math.floor(r.upsilon / 0.1 + 1e-12));
  const lo = Math.min(...indices);
  const hi = Math.max(...indices);
  const bins: HistogramBin[] = [];
  for (const ensemble of ensembles) {
    for (let k = lo; k <= hi; k++) {
      const count = rows.filter(
        (r) =>
          r.ensemble === ensemble && Math.floor(r.upsilon / 0.1 + 1e-12) === k,
      ).length;
      bins.push({ ensemble, binStart: k / 10, count });
    }
  }
  return bins;
}

/**
 * Per-state improvement-index histogram: width-0.1 bins, side-by-side bars
 * per ensemble.  The bar counts per ensemble sum to that ensemble's number
 * of CSV rows.
 */
export function renderUpsilonHistogram(rows: UpsilonRow[]): string {
  const bins = binUpsilon(rows);
  const ensembles = [...new Set(bins.map((b) => b.ensemble))];
  const starts = [...new Set(bins.map((b) => b.binStart))].sort((a, b) => a - b);
  const maxCount = Math.max(...bins.map((b) => b.count));
  const xscale = linearScale(
    [starts[0]!, starts[starts.length - 1]! + 0.1],
    [MARGIN.left, MARGIN.left + PLOT_W],
  );
  const yscale = linearScale([0, maxCount * 1.1], [MARGIN.top + PLOT_H, MARGIN.top]);
  const binWidth = xscale(starts[0]! + 0.1) - xscale(starts[0]!);
  const barWidth = binWidth / ensembles.length;

  const children = [frame()];
  for (const bin of bins) {
    const slot = ensembles.indexOf(bin.ensemble);
    const x = xscale(bin.binStart) + slot * barWidth;
    const y = yscale(bin.count);
    children.push(
      tag("rect", {
        class: "bar",
        x: fmt(x),
        y: fmt(y),
        width: fmt(Math.max(barWidth - 1, 0.5)),
        height: fmt(MARGIN.top + PLOT_H - y),
        fill: PALETTE[slot % PALETTE.length]!,
        "fill-opacity": 0.85,
        "data-ensemble": bin.ensemble,
        "data-bin-start": String(bin.binStart),
        "data-count": String(bin.count),
      }),
    );
  }
  children.push(...legend(ensembles));
  const tickEvery = Math.max(1, Math.ceil(starts.length / 10));
  const ticks = starts.filter((_, i) => i % tickEvery === 0);
  children.push(
    ...xAxis(xscale, ticks, "improvement index", (v) => v.toFixed(1)),
  );
  children.push(
    ...yAxis(
      yscale,
      linearTicks([0, maxCount * 1.1], 6).filter((v) => Number.isInteger(v)),
      "states per bin",
      (v) => String(v),
    ),
  );
  return svgDocument(children, "improvement-index-histogram");
}
