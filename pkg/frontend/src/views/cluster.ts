// Cluster View: sibling clusters as colored circles in their server-computed
// 2-D layout, with zoom via double-click, breadcrumbs, and a stats table that
// can compare two selected clusters side by side.

import { sentimentColor } from "../color.js";
import type { ClusterRecord, SummaryRecord, SummaryResponse } from "../types.js";

export interface ClusterViewOptions {
  entity: string | null;
  path: string;
  nodes: ClusterRecord[];
  selected: string[]; // up to 2 paths
  summary: SummaryResponse | null;
  hint: string | null;
  onSelect: (path: string, additive: boolean) => void;
  onZoomIn: (node: ClusterRecord) => void;
  onZoomOut: (path: string) => void;
}

const PLOT = { width: 420, height: 320, pad: 46 };

/** Circle area is proportional to cluster size. */
export function circleRadius(size: number, maxSize: number, maxRadius = 42): number {
  if (maxSize <= 0) return 4;
  return Math.max(6, maxRadius * Math.sqrt(size / maxSize));
}

export function breadcrumbs(path: string): { label: string; path: string }[] {
  const crumbs = [{ label: "all", path: "" }];
  if (!path) return crumbs;
  const parts = path.split(".");
  for (let i = 0; i < parts.length; i++) {
    crumbs.push({ label: parts.slice(0, i + 1).join("."), path: parts.slice(0, i + 1).join(".") });
  }
  return crumbs;
}

export function renderClusterView(container: HTMLElement, opts: ClusterViewOptions): void {
  container.replaceChildren();
  container.classList.add("cluster-view");

  const heading = document.createElement("h2");
  heading.textContent = opts.entity ? `Clusters: ${opts.entity}` : "Clusters: all reviews";
  container.append(heading);

  const nav = document.createElement("nav");
  nav.className = "breadcrumbs";
  for (const crumb of breadcrumbs(opts.path)) {
    const link = document.createElement("a");
    link.href = "#";
    link.dataset.path = crumb.path;
    link.textContent = crumb.label;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      opts.onZoomOut(crumb.path);
    });
    nav.append(link);
    nav.append(document.createTextNode(" / "));
  }
  container.append(nav);

  container.append(renderPlot(opts));

  if (opts.hint) {
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = opts.hint;
    container.append(hint);
  }

  if (opts.summary) container.append(renderSummaryTable(opts.summary));
}

function renderPlot(opts: ClusterViewOptions): SVGSVGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "cluster-plot");
  svg.setAttribute("viewBox", `0 0 ${PLOT.width} ${PLOT.height}`);
  svg.setAttribute("width", String(PLOT.width));
  svg.setAttribute("height", String(PLOT.height));
  if (opts.nodes.length === 0) return svg;

  const xs = opts.nodes.map((n) => n.x);
  const ys = opts.nodes.map((n) => n.y);
  const spanX = Math.max(Math.max(...xs) - Math.min(...xs), 1e-9);
  const spanY = Math.max(Math.max(...ys) - Math.min(...ys), 1e-9);
  const sx = (x: number) => PLOT.pad + ((PLOT.width - 2 * PLOT.pad) * (x - Math.min(...xs))) / spanX;
  const sy = (y: number) => PLOT.height - PLOT.pad - ((PLOT.height - 2 * PLOT.pad) * (y - Math.min(...ys))) / spanY;
  const maxSize = Math.max(...opts.nodes.map((n) => n.size));

  for (const node of opts.nodes) {
    const group = document.createElementNS("http://www.w3.org/2000/svg", "g");
    group.setAttribute("class", "cluster-circle");
    group.setAttribute("data-path", node.path);
    group.setAttribute("data-children", String(node.n_children));

    const circle = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    const cx = opts.nodes.length === 1 ? PLOT.width / 2 : sx(node.x);
    const cy = opts.nodes.length === 1 ? PLOT.height / 2 : sy(node.y);
    circle.setAttribute("cx", String(cx));
    circle.setAttribute("cy", String(cy));
    circle.setAttribute("r", String(circleRadius(node.size, maxSize)));
    circle.setAttribute("fill", sentimentColor(node.avg_sentiment));
    circle.setAttribute("fill-opacity", "0.85");
    circle.setAttribute(
      "stroke",
      opts.selected.includes(node.path) ? "#111" : "rgba(0,0,0,0.25)",
    );
    circle.setAttribute("stroke-width", opts.selected.includes(node.path) ? "3" : "1");
    group.append(circle);

    const label = document.createElementNS("http://www.w3.org/2000/svg", "text");
    label.setAttribute("x", String(cx));
    label.setAttribute("y", String(cy + 4));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("class", "cluster-label");
    label.textContent = node.label;
    group.append(label);

    group.addEventListener("click", (event) => {
      const mouse = event as MouseEvent;
      opts.onSelect(node.path, mouse.metaKey || mouse.ctrlKey);
    });
    group.addEventListener("dblclick", () => opts.onZoomIn(node));
    svg.append(group);
  }
  return svg;
}

function statRow(label: string, values: (string | number)[]): HTMLTableRowElement {
  const row = document.createElement("tr");
  const head = document.createElement("th");
  head.textContent = label;
  row.append(head);
  for (const value of values) {
    const cell = document.createElement("td");
    cell.textContent = typeof value === "number" ? value.toFixed(2) : value;
    row.append(cell);
  }
  return row;
}

function topList(entries: [string, number][]): string {
  return entries.map(([term]) => term).join(", ");
}

function histogramCell(summary: SummaryRecord, attribute: string): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "mini-histogram";
  wrap.style.display = "flex";
  wrap.style.alignItems = "flex-end";
  wrap.style.gap = "1px";
  wrap.style.height = "18px";
  const hist = summary.histograms[attribute];
  const peak = Math.max(1, ...hist.counts);
  hist.counts.forEach((count, i) => {
    const bar = document.createElement("span");
    const mid = (hist.edges[i] + hist.edges[i + 1]) / 2;
    bar.style.display = "inline-block";
    bar.style.width = "5px";
    bar.style.height = `${Math.round((16 * count) / peak) + 1}px`;
    bar.style.background = sentimentColor(mid);
    wrap.append(bar);
  });
  return wrap;
}

function renderSummaryTable(summary: SummaryResponse): HTMLElement {
  const section = document.createElement("div");
  section.className = "summary-table";

  const columns: { name: string; data: SummaryRecord }[] = [
    { name: `cluster ${summary.path || "(root)"}`, data: summary.summary },
  ];
  if (summary.compare && summary.compare_path !== null) {
    columns.push({ name: `cluster ${summary.compare_path || "(root)"}`, data: summary.compare });
  }
  columns.push({ name: "whole dataset", data: summary.dataset });

  const table = document.createElement("table");
  const header = document.createElement("tr");
  header.append(document.createElement("th"));
  for (const column of columns) {
    const cell = document.createElement("th");
    cell.textContent = column.name;
    header.append(cell);
  }
  table.append(header);

  table.append(statRow("reviews", columns.map((c) => String(c.data.size))));
  table.append(statRow("avg chars", columns.map((c) => c.data.avg_chars)));
  table.append(statRow("avg words", columns.map((c) => c.data.avg_words)));
  table.append(statRow("avg sentences", columns.map((c) => c.data.avg_sentences)));
  table.append(statRow("avg sentiment", columns.map((c) => c.data.avg_sentiment)));
  const words = statRow("top-5 words", columns.map((c) => topList(c.data.top_words)));
  words.classList.add("top-words");
  table.append(words);
  const bigrams = statRow("top-5 bigrams", columns.map((c) => topList(c.data.top_bigrams)));
  bigrams.classList.add("top-bigrams");
  table.append(bigrams);

  // per-attribute rows; when comparing, flag the largest-distance attributes
  const highlight = new Set(
    (summary.divergent ?? [])
      .filter((d) => d.distance > 0)
      .slice(0, 3)
      .map((d) => d.attribute),
  );
  for (const attribute of Object.keys(summary.summary.histograms)) {
    const row = document.createElement("tr");
    row.className = "attr-row";
    row.dataset.attribute = attribute;
    const head = document.createElement("th");
    head.textContent = attribute;
    row.append(head);
    for (const column of columns) {
      const cell = document.createElement("td");
      const mean = column.data.means[attribute];
      const meanText = document.createElement("div");
      meanText.textContent = mean === undefined ? "-" : mean.toFixed(3);
      cell.append(meanText, histogramCell(column.data, attribute));
      row.append(cell);
    }
    if (highlight.has(attribute)) {
      row.classList.add("divergent");
      row.style.background = "#fff3cd";
    }
    table.append(row);
  }

  section.append(table);
  return section;
}
