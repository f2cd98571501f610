// Entity View: treemap/list tabs, a coordinate map, and an info card with a
// button that loads the entity's own cluster hierarchy.

import { sentimentColor } from "../color.js";
import { squarify } from "../treemap.js";
import type { EntityRecord } from "../types.js";

export interface EntityViewOptions {
  entities: EntityRecord[];
  disabled: boolean;
  colorAttribute: string | null;
  attributes: string[];
  selectedId: string | null;
  tab: "treemap" | "list";
  onSelect: (id: string | null) => void;
  onLoadClusters: (id: string) => void;
  onColorAttribute: (attribute: string | null) => void;
  onTab: (tab: "treemap" | "list") => void;
}

export const TREEMAP_WIDTH = 360;
export const TREEMAP_HEIGHT = 260;

function fillFor(entity: EntityRecord, attribute: string | null): string {
  if (!attribute) return "#cfd8dc";
  const score = entity.attr_means[attribute];
  return score === undefined ? "#eceff1" : sentimentColor(score);
}

export function renderEntityView(container: HTMLElement, opts: EntityViewOptions): void {
  container.replaceChildren();
  container.classList.add("entity-view");

  const heading = document.createElement("h2");
  heading.textContent = "Entities";
  container.append(heading);

  if (opts.disabled) {
    const note = document.createElement("p");
    note.className = "entities-disabled";
    note.textContent = "No entity metadata in this dataset; treemap and map are unavailable.";
    container.append(note);
    return;
  }

  const controls = document.createElement("div");
  controls.className = "entity-controls";
  for (const tab of ["treemap", "list"] as const) {
    const button = document.createElement("button");
    button.textContent = tab;
    button.dataset.tab = tab;
    button.className = opts.tab === tab ? "tab active" : "tab";
    button.addEventListener("click", () => opts.onTab(tab));
    controls.append(button);
  }
  const colorSelect = document.createElement("select");
  colorSelect.className = "entity-color";
  colorSelect.append(new Option("(no color)", ""));
  for (const attribute of opts.attributes) {
    const option = new Option(attribute, attribute);
    option.selected = attribute === opts.colorAttribute;
    colorSelect.append(option);
  }
  colorSelect.addEventListener("change", () => opts.onColorAttribute(colorSelect.value || null));
  controls.append(colorSelect);
  container.append(controls);

  if (opts.tab === "treemap") {
    container.append(renderTreemap(opts));
  } else {
    container.append(renderList(opts));
  }

  container.append(renderMap(opts));
  const selected = opts.entities.find((e) => e.id === opts.selectedId);
  if (selected) container.append(renderCard(selected, opts));
}

function renderTreemap(opts: EntityViewOptions): HTMLElement {
  const box = document.createElement("div");
  box.className = "treemap";
  box.style.position = "relative";
  box.style.width = `${TREEMAP_WIDTH}px`;
  box.style.height = `${TREEMAP_HEIGHT}px`;

  // similar entities sit together: order by the server's grouping key
  const ordered = [...opts.entities].sort(
    (a, b) => a.group - b.group || b.review_count - a.review_count || a.id.localeCompare(b.id),
  );
  const rects = squarify(
    ordered.map((e) => ({ id: e.id, value: e.review_count, group: e.group })),
    TREEMAP_WIDTH,
    TREEMAP_HEIGHT,
  );
  const byId = new Map(opts.entities.map((e) => [e.id, e]));
  for (const rect of rects) {
    const entity = byId.get(rect.id)!;
    const cell = document.createElement("div");
    cell.className = "treemap-cell";
    cell.dataset.entityId = entity.id;
    cell.dataset.area = String(rect.w * rect.h);
    cell.title = `${entity.name} (${entity.review_count} reviews)`;
    cell.style.position = "absolute";
    cell.style.left = `${rect.x}px`;
    cell.style.top = `${rect.y}px`;
    cell.style.width = `${rect.w}px`;
    cell.style.height = `${rect.h}px`;
    cell.style.background = fillFor(entity, opts.colorAttribute);
    cell.style.outline = entity.id === opts.selectedId ? "2px solid #222" : "1px solid #fff";
    if (rect.w > 50 && rect.h > 18) cell.textContent = entity.name;
    cell.addEventListener("click", () => opts.onSelect(entity.id));
    box.append(cell);
  }
  return box;
}

function renderList(opts: EntityViewOptions): HTMLElement {
  const list = document.createElement("ul");
  list.className = "entity-list";
  for (const entity of opts.entities) {
    const item = document.createElement("li");
    item.dataset.entityId = entity.id;
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = fillFor(entity, opts.colorAttribute);
    const label = document.createElement("span");
    label.textContent = `${entity.name} (${entity.review_count})`;
    item.append(swatch, label);
    if (entity.id === opts.selectedId) item.classList.add("selected");
    item.addEventListener("click", () => opts.onSelect(entity.id));
    list.append(item);
  }
  return list;
}

function renderMap(opts: EntityViewOptions): HTMLElement {
  const located = opts.entities.filter((e) => e.lat != null && e.lon != null);
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "entity-map");
  svg.setAttribute("viewBox", "0 0 360 200");
  svg.setAttribute("width", "360");
  svg.setAttribute("height", "200");
  if (located.length === 0) return svg as unknown as HTMLElement;

  const lats = located.map((e) => e.lat as number);
  const lons = located.map((e) => e.lon as number);
  const [minLat, maxLat] = [Math.min(...lats), Math.max(...lats)];
  const [minLon, maxLon] = [Math.min(...lons), Math.max(...lons)];
  const sx = (lon: number) => 15 + (330 * (lon - minLon)) / Math.max(maxLon - minLon, 1e-9);
  const sy = (lat: number) => 185 - (170 * (lat - minLat)) / Math.max(maxLat - minLat, 1e-9);

  for (const entity of located) {
    const dot = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    const isSelected = entity.id === opts.selectedId;
    dot.setAttribute("cx", String(sx(entity.lon as number)));
    dot.setAttribute("cy", String(sy(entity.lat as number)));
    dot.setAttribute("r", isSelected ? "7" : "3");
    dot.setAttribute("fill", isSelected ? "#d32f2f" : "#78909c");
    dot.setAttribute("data-entity-id", entity.id);
    if (isSelected) dot.setAttribute("class", "map-pin");
    svg.append(dot);
  }
  return svg as unknown as HTMLElement;
}

function renderCard(entity: EntityRecord, opts: EntityViewOptions): HTMLElement {
  const card = document.createElement("div");
  card.className = "entity-card";
  const title = document.createElement("h3");
  title.textContent = entity.name;
  card.append(title);
  if (entity.image_url) {
    const img = document.createElement("img");
    img.src = entity.image_url;
    img.alt = entity.name;
    img.width = 120;
    card.append(img);
  }
  if (entity.address) {
    const address = document.createElement("p");
    address.textContent = entity.address;
    card.append(address);
  }
  const count = document.createElement("p");
  count.textContent = `${entity.review_count} reviews`;
  card.append(count);
  const load = document.createElement("button");
  load.className = "load-entity-clusters";
  load.textContent = "Load clusters for this entity";
  load.addEventListener("click", () => opts.onLoadClusters(entity.id));
  card.append(load);
  return card;
}
