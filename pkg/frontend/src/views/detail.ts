// Detail View: paginated review items with attribute chips, a command prompt
// with immediate local evaluation, and a Remote Run button for the full scope.

import { sentimentColor, sentimentTint } from "../color.js";
import { attributeValue } from "../commands.js";
import type { ReviewRecord } from "../types.js";

export const EXCERPT_LENGTH = 100;

export function excerpt(text: string): string {
  if (text.length <= EXCERPT_LENGTH) return text;
  return text.slice(0, EXCERPT_LENGTH) + "…";
}

export interface DetailViewOptions {
  reviews: ReviewRecord[];
  total: number;
  history: string[];
  colorAttribute: string | null;
  expandedId: string | null;
  promptError: string | null;
  onLoadMore: () => void;
  onRunLocal: (command: string) => void;
  onRemoteRun: () => void;
  onExpand: (id: string | null) => void;
}

export function renderDetailView(container: HTMLElement, opts: DetailViewOptions): void {
  container.replaceChildren();
  container.classList.add("detail-view");

  const heading = document.createElement("h2");
  heading.textContent = `Reviews (${opts.reviews.length} of ${opts.total})`;
  container.append(heading);

  container.append(renderPrompt(opts));

  const list = document.createElement("ul");
  list.className = "review-list";
  for (const review of opts.reviews) {
    list.append(renderItem(review, opts));
  }
  container.append(list);

  const more = document.createElement("button");
  more.className = "load-more";
  more.textContent = "Load More";
  more.disabled = opts.reviews.length >= opts.total;
  more.addEventListener("click", opts.onLoadMore);
  container.append(more);
}

function renderPrompt(opts: DetailViewOptions): HTMLElement {
  const box = document.createElement("div");
  box.className = "command-box";

  const input = document.createElement("input");
  input.className = "command-input";
  input.placeholder = "tGrep(/carpet/i), tSort(cleanliness, asc), …  (Ctrl+Enter to run)";
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && (event.metaKey || event.ctrlKey)) {
      opts.onRunLocal(input.value);
      input.value = "";
    }
  });

  const runButton = document.createElement("button");
  runButton.className = "run-local";
  runButton.textContent = "Run";
  runButton.addEventListener("click", () => {
    opts.onRunLocal(input.value);
    input.value = "";
  });

  const remoteButton = document.createElement("button");
  remoteButton.className = "remote-run";
  remoteButton.textContent = "Remote Run";
  remoteButton.disabled = opts.history.length === 0;
  remoteButton.addEventListener("click", opts.onRemoteRun);

  box.append(input, runButton, remoteButton);

  if (opts.promptError) {
    const error = document.createElement("p");
    error.className = "prompt-error";
    error.textContent = opts.promptError;
    box.append(error);
  }

  if (opts.history.length > 0) {
    const history = document.createElement("p");
    history.className = "command-history";
    history.textContent = opts.history.join("  ▸  ");
    box.append(history);
  }
  return box;
}

function renderChip(attribute: string, score: number): HTMLElement {
  const chip = document.createElement("span");
  chip.className = "chip";
  chip.dataset.attribute = attribute;
  chip.dataset.score = String(score);
  chip.textContent = attribute;
  chip.style.background = sentimentColor(score);
  chip.style.color = "#fff";
  chip.style.borderRadius = "8px";
  chip.style.padding = "0 6px";
  chip.style.marginRight = "4px";
  return chip;
}

function renderItem(review: ReviewRecord, opts: DetailViewOptions): HTMLElement {
  const item = document.createElement("li");
  item.className = "review-item";
  item.dataset.reviewId = review.id;
  if (opts.colorAttribute) {
    const value = attributeValue(review, opts.colorAttribute);
    if (value !== null) item.style.background = sentimentTint(value);
  }

  const expanded = review.id === opts.expandedId;
  const text = document.createElement("p");
  text.className = expanded ? "review-full" : "review-excerpt";
  text.textContent = expanded ? review.text : excerpt(review.text);
  text.addEventListener("click", () => opts.onExpand(expanded ? null : review.id));
  item.append(text);

  const chips = document.createElement("div");
  chips.className = "chips";
  for (const chip of review.chips) chips.append(renderChip(chip.attribute, chip.score));
  item.append(chips);

  if (expanded) {
    const panel = document.createElement("dl");
    panel.className = "review-panel";
    const facts: [string, string][] = [
      ["entity", review.entity_id],
      ["sentiment", review.sentiment.toFixed(3)],
    ];
    if (review.rating !== null) facts.push(["rating", String(review.rating)]);
    if (review.date !== null) facts.push(["date", review.date]);
    for (const [k, v] of facts) {
      const dt = document.createElement("dt");
      dt.textContent = k;
      const dd = document.createElement("dd");
      dd.textContent = v;
      panel.append(dt, dd);
    }
    item.append(panel);
  }
  return item;
}
