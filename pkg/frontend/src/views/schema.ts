// Schema Generation View: import from the current schema or from suggestion
// words of the selected clusters, add free text, and export the draft as a
// downloadable text file ready to re-run preprocessing.

export interface SchemaViewOptions {
  current: string[];
  suggestions: string[];
  draft: string[];
  error: string | null;
  onAdd: (attribute: string) => void;
  onRemove: (attribute: string) => void;
  onSave: () => void;
}

/** Normalized draft insertion; duplicates are rejected with a message. */
export function addToDraft(draft: string[], attribute: string): { draft: string[]; error: string | null } {
  const name = attribute.trim().toLowerCase();
  if (!name) return { draft, error: "attribute must be non-empty" };
  if (draft.includes(name)) return { draft, error: `'${name}' is already in the draft` };
  return { draft: [...draft, name], error: null };
}

export function draftFileContent(draft: string[]): string {
  return draft.map((a) => a + "\n").join("");
}

function wordList(
  title: string,
  words: string[],
  className: string,
  onPick: (word: string) => void,
): HTMLElement {
  const section = document.createElement("div");
  section.className = className;
  const heading = document.createElement("h3");
  heading.textContent = title;
  section.append(heading);
  const list = document.createElement("ul");
  for (const word of words) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.textContent = word;
    button.dataset.word = word;
    button.addEventListener("click", () => onPick(word));
    item.append(button);
    list.append(item);
  }
  section.append(list);
  return section;
}

export function renderSchemaView(container: HTMLElement, opts: SchemaViewOptions): void {
  container.replaceChildren();
  container.classList.add("schema-view");

  const heading = document.createElement("h2");
  heading.textContent = "Schema";
  container.append(heading);

  container.append(wordList("Current schema", opts.current, "current-schema", opts.onAdd));
  container.append(
    wordList("Suggestions from selected clusters", opts.suggestions, "schema-suggestions", opts.onAdd),
  );

  const draftSection = document.createElement("div");
  draftSection.className = "schema-draft";
  const draftHeading = document.createElement("h3");
  draftHeading.textContent = "New schema";
  draftSection.append(draftHeading);
  const draftList = document.createElement("ul");
  for (const attribute of opts.draft) {
    const item = document.createElement("li");
    item.dataset.attribute = attribute;
    const label = document.createElement("span");
    label.textContent = attribute;
    const remove = document.createElement("button");
    remove.className = "remove";
    remove.textContent = "×";
    remove.addEventListener("click", () => opts.onRemove(attribute));
    item.append(label, remove);
    draftList.append(item);
  }
  draftSection.append(draftList);

  const input = document.createElement("input");
  input.className = "draft-input";
  input.placeholder = "add attribute, e.g. public-transit";
  const add = document.createElement("button");
  add.className = "draft-add";
  add.textContent = "Add";
  add.addEventListener("click", () => {
    opts.onAdd(input.value);
    input.value = "";
  });
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      opts.onAdd(input.value);
      input.value = "";
    }
  });
  draftSection.append(input, add);

  if (opts.error) {
    const error = document.createElement("p");
    error.className = "draft-error";
    error.textContent = opts.error;
    draftSection.append(error);
  }

  const save = document.createElement("button");
  save.className = "draft-save";
  save.textContent = "Save schema";
  save.disabled = opts.draft.length === 0;
  save.addEventListener("click", opts.onSave);
  draftSection.append(save);

  container.append(draftSection);
}

/** Browser download of the exported schema text. */
export function downloadSchema(draft: string[], filename: string): void {
  const blob = new Blob([draftFileContent(draft)], { type: "text/plain" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  document.body.append(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}
