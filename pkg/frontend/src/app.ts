// Single-page app over the review-exploration API: entity, cluster, detail,
// and schema views sharing one URL-encodable ViewState. All analytics come
// from the server; this file only routes data between fetches and views.

import { ApiClient, ApiError } from "./api.js";
import { applyLocal, CommandParseError, parseCommand } from "./commands.js";
import { decodeState, DEFAULT_STATE, encodeState, ViewState } from "./state.js";
import type {
  ClustersResponse,
  EntitiesResponse,
  ReviewRecord,
  SchemaResponse,
  SummaryResponse,
} from "./types.js";
import { renderClusterView } from "./views/cluster.js";
import { renderDetailView } from "./views/detail.js";
import { renderEntityView } from "./views/entity.js";
import { addToDraft, downloadSchema, renderSchemaView } from "./views/schema.js";

export class App {
  readonly api: ApiClient;
  readonly root: HTMLElement;
  state: ViewState;

  entities: EntitiesResponse | null = null;
  attributes: string[] = [];
  clusters: ClustersResponse | null = null;
  summary: SummaryResponse | null = null;
  schema: SchemaResponse | null = null;
  suggestions: string[] = [];
  loadedReviews: ReviewRecord[] = [];
  reviewTotal = 0;
  reviewOffset = 0;
  history: string[] = [];
  entityTab: "treemap" | "list" = "treemap";
  expandedReview: string | null = null;
  clusterHint: string | null = null;
  promptError: string | null = null;
  draftError: string | null = null;

  private panels!: Record<"entity" | "cluster" | "detail" | "schema", HTMLElement>;
  private requestToken = 0;

  constructor(root: HTMLElement, api: ApiClient, initialQuery = "") {
    this.root = root;
    this.api = api;
    this.state = initialQuery ? decodeState(initialQuery) : { ...DEFAULT_STATE };
  }

  async init(): Promise<void> {
    this.root.replaceChildren();
    this.panels = {
      entity: this.panel("entity-panel"),
      cluster: this.panel("cluster-panel"),
      detail: this.panel("detail-panel"),
      schema: this.panel("schema-panel"),
    };
    const [entities, schema] = await Promise.all([this.api.entities(), this.api.schema()]);
    this.entities = entities;
    this.schema = schema;
    this.attributes = schema.attributes;
    await this.loadClusters();
    await this.loadSummaryAndSuggestions();
    await this.loadReviews(true);
    this.renderAll();
  }

  private panel(id: string): HTMLElement {
    const el = document.createElement("section");
    el.id = id;
    this.root.append(el);
    return el;
  }

  private syncUrl(): void {
    try {
      const query = encodeState(this.state);
      window.history.replaceState(null, "", query ? `?${query}` : window.location.pathname);
    } catch {
      // non-browser host (tests); state stays in memory
    }
  }

  private detailScopePath(): string {
    return this.state.selectedClusters[0] ?? this.state.clusterPath;
  }

  // ---- data loading ---------------------------------------------------------

  async loadClusters(): Promise<void> {
    const token = ++this.requestToken;
    const entity = this.state.entity ?? "all";
    const response = await this.api.clusters(entity, this.state.clusterPath);
    if (token !== this.requestToken) return; // superseded by newer navigation
    this.clusters = response;
  }

  async loadSummaryAndSuggestions(): Promise<void> {
    const [first, second] = this.state.selectedClusters;
    const entity = this.state.entity ?? "all";
    if (first === undefined) {
      this.summary = null;
      this.suggestions = [];
      return;
    }
    this.summary = await this.api.summary(entity, first, second);
    this.suggestions = (await this.api.suggest(this.state.selectedClusters, entity)).suggestions;
  }

  async loadReviews(reset: boolean): Promise<void> {
    if (reset) {
      this.reviewOffset = 0;
      this.loadedReviews = [];
    }
    const page = await this.api.reviews(
      this.state.sessionId
        ? { session: this.state.sessionId, offset: this.reviewOffset }
        : {
            entity: this.state.entity ?? "all",
            path: this.detailScopePath(),
            offset: this.reviewOffset,
          },
    );
    this.loadedReviews = [...this.loadedReviews, ...page.reviews];
    this.reviewTotal = page.total;
    this.reviewOffset += page.reviews.length;
  }

  // ---- actions --------------------------------------------------------------

  async selectEntity(id: string | null): Promise<void> {
    // selection only highlights; loading clusters is the card button's job
    if (this.entities) {
      this.renderEntity(id);
    }
  }

  async loadEntityClusters(id: string | null): Promise<void> {
    this.state = {
      ...this.state,
      entity: id,
      clusterPath: "",
      selectedClusters: [],
      sessionId: null,
    };
    this.history = [];
    this.clusterHint = null;
    this.syncUrl();
    await this.loadClusters();
    await this.loadSummaryAndSuggestions();
    await this.loadReviews(true);
    this.renderAll();
  }

  async selectCluster(path: string, additive: boolean): Promise<void> {
    let selected = [...this.state.selectedClusters];
    if (additive) {
      if (selected.includes(path)) selected = selected.filter((p) => p !== path);
      else selected = [...selected, path].slice(-2);
    } else {
      selected = [path];
    }
    this.state = { ...this.state, selectedClusters: selected, sessionId: null };
    this.history = [];
    this.syncUrl();
    await this.loadSummaryAndSuggestions();
    await this.loadReviews(true);
    this.renderAll();
  }

  async zoomIn(path: string, children: number): Promise<void> {
    if (children === 0) {
      this.clusterHint = "This cluster has no further levels.";
      this.renderCluster();
      return;
    }
    this.clusterHint = null;
    this.state = { ...this.state, clusterPath: path, selectedClusters: [], sessionId: null };
    this.history = [];
    this.syncUrl();
    await this.loadClusters();
    await this.loadSummaryAndSuggestions();
    await this.loadReviews(true);
    this.renderAll();
  }

  async zoomOut(path: string): Promise<void> {
    await this.zoomIn(path, Number.POSITIVE_INFINITY);
  }

  async loadMore(): Promise<void> {
    await this.loadReviews(false);
    this.renderDetail();
  }

  /** Local-first command run: evaluate on the loaded page, then record on the server. */
  async runCommand(text: string): Promise<void> {
    if (!text.trim()) return;
    this.promptError = null;
    let command;
    try {
      command = parseCommand(text);
    } catch (err) {
      if (err instanceof CommandParseError) {
        this.promptError = err.message;
        this.renderDetail();
        return;
      }
      throw err;
    }

    if (command.kind === "color") {
      this.state = { ...this.state, colorAttribute: command.attribute };
    } else if (command.kind === "reset") {
      this.state = { ...this.state, colorAttribute: null };
    } else {
      this.loadedReviews = applyLocal(this.loadedReviews, command);
    }

    try {
      const session = await this.api.command({
        command: text,
        ...(this.state.sessionId
          ? { session_id: this.state.sessionId }
          : { entity: this.state.entity ?? "all", path: this.detailScopePath() }),
      });
      this.state = { ...this.state, sessionId: session.session_id };
      this.history = session.history;
      if (command.kind === "reset") {
        await this.loadReviews(true);
      }
    } catch (err) {
      if (err instanceof ApiError) {
        const detail = err.detail as { message?: string } | string | null;
        this.promptError =
          typeof detail === "object" && detail && detail.message ? detail.message : String(err.message);
      } else {
        throw err;
      }
    }
    this.syncUrl();
    this.renderDetail();
  }

  /** Remote Run: server re-evaluates the whole history over the full scope. */
  async remoteRun(): Promise<void> {
    if (!this.state.sessionId) return;
    await this.api.remoteRun(this.state.sessionId);
    await this.loadReviews(true);
    this.renderDetail();
  }

  addDraftAttribute(attribute: string): void {
    const result = addToDraft(this.state.schemaDraft, attribute);
    this.draftError = result.error;
    this.state = { ...this.state, schemaDraft: result.draft };
    this.syncUrl();
    this.renderSchema();
  }

  removeDraftAttribute(attribute: string): void {
    this.state = {
      ...this.state,
      schemaDraft: this.state.schemaDraft.filter((a) => a !== attribute),
    };
    this.draftError = null;
    this.syncUrl();
    this.renderSchema();
  }

  async saveSchema(): Promise<void> {
    try {
      const saved = await this.api.saveSchema(this.state.schemaDraft);
      downloadSchema(this.state.schemaDraft, saved.filename);
      this.draftError = null;
    } catch (err) {
      this.draftError = err instanceof ApiError ? String(err.message) : "save failed";
    }
    this.renderSchema();
  }

  // ---- rendering -------------------------------------------------------------

  renderAll(): void {
    this.renderEntity(null);
    this.renderCluster();
    this.renderDetail();
    this.renderSchema();
  }

  renderEntity(selectedId: string | null): void {
    if (!this.entities) return;
    renderEntityView(this.panels.entity, {
      entities: this.entities.entities,
      disabled: this.entities.entities_disabled,
      colorAttribute: this.state.colorAttribute ?? this.attributes[0] ?? null,
      attributes: this.attributes,
      selectedId: selectedId ?? this.state.entity,
      tab: this.entityTab,
      onSelect: (id) => void this.selectEntity(id),
      onLoadClusters: (id) => void this.loadEntityClusters(id),
      onColorAttribute: (attribute) => {
        this.state = { ...this.state, colorAttribute: attribute };
        this.syncUrl();
        this.renderEntity(selectedId);
      },
      onTab: (tab) => {
        this.entityTab = tab;
        this.renderEntity(selectedId);
      },
    });
  }

  renderCluster(): void {
    if (!this.clusters) return;
    renderClusterView(this.panels.cluster, {
      entity: this.state.entity,
      path: this.state.clusterPath,
      nodes: this.clusters.nodes,
      selected: this.state.selectedClusters,
      summary: this.summary,
      hint: this.clusterHint,
      onSelect: (path, additive) => void this.selectCluster(path, additive),
      onZoomIn: (node) => void this.zoomIn(node.path, node.n_children),
      onZoomOut: (path) => void this.zoomOut(path),
    });
  }

  renderDetail(): void {
    renderDetailView(this.panels.detail, {
      reviews: this.loadedReviews,
      total: this.reviewTotal,
      history: this.history,
      colorAttribute: this.state.colorAttribute,
      expandedId: this.expandedReview,
      promptError: this.promptError,
      onLoadMore: () => void this.loadMore(),
      onRunLocal: (command) => void this.runCommand(command),
      onRemoteRun: () => void this.remoteRun(),
      onExpand: (id) => {
        this.expandedReview = id;
        this.renderDetail();
      },
    });
  }

  renderSchema(): void {
    if (!this.schema) return;
    renderSchemaView(this.panels.schema, {
      current: this.schema.attributes,
      suggestions: this.suggestions,
      draft: this.state.schemaDraft,
      error: this.draftError,
      onAdd: (attribute) => this.addDraftAttribute(attribute),
      onRemove: (attribute) => this.removeDraftAttribute(attribute),
      onSave: () => void this.saveSchema(),
    });
  }
}

export function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const app = new App(root, api, window.location.search);
  void app.init();
}
