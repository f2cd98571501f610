// View state <-> URL query string, so deep links restore the session.

export interface ViewState {
  entity: string | null; // null = all entities
  clusterPath: string;
  selectedClusters: string[]; // up to 2 dot-paths
  sessionId: string | null;
  colorAttribute: string | null;
  schemaDraft: string[];
}

export const DEFAULT_STATE: ViewState = {
  entity: null,
  clusterPath: "",
  selectedClusters: [],
  sessionId: null,
  colorAttribute: null,
  schemaDraft: [],
};

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.entity) params.set("entity", state.entity);
  if (state.clusterPath) params.set("path", state.clusterPath);
  if (state.selectedClusters.length > 0) params.set("sel", state.selectedClusters.join("~"));
  if (state.sessionId) params.set("session", state.sessionId);
  if (state.colorAttribute) params.set("color", state.colorAttribute);
  if (state.schemaDraft.length > 0) params.set("draft", state.schemaDraft.join("~"));
  return params.toString();
}

export function decodeState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const sel = params.get("sel");
  const draft = params.get("draft");
  return {
    entity: params.get("entity"),
    clusterPath: params.get("path") ?? "",
    selectedClusters: sel ? sel.split("~").slice(0, 2) : [],
    sessionId: params.get("session"),
    colorAttribute: params.get("color"),
    schemaDraft: draft ? draft.split("~").filter((a) => a.length > 0) : [],
  };
}
