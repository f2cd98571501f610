"""HTTP API over a preprocessed index.

All GET endpoints are pure reads of the immutable snapshot. Sessions hold
server-side command history keyed by an opaque id, mutated by one request at
a time; the only write the API ever performs on disk is exporting a schema
file under the index directory.
"""

from __future__ import annotations

import threading
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import __version__, querylang
from .corpus import CorpusError, Schema
from .snapshot import ALL_ENTITIES, Snapshot
from .store import FORMAT_VERSION, str_to_path, StoreError
from .summarize import ClusterSummary, top_divergent_attributes

DEFAULT_PAGE_SIZE = 10
SESSION_TTL_SECONDS = 3600.0


# ---- wire models -----------------------------------------------------------

class EntityOut(BaseModel):
    id: str
    name: str
    review_count: int
    lat: float | None = None
    lon: float | None = None
    address: str | None = None
    image_url: str | None = None
    attr_means: dict[str, float] = Field(default_factory=dict)
    group: int = 0


class EntitiesOut(BaseModel):
    entities: list[EntityOut]
    entities_disabled: bool


class ClusterOut(BaseModel):
    path: str
    size: int
    label: str
    avg_sentiment: float
    x: float
    y: float
    n_children: int


class ClustersOut(BaseModel):
    entity: str
    path: str
    node: ClusterOut
    nodes: list[ClusterOut]


class HistogramOut(BaseModel):
    edges: list[float]
    counts: list[int]
    total: int


class SummaryOut(BaseModel):
    size: int
    avg_chars: float
    avg_words: float
    avg_sentences: float
    avg_sentiment: float
    top_words: list[tuple[str, float]]
    top_bigrams: list[tuple[str, float]]
    histograms: dict[str, HistogramOut]
    means: dict[str, float]


class DivergenceOut(BaseModel):
    attribute: str
    distance: float


class SummaryResponse(BaseModel):
    entity: str
    path: str
    summary: SummaryOut
    dataset: SummaryOut
    compare_path: str | None = None
    compare: SummaryOut | None = None
    divergent: list[DivergenceOut] | None = None


class ChipOut(BaseModel):
    attribute: str
    score: float


class ReviewOut(BaseModel):
    id: str
    entity_id: str
    text: str
    rating: float | None = None
    date: str | None = None
    sentiment: float
    chips: list[ChipOut]


class ReviewsOut(BaseModel):
    reviews: list[ReviewOut]
    total: int
    offset: int
    session_id: str | None = None


class CommandIn(BaseModel):
    command: str
    session_id: str | None = None
    entity: str = ALL_ENTITIES
    path: str = ""


class RemoteIn(BaseModel):
    session_id: str | None = None
    entity: str = ALL_ENTITIES
    path: str = ""
    history: list[str] | None = None


class SessionOut(BaseModel):
    session_id: str
    entity: str
    path: str
    size: int
    history: list[str]
    color_attribute: str | None = None


class SchemaOut(BaseModel):
    attributes: list[str]
    version: str
    mode: str


class SchemaIn(BaseModel):
    attributes: list[str]


class SchemaSavedOut(BaseModel):
    filename: str
    path: str
    attributes: list[str]


class SuggestOut(BaseModel):
    paths: list[str]
    suggestions: list[str]


class MetaOut(BaseModel):
    version: str
    format_version: int
    mode: str
    n_reviews: int
    n_entities: int
    n_features: int
    feature_names: list[str]
    entities_disabled: bool
    params: dict


# ---- sessions ----------------------------------------------------------------

class SessionState:
    def __init__(self, session_id: str, entity: str, path: str, session: querylang.Session):
        self.id = session_id
        self.entity = entity
        self.path = path
        self.session = session
        self.history_strings: list[str] = []
        self.last_access = time.monotonic()
        self.lock = threading.Lock()


class SessionRegistry:
    """Per-client sessions with idle expiry; one writer per session."""

    def __init__(self, ttl: float = SESSION_TTL_SECONDS):
        self.ttl = ttl
        self._sessions: dict[str, SessionState] = {}
        self._lock = threading.Lock()

    def create(self, entity: str, path: str, initial_ids: tuple[str, ...]) -> SessionState:
        state = SessionState(uuid.uuid4().hex, entity, path, querylang.Session.fresh(initial_ids))
        with self._lock:
            self._purge()
            self._sessions[state.id] = state
        return state

    def get(self, session_id: str) -> SessionState | None:
        with self._lock:
            self._purge()
            state = self._sessions.get(session_id)
            if state is not None:
                state.last_access = time.monotonic()
            return state

    def _purge(self) -> None:
        cutoff = time.monotonic() - self.ttl
        for sid in [sid for sid, s in self._sessions.items() if s.last_access < cutoff]:
            del self._sessions[sid]


# ---- converters ----------------------------------------------------------------

def _cluster_out(node) -> ClusterOut:
    from .store import path_to_str

    return ClusterOut(
        path=path_to_str(node.path),
        size=node.size,
        label=node.label,
        avg_sentiment=node.avg_sentiment,
        x=node.coord2d[0],
        y=node.coord2d[1],
        n_children=len(node.children),
    )


def _summary_out(summary: ClusterSummary) -> SummaryOut:
    return SummaryOut(
        size=summary.size,
        avg_chars=summary.avg_chars,
        avg_words=summary.avg_words,
        avg_sentences=summary.avg_sentences,
        avg_sentiment=summary.avg_sentiment,
        top_words=list(summary.top_words),
        top_bigrams=list(summary.top_bigrams),
        histograms={
            name: HistogramOut(edges=list(h.bin_edges), counts=list(h.counts), total=h.total)
            for name, h in summary.attr_histograms.items()
        },
        means=dict(summary.attr_means),
    )


def create_app(index_dir: str | Path) -> FastAPI:
    """Build the API app over one index snapshot loaded at startup."""
    snapshot = Snapshot.open(index_dir)
    return build_app(snapshot)


def build_app(snapshot: Snapshot, session_ttl: float = SESSION_TTL_SECONDS) -> FastAPI:
    app = FastAPI(title="reviewscope", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions = SessionRegistry(ttl=session_ttl)
    app.state.snapshot = snapshot
    app.state.sessions = sessions

    def parse_path_or_404(text: str) -> tuple[int, ...]:
        try:
            return str_to_path(text)
        except StoreError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    def node_or_404(entity: str, path_text: str):
        path = parse_path_or_404(path_text)
        node = snapshot.node_at(entity, path)
        if node is None:
            raise HTTPException(
                status_code=404,
                detail=f"unknown cluster path {path_text!r} for entity {entity!r}",
            )
        return node

    def session_or_404(session_id: str) -> SessionState:
        state = sessions.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail=f"unknown or expired session {session_id!r}")
        return state

    def session_out(state: SessionState) -> SessionOut:
        return SessionOut(
            session_id=state.id,
            entity=state.entity,
            path=state.path,
            size=len(state.session.working_ids),
            history=list(state.history_strings),
            color_attribute=state.session.color_attribute,
        )

    def review_out(rid: str) -> ReviewOut:
        rev = snapshot.corpus.get(rid)
        return ReviewOut(
            id=rev.id,
            entity_id=rev.entity_id,
            text=rev.text,
            rating=rev.rating,
            date=rev.date,
            sentiment=snapshot.review_sentiment(rid),
            chips=[ChipOut(attribute=a, score=s) for a, s in snapshot.review_chips(rid)],
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/meta", response_model=MetaOut)
    def meta() -> MetaOut:
        return MetaOut(
            version=__version__,
            format_version=FORMAT_VERSION,
            mode=snapshot.features.mode,
            n_reviews=len(snapshot.corpus),
            n_entities=len(snapshot.corpus.entities),
            n_features=snapshot.features.n_features,
            feature_names=list(snapshot.attributes),
            entities_disabled=snapshot.entities_disabled,
            params=dict(snapshot.artifacts.config),
        )

    @app.get("/api/entities", response_model=EntitiesOut, response_model_exclude_none=True)
    def entities() -> EntitiesOut:
        means = snapshot.entity_attr_means()
        groups = snapshot.artifacts.entity_groups
        out = [
            EntityOut(
                id=ent.id,
                name=ent.name,
                review_count=ent.review_count,
                lat=ent.lat,
                lon=ent.lon,
                address=ent.address,
                image_url=ent.image_url,
                attr_means=means.get(ent.id, {}),
                group=groups.get(ent.id, 0),
            )
            for ent in snapshot.corpus.entities.values()
        ]
        return EntitiesOut(entities=out, entities_disabled=snapshot.entities_disabled)

    @app.get("/api/clusters", response_model=ClustersOut)
    def clusters(entity: str = ALL_ENTITIES, path: str = "") -> ClustersOut:
        node = node_or_404(entity, path)
        return ClustersOut(
            entity=entity,
            path=path,
            node=_cluster_out(node),
            nodes=[_cluster_out(child) for child in node.children],
        )

    @app.get("/api/summary", response_model=SummaryResponse)
    def summary(entity: str = ALL_ENTITIES, path: str = "", compare: str | None = None) -> SummaryResponse:
        node_or_404(entity, path)
        s1 = snapshot.summary_at(entity, parse_path_or_404(path))
        if s1 is None:
            raise HTTPException(status_code=404, detail=f"no summary for path {path!r}")
        response = SummaryResponse(
            entity=entity,
            path=path,
            summary=_summary_out(s1),
            dataset=_summary_out(snapshot.dataset_summary()),
        )
        if compare is not None:
            node_or_404(entity, compare)
            s2 = snapshot.summary_at(entity, parse_path_or_404(compare))
            if s2 is None:
                raise HTTPException(status_code=404, detail=f"no summary for path {compare!r}")
            response.compare_path = compare
            response.compare = _summary_out(s2)
            response.divergent = [
                DivergenceOut(attribute=a, distance=d) for a, d in top_divergent_attributes(s1, s2)
            ]
        return response

    @app.get("/api/reviews", response_model=ReviewsOut)
    def reviews(
        entity: str = ALL_ENTITIES,
        path: str = "",
        session: str | None = None,
        offset: int = Query(default=0, ge=0),
        limit: int = Query(default=DEFAULT_PAGE_SIZE, ge=1, le=500),
    ) -> ReviewsOut:
        if session is not None:
            state = session_or_404(session)
            ids = state.session.working_ids
        else:
            ids = node_or_404(entity, path).member_ids
        page = ids[offset : offset + limit]
        return ReviewsOut(
            reviews=[review_out(rid) for rid in page],
            total=len(ids),
            offset=offset,
            session_id=session,
        )

    @app.post("/api/commands", response_model=SessionOut)
    def post_command(body: CommandIn) -> SessionOut:
        try:
            command = querylang.parse(body.command, snapshot.attributes)
        except querylang.QueryParseError as exc:
            raise HTTPException(
                status_code=400, detail={"message": str(exc), "position": exc.position}
            ) from None
        if body.session_id is not None:
            state = session_or_404(body.session_id)
        else:
            scope = node_or_404(body.entity, body.path).member_ids
            state = sessions.create(body.entity, body.path, scope)
        with state.lock:
            state.session = querylang.apply(state.session, command, snapshot)
            if isinstance(command, querylang.Reset):
                state.history_strings = []
            else:
                state.history_strings.append(body.command)
            return session_out(state)

    @app.post("/api/commands/remote", response_model=SessionOut)
    def remote_run(body: RemoteIn) -> SessionOut:
        if body.session_id is not None:
            state = session_or_404(body.session_id)
            with state.lock:
                scope = state.session.initial_ids
                working = querylang.evaluate_remote(state.session.history, scope, snapshot)
                state.session = querylang.Session(
                    initial_ids=scope,
                    working_ids=working,
                    history=state.session.history,
                    color_attribute=state.session.color_attribute,
                )
                return session_out(state)
        # wire form without a session: scope + history strings
        scope = node_or_404(body.entity, body.path).member_ids
        state = sessions.create(body.entity, body.path, scope)
        with state.lock:
            try:
                for line in body.history or []:
                    command = querylang.parse(line, snapshot.attributes)
                    state.session = querylang.apply(state.session, command, snapshot)
                    if isinstance(command, querylang.Reset):
                        state.history_strings = []
                    else:
                        state.history_strings.append(line)
            except querylang.QueryParseError as exc:
                raise HTTPException(
                    status_code=400, detail={"message": str(exc), "position": exc.position}
                ) from None
            return session_out(state)

    @app.get("/api/schema", response_model=SchemaOut)
    def get_schema() -> SchemaOut:
        return SchemaOut(
            attributes=list(snapshot.schema.attributes),
            version=snapshot.schema.version,
            mode=snapshot.features.mode,
        )

    @app.post("/api/schema", response_model=SchemaSavedOut)
    def post_schema(body: SchemaIn) -> SchemaSavedOut:
        normalized = [a.strip().lower() for a in body.attributes]
        if not normalized:
            raise HTTPException(status_code=400, detail="schema must contain at least one attribute")
        try:
            schema = Schema(tuple(normalized))
        except CorpusError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        export_dir = snapshot.index_dir / "schema_exports"
        export_dir.mkdir(exist_ok=True)
        existing = {p.name for p in export_dir.glob("schema-*.txt")}
        n = 1
        while f"schema-{n:03d}.txt" in existing:
            n += 1
        target = export_dir / f"schema-{n:03d}.txt"
        target.write_text("".join(a + "\n" for a in schema.attributes), encoding="utf-8")
        return SchemaSavedOut(
            filename=target.name, path=str(target), attributes=list(schema.attributes)
        )

    @app.get("/api/schema/suggest", response_model=SuggestOut)
    def suggest(paths: str = "", entity: str = ALL_ENTITIES) -> SuggestOut:
        selected = [p for p in paths.split(",")] if paths != "" else [""]
        scored: list[tuple[str, float]] = []
        for path_text in selected:
            summary = snapshot.summary_at(entity, parse_path_or_404(path_text))
            if summary is None:
                raise HTTPException(status_code=404, detail=f"unknown cluster path {path_text!r}")
            scored.extend(summary.top_words)
        scored.sort(key=lambda ts: (-ts[1], ts[0]))
        seen: set[str] = set()
        suggestions = []
        for term, _ in scored:
            if term not in seen:
                seen.add(term)
                suggestions.append(term)
        return SuggestOut(paths=selected, suggestions=suggestions)

    return app
