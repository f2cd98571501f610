"""Review corpus loading and validation.

Owns the on-disk record formats: reviews.jsonl / reviews.csv, entities.jsonl,
schema.txt, and extractions.jsonl. Everything downstream (featurization,
clustering, the HTTP API) works against the validated :class:`Corpus` built
here.
"""

from __future__ import annotations

import csv
import datetime
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

UNKNOWN_ENTITY = "unknown"


class CorpusError(ValueError):
    """Raised for malformed or inconsistent input records."""


@dataclass(frozen=True)
class Review:
    id: str
    entity_id: str
    text: str
    rating: float | None = None
    date: str | None = None


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    lat: float | None = None
    lon: float | None = None
    address: str | None = None
    image_url: str | None = None
    review_count: int = 0

    @property
    def has_coordinates(self) -> bool:
        return self.lat is not None and self.lon is not None


@dataclass(frozen=True)
class Schema:
    """Flat list of attribute names an extractor reports scores for."""

    attributes: tuple[str, ...]
    version: str = "1"

    def __post_init__(self) -> None:
        seen = set()
        for attr in self.attributes:
            if not attr:
                raise CorpusError("schema attribute must be non-empty")
            if attr != attr.strip().lower():
                raise CorpusError(f"schema attribute {attr!r} must be lowercase and trimmed")
            if attr in seen:
                raise CorpusError(f"duplicate attribute {attr}")
            seen.add(attr)

    def index_of(self, attribute: str) -> int:
        return self.attributes.index(attribute)

    def __len__(self) -> int:
        return len(self.attributes)


@dataclass(frozen=True)
class ExtractionRecord:
    review_id: str
    attribute: str
    score: float


@dataclass(frozen=True)
class Corpus:
    """Validated reviews plus the entities they refer to.

    Reviews keep their ingestion order; that order is the canonical tie-break
    everywhere downstream. Reviews whose entity is not in the entity file are
    re-homed under the ``unknown`` sentinel entity so the rest of the system
    never sees a dangling reference.
    """

    reviews: tuple[Review, ...]
    entities: Mapping[str, Entity]
    entities_from_file: bool
    _pos: Mapping[str, int] = field(repr=False, default_factory=dict)

    @staticmethod
    def build(reviews: Iterable[Review], entities: Iterable[Entity] | None) -> "Corpus":
        reviews = tuple(reviews)
        from_file = entities is not None
        known: dict[str, Entity] = {}
        for ent in entities or ():
            if ent.id in known:
                raise CorpusError(f"duplicate entity id {ent.id}")
            known[ent.id] = ent

        remapped = []
        counts: dict[str, int] = {}
        for rev in reviews:
            eid = rev.entity_id if rev.entity_id in known else UNKNOWN_ENTITY
            if eid != rev.entity_id:
                rev = replace(rev, entity_id=eid)
            remapped.append(rev)
            counts[eid] = counts.get(eid, 0) + 1
        if UNKNOWN_ENTITY in counts and UNKNOWN_ENTITY not in known:
            known[UNKNOWN_ENTITY] = Entity(id=UNKNOWN_ENTITY, name="(unknown)")

        final = {eid: replace(ent, review_count=counts.get(eid, 0)) for eid, ent in known.items()}
        pos = {rev.id: i for i, rev in enumerate(remapped)}
        return Corpus(tuple(remapped), final, from_file, pos)

    def __len__(self) -> int:
        return len(self.reviews)

    def __contains__(self, review_id: str) -> bool:
        return review_id in self._pos

    def position(self, review_id: str) -> int:
        return self._pos[review_id]

    def get(self, review_id: str) -> Review:
        return self.reviews[self._pos[review_id]]

    def members(self, entity_id: str) -> list[str]:
        """Review ids belonging to one entity, in ingestion order."""
        return [r.id for r in self.reviews if r.entity_id == entity_id]

    def entities_by_review_count(self) -> list[Entity]:
        return sorted(self.entities.values(), key=lambda e: (-e.review_count, e.id))


def _as_float(value, line: int, name: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise CorpusError(f"line {line}: field {name!r} is not a number: {value!r}") from None
    return out


def _validate_date(value: str, line: int) -> str:
    try:
        datetime.date.fromisoformat(value)
    except ValueError:
        try:
            datetime.datetime.fromisoformat(value)
        except ValueError:
            raise CorpusError(f"line {line}: field 'date' is not an ISO-8601 date: {value!r}") from None
    return value


def _review_from_record(rec: dict, line: int) -> Review:
    for name in ("id", "entity_id", "text"):
        if rec.get(name) in (None, ""):
            raise CorpusError(f"line {line}: missing required field {name!r}")
    text = str(rec["text"])
    if not text.strip():
        raise CorpusError(f"line {line}: field 'text' is empty")
    rating = rec.get("rating")
    if rating not in (None, ""):
        rating = _as_float(rating, line, "rating")
    else:
        rating = None
    date = rec.get("date")
    if date in (None, ""):
        date = None
    else:
        date = _validate_date(str(date), line)
    return Review(id=str(rec["id"]), entity_id=str(rec["entity_id"]), text=text, rating=rating, date=date)


def load_reviews(path: str | Path, format: str | None = None) -> list[Review]:
    """Read reviews from JSONL (canonical) or CSV with a header row.

    Line numbers in errors are 1-based file lines; for CSV the header is
    line 1, so the first data row is line 2.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise CorpusError(f"unknown review format {format!r} (expected jsonl or csv)")

    reviews: list[Review] = []
    seen: set[str] = set()

    def add(rec: dict, line: int) -> None:
        rev = _review_from_record(rec, line)
        if rev.id in seen:
            raise CorpusError(f"duplicate review id {rev.id}")
        seen.add(rev.id)
        reviews.append(rev)

    with path.open(encoding="utf-8", newline="") as fh:
        if format == "jsonl":
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"line {line_no}: invalid JSON: {exc.msg}") from None
                if not isinstance(rec, dict):
                    raise CorpusError(f"line {line_no}: expected a JSON object")
                add(rec, line_no)
        else:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in ("id", "entity_id", "text") if c not in header]
            if missing:
                raise CorpusError(f"CSV header is missing required columns: {', '.join(missing)}")
            for line_no, row in enumerate(reader, start=2):
                add(row, line_no)
    return reviews


def load_entities(path: str | Path) -> list[Entity]:
    """Read entities.jsonl. Coordinates must come as a lat/lon pair."""
    path = Path(path)
    entities: list[Entity] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid JSON: {exc.msg}") from None
            for name in ("id", "name"):
                if rec.get(name) in (None, ""):
                    raise CorpusError(f"line {line_no}: missing required field {name!r}")
            lat, lon = rec.get("lat"), rec.get("lon")
            if (lat is None) != (lon is None):
                raise CorpusError(f"line {line_no}: lat and lon must be given together")
            if lat is not None:
                lat = _as_float(lat, line_no, "lat")
                lon = _as_float(lon, line_no, "lon")
                if not -90.0 <= lat <= 90.0:
                    raise CorpusError(f"line {line_no}: lat {lat} outside [-90, 90]")
                if not -180.0 <= lon <= 180.0:
                    raise CorpusError(f"line {line_no}: lon {lon} outside [-180, 180]")
            ent = Entity(
                id=str(rec["id"]),
                name=str(rec["name"]),
                lat=lat,
                lon=lon,
                address=rec.get("address") or None,
                image_url=rec.get("image_url") or None,
            )
            if ent.id in seen:
                raise CorpusError(f"duplicate entity id {ent.id}")
            seen.add(ent.id)
            entities.append(ent)
    return entities


def load_schema(path: str | Path, version: str = "1") -> Schema:
    """Read a newline-separated attribute list; '#' starts a comment."""
    attributes: list[str] = []
    seen: set[str] = set()
    with Path(path).open(encoding="utf-8") as fh:
        for raw in fh:
            name = raw.split("#", 1)[0].strip().lower()
            if not name:
                continue
            if name in seen:
                raise CorpusError(f"duplicate attribute {name}")
            seen.add(name)
            attributes.append(name)
    return Schema(tuple(attributes), version=version)


def load_extractions(path: str | Path, schema: Schema, corpus: Corpus) -> list[ExtractionRecord]:
    """Read extractions.jsonl and validate against the schema and corpus.

    Several records for the same (review, attribute) pair are averaged, so
    the result has at most one record per pair. Output order is (review
    ingestion order, schema attribute order), independent of file order.
    """
    path = Path(path)
    sums: dict[tuple[str, str], list[float]] = {}
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid JSON: {exc.msg}") from None
            for name in ("review_id", "attribute"):
                if rec.get(name) in (None, ""):
                    raise CorpusError(f"line {line_no}: missing required field {name!r}")
            if "score" not in rec:
                raise CorpusError(f"line {line_no}: missing required field 'score'")
            review_id = str(rec["review_id"])
            attribute = str(rec["attribute"]).strip().lower()
            score = _as_float(rec["score"], line_no, "score")
            if attribute not in schema.attributes:
                raise CorpusError(f"line {line_no}: unknown attribute {attribute!r}")
            if review_id not in corpus:
                raise CorpusError(f"line {line_no}: unknown review id {review_id!r}")
            if not -1.0 <= score <= 1.0:
                raise CorpusError(f"line {line_no}: score {score} outside [-1, 1]")
            sums.setdefault((review_id, attribute), []).append(score)

    records = [
        ExtractionRecord(review_id=rid, attribute=attr, score=sum(scores) / len(scores))
        for (rid, attr), scores in sums.items()
    ]
    records.sort(key=lambda r: (corpus.position(r.review_id), schema.index_of(r.attribute)))
    return records
