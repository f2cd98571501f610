"""Deterministic synthetic review corpus for demos and the test suite.

Generates hotel-style entities, reviews assembled from attribute-specific
phrase pools, and matching extraction records whose scores agree with the
phrasing. Everything derives from one seed, so fixtures are reproducible.

Run ``python -m reviewscope.synthdata OUT_DIR`` to write a ready-to-use
dataset plus a pipeline config pointing at it.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

ATTRIBUTES = (
    "cleanliness",
    "location",
    "staff",
    "food",
    "facility",
    "value",
    "room",
    "service",
)

# phrase pools keyed by (attribute, polarity); texts deliberately reuse the
# motifs the walkthrough fixtures look for (carpet, portion size, transit)
_POSITIVE = {
    "cleanliness": [
        "the room was spotless and smelled fresh",
        "housekeeping kept everything clean every single day",
        "bathrooms were clean and the sheets felt crisp",
    ],
    "location": [
        "great location right next to the old town",
        "great location with easy access to public transit",
        "the location is perfect for exploring on foot",
    ],
    "staff": [
        "the staff were friendly and genuinely welcoming",
        "front desk staff upgraded us with a warm smile",
        "every employee we met was helpful and polite",
    ],
    "food": [
        "breakfast was delicious with generous portion size",
        "the restaurant served tasty local dishes",
        "excellent food and the portion size was impressive",
    ],
    "facility": [
        "the pool and gym facilities are outstanding",
        "modern facility with fast elevators and free parking",
        "conference rooms and lobby were beautiful",
    ],
    "value": [
        "good value for the price we paid",
        "surprisingly affordable for such quality",
        "worth every penny and then some",
    ],
    "room": [
        "the rooms are spacious and comfortable",
        "our room had a gorgeous view of the river",
        "quiet room with a wonderful comfy bed",
    ],
    "service": [
        "room service was prompt and excellent",
        "fast check in and attentive service all around",
        "service was quick even at busy hours",
    ],
}

_NEGATIVE = {
    "cleanliness": [
        "the carpet was filthy and badly stained",
        "dust everywhere and the carpet smelled moldy",
        "the bathroom was dirty and the carpet looked grim",
    ],
    "location": [
        "terrible location next to a noisy construction site",
        "the location is far from any public transit stop",
        "awkward location with nothing within walking distance",
    ],
    "staff": [
        "the staff were rude and dismissive at check in",
        "unfriendly staff who ignored our requests",
        "reception staff seemed annoyed by simple questions",
    ],
    "food": [
        "breakfast was stale and the portion size was tiny",
        "the food was bland and overpriced",
        "inedible dinner with sad little portion size",
    ],
    "facility": [
        "the gym was broken and the pool stayed closed",
        "dated facility with a rusty elevator",
        "parking garage was cramped and poorly lit",
    ],
    "value": [
        "overpriced for what you actually get",
        "poor value compared to nearby hotels",
        "not worth the money at this rate",
    ],
    "room": [
        "the rooms aren't huge and ours felt cramped",
        "tiny room with a sad view of a wall",
        "the room was noisy and the bed uncomfortable",
    ],
    "service": [
        "slow service and we waited an hour for towels",
        "room service never answered the phone",
        "check in took forever with unhelpful service",
    ],
}

_NEUTRAL_FILLER = [
    "we stayed two nights in october",
    "this was our second visit",
    "we booked through a travel site",
    "the trip was for a family event",
]

_NAME_PARTS_A = (
    "Grand", "Harbor", "Cedar", "Sunset", "Royal", "Garden", "Metro", "Lakeside",
    "Summit", "Copper", "Velvet", "Juniper", "Granite", "Willow", "Beacon", "Aurora",
)
_NAME_PARTS_B = (
    "Plaza", "Inn", "Suites", "Lodge", "Hotel", "Court", "House", "Residence",
)


def _entity_name(rng: random.Random, used: set[str]) -> str:
    while True:
        name = f"{rng.choice(_NAME_PARTS_A)} {rng.choice(_NAME_PARTS_B)}"
        if name not in used:
            used.add(name)
            return name


def generate(
    out_dir: str | Path,
    n_reviews: int = 10000,
    n_entities: int = 40,
    seed: int = 13,
    write_config: bool = True,
) -> dict[str, Path]:
    """Write reviews.jsonl, entities.jsonl, schema.txt, and extractions.jsonl.

    Returns the paths keyed by kind. Entities get skewed review counts and
    per-attribute quality biases, so clusters and the treemap have texture.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)

    used_names: set[str] = set()
    entities = []
    for i in range(n_entities):
        has_coords = rng.random() > 0.1
        entity = {
            "id": f"e{i:03d}",
            "name": _entity_name(rng, used_names),
        }
        if has_coords:
            entity["lat"] = round(37.70 + rng.random() * 0.12, 6)
            entity["lon"] = round(-122.48 + rng.random() * 0.14, 6)
        if rng.random() > 0.3:
            entity["address"] = f"{rng.randrange(1, 900)} {rng.choice(_NAME_PARTS_A)} St"
        if rng.random() > 0.5:
            entity["image_url"] = f"https://img.example/{entity['id']}.jpg"
        entities.append(entity)

    # per-entity attribute quality in [-0.8, 0.8]; also skewed popularity
    quality = {
        e["id"]: {a: rng.uniform(-0.8, 0.8) for a in ATTRIBUTES} for e in entities
    }
    weights = [rng.uniform(0.2, 1.0) ** 2 for _ in entities]

    reviews = []
    extractions = []
    for i in range(n_reviews):
        entity = rng.choices(entities, weights=weights)[0]
        eid = entity["id"]
        n_aspects = rng.choice((1, 1, 2, 2, 3, 4))
        aspects = rng.sample(ATTRIBUTES, n_aspects)
        sentences = []
        scores = []
        for attr in aspects:
            score = max(-1.0, min(1.0, quality[eid][attr] + rng.gauss(0, 0.35)))
            pool = _POSITIVE[attr] if score >= 0 else _NEGATIVE[attr]
            sentences.append(rng.choice(pool))
            score = round(score, 4)
            scores.append(score)
            extractions.append({"review_id": f"r{i:05d}", "attribute": attr, "score": score})
        if rng.random() < 0.25:
            sentences.append(rng.choice(_NEUTRAL_FILLER))
        rng.shuffle(sentences)
        text = ". ".join(s[0].upper() + s[1:] for s in sentences) + "."
        mean_score = sum(scores) / len(scores)
        review = {
            "id": f"r{i:05d}",
            "entity_id": eid,
            "text": text,
            "rating": max(1, min(5, round(3 + 2 * mean_score))),
            "date": f"20{rng.randrange(18, 24)}-{rng.randrange(1, 13):02d}-{rng.randrange(1, 29):02d}",
        }
        reviews.append(review)

    paths = {
        "reviews": out / "reviews.jsonl",
        "entities": out / "entities.jsonl",
        "schema": out / "schema.txt",
        "extractions": out / "extractions.jsonl",
    }
    with paths["reviews"].open("w", encoding="utf-8") as fh:
        for rec in reviews:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    with paths["entities"].open("w", encoding="utf-8") as fh:
        for rec in entities:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    paths["schema"].write_text("".join(a + "\n" for a in ATTRIBUTES), encoding="utf-8")
    with paths["extractions"].open("w", encoding="utf-8") as fh:
        for rec in extractions:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    if write_config:
        config_path = out / "reviewscope.cfg"
        config_path.write_text(
            "# synthetic dataset generated by reviewscope.synthdata\n"
            "reviews = reviews.jsonl\n"
            "entities = entities.jsonl\n"
            "schema = schema.txt\n"
            "extractions = extractions.jsonl\n"
            "index_dir = index\n"
            "featurizer = extractions\n"
            "k1 = 5\n"
            "k2 = 3\n"
            "depth = 5\n"
            f"seed = {seed}\n",
            encoding="utf-8",
        )
        paths["config"] = config_path
    return paths


def main(argv: list[str] | None = None) -> None:
    import argparse

    parser = argparse.ArgumentParser(description="Generate a synthetic review dataset.")
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--reviews", type=int, default=10000)
    parser.add_argument("--entities", type=int, default=40)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args(argv)
    paths = generate(args.out_dir, n_reviews=args.reviews, n_entities=args.entities, seed=args.seed)
    for kind, path in paths.items():
        print(f"{kind}: {path}")


if __name__ == "__main__":
    main()
