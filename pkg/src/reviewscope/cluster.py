"""Recursive k-means hierarchy, 2-D sibling layout, and cluster labeling.

The tree splits the corpus into at most K1 top-level clusters and recursively
into at most K2 subclusters until a depth limit or a minimum cluster size is
hit. Every sibling group gets its own PCA layout of centroids, and labels are
assigned from signed attribute contributions with a disambiguation pass over
siblings that would otherwise collide.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

GENERAL_LABEL = "general"


class ClusterError(ValueError):
    """Raised for invalid clustering inputs."""


@dataclass
class KMeansResult:
    labels: np.ndarray  # (n,) int cluster index per point
    centroids: np.ndarray  # (k, N)
    inertia: float
    iterations_run: int
    inertia_history: list[float] = field(default_factory=list)

    def assignments(self, ids: list[str] | tuple[str, ...]) -> dict[str, int]:
        return {rid: int(k) for rid, k in zip(ids, self.labels)}


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding with greedy local trials.

    Each new center is chosen among 2+log(k) candidates sampled with
    probability proportional to squared distance, keeping the candidate that
    most reduces the total potential.
    """
    n = points.shape[0]
    n_trials = 2 + int(np.log(k)) if k > 1 else 1
    centroids = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = points[first]
    closest = ((points - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            candidate_ids = rng.integers(n, size=n_trials)
        else:
            draws = rng.random(n_trials) * total
            candidate_ids = np.searchsorted(np.cumsum(closest), draws)
            candidate_ids = np.minimum(candidate_ids, n - 1)
        best_idx, best_closest, best_potential = -1, None, np.inf
        for idx in candidate_ids:
            cand_closest = np.minimum(closest, ((points - points[int(idx)]) ** 2).sum(axis=1))
            potential = float(cand_closest.sum())
            if potential < best_potential:
                best_idx, best_closest, best_potential = int(idx), cand_closest, potential
        centroids[c] = points[best_idx]
        closest = best_closest
    return centroids


def _repair_empty(
    points: np.ndarray, labels: np.ndarray, centroids: np.ndarray, dist2: np.ndarray
) -> None:
    """Reseed each empty cluster to the point farthest from its own centroid.

    Mutates labels and centroids in place. A cluster stays empty when every
    point already sits on its centroid (all-identical degenerate input);
    moving a point would not reduce inertia then.
    """
    k = centroids.shape[0]
    own = dist2[np.arange(points.shape[0]), labels].copy()
    for c in range(k):
        if (labels == c).any():
            continue
        far = int(np.argmax(own))
        if own[far] <= 0.0:
            continue
        labels[far] = c
        centroids[c] = points[far]
        own[far] = 0.0


def _lloyd(
    points: np.ndarray, init: np.ndarray, max_iter: int, tol: float
) -> KMeansResult:
    centroids = init.copy()
    k = centroids.shape[0]
    history: list[float] = []
    labels = np.zeros(points.shape[0], dtype=int)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dist2 = _squared_distances(points, centroids)
        labels = np.argmin(dist2, axis=1)
        _repair_empty(points, labels, centroids, dist2)
        history.append(float(_squared_distances(points, centroids)[np.arange(points.shape[0]), labels].sum()))
        new_centroids = centroids.copy()
        for c in range(k):
            mask = labels == c
            if mask.any():
                new_centroids[c] = points[mask].mean(axis=0)
        shift = float(np.linalg.norm(new_centroids - centroids))
        scale = float(np.linalg.norm(centroids))
        centroids = new_centroids
        if shift <= tol * max(scale, 1e-12):
            break
    # final assignment so every point ends on its nearest centroid
    dist2 = _squared_distances(points, centroids)
    labels = np.argmin(dist2, axis=1)
    inertia = float(dist2[np.arange(points.shape[0]), labels].sum())
    history.append(inertia)
    return KMeansResult(labels, centroids, inertia, iterations, history)


def kmeans(
    vectors: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-4,
    n_init: int = 1,
) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding.

    Runs n_init independent initializations (seeds spawned from the given
    seed) and keeps the lowest-inertia result. Iteration stops when the
    relative centroid shift drops below tol or max_iter is reached.
    """
    points = np.asarray(vectors, dtype=float)
    if points.ndim != 2:
        raise ClusterError("vectors must be a 2-D array")
    if k < 1:
        raise ClusterError("k must be at least 1")
    if points.shape[0] < k:
        raise ClusterError(f"insufficient points: {points.shape[0]} for k={k}")

    best: KMeansResult | None = None
    for child_seed in np.random.SeedSequence(seed).spawn(n_init):
        rng = np.random.Generator(np.random.PCG64(child_seed))
        init = _kmeanspp_init(points, k, rng)
        result = _lloyd(points, init, max_iter, tol)
        if best is None or result.inertia < best.inertia:
            best = result
    assert best is not None
    return best


def pca_project(centroids: np.ndarray) -> np.ndarray:
    """Project sibling centroids onto their top two principal components.

    The projection is mean-centered; each component's largest-magnitude
    loading is flipped positive so layouts are reproducible. Zero-variance
    directions yield zero coordinates, and a single centroid maps to the
    origin.
    """
    points = np.asarray(centroids, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ClusterError("centroids must be a non-empty 2-D array")
    k = points.shape[0]
    if k == 1:
        return np.zeros((1, 2))
    centered = points - points.mean(axis=0)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    coords = np.zeros((k, 2))
    n_components = min(2, vt.shape[0])
    for j in range(n_components):
        if singular[j] <= 1e-12:
            continue
        component = vt[j]
        if component[int(np.argmax(np.abs(component)))] < 0:
            component = -component
        coords[:, j] = centered @ component
    return coords


@dataclass
class ClusterNode:
    path: tuple[int, ...]
    member_ids: tuple[str, ...]
    centroid: np.ndarray
    coord2d: tuple[float, float]
    avg_sentiment: float
    label: str = GENERAL_LABEL
    children: list["ClusterNode"] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.member_ids)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def find(self, path: tuple[int, ...]) -> "ClusterNode | None":
        node = self
        for step in path:
            if step < 0 or step >= len(node.children):
                return None
            node = node.children[step]
        return node

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClusterNode):
            return NotImplemented
        return (
            self.path == other.path
            and self.member_ids == other.member_ids
            and np.array_equal(self.centroid, other.centroid)
            and self.coord2d == other.coord2d
            and self.avg_sentiment == other.avg_sentiment
            and self.label == other.label
            and self.children == other.children
        )


def _child_seed(seed: int, path: tuple[int, ...]) -> int:
    tag = f"{seed}/" + ".".join(str(p) for p in path)
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def build_hierarchy(
    vectors: np.ndarray,
    ids: tuple[str, ...],
    sentiments: np.ndarray,
    k1: int,
    k2: int,
    depth: int,
    min_cluster_size: int,
    seed: int,
    kmeans_max_iter: int = 100,
    kmeans_tol: float = 1e-4,
) -> ClusterNode:
    """Build the nested cluster tree over one set of feature vectors.

    The root always splits (into at most k1 groups); below it a node stops
    splitting when the depth limit is reached or it has fewer than
    min_cluster_size members. Children of each node partition its members
    exactly. Child seeds are derived from (seed, path), so sibling subtrees
    are reproducible no matter the order they are built in.
    """
    points = np.asarray(vectors, dtype=float)
    if points.shape[0] != len(ids) or points.shape[0] != sentiments.shape[0]:
        raise ClusterError("vectors, ids, and sentiments must align")
    if min(k1, k2, depth, min_cluster_size) < 1:
        raise ClusterError("k1, k2, depth, and min_cluster_size must be positive")

    index_of = {rid: i for i, rid in enumerate(ids)}

    def make_node(path: tuple[int, ...], member_idx: np.ndarray) -> ClusterNode:
        centroid = points[member_idx].mean(axis=0)
        sentiment = float(sentiments[member_idx].mean())
        return ClusterNode(
            path=path,
            member_ids=tuple(ids[i] for i in member_idx),
            centroid=centroid,
            coord2d=(0.0, 0.0),
            avg_sentiment=sentiment,
        )

    def split(node: ClusterNode, level: int) -> None:
        if level >= depth:
            return
        if level > 0 and node.size < min_cluster_size:
            return
        branch = k1 if level == 0 else k2
        k = min(branch, node.size)
        if k <= 1:
            return
        member_idx = np.array([index_of[rid] for rid in node.member_ids])
        result = kmeans(
            points[member_idx],
            k,
            seed=_child_seed(seed, node.path),
            max_iter=kmeans_max_iter,
            tol=kmeans_tol,
        )
        groups = [member_idx[result.labels == c] for c in range(k)]
        groups = [g for g in groups if g.size > 0]
        for child_pos, group in enumerate(groups):
            child = make_node(node.path + (child_pos,), group)
            node.children.append(child)
        layout = pca_project(np.stack([c.centroid for c in node.children]))
        for child, (x, y) in zip(node.children, layout):
            child.coord2d = (float(x), float(y))
        if len(groups) == 1:
            # identical vectors collapse to a single effective cluster; keep
            # it as one leaf child instead of recursing into a copy of node
            return
        for child in node.children:
            split(child, level + 1)

    root = make_node((), np.arange(points.shape[0]))
    split(root, 0)
    return root


def cluster_avg_sentiment(member_sentiments: np.ndarray) -> float:
    """Arithmetic mean of per-review sentiment over a cluster."""
    values = np.asarray(member_sentiments, dtype=float)
    if values.size == 0:
        return 0.0
    return float(values.mean())


def attribute_contributions(
    member_rows: np.ndarray, values: np.ndarray, present: np.ndarray
) -> np.ndarray:
    """Per-attribute sum of present scores over a cluster's member reviews."""
    rows_values = values[member_rows]
    rows_present = present[member_rows]
    return (rows_values * rows_present).sum(axis=0)


def rank_label_candidates(
    contributions: np.ndarray, valence: int, names: tuple[str, ...]
) -> list[str]:
    """Attribute names ranked by signed contribution in valence direction.

    Ties break by attribute order. When no attribute contributed anything
    the only candidate is the generic fallback label.
    """
    contrib = np.asarray(contributions, dtype=float)
    if not np.any(contrib != 0.0):
        return [GENERAL_LABEL]
    order = sorted(range(len(names)), key=lambda j: (-valence * contrib[j], j))
    return [names[j] for j in order] + [GENERAL_LABEL]


def sentiment_valence(avg_sentiment: float) -> int:
    return -1 if avg_sentiment < 0 else 1


def label_cluster(
    contributions: np.ndarray,
    avg_sentiment: float,
    names: tuple[str, ...],
    taken_rank: int = 0,
) -> str:
    """Label for one cluster: the argmax contribution in valence direction.

    taken_rank skips that many leading candidates; sibling disambiguation
    uses it to hand a demoted cluster its runner-up attribute.
    """
    candidates = rank_label_candidates(contributions, sentiment_valence(avg_sentiment), names)
    return candidates[min(taken_rank, len(candidates) - 1)]


def resolve_sibling_labels(
    contributions: list[np.ndarray],
    sentiments: list[float],
    names: tuple[str, ...],
) -> list[str]:
    """Assign labels to a sibling group, disambiguating collisions.

    When two siblings share both their chosen label and their sentiment
    valence, the one with the larger contribution keeps the label and the
    others fall back to their next-ranked attribute. The pass repeats until
    stable; exhausted candidate lists end at the generic fallback, which is
    allowed to repeat.
    """
    n = len(contributions)
    valences = [sentiment_valence(s) for s in sentiments]
    ranked = [rank_label_candidates(c, v, names) for c, v in zip(contributions, valences)]
    pos_of = {name: j for j, name in enumerate(names)}
    pointers = [0] * n

    def contribution_for(i: int, label: str) -> float:
        j = pos_of.get(label)
        if j is None:
            return float("-inf")
        return valences[i] * float(contributions[i][j])

    for _ in range(n * (len(names) + 1)):
        groups: dict[tuple[str, int], list[int]] = {}
        for i in range(n):
            label = ranked[i][min(pointers[i], len(ranked[i]) - 1)]
            if label != GENERAL_LABEL:
                groups.setdefault((label, valences[i]), []).append(i)
        conflicts = {key: idxs for key, idxs in groups.items() if len(idxs) > 1}
        if not conflicts:
            break
        # demote everyone but the largest contributor, biggest conflicts first
        for (label, _), idxs in sorted(
            conflicts.items(), key=lambda kv: -max(contribution_for(i, kv[0][0]) for i in kv[1])
        ):
            keeper = max(idxs, key=lambda i: (contribution_for(i, label), -i))
            for i in idxs:
                if i != keeper and pointers[i] < len(ranked[i]) - 1:
                    pointers[i] += 1
    return [ranked[i][min(pointers[i], len(ranked[i]) - 1)] for i in range(n)]


def assign_extraction_labels(
    root: ClusterNode, values: np.ndarray, present: np.ndarray,
    ids: tuple[str, ...], names: tuple[str, ...],
) -> None:
    """Label every node of the tree from signed attribute contributions."""
    index_of = {rid: i for i, rid in enumerate(ids)}

    def contributions(node: ClusterNode) -> np.ndarray:
        rows = np.array([index_of[rid] for rid in node.member_ids])
        return attribute_contributions(rows, values, present)

    root.label = label_cluster(contributions(root), root.avg_sentiment, names)
    stack = [root]
    while stack:
        node = stack.pop()
        if not node.children:
            continue
        labels = resolve_sibling_labels(
            [contributions(c) for c in node.children],
            [c.avg_sentiment for c in node.children],
            names,
        )
        for child, label in zip(node.children, labels):
            child.label = label
        stack.extend(node.children)


def assign_topic_labels(root: ClusterNode, values: np.ndarray,
                        ids: tuple[str, ...], topic_terms: tuple[str, ...]) -> None:
    """Topic-mode labels: each node takes its dominant topic's top term.

    Candidate order follows summed topic proportions over the members, and
    sibling collisions resolve exactly like attribute labels.
    """
    index_of = {rid: i for i, rid in enumerate(ids)}
    present = np.ones_like(values, dtype=bool)

    def contributions(node: ClusterNode) -> np.ndarray:
        rows = np.array([index_of[rid] for rid in node.member_ids])
        return attribute_contributions(rows, values, present)

    root.label = label_cluster(contributions(root), 1.0, topic_terms)
    stack = [root]
    while stack:
        node = stack.pop()
        if not node.children:
            continue
        labels = resolve_sibling_labels(
            [contributions(c) for c in node.children],
            [1.0 for _ in node.children],
            topic_terms,
        )
        for child, label in zip(node.children, labels):
            child.label = label
        stack.extend(node.children)
