import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reviewscope.cluster import (
    ClusterError,
    GENERAL_LABEL,
    build_hierarchy,
    cluster_avg_sentiment,
    kmeans,
    label_cluster,
    pca_project,
    rank_label_candidates,
    resolve_sibling_labels,
)


def brute_force_k2_inertia(points: np.ndarray) -> float:
    """Oracle: exhaustive minimum inertia over every 2-partition."""
    n = len(points)
    best = np.inf
    for assignment in itertools.product((0, 1), repeat=n):
        inertia = 0.0
        for c in (0, 1):
            group = points[[i for i in range(n) if assignment[i] == c]]
            if len(group):
                inertia += float(((group - group.mean(axis=0)) ** 2).sum())
        best = min(best, inertia)
    return best


class TestKMeans:
    def test_k1_closed_form(self):
        rng = np.random.default_rng(0)
        points = rng.normal(size=(17, 3))
        result = kmeans(points, 1, seed=0)
        assert np.allclose(result.centroids[0], points.mean(axis=0))
        expected = float(((points - points.mean(axis=0)) ** 2).sum())
        assert result.inertia == pytest.approx(expected)

    def test_two_line_clusters(self):
        points = np.array([[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]])
        result = kmeans(points, 2, seed=1, n_init=10)
        assert result.inertia == pytest.approx(brute_force_k2_inertia(points), abs=1e-9)
        centroids = sorted(float(c) for c in result.centroids[:, 0])
        assert centroids == pytest.approx([1.0, 11.0])
        groups = [set(np.where(result.labels == c)[0]) for c in range(2)]
        assert {frozenset(g) for g in groups} == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}

    def test_k_equals_n_distinct(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 5.0], [9.0, 2.0]])
        result = kmeans(points, 4, seed=0, n_init=5)
        assert result.inertia == pytest.approx(0.0, abs=1e-12)

    def test_insufficient_points(self):
        with pytest.raises(ClusterError, match="insufficient points"):
            kmeans(np.zeros((2, 3)), 5, seed=0)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        points = rng.normal(size=(40, 4))
        r1 = kmeans(points, 3, seed=9)
        r2 = kmeans(points, 3, seed=9)
        assert np.array_equal(r1.labels, r2.labels)
        assert np.array_equal(r1.centroids, r2.centroids)

    def test_identical_points_leave_empty_clusters(self):
        points = np.ones((6, 2))
        result = kmeans(points, 3, seed=0)
        assert result.inertia == pytest.approx(0.0)
        assert (result.labels == result.labels[0]).all()

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=40, deadline=None)
    def test_invariants_random(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 30))
        k = int(rng.integers(1, min(n, 6)))
        points = rng.normal(size=(n, int(rng.integers(1, 5))))
        result = kmeans(points, k, seed=seed)
        # inertia never increases over Lloyd iterations
        history = result.inertia_history
        assert all(a >= b - 1e-9 for a, b in zip(history, history[1:]))
        # every point sits on its nearest centroid at termination
        dist2 = ((points[:, None, :] - result.centroids[None, :, :]) ** 2).sum(axis=2)
        nearest = dist2.min(axis=1)
        chosen = dist2[np.arange(n), result.labels]
        assert np.allclose(chosen, nearest, atol=1e-12)
        assert result.inertia == pytest.approx(float(chosen.sum()))


class TestPcaProject:
    def test_single_centroid_origin(self):
        assert pca_project(np.array([[3.0, 4.0, 5.0]])).tolist() == [[0.0, 0.0]]

    def test_two_centroids_at_distance_two(self):
        coords = pca_project(np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]))
        assert coords == pytest.approx(np.array([[-1.0, 0.0], [1.0, 0.0]]))

    def test_recovers_planted_plane(self):
        # 2-D ellipse embedded into 7-D by a random rotation; the oracle is an
        # eigen-decomposition of the covariance matrix.
        rng = np.random.default_rng(42)
        angles = np.linspace(0, 2 * np.pi, 9, endpoint=False)
        plane = np.stack([3.0 * np.cos(angles), 1.5 * np.sin(angles)], axis=1)
        basis, _ = np.linalg.qr(rng.normal(size=(7, 7)))
        embedded = plane @ basis[:2] + rng.normal(size=7) * 0.0 + 5.0

        coords = pca_project(embedded)
        oracle = _eigh_oracle(embedded)
        assert coords == pytest.approx(oracle, abs=1e-8)

    def test_matches_eigh_oracle_random(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            centroids = rng.normal(size=(5, int(rng.integers(2, 9))))
            coords = pca_project(centroids)
            assert coords == pytest.approx(_eigh_oracle(centroids), abs=1e-8)

    def test_orthonormal_components(self):
        rng = np.random.default_rng(3)
        centroids = rng.normal(size=(6, 5))
        centered = centroids - centroids.mean(axis=0)
        _, s, vt = np.linalg.svd(centered, full_matrices=False)
        c1, c2 = vt[0], vt[1]
        assert abs(np.linalg.norm(c1) - 1) < 1e-9
        assert abs(np.linalg.norm(c2) - 1) < 1e-9
        assert abs(float(c1 @ c2)) < 1e-9
        coords = pca_project(centroids)
        assert coords[:, 0].var() >= coords[:, 1].var() - 1e-12

    def test_zero_variance_zero_coordinates(self):
        coords = pca_project(np.ones((4, 3)))
        assert np.allclose(coords, 0.0)


def _eigh_oracle(centroids: np.ndarray) -> np.ndarray:
    """Independent projection via eigen-decomposition of the covariance."""
    centered = centroids - centroids.mean(axis=0)
    cov = centered.T @ centered
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    coords = np.zeros((centroids.shape[0], 2))
    for j, idx in enumerate(order[:2]):
        if eigvals[idx] <= 1e-12:
            continue
        component = eigvecs[:, idx]
        if component[int(np.argmax(np.abs(component)))] < 0:
            component = -component
        coords[:, j] = centered @ component
    return coords


def _check_partition(node):
    if not node.children:
        return
    child_ids = [set(c.member_ids) for c in node.children]
    union = set().union(*child_ids)
    assert union == set(node.member_ids)
    assert sum(len(s) for s in child_ids) == len(node.member_ids)
    for child in node.children:
        _check_partition(child)


class TestBuildHierarchy:
    def make_blobs(self, n=300, seed=0):
        rng = np.random.default_rng(seed)
        centers = rng.normal(scale=6.0, size=(6, 4))
        points = np.concatenate([c + rng.normal(size=(n // 6, 4)) for c in centers])
        ids = tuple(f"r{i}" for i in range(len(points)))
        sentiments = rng.uniform(-1, 1, size=len(points))
        return points, ids, sentiments

    def test_shape_bounds_and_partition(self):
        points, ids, sentiments = self.make_blobs()
        tree = build_hierarchy(points, ids, sentiments, k1=5, k2=3, depth=4,
                               min_cluster_size=10, seed=7)
        assert len(tree.children) <= 5
        for node in tree.walk():
            if node.path:
                assert len(node.children) <= 3
            assert len(node.path) <= 4
            assert node.size == len(node.member_ids)
        _check_partition(tree)

    def test_small_corpus_root_splits_once(self):
        points = np.array([[0.0], [1.0], [5.0], [6.0]])
        ids = ("a", "b", "c", "d")
        tree = build_hierarchy(points, ids, np.zeros(4), k1=5, k2=3, depth=5,
                               min_cluster_size=20, seed=0)
        assert 1 <= len(tree.children) <= 5
        for child in tree.children:
            assert child.is_leaf
        _check_partition(tree)

    def test_identical_vectors_single_effective_cluster(self):
        points = np.ones((30, 3))
        ids = tuple(f"r{i}" for i in range(30))
        tree = build_hierarchy(points, ids, np.zeros(30), k1=5, k2=3, depth=5,
                               min_cluster_size=5, seed=1)
        assert len(tree.children) == 1
        assert tree.children[0].is_leaf
        assert set(tree.children[0].member_ids) == set(ids)
        _check_partition(tree)

    def test_deterministic(self):
        points, ids, sentiments = self.make_blobs(seed=5)
        t1 = build_hierarchy(points, ids, sentiments, k1=4, k2=2, depth=3,
                             min_cluster_size=8, seed=3)
        t2 = build_hierarchy(points, ids, sentiments, k1=4, k2=2, depth=3,
                             min_cluster_size=8, seed=3)
        assert t1 == t2

    def test_sibling_layout_from_pca(self):
        points, ids, sentiments = self.make_blobs(seed=2)
        tree = build_hierarchy(points, ids, sentiments, k1=4, k2=3, depth=2,
                               min_cluster_size=10, seed=2)
        coords = pca_project(np.stack([c.centroid for c in tree.children]))
        got = np.array([c.coord2d for c in tree.children])
        assert got == pytest.approx(coords)


class TestSentiment:
    def test_balanced(self):
        assert cluster_avg_sentiment(np.array([1.0, -1.0])) == 0.0

    def test_singleton(self):
        assert cluster_avg_sentiment(np.array([0.37])) == pytest.approx(0.37)

    def test_constant(self):
        assert cluster_avg_sentiment(np.full(9, 0.4)) == pytest.approx(0.4)


class TestLabeling:
    NAMES = ("hotel", "location", "staff")

    def test_argmax_positive_valence(self):
        contrib = np.array([0.0, 8.2, 3.1])
        assert label_cluster(contrib, avg_sentiment=0.5, names=self.NAMES) == "location"

    def test_negative_valence_flips(self):
        contrib = np.array([-5.0, 2.0, -1.0])
        # valence -1 ranks by most negative contribution
        assert label_cluster(contrib, avg_sentiment=-0.2, names=self.NAMES) == "hotel"

    def test_zero_sentiment_counts_positive(self):
        contrib = np.array([1.0, 2.0, 0.5])
        assert label_cluster(contrib, avg_sentiment=0.0, names=self.NAMES) == "location"

    def test_all_zero_general(self):
        assert label_cluster(np.zeros(3), avg_sentiment=0.3, names=self.NAMES) == GENERAL_LABEL

    def test_tie_breaks_by_schema_order(self):
        contrib = np.array([2.0, 2.0, 1.0])
        assert label_cluster(contrib, avg_sentiment=1.0, names=self.NAMES) == "hotel"

    def test_sibling_disambiguation(self):
        # both siblings argmax "hotel" with positive valence; larger keeps it
        c1 = np.array([9.0, 4.0, 1.0])
        c2 = np.array([7.5, 2.0, 6.0])
        labels = resolve_sibling_labels([c1, c2], [0.4, 0.6], self.NAMES)
        assert labels == ["hotel", "staff"]

    def test_opposite_valence_may_share_label(self):
        c1 = np.array([9.0, 4.0, 1.0])
        c2 = np.array([-7.5, -2.0, -6.0])
        labels = resolve_sibling_labels([c1, c2], [0.4, -0.6], self.NAMES)
        assert labels == ["hotel", "hotel"]

    def test_three_way_cascade(self):
        c1 = np.array([9.0, 8.0, 1.0])
        c2 = np.array([7.0, 6.0, 1.0])
        c3 = np.array([5.0, 4.0, 3.0])
        labels = resolve_sibling_labels([c1, c2, c3], [1.0, 1.0, 1.0], self.NAMES)
        assert labels == ["hotel", "location", "staff"]
        assert len(set(labels)) == 3

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=50, deadline=None)
    def test_positive_scaling_invariance(self, seed):
        rng = np.random.default_rng(seed)
        names = tuple(f"a{i}" for i in range(5))
        contribs = [rng.normal(size=5) for _ in range(3)]
        sentiments = list(rng.uniform(-1, 1, size=3))
        scale = float(rng.uniform(0.01, 50.0))
        before = resolve_sibling_labels(contribs, sentiments, names)
        after = resolve_sibling_labels([c * scale for c in contribs], sentiments, names)
        assert before == after

    def test_rank_candidates_end_with_general(self):
        ranked = rank_label_candidates(np.array([1.0, 2.0]), 1, ("a", "b"))
        assert ranked == ["b", "a", GENERAL_LABEL]
