"""K-means prototypes and K-nearest-neighbour annotation."""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EmptyReference, InsufficientData, LengthMismatch


class Prototype(NamedTuple):
    centroid: np.ndarray
    label: int


@dataclass(frozen=True, eq=False)
class LabeledPointSet:
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(pts) != len(labels):
            raise LengthMismatch(f"{len(pts)} points but {len(labels)} labels")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, LabeledPointSet):
            return NotImplemented
        return (np.array_equal(self.points, other.points)
                and np.array_equal(self.labels, other.labels))

    __hash__ = None

    @property
    def dim(self):
        return self.points.shape[1]

    def prototypes(self):
        return [Prototype(p, int(y)) for p, y in zip(self.points, self.labels)]

    def of_class(self, label):
        return self.points[self.labels == label]

    def classes(self):
        return np.unique(self.labels)


@dataclass
class KMeansResult:
    centroids: np.ndarray
    assignment: np.ndarray
    objective: list
    n_iter: int


def _sq_dists(X, C):
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def _kmeanspp(X, k, rng):
    centroids = [X[rng.integers(len(X))]]
    closest = ((X - centroids[0]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = closest.sum()
        i = int(rng.choice(len(X), p=closest / total))
        centroids.append(X[i])
        closest = np.minimum(closest, ((X - X[i]) ** 2).sum(axis=1))
    return np.array(centroids)


def lloyd(instances, k, seed=0, max_iter=100, tol=1e-6):
    """Lloyd's algorithm with k-means++ seeding.

    ``objective`` records the within-cluster sum of squares after each
    assignment step.  A cluster left empty is re-seeded at the instance
    farthest from its current centroid.
    """
    X = np.asarray(instances, dtype=float)
    if k < 1:
        raise InsufficientData("k must be >= 1")
    n_distinct = len(np.unique(X, axis=0)) if len(X) else 0
    if n_distinct < k:
        raise InsufficientData(f"need {k} distinct instances, got {n_distinct}")
    rng = np.random.default_rng(seed)
    C = _kmeanspp(X, k, rng)
    objective = []
    for it in range(1, max_iter + 1):
        d = _sq_dists(X, C)
        assign = d.argmin(axis=1)
        cost = d[np.arange(len(X)), assign]
        counts = np.bincount(assign, minlength=k)
        while np.any(counts == 0):
            empty = int(np.flatnonzero(counts == 0)[0])
            far = int(cost.argmax())
            C[empty] = X[far]
            assign[far] = empty
            cost[far] = 0.0
            counts = np.bincount(assign, minlength=k)
        objective.append(float(cost.sum()))
        new = np.array([X[assign == j].mean(axis=0) for j in range(k)])
        shift = np.abs(new - C).max()
        C = new
        if shift < tol:
            break
    d = _sq_dists(X, C)
    return KMeansResult(C, d.argmin(axis=1), objective, it)


def kmeans(instances, k, seed=0):
    """Centroids of a k-means clustering; see :func:`lloyd`."""
    return lloyd(instances, k, seed).centroids


def _vote(labels):
    counts = np.bincount(labels)
    return int(counts.argmax())


def knn_predict(queries, reference, K):
    """Majority label among the ``K`` nearest references, per query.

    Distance ties go to the lower reference index, vote ties to the smaller
    class id.
    """
    if len(reference) == 0:
        raise EmptyReference("KNN reference set is empty")
    Q = np.atleast_2d(np.asarray(queries, dtype=float))
    K = max(1, min(int(K), len(reference)))
    d = _sq_dists(Q, reference.points)
    if K == 1:
        return reference.labels[d.argmin(axis=1)]
    nearest = np.argsort(d, axis=1, kind="stable")[:, :K]
    votes = reference.labels[nearest]
    return np.array([_vote(v) for v in votes], dtype=np.int64)


def knn_classify(query, reference, K):
    return int(knn_predict(np.asarray(query, dtype=float)[None, :], reference, K)[0])


def extract_prototypes(batch, protos_per_class, class_count, reference, K, seed=0):
    """K-means centroids of ``batch`` labelled by KNN against ``reference``."""
    rho = class_count * protos_per_class
    centroids = kmeans(batch, rho, seed)
    return LabeledPointSet(centroids, knn_predict(centroids, reference, K))


def composition_prototypes(instances, labels, protos_per_class, class_count, seed=0):
    """K-means centroids labelled by the majority class of their members."""
    labels = np.asarray(labels, dtype=np.int64)
    res = lloyd(instances, class_count * protos_per_class, seed)
    proto_labels = [_vote(labels[res.assignment == j]) if np.any(res.assignment == j)
                    else _vote(labels) for j in range(len(res.centroids))]
    return LabeledPointSet(res.centroids, proto_labels)


def class_means(points):
    """One prototype per class: the mean of that class's points."""
    classes = points.classes()
    return LabeledPointSet(np.array([points.of_class(c).mean(axis=0) for c in classes]),
                           classes)
