"""Rigid (rotation + translation) alignment between consecutive node sets."""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfiguration
from .models import LabeledPointSet


@dataclass(frozen=True)
class EuclideanTransform:
    rotation: np.ndarray
    translation: np.ndarray

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim), np.zeros(dim))

    @property
    def dim(self):
        return len(self.translation)

    def apply(self, points):
        return np.asarray(points, dtype=float) @ self.rotation.T + self.translation

    def is_proper(self, tol=1e-9):
        R = self.rotation
        ortho = np.abs(R.T @ R - np.eye(len(R))).max() <= tol
        return bool(ortho and abs(np.linalg.det(R) - 1.0) <= tol)


def apply_transform(t, points):
    """Map ``x -> R x + t`` over the rows of ``points``."""
    return t.apply(points)


def match_correspondences(source, target):
    """Greedy closest-pair matching within each class.

    Returns ``{label: (source_points, target_points)}``; for each class seen
    on both sides the globally closest unmatched pair is taken until one
    side runs out.
    """
    pairs = {}
    for label in np.intersect1d(source.classes(), target.classes()):
        S, T = source.of_class(label), target.of_class(label)
        d = ((S[:, None, :] - T[None, :, :]) ** 2).sum(axis=2)
        order = np.argsort(d, axis=None, kind="stable")
        used_s = np.zeros(len(S), dtype=bool)
        used_t = np.zeros(len(T), dtype=bool)
        src, tgt = [], []
        for flat in order:
            i, j = divmod(int(flat), len(T))
            if used_s[i] or used_t[j]:
                continue
            used_s[i] = used_t[j] = True
            src.append(i)
            tgt.append(j)
            if len(src) == min(len(S), len(T)):
                break
        pairs[int(label)] = (S[src], T[tgt])
    return pairs


def _spans(centered, rank_needed, scale):
    if rank_needed <= 0:
        return True
    s = np.linalg.svd(centered, compute_uv=False)
    return len(s) >= rank_needed and s[rank_needed - 1] > 1e-9 * max(scale, 1.0)


def estimate_rigid(source, target):
    """Least-squares rotation + translation taking ``source`` onto ``target``.

    Kabsch: SVD of the cross-covariance, with the last singular vector
    flipped when needed so the result is a proper rotation.
    """
    S = np.atleast_2d(np.asarray(source, dtype=float))
    T = np.atleast_2d(np.asarray(target, dtype=float))
    if S.shape != T.shape:
        raise DegenerateConfiguration(f"shape mismatch {S.shape} vs {T.shape}")
    n, d = S.shape
    if n < d:
        raise DegenerateConfiguration(f"need >= {d} pairs in {d}-D, got {n}")
    mu_s, mu_t = S.mean(axis=0), T.mean(axis=0)
    Sc, Tc = S - mu_s, T - mu_t
    scale = max(np.abs(Sc).max(), np.abs(Tc).max())
    if not (_spans(Sc, d - 1, scale) and _spans(Tc, d - 1, scale)):
        raise DegenerateConfiguration("correspondences are coincident or collinear")
    U, _, Vt = np.linalg.svd(Sc.T @ Tc)
    D = np.eye(d)
    D[-1, -1] = np.sign(np.linalg.det(Vt.T @ U.T)) or 1.0
    R = Vt.T @ D @ U.T
    return EuclideanTransform(R, mu_t - R @ mu_s)


@dataclass(frozen=True)
class ClassTransforms:
    """Per-class transforms plus the pooled fallback used for other classes."""

    per_class: dict
    pooled: EuclideanTransform

    def for_label(self, label):
        return self.per_class.get(int(label), self.pooled)

    def project(self, points):
        out = np.empty_like(points.points)
        for label in points.classes():
            mask = points.labels == label
            out[mask] = self.for_label(label).apply(points.points[mask])
        return LabeledPointSet(out, points.labels)


def estimate_class_transforms(source, target):
    """One rigid transform per class, falling back to pooled, then identity."""
    pairs = match_correspondences(source, target)
    dim = source.dim
    pooled = EuclideanTransform.identity(dim)
    if pairs:
        S = np.concatenate([p[0] for p in pairs.values()])
        T = np.concatenate([p[1] for p in pairs.values()])
        try:
            pooled = estimate_rigid(S, T)
        except DegenerateConfiguration:
            pass
    per_class = {}
    for label, (S, T) in pairs.items():
        try:
            per_class[label] = estimate_rigid(S, T)
        except DegenerateConfiguration:
            per_class[label] = pooled
    return ClassTransforms(per_class, pooled)
