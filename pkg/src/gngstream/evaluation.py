"""Prequential error and macro F1."""
import numpy as np

from .errors import EmptyInput, LengthMismatch


def prequential(errors):
    """Running mean of 0/1 losses, updated one instance at a time.

    ``P[i] = P[i-1] + (e[i] - P[i-1]) / (i + 1)``, which keeps the trace
    consistent with an online evaluator.
    """
    e = np.asarray(errors, dtype=float).reshape(-1)
    if len(e) == 0:
        raise EmptyInput("prequential error needs at least one loss value")
    out = np.empty(len(e))
    p = 0.0
    for i, v in enumerate(e.tolist()):
        p += (v - p) / (i + 1)
        out[i] = p
    return out


def macro_f1(truth, predicted):
    """Unweighted mean of per-class F1 over classes that occur in either input."""
    y = np.asarray(truth).reshape(-1)
    p = np.asarray(predicted).reshape(-1)
    if len(y) != len(p):
        raise LengthMismatch(f"{len(y)} labels vs {len(p)} predictions")
    if len(y) == 0:
        raise EmptyInput("macro F1 needs at least one prediction")
    scores = []
    for c in np.union1d(y, p):
        tp = np.sum((p == c) & (y == c))
        fp = np.sum((p == c) & (y != c))
        fn = np.sum((p != c) & (y == c))
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        scores.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
    return float(np.mean(scores))


def per_batch_error(errors, batch_sizes):
    """Error fraction of each batch, given per-instance 0/1 losses."""
    e = np.asarray(errors, dtype=float)
    bounds = np.cumsum([0] + list(batch_sizes))
    return [float(e[a:b].mean()) for a, b in zip(bounds[:-1], bounds[1:])]
