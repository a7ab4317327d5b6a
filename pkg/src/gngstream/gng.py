"""Batch-trained Growing Neural Gas.

The network is re-fit from scratch on every batch.  Training state lives
in fixed-size buffers sized by ``max_nodes``; an age matrix holds the edges
(``-1`` means no edge) so both kernels can share one layout.
"""
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _accel
from ._accel import njit
from .errors import InsufficientData, InvalidParams


@dataclass(frozen=True)
class GngParams:
    """Hyperparameters.

    ``max_nodes=None`` means ``max(2, min(60, n // 5))`` for a batch of
    ``n``.  ``epochs=None`` runs enough passes for the graph to reach
    ``max_nodes`` half way through training, and never fewer than 3:
    ``max(3, ceil(2 * lam * max_nodes / n))``.
    """

    max_nodes: int = None
    lam: int = 100
    eps_b: float = 0.2
    eps_n: float = 0.006
    alpha_split: float = 0.5
    d_decay: float = 0.995
    a_max: int = 50
    epochs: int = None
    seed: int = 0

    def __post_init__(self):
        if self.max_nodes is not None and self.max_nodes < 2:
            raise InvalidParams("max_nodes must be >= 2")
        if not 0 < self.eps_n <= self.eps_b < 1:
            raise InvalidParams("need 0 < eps_n <= eps_b < 1")
        if not 0 < self.alpha_split < 1:
            raise InvalidParams("alpha_split must lie in (0, 1)")
        if not 0 < self.d_decay < 1:
            raise InvalidParams("d_decay must lie in (0, 1)")
        if self.lam < 1 or self.a_max < 1 or (self.epochs is not None and self.epochs < 1):
            raise InvalidParams("lam, a_max and epochs must be >= 1")

    def resolved(self, n_instances):
        """Copy with ``max_nodes`` and ``epochs`` fixed for ``n_instances``."""
        max_nodes = self.max_nodes
        if max_nodes is None:
            max_nodes = max(2, min(60, n_instances // 5))
        epochs = self.epochs
        if epochs is None:
            epochs = max(3, math.ceil(2 * self.lam * max_nodes / max(n_instances, 1)))
        return replace(self, max_nodes=max_nodes, epochs=epochs)


@dataclass(frozen=True)
class GngGraph:
    positions: np.ndarray
    errors: np.ndarray
    edges: np.ndarray
    ages: np.ndarray

    def __len__(self):
        return len(self.positions)

    def components(self):
        """Connected components as a list of node-index arrays."""
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import connected_components

        n = len(self.positions)
        e = self.edges
        adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
        _, comp = connected_components(adj, directed=False)
        return [np.flatnonzero(comp == c) for c in np.unique(comp)]


@njit(cache=True)
def _train_nb(X, order, pos, err, active, age, lam, eps_b, eps_n, alpha_split,
              d_decay, a_max):
    M, d = pos.shape
    n_active = 0
    for k in range(M):
        if active[k]:
            n_active += 1
    for step in range(order.shape[0]):
        x = X[order[step]]
        b1 = np.inf
        b2 = np.inf
        s1 = -1
        s2 = -1
        for k in range(M):
            if not active[k]:
                continue
            dist = 0.0
            for c in range(d):
                diff = pos[k, c] - x[c]
                dist += diff * diff
            if dist < b1:
                b2 = b1
                s2 = s1
                b1 = dist
                s1 = k
            elif dist < b2:
                b2 = dist
                s2 = k

        for k in range(M):
            if age[s1, k] >= 0:
                age[s1, k] += 1
                age[k, s1] += 1
        err[s1] += b1
        for c in range(d):
            pos[s1, c] += eps_b * (x[c] - pos[s1, c])
        for k in range(M):
            if age[s1, k] >= 0:
                for c in range(d):
                    pos[k, c] += eps_n * (x[c] - pos[k, c])
        age[s1, s2] = 0
        age[s2, s1] = 0

        for k in range(M):
            if age[s1, k] > a_max:
                age[s1, k] = -1
                age[k, s1] = -1
                isolated = True
                for j in range(M):
                    if age[k, j] >= 0:
                        isolated = False
                        break
                if isolated:
                    active[k] = False
                    err[k] = 0.0
                    n_active -= 1

        if (step + 1) % lam == 0 and n_active < M:
            q = -1
            for k in range(M):
                if active[k] and (q < 0 or err[k] > err[q]):
                    q = k
            f = -1
            for k in range(M):
                if age[q, k] >= 0 and (f < 0 or err[k] > err[f]):
                    f = k
            if f >= 0:
                r = 0
                while active[r]:
                    r += 1
                for c in range(d):
                    pos[r, c] = 0.5 * (pos[q, c] + pos[f, c])
                age[q, f] = -1
                age[f, q] = -1
                age[q, r] = 0
                age[r, q] = 0
                age[f, r] = 0
                age[r, f] = 0
                err[q] *= alpha_split
                err[f] *= alpha_split
                err[r] = err[q]
                active[r] = True
                n_active += 1

        for k in range(M):
            if active[k]:
                err[k] *= d_decay


def _train_np(X, order, pos, err, active, age, lam, eps_b, eps_n, alpha_split,
              d_decay, a_max):
    M = pos.shape[0]
    n_active = int(active.sum())
    idx = active.nonzero()[0]
    pos[~active] = np.inf          # parked units are never nearest
    for step, i in enumerate(order):
        x = X[i]
        dist = ((pos - x) ** 2).sum(axis=1)
        # argmin keeps the lowest index on ties, like a stable sort
        s1 = dist.argmin()
        d1 = dist[s1]
        dist[s1] = np.inf
        s2 = dist.argmin()

        nbrs = (age[s1] >= 0).nonzero()[0]
        age[s1, nbrs] += 1
        age[nbrs, s1] += 1
        err[s1] += d1
        pos[s1] += eps_b * (x - pos[s1])
        pos[nbrs] += eps_n * (x - pos[nbrs])
        age[s1, s2] = age[s2, s1] = 0

        stale = (age[s1] > a_max).nonzero()[0]
        if len(stale):
            age[s1, stale] = -1
            age[stale, s1] = -1
            dead = stale[~(age[stale] >= 0).any(axis=1)]
            active[dead] = False
            err[dead] = 0.0
            pos[dead] = np.inf
            n_active -= len(dead)
            idx = active.nonzero()[0]

        if (step + 1) % lam == 0 and n_active < M:
            q = idx[np.argmax(err[idx])]
            nq = np.flatnonzero(age[q] >= 0)
            if len(nq):
                f = nq[np.argmax(err[nq])]
                r = int(np.argmin(active))
                pos[r] = 0.5 * (pos[q] + pos[f])
                age[q, f] = age[f, q] = -1
                age[q, r] = age[r, q] = 0
                age[f, r] = age[r, f] = 0
                err[q] *= alpha_split
                err[f] *= alpha_split
                err[r] = err[q]
                active[r] = True
                n_active += 1
                idx = active.nonzero()[0]

        err[idx] *= d_decay


def gng_fit(instances, params=GngParams(), use_numba=None):
    """Fit a GNG graph to one batch of instances.

    Two distinct random instances seed the network; the batch is reshuffled
    every epoch with an RNG seeded from ``params.seed``.
    """
    X = np.ascontiguousarray(instances, dtype=float)
    if X.ndim != 2:
        raise InsufficientData("instances must be a 2-D array")
    distinct = np.unique(X, axis=0, return_index=True)[1]
    if len(distinct) < 2:
        raise InsufficientData("GNG needs at least 2 distinct instances")
    params = params.resolved(len(X))
    rng = np.random.default_rng(params.seed)

    first = int(rng.integers(len(X)))
    others = np.flatnonzero(np.any(X != X[first], axis=1))
    second = int(others[rng.integers(len(others))])

    M, d = params.max_nodes, X.shape[1]
    pos = np.zeros((M, d))
    pos[0], pos[1] = X[first], X[second]
    err = np.zeros(M)
    active = np.zeros(M, dtype=np.bool_)
    active[:2] = True
    age = np.full((M, M), -1, dtype=np.int64)
    order = np.concatenate([rng.permutation(len(X)) for _ in range(params.epochs)])

    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    train = _train_nb if use_numba else _train_np
    train(X, order, pos, err, active, age, params.lam, params.eps_b, params.eps_n,
          params.alpha_split, params.d_decay, params.a_max)
    return _compact(pos, err, active, age)


def _compact(pos, err, active, age):
    keep = np.flatnonzero(active)
    remap = np.full(len(active), -1)
    remap[keep] = np.arange(len(keep))
    sub = age[np.ix_(keep, keep)]
    i, j = np.nonzero(np.triu(sub >= 0, k=1))
    return GngGraph(
        positions=pos[keep].copy(),
        errors=err[keep].copy(),
        edges=np.column_stack([i, j]).astype(np.int64),
        ages=sub[i, j].copy(),
    )


def quantization_error(instances, positions):
    """Mean distance from each instance to its nearest node."""
    X = np.asarray(instances, dtype=float)
    d = np.linalg.norm(X[:, None, :] - positions[None, :, :], axis=2)
    return float(d.min(axis=1).mean())
