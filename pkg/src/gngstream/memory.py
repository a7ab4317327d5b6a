"""Append-only memory of past concept models.

Retrieval is two-staged: every current centroid must sit within ``eps_r``
of some stored centroid, then (2-D only) the alpha shape of the raw batch
must overlap the alpha shape of the stored GNG nodes with IoU > ``gamma``.
Both shapes are cut at a shared alpha, the larger of their automatic values,
so that a sparse node set and a dense batch are outlined at one resolution.
"""
import csv
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from . import geometry
from .errors import DegenerateInput
from .models import LabeledPointSet


@dataclass(frozen=True)
class ConceptModel:
    prototypes: LabeledPointSet
    nodes: LabeledPointSet
    batch_index_created: int

    @cached_property
    def node_triangulation(self):
        return geometry.delaunay_triangulate(self.nodes.points)

    @cached_property
    def node_alpha(self):
        return geometry.select_alpha(self.nodes.points, self.node_triangulation)

    @cached_property
    def node_shape(self):
        return geometry.alpha_complex(self.node_triangulation, self.node_alpha)


class Retrieval(NamedTuple):
    index: int
    model: ConceptModel
    iou: Optional[float]


@dataclass
class Memory:
    models: list = field(default_factory=list)

    def __len__(self):
        return len(self.models)

    def __getitem__(self, i):
        return self.models[i]

    def __iter__(self):
        return iter(self.models)

    @property
    def last(self):
        return self.models[-1]


def _min_dists(points, centroids):
    d = np.linalg.norm(points[:, None, :] - centroids[None, :, :], axis=2)
    return d.min(axis=1)


def centroids_close(current, stored, eps_r):
    """True when no current centroid is farther than ``eps_r`` from ``stored``."""
    return bool(np.all(_min_dists(current.points, stored.points) <= eps_r))


def footprint_iou(batch_points, model, batch_tri=None):
    """IoU of the batch and stored-node alpha shapes at a shared alpha."""
    if batch_tri is None:
        batch_tri = geometry.delaunay_triangulate(batch_points)
    alpha = max(geometry.select_alpha(batch_points, batch_tri), model.node_alpha)
    return geometry.iou(geometry.alpha_complex(batch_tri, alpha),
                        geometry.alpha_complex(model.node_triangulation, alpha))


def try_retrieve(mem, current_prototypes, batch_points, eps_r, gamma):
    """First stored model (oldest first) matching the current batch, or None."""
    batch_points = np.asarray(batch_points, dtype=float)
    planar = batch_points.shape[1] == 2
    batch_tri = None
    for i, model in enumerate(mem):
        if not centroids_close(current_prototypes, model.prototypes, eps_r):
            continue
        if not planar:
            return Retrieval(i, model, None)
        try:
            if batch_tri is None:
                batch_tri = geometry.delaunay_triangulate(batch_points)
            score = footprint_iou(batch_points, model, batch_tri)
        except DegenerateInput:
            continue
        if score > gamma:
            return Retrieval(i, model, score)
    return None


def should_store(mem, current_prototypes, eps_d):
    """True if some current centroid is farther than ``eps_d`` from the
    last stored model's centroids."""
    last = mem.last.prototypes.points
    return bool(np.any(_min_dists(current_prototypes.points, last) > eps_d))


def store(mem, model):
    mem.models.append(model)


MEMORY_HEADER = ("model", "batch_created", "kind", "label")


def export_memory_csv(mem, path):
    """One row per stored prototype or node, grouped by model."""
    dim = mem[0].nodes.dim if len(mem) else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(MEMORY_HEADER + tuple(f"x{j}" for j in range(dim)))
        for i, m in enumerate(mem):
            for kind, pts in (("prototype", m.prototypes), ("node", m.nodes)):
                for p, y in zip(pts.points, pts.labels):
                    w.writerow([i, m.batch_index_created, kind, int(y)] + [repr(float(v)) for v in p])


def load_memory_csv(path):
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for r in reader:
            i, created, kind, label = int(r[0]), int(r[1]), r[2], int(r[3])
            entry = rows.setdefault(i, {"created": created, "prototype": [], "node": []})
            entry[kind].append(([float(v) for v in r[4:]], label))
    mem = Memory()
    for i in sorted(rows):
        e = rows[i]
        protos = LabeledPointSet([p for p, _ in e["prototype"]], [y for _, y in e["prototype"]])
        nodes = LabeledPointSet([p for p, _ in e["node"]], [y for _, y in e["node"]])
        store(mem, ConceptModel(protos, nodes, e["created"]))
    return mem
