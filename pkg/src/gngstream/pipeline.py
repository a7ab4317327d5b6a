"""Per-batch learner: characterize, retrieve, predict, store.

Labels are only seen during initialisation.  Each unsupervised batch is
summarised by a GNG graph and K-means prototypes, both annotated against the
reference nodes carried over from the previous batch.  The previous
prototypes are carried into the current frame by per-class rigid transforms
and used for 1-NN prediction, unless a stored concept matches the batch, in
which case the stored prototypes are used instead.
"""
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import evaluation
from .datasets import batchify
from .errors import ConfigError, GngStreamError, InsufficientData, MissingClass
from .gng import GngParams, gng_fit
from .memory import ConceptModel, Memory, should_store, store, try_retrieve
from .models import (LabeledPointSet, class_means, composition_prototypes,
                     extract_prototypes, knn_predict)
from .transform import estimate_class_transforms

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    batch_size: int
    t_s: int
    gamma: float = 0.6
    eps_r: float = 0.2
    eps_d: float = 4.0
    k_annotate: int = 5
    protos_per_class: int = 1
    gng: GngParams = GngParams()
    memory_enabled: bool = True
    seed: int = 0

    def __post_init__(self):
        checks = [
            ("batch_size", self.batch_size >= 1, "must be >= 1"),
            ("t_s", self.t_s >= 1, "must be >= 1"),
            ("gamma", 0 < self.gamma <= 1, "must lie in (0, 1]"),
            ("eps_r", self.eps_r > 0, "must be > 0"),
            ("eps_d", self.eps_d > 0, "must be > 0"),
            ("k_annotate", self.k_annotate >= 1, "must be >= 1"),
            ("protos_per_class", self.protos_per_class >= 1, "must be >= 1"),
        ]
        for name, ok, msg in checks:
            if not ok:
                raise ConfigError(name, f"{msg} (got {getattr(self, name)!r})")

    @classmethod
    def from_dict(cls, raw):
        """Build from a plain mapping (e.g. parsed JSON); unknown keys are errors."""
        raw = dict(raw)
        gng_raw = raw.pop("gng", {}) or {}
        known = {f for f in cls.__dataclass_fields__ if f != "gng"}
        for key in raw:
            if key not in known:
                raise ConfigError(key, "unknown configuration key")
        try:
            gng = GngParams(**gng_raw)
        except TypeError as exc:
            raise ConfigError("gng", str(exc)) from exc
        except GngStreamError as exc:
            raise ConfigError("gng", str(exc)) from exc
        for key in ("batch_size", "t_s"):
            if key not in raw:
                raise ConfigError(key, "missing required key")
        return cls(gng=gng, **raw)

    def to_dict(self):
        return asdict(self)


@dataclass
class PipelineState:
    config: RunConfig
    class_count: int
    reference_nodes: LabeledPointSet
    reference_prototypes: LabeledPointSet
    memory: Memory
    batch_counter: int = 0
    projected_nodes: Optional[LabeledPointSet] = None


@dataclass
class BatchResult:
    batch: int
    predictions: np.ndarray
    retrieved_model_index: Optional[int]
    stored: bool
    memory_size: int
    reference_prototypes: LabeledPointSet
    n_nodes: int
    iou: Optional[float] = None
    errors: Optional[int] = None


@dataclass
class RunReport:
    config: RunConfig
    batches: list = field(default_factory=list)
    predictions: np.ndarray = None
    truth: np.ndarray = None
    prequential: np.ndarray = None
    batch_errors: list = field(default_factory=list)
    memory: Memory = None

    @property
    def prequential_error(self):
        return float(self.prequential[-1]) if len(self.prequential) else float("nan")

    @property
    def prequential_error_percent(self):
        return 100.0 * self.prequential_error

    @property
    def macro_f1(self):
        return evaluation.macro_f1(self.truth, self.predictions)

    @property
    def retrievals(self):
        return [(b.batch, b.retrieved_model_index) for b in self.batches
                if b.retrieved_model_index is not None]

    @property
    def memory_size(self):
        return self.batches[-1].memory_size if self.batches else 1


def _seed(cfg, batch, stream):
    return int(np.random.SeedSequence([cfg.seed, batch, stream]).generate_state(1)[0])


def _fit_nodes(X, cfg, batch):
    try:
        return gng_fit(X, replace(cfg.gng, seed=_seed(cfg, batch, 0))).positions
    except InsufficientData:
        return np.unique(X, axis=0)


def init(X, y, cfg, class_count=None):
    """Build the initial state from the labelled prefix and seed the memory."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if class_count is None:
        class_count = int(y.max()) + 1
    missing = sorted(set(range(class_count)) - set(np.unique(y).tolist()))
    if missing:
        raise MissingClass(f"classes {missing} absent from the supervised prefix")
    supervised = LabeledPointSet(X, y)
    protos = composition_prototypes(X, y, cfg.protos_per_class, class_count,
                                    seed=_seed(cfg, 0, 1))
    nodes_xy = _fit_nodes(X, cfg, 0)
    nodes = LabeledPointSet(nodes_xy, knn_predict(nodes_xy, supervised, cfg.k_annotate))
    mem = Memory()
    store(mem, ConceptModel(protos, nodes, 0))
    return PipelineState(cfg, class_count, nodes, protos, mem)


def process_batch(state, X):
    """Run one unsupervised batch through the four phases; mutates ``state``."""
    cfg = state.config
    X = np.asarray(X, dtype=float)
    b = state.batch_counter + 1

    # characterize
    nodes_xy = _fit_nodes(X, cfg, b)
    nodes = LabeledPointSet(nodes_xy,
                            knn_predict(nodes_xy, state.reference_nodes, cfg.k_annotate))
    rho = state.class_count * cfg.protos_per_class
    try:
        protos = extract_prototypes(X, cfg.protos_per_class, state.class_count,
                                    state.reference_nodes, cfg.k_annotate,
                                    seed=_seed(cfg, b, 1))
    except InsufficientData:
        log.debug("batch %d: fewer than %d distinct instances, using node class means", b, rho)
        protos = class_means(nodes)
    transforms = estimate_class_transforms(state.reference_nodes, nodes)
    reference_protos = transforms.project(state.reference_prototypes)
    state.projected_nodes = transforms.project(state.reference_nodes)

    # retrieve
    hit = None
    if cfg.memory_enabled:
        hit = try_retrieve(state.memory, protos, X, cfg.eps_r, cfg.gamma)
        if hit is not None:
            log.debug("batch %d: retrieved model %d (iou=%s)", b, hit.index, hit.iou)
            reference_protos = hit.model.prototypes

    # predict
    predictions = knn_predict(X, reference_protos, 1)

    # store
    stored = False
    if cfg.memory_enabled and should_store(state.memory, protos, cfg.eps_d):
        store(state.memory, ConceptModel(protos, nodes, b))
        stored = True

    if hit is None:
        state.reference_nodes, state.reference_prototypes = nodes, protos
    else:
        state.reference_nodes = hit.model.nodes
        state.reference_prototypes = hit.model.prototypes
    state.batch_counter = b
    return BatchResult(
        batch=b,
        predictions=predictions,
        retrieved_model_index=None if hit is None else hit.index,
        stored=stored,
        memory_size=len(state.memory),
        reference_prototypes=reference_protos,
        n_nodes=len(nodes),
        iou=None if hit is None else hit.iou,
    )


def run(stream, cfg):
    """Run the learner over a labelled stream; labels past ``t_s`` are only
    used for scoring."""
    prefix, batches, truths = batchify(stream, cfg.batch_size, cfg.t_s)
    state = init(prefix.features, prefix.labels, cfg, stream.n_classes)
    report = RunReport(cfg)
    preds = []
    for Xb, yb in zip(batches, truths):
        res = process_batch(state, Xb)
        res.errors = int(np.sum(res.predictions != yb))
        report.batches.append(res)
        preds.append(res.predictions)
    report.predictions = np.concatenate(preds)
    report.truth = np.concatenate(truths)
    report.prequential = evaluation.prequential((report.predictions != report.truth).astype(int))
    report.batch_errors = [b.errors for b in report.batches]
    report.memory = state.memory
    return report
