"""GNG-based learning on drifting, unlabelled streams with a memory of
recurring concepts."""
from ._accel import backend
from .datasets import (DATASETS, Stream, batchify, generate_synthetic, induce_rcd,
                       load_csv, save_csv, surrogate_stream)
from .evaluation import macro_f1, prequential
from .geometry import alpha_shape, iou
from .gng import GngParams, gng_fit
from .memory import ConceptModel, Memory
from .models import LabeledPointSet, kmeans, knn_classify, knn_predict
from .pipeline import RunConfig, RunReport, init, process_batch, run
from .transform import EuclideanTransform, estimate_rigid

__version__ = "0.1.0"

__all__ = [
    "DATASETS", "ConceptModel", "EuclideanTransform", "GngParams", "LabeledPointSet",
    "Memory", "RunConfig", "RunReport", "Stream", "alpha_shape", "backend", "batchify",
    "estimate_rigid", "generate_synthetic", "gng_fit", "induce_rcd", "init", "iou",
    "kmeans", "knn_classify", "knn_predict", "load_csv", "macro_f1", "prequential",
    "process_batch", "run", "save_csv", "surrogate_stream",
]
