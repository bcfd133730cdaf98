"""CNN denoiser: topology, datasets, training and chain integration."""

from .model import (
    LMS, PRESETS, RDD, RIS, RPD,
    DenoiserModel, ModelSpec, build_model, load_checkpoint, param_count, save_checkpoint,
)
from .data import (
    Dataset, SampleRecord, TARGET_OBJECTS, TARGET_WITH_NOISE,
    build_split, load_dataset, make_dataset, save_dataset,
)
from .train import LOSSES, MSE, SINR, WMSE, TrainResult, TrainingDiverged, train_model
from .infer import denoise_chain, denoise_rdd, denoise_rpd

__all__ = [
    "LMS", "PRESETS", "RDD", "RIS", "RPD",
    "DenoiserModel", "ModelSpec", "build_model", "load_checkpoint", "param_count",
    "save_checkpoint",
    "Dataset", "SampleRecord", "TARGET_OBJECTS", "TARGET_WITH_NOISE",
    "build_split", "load_dataset", "make_dataset", "save_dataset",
    "LOSSES", "MSE", "SINR", "WMSE", "TrainResult", "TrainingDiverged", "train_model",
    "denoise_chain", "denoise_rdd", "denoise_rpd",
]
