"""Swarm-crawler texture analysis toolkit."""

from .crawler import (
    AgentState,
    CrawlerConfig,
    CrawlerEngine,
    LiveAgentCurve,
    Signature,
    curves_to_csv,
    evolve,
    initial_positions,
    movement_kernel,
    neighbors,
    signature,
)
from .descriptors import (
    FeatureVector,
    features_to_csv,
    fourier_features,
    gabor_features,
    glcm_features,
)
from .errors import (
    CrawltexError,
    DatasetError,
    DecodeError,
    ParameterError,
    TrainingError,
    UnsupportedFormatError,
    ValidationError,
)
from .imgio import (
    GrayImage,
    LabeledDataset,
    load_dataset,
    load_gray,
    read_image,
    save_pgm,
    synth_texture,
    write_pgm,
)
from .ml import FoldReport, LdaModel, cross_validate, lda_fit, lda_predict

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "CrawlerConfig",
    "CrawlerEngine",
    "CrawltexError",
    "DatasetError",
    "DecodeError",
    "FeatureVector",
    "FoldReport",
    "GrayImage",
    "LabeledDataset",
    "LdaModel",
    "LiveAgentCurve",
    "ParameterError",
    "Signature",
    "TrainingError",
    "UnsupportedFormatError",
    "ValidationError",
    "cross_validate",
    "curves_to_csv",
    "evolve",
    "features_to_csv",
    "fourier_features",
    "gabor_features",
    "glcm_features",
    "initial_positions",
    "lda_fit",
    "lda_predict",
    "load_dataset",
    "load_gray",
    "movement_kernel",
    "neighbors",
    "read_image",
    "save_pgm",
    "signature",
    "synth_texture",
    "write_pgm",
]
