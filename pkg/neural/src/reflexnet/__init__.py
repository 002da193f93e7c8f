"""Neural reflex predictors trained on phoneme exchange files."""

from .data import Pair, read_pairs, write_predictions
from .training import TrainConfig, greedy_decode, load_checkpoint, predict, train
from .vocab import Vocabulary

__version__ = "0.1.0"

__all__ = [
    "Pair",
    "read_pairs",
    "write_predictions",
    "TrainConfig",
    "Vocabulary",
    "train",
    "predict",
    "load_checkpoint",
    "greedy_decode",
    "__version__",
]
