"""Dataset ingestion: IDX files, synthetic generation and normalization."""

from src.data.dataset import Dataset, DatasetSplit, normalize
from src.data.idx import load_idx, write_idx
from src.data.synthetic import SyntheticSpec, synth_dataset

__all__ = [
    "Dataset",
    "DatasetSplit",
    "SyntheticSpec",
    "load_idx",
    "normalize",
    "synth_dataset",
    "write_idx",
]
