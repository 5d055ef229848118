"""Dataset ingestion, candidate-set corruption and the PLL-CSV format."""

from .base import (
    UNKNOWN_LABEL,
    FeatureScaler,
    PllDataset,
    average_candidate_count,
    normalize_features,
    select_classes,
    subsample,
)
from .corruption import (
    CorruptionSpec,
    corrupt,
    corrupt_complementary,
    corrupt_instance_dependent,
    corrupt_uniform_bernoulli,
    corrupt_uniform_fixed,
)
from .idx import load_idx, load_idx_dataset, parse_idx
from .pllcsv import dumps_pll_csv, load_pll_csv, loads_pll_csv, save_pll_csv

__all__ = [
    "UNKNOWN_LABEL",
    "CorruptionSpec",
    "FeatureScaler",
    "PllDataset",
    "average_candidate_count",
    "corrupt",
    "corrupt_complementary",
    "corrupt_instance_dependent",
    "corrupt_uniform_bernoulli",
    "corrupt_uniform_fixed",
    "dumps_pll_csv",
    "load_idx",
    "load_idx_dataset",
    "load_pll_csv",
    "loads_pll_csv",
    "normalize_features",
    "parse_idx",
    "save_pll_csv",
    "select_classes",
    "subsample",
]
