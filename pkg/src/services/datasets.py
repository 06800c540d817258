"""
Bundled benchmark datasets.
"""
import logging

from src.errors import DataError
from src.models.traces import Dataset

logger = logging.getLogger(__name__)

# Heat evolved (calories per gram) by 13 Portland cement mixtures and the
# weight percentages of their four main clinker compounds.
PORTLAND = Dataset(
    name="portland",
    columns=["heat", "p3ca", "p3cs", "p4caf", "p2cs"],
    values=[
        [78.5, 7, 26, 6, 60],
        [74.3, 1, 29, 15, 52],
        [104.3, 11, 56, 8, 20],
        [87.6, 11, 31, 8, 47],
        [95.9, 7, 52, 6, 33],
        [109.2, 11, 55, 9, 22],
        [102.7, 3, 71, 17, 6],
        [72.5, 1, 31, 22, 44],
        [93.1, 2, 54, 18, 22],
        [115.9, 21, 47, 4, 26],
        [83.8, 1, 40, 23, 34],
        [113.3, 11, 66, 9, 12],
        [109.4, 10, 68, 8, 12],
    ],
    source="Woods, Steinour and Starke (1932), Industrial and Engineering Chemistry 24, 1207-1214",
)

DATASETS = {PORTLAND.name: PORTLAND}


def load_dataset(name: str) -> Dataset:
    """
    Look up a bundled dataset by name.

    Args:
        name: Dataset identifier (case-insensitive)

    Returns:
        Dataset
    """
    dataset = DATASETS.get(name.strip().lower())
    if dataset is None:
        raise DataError(f"Unknown dataset '{name}'; bundled: {', '.join(sorted(DATASETS))}")

    logger.debug(f"Loaded bundled dataset {dataset.name} ({dataset.values.shape[0]} rows)")
    return dataset
