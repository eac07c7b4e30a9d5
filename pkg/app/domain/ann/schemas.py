from enum import Enum
from typing import NamedTuple

import numpy as np


class AnnBackend(str, Enum):
    EXACT = "exact"
    LSH = "lsh"


class AnnMatch(NamedTuple):
    center: np.ndarray
    dist_sq: float
    ordinal: int
