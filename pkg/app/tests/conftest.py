import os

os.environ["TESTING"] = "true"

import numpy as np
import pytest

from app.domain.dataset.models import Dataset
from app.domain.dataset.services import center


@pytest.fixture
def line_points():
    """1D {0, 1, 10, 11}"""
    return np.array([[0.0], [1.0], [10.0], [11.0]])


@pytest.fixture
def line_dataset(line_points):
    return center(Dataset(points=line_points))


@pytest.fixture
def blob_dataset():
    """세 개의 잘 떨어진 2D 군집, 중심화됨"""
    rng = np.random.default_rng(7)
    means = np.array([[-20.0, 0.0], [0.0, 15.0], [25.0, -5.0]])
    points = np.vstack([m + rng.standard_normal((40, 2)) for m in means])
    return center(Dataset(points=points))


@pytest.fixture
def random_dataset():
    rng = np.random.default_rng(11)
    return center(Dataset(points=rng.standard_normal((200, 5)) * [4.0, 2.0, 1.0, 0.5, 0.25]))
