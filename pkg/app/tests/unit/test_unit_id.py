import numpy as np
import pytest

from app.domain.analysis.services.id_services import mle_id
from app.exceptions.analysis_exceptions import (
    DegenerateEstimateException,
    InvalidNeighborCountException,
)


def test_mle_id_hand_example():
    # given
    points = np.array([[0.0], [1.0], [3.0]])

    # when
    estimate = mle_id(points, 2)

    # then
    expected = np.mean([1 / np.log(3), 1 / np.log(2), 1 / np.log(1.5)])
    assert estimate == pytest.approx(expected)
    assert estimate == pytest.approx(1.6064, abs=1e-4)


def test_mle_id_segment_in_high_dim():
    # given: R^20 에 놓인 1차원 선분
    rng = np.random.default_rng(0)
    direction = rng.standard_normal(20)
    direction /= np.linalg.norm(direction)
    points = rng.random((3000, 1)) * direction

    # when
    estimate = mle_id(points, 20)

    # then
    assert 0.8 <= estimate <= 1.2


def test_mle_id_cube():
    rng = np.random.default_rng(1)
    estimate = mle_id(rng.random((4000, 5)), 20)
    assert 3.5 <= estimate <= 6.0


def test_mle_id_subsample_is_deterministic():
    points = np.random.default_rng(2).random((500, 3))
    assert mle_id(points, 10, subsample=200, rng_seed=4) == mle_id(points, 10, subsample=200, rng_seed=4)


def test_mle_id_skips_duplicates():
    # given: 중복점 두 개 + 일반 점
    points = np.array([[0.0], [0.0], [1.0], [3.0], [7.0], [15.0]])

    # when
    estimate = mle_id(points, 2)

    # then
    assert np.isfinite(estimate)


def test_mle_id_all_duplicates():
    with pytest.raises(DegenerateEstimateException):
        mle_id(np.zeros((5, 2)), 2)


def test_mle_id_invalid_k():
    with pytest.raises(InvalidNeighborCountException):
        mle_id(np.zeros((5, 2)), 1)
    with pytest.raises(InvalidNeighborCountException):
        mle_id(np.array([[0.0], [1.0]]), 2)
