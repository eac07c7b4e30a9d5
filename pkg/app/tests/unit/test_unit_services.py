
import numpy as np
import pytest

from app.domain.dataset.models import Dataset
from app.domain.dataset.services import center
from app.domain.services.verification import (
    check_centered,
    check_cluster_count,
    check_condition,
    check_existing,
)
from app.exceptions.base_exceptions import CustomException
from app.exceptions.dataset_exceptions import EmptyDatasetException, NotCenteredException
from app.exceptions.request_exceptions import InvalidArgumentException
from app.exceptions.seeding_exceptions import InvalidClusterCountException


def test_check_existing_raises_on_none_and_empty():
    with pytest.raises(EmptyDatasetException):
        check_existing(None, EmptyDatasetException)
    with pytest.raises(EmptyDatasetException):
        check_existing([], EmptyDatasetException)


def test_check_existing_pass():
    assert check_existing([1], EmptyDatasetException) is None


def test_check_condition_passes_args():
    with pytest.raises(InvalidArgumentException) as exc:
        check_condition(False, InvalidArgumentException, "runs=0")
    assert "runs=0" in exc.value.error
    assert exc.value.code == "invalid_argument"


@pytest.mark.parametrize("k", [0, -1, 11, 2.0])
def test_check_cluster_count_invalid(k):
    with pytest.raises(InvalidClusterCountException) as exc:
        check_cluster_count(k, 10)
    assert exc.value.status_code == 422
    assert exc.value.exit_code == 2


@pytest.mark.parametrize("k", [1, 5, 10])
def test_check_cluster_count_valid(k):
    assert check_cluster_count(k, 10) is None


def test_check_centered():
    # given
    raw = Dataset(points=np.array([[1.0, 2.0], [3.0, 4.0]]))

    # when / then
    with pytest.raises(NotCenteredException):
        check_centered(raw)
    assert check_centered(center(raw)) is None


def test_custom_exception_defaults():
    exc = CustomException(error="x", code="y")
    assert (exc.status_code, exc.exit_code) == (400, 2)
