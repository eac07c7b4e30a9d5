import math

import numpy as np
import pytest

from app.domain.analysis.services.cost_services import (
    aspect_ratio,
    assign,
    cost,
    geom_params,
    lloyd,
    max_renyi,
)
from app.domain.analysis.services.rejection_services import rejection_sweep
from app.domain.analysis.services.scaling_services import (
    beta_curve,
    curve_fits,
    fit_power_law,
    noise_sweep,
)
from app.domain.dataset.models import Dataset
from app.domain.dataset.services import center
from app.exceptions.analysis_exceptions import (
    EmptyCentersException,
    EtaUndefinedException,
    NonPositiveValueException,
    NotNormalizedException,
    TooFewPointsException,
)
from app.exceptions.request_exceptions import InvalidArgumentException
from app.exceptions.seeding_exceptions import InvalidChainLengthException


def test_cost_line(line_points):
    assert cost(line_points, [[0.5], [10.5]]) == 1.0


def test_cost_centroid_is_frobenius(line_dataset):
    assert cost(line_dataset, [[0.0]]) == pytest.approx(line_dataset.frob_sq)


def test_cost_all_points_as_centers(line_points):
    assert cost(line_points, line_points) == 0.0


def test_cost_empty_centers(line_points):
    with pytest.raises(EmptyCentersException):
        cost(line_points, [])


def test_assign_ties_lowest_ordinal():
    labels, min_sq = assign(np.array([[0.0]]), np.array([[-1.0], [1.0]]))
    assert labels.tolist() == [0]
    assert min_sq.tolist() == [1.0]


def test_lloyd_converges_on_line(line_points):
    # given
    ds = Dataset(points=line_points)

    # when
    centers, trace = lloyd(ds, [[1.0], [10.0]], max_iters=10)

    # then
    assert sorted(centers.ravel().tolist()) == [0.5, 10.5]
    assert trace == [2.0, 1.0]


def test_lloyd_fixed_point(line_points):
    centers, trace = lloyd(Dataset(points=line_points), [[0.5], [10.5]], max_iters=10)
    assert len(trace) == 1
    assert centers.ravel().tolist() == [0.5, 10.5]


def test_lloyd_trace_non_increasing():
    rng = np.random.default_rng(0)
    for _ in range(100):
        ds = Dataset(points=rng.standard_normal((30, 2)))
        init = ds.points[rng.choice(30, 4, replace=False)]
        _, trace = lloyd(ds, init, max_iters=20)
        assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_lloyd_reseeds_empty_cluster():
    # given: 두 번째 중심은 어떤 점에서도 가장 가깝지 않다
    ds = Dataset(points=np.array([[0.0], [1.0], [10.0]]))

    # when
    centers, trace = lloyd(ds, [[0.5], [100.0]], max_iters=5)

    # then
    assert trace[-1] < trace[0]
    assert 10.0 in centers.ravel().tolist()


def test_geom_params_line(line_dataset):
    # when
    params = geom_params(line_dataset, [[-5.0], [5.0]], include_data=True)

    # then
    assert params.beta == 101.0
    assert params.eta_centers == 1.0
    assert params.eta_data == 11.0
    assert not params.eta_data_subsampled


def test_aspect_ratio():
    assert aspect_ratio(np.array([[0.0], [3.0], [9.0]])) == 3.0
    assert aspect_ratio(np.array([[1.0, 1.0], [1.0, 1.0]])) == math.inf


def test_aspect_ratio_blocked_matches_pdist():
    # given: 2048 개 초과 시 블록 계산 경로
    rng = np.random.default_rng(1)
    points = rng.standard_normal((2100, 2))
    sub = points[:2000]

    # when
    blocked = aspect_ratio(points)

    # then
    assert blocked >= aspect_ratio(sub) * (1 - 1e-12)
    assert math.isfinite(blocked)


def test_geom_params_zero_cost(line_points):
    params = geom_params(Dataset(points=line_points), line_points)
    assert params.beta == math.inf


def test_geom_params_single_center(line_dataset):
    with pytest.raises(EtaUndefinedException):
        geom_params(line_dataset, [[0.0]])


def test_max_renyi():
    assert max_renyi([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert max_renyi([0.5, 0.5], [0.25, 0.75]) == pytest.approx(math.log(2))
    assert max_renyi([0.5, 0.5], [1.0, 0.0]) == math.inf
    assert max_renyi([0.0, 1.0], [1.0, 0.0]) == math.inf
    assert max_renyi([0.0, 1.0], [0.5, 0.5]) == pytest.approx(math.log(2))


def test_max_renyi_not_normalized():
    with pytest.raises(NotNormalizedException):
        max_renyi([0.5, 0.6], [0.5, 0.5])


def test_fit_power_law_exact():
    ks = [4, 8, 16, 32, 64]
    fit = fit_power_law(ks, [k**0.5 for k in ks])
    assert fit.slope == pytest.approx(0.5, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.points_used == 5
    assert fit.ci95_slope[0] <= fit.slope <= fit.ci95_slope[1]


def test_fit_power_law_constant():
    fit = fit_power_law([2, 4, 8], [3.0, 3.0, 3.0])
    assert fit.slope == 0.0
    assert fit.r_squared == 0.0
    assert fit.ci95_slope == (0.0, 0.0)


def test_fit_power_law_noisy():
    # given
    rng = np.random.default_rng(2)
    ks = np.array([4, 8, 16, 32, 64, 128, 256], dtype=float)
    values = 2.0 * ks**1.5 * (1 + 1e-6 * rng.uniform(-1, 1, size=ks.size))

    # when
    fit = fit_power_law(ks, values)

    # then
    assert abs(fit.slope - 1.5) <= 1e-3
    assert abs(fit.intercept - math.log(2)) <= 1e-3


def test_fit_power_law_errors():
    with pytest.raises(TooFewPointsException):
        fit_power_law([1, 2], [1.0, 2.0])
    with pytest.raises(NonPositiveValueException):
        fit_power_law([1, 2, 3], [1.0, 0.0, 2.0])
    with pytest.raises(InvalidArgumentException):
        fit_power_law([4, 4, 4], [1.0, 2.0, 3.0])


def test_beta_curve_skips_k1(blob_dataset):
    # when
    curve = beta_curve(blob_dataset, [1, 2, 3, 6], runs=2, lloyd_iters=10, rng_seed=0, threads=2)

    # then
    assert [p.k for p in curve] == [2, 3, 6]
    assert all(p.beta >= 1.0 for p in curve)
    assert curve[0].beta <= curve[1].beta * 1.01
    assert all(p.runs == 2 for p in curve)


def test_beta_curve_best_aggregate(blob_dataset):
    mean_curve = beta_curve(blob_dataset, [3, 4], runs=3, rng_seed=1)
    best_curve = beta_curve(blob_dataset, [3, 4], runs=3, rng_seed=1, aggregate="best")
    for mean_point, best_point in zip(mean_curve, best_curve):
        assert best_point.cost <= mean_point.cost + 1e-9


def test_beta_curve_is_deterministic(blob_dataset):
    first = beta_curve(blob_dataset, [2, 4], runs=2, rng_seed=3, threads=1)
    second = beta_curve(blob_dataset, [2, 4], runs=2, rng_seed=3, threads=4)
    assert first == second


def test_beta_curve_bad_aggregate(blob_dataset):
    with pytest.raises(InvalidArgumentException):
        beta_curve(blob_dataset, [2, 3], runs=1, aggregate="median")


def test_curve_fits_on_cube():
    # given: 2차원 단위 정사각형, beta_k ~ k^(2/d) = k
    rng = np.random.default_rng(0)
    ds = center(Dataset(points=rng.random((3000, 2))))

    # when
    curve = beta_curve(ds, [4, 8, 16, 32, 64], runs=2, lloyd_iters=20, rng_seed=0)
    beta_fit, eta_fit = curve_fits(curve)

    # then
    assert 0.75 <= beta_fit.slope <= 1.25
    assert beta_fit.r_squared >= 0.9


def test_noise_sweep_levels(blob_dataset):
    sweep = noise_sweep(blob_dataset, [2, 4, 8], runs=1, levels=[0.0, 0.5], lloyd_iters=5)
    assert [point.nsr for point in sweep] == [0.0, 0.5]
    assert all(len(point.curve) == 3 for point in sweep)


def test_rejection_sweep(blob_dataset):
    # when
    cells = rejection_sweep(blob_dataset, [1, 5], [4], runs=3, rng_seed=2)

    # then
    assert [(c.m, c.k) for c in cells] == [(1, 4), (5, 4)]
    for cell in cells:
        assert 0.0 <= cell.fallback_fraction <= 1.0
        assert cell.mean_proposals >= 1.0
        assert 0.0 <= cell.failure_bound_mean <= 1.0


def test_rejection_sweep_rejects_infinite_m(blob_dataset):
    with pytest.raises(InvalidChainLengthException):
        rejection_sweep(blob_dataset, [math.inf], [4], runs=1)
