import numpy as np
import pytest

from app.domain.analysis.services.id_services import mle_id
from app.domain.analysis.services.scaling_services import beta_curve, curve_fits, fit_power_law
from app.domain.dataset.schemas import MixtureSpec, SyntheticSpec
from app.domain.dataset.services import gen_manifold, gen_mixture, preprocess
from app.domain.experiment.validate_services import check_fallback_bound
from app.domain.seeding.schemas import RejectionConfig
from app.domain.seeding.services import kmeanspp_exact, qkmeans

SCALING_KS = [4, 8, 16, 32, 64, 128, 256]
TIMING_KS = [64, 128, 256, 512, 1024]


def _mixture(n: int, rng_seed: int):
    # 50 개 성분이 서로 겹치는 D = 32 혼합
    spec = MixtureSpec(components=50, ambient_dim=32, n=n, spread=2.0, rng_seed=rng_seed)
    return preprocess(gen_mixture(spec))


@pytest.mark.slow
@pytest.mark.parametrize("d", [2, 4])
def test_scaling_exponent_on_rotated_cube(d):
    # given: D = 50 에 회전해 넣은 d 차원 정육면체
    ds = preprocess(gen_manifold(SyntheticSpec(intrinsic_dim=d, ambient_dim=50, n=20_000, rng_seed=d)))

    # when
    curve = beta_curve(ds, SCALING_KS, runs=5, lloyd_iters=20, rng_seed=0)
    beta_fit, eta_fit = curve_fits(curve)

    # then
    assert abs(beta_fit.slope - 2.0 / d) <= 0.25 * (2.0 / d)
    assert beta_fit.r_squared >= 0.9
    assert eta_fit.slope > 0
    assert eta_fit.r_squared >= 0.8


@pytest.mark.slow
@pytest.mark.parametrize("d", [2, 5, 10])
def test_mle_id_on_cube(d):
    points = np.random.default_rng(d).random((10_000, d))
    assert abs(mle_id(points, 20) - d) <= 0.2 * d


@pytest.mark.slow
def test_qkmeans_lsh_cost_parity_on_mixture():
    # given
    ds = _mixture(50_000, 1)
    seeds = range(20)

    # when
    pp = np.mean([kmeanspp_exact(ds, 50, s).final_cost for s in seeds])
    qk = np.mean(
        [
            qkmeans(ds, 50, RejectionConfig(m=10, rho=0.5, rng_seed=s, ann_backend="lsh")).final_cost
            for s in seeds
        ]
    )

    # then
    assert qk <= 1.2 * pp


@pytest.mark.slow
def test_fallback_frequency_within_bound():
    result = check_fallback_bound(0)
    assert result.passed, result.detail
    assert all(cell["steps"] >= 10_000 for cell in result.detail.values())


@pytest.mark.slow
def test_seeding_time_growth_in_k():
    # given
    ds = _mixture(100_000, 3)

    def best_ms(run) -> float:
        return min(run().elapsed_ns for _ in range(2)) / 1e6

    # when
    qk = [
        best_ms(lambda: qkmeans(ds, k, RejectionConfig(m=10, rho=0.5, rng_seed=k, ann_backend="lsh")))
        for k in TIMING_KS
    ]
    pp = [best_ms(lambda: kmeanspp_exact(ds, k, k)) for k in TIMING_KS]

    # then
    assert fit_power_law(TIMING_KS, qk).slope <= 1.5
    assert fit_power_law(TIMING_KS, pp).slope >= 0.9
