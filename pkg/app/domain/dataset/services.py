import logging
import math

import numpy as np

from app.domain.dataset.models import Dataset, frobenius_sq
from app.domain.dataset.schemas import JLConfig, ManifoldKind, MixtureSpec, SyntheticSpec
from app.domain.services.verification import check_centered, check_condition
from app.exceptions.dataset_exceptions import InvalidNoiseLevelException

logger = logging.getLogger(__name__)


def jl_target_dim(eps_jl: float, k: int) -> int:
    """ceil(8 ln(max(k,2)/eps) / eps^2)"""
    return math.ceil(8.0 * math.log(max(k, 2) / eps_jl) / eps_jl**2)


def center(ds: Dataset) -> Dataset:
    points = ds.points - ds.points.mean(axis=0)
    return Dataset(points=points, centered=True, frob_sq=frobenius_sq(points))


def preprocess(ds: Dataset, jl: JLConfig | None = None) -> Dataset:
    """(선택) JL 투영 후 중심화, ||X||_F^2 계산"""
    points = ds.points
    if jl is not None:
        target = jl_target_dim(jl.eps_jl, jl.k)
        if target < ds.dim:
            rng = np.random.default_rng(jl.rng_seed)
            projection = rng.standard_normal((ds.dim, target)) / math.sqrt(target)
            points = points @ projection
            logger.info(f"[DATA] JL 투영: {ds.dim} -> {target}")
        else:
            logger.info(f"[DATA] JL 생략: target_dim={target} >= dim={ds.dim}")
    return center(Dataset(points=points))


def random_frame(rows: int, ambient_dim: int, rng: np.random.Generator) -> np.ndarray:
    """rows x D 정규직교 프레임"""
    q, _ = np.linalg.qr(rng.standard_normal((ambient_dim, rows)))
    return q.T


def gen_manifold(spec: SyntheticSpec) -> Dataset:
    rng = np.random.default_rng(spec.rng_seed)
    d, D = spec.intrinsic_dim, spec.ambient_dim

    if spec.kind == ManifoldKind.UNIT_CUBE:
        local = rng.random((spec.n, d))
    else:
        # S^d 는 R^{d+1} 에 놓인다
        local = rng.standard_normal((spec.n, d + 1))
        local /= np.linalg.norm(local, axis=1, keepdims=True)

    if local.shape[1] == D:
        points = local
    else:
        points = local @ random_frame(local.shape[1], D, rng)
    return Dataset(points=points)


def gen_mixture(spec: MixtureSpec) -> Dataset:
    rng = np.random.default_rng(spec.rng_seed)
    means = rng.normal(0.0, spec.spread, size=(spec.components, spec.ambient_dim))
    labels = rng.integers(spec.components, size=spec.n)
    points = means[labels] + rng.standard_normal((spec.n, spec.ambient_dim))
    return Dataset(points=points)


def noise_scale(ds: Dataset) -> float:
    """sigma(X): 좌표당 전역 RMS"""
    return math.sqrt(ds.frob_sq / (ds.n * ds.dim))


def inject_noise(ds: Dataset, nsr: float, rng_seed: int) -> Dataset:
    check_condition(nsr >= 0 and math.isfinite(nsr), InvalidNoiseLevelException)
    check_centered(ds)
    if nsr == 0:
        return ds

    rng = np.random.default_rng(rng_seed)
    sigma = noise_scale(ds)
    noisy = ds.points + nsr * sigma * rng.standard_normal(ds.points.shape)
    logger.debug(f"[DATA] 노이즈 주입: nsr={nsr}, sigma={sigma:.4g}")
    return center(Dataset(points=noisy))
