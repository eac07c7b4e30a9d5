import itertools
import logging
import math
from typing import Callable

import numpy as np
from scipy import stats

from app.domain.analysis.services.cost_services import aspect_ratio, cost, lloyd, max_renyi
from app.domain.analysis.services.id_services import mle_id
from app.domain.analysis.services.rejection_services import rejection_sweep
from app.domain.analysis.services.scaling_services import fit_power_law
from app.domain.ann.schemas import AnnBackend
from app.domain.ann.services import init_index
from app.domain.dataset.models import Dataset
from app.domain.dataset.services import center
from app.domain.experiment.schemas import CheckResult, ValidationReport
from app.domain.sampler_tree.models import SamplerTree
from app.domain.seeding.schemas import RejectionConfig
from app.domain.seeding.services import kmeanspp_exact, qkmeans, rho_delta_reference
from app.domain.seeding.utils import (
    d2_masses,
    kappa_masses,
    oversampling_tau,
    oversampling_violations,
    prefix_costs,
)

logger = logging.getLogger(__name__)

CHI_SQUARE_ALPHA = 0.01
TV_TOLERANCE = 0.02
MLE_HAND_VALUE = 1.6064


def random_instances(count: int, rng_seed: int, max_n: int = 60, max_dim: int = 5) -> list[Dataset]:
    rng = np.random.default_rng(rng_seed)
    instances = []
    for _ in range(count):
        n = int(rng.integers(8, max_n + 1))
        dim = int(rng.integers(1, max_dim + 1))
        points = rng.standard_normal((n, dim)) * rng.uniform(0.5, 5.0, size=dim)
        instances.append(center(Dataset(points=points)))
    return instances


def check_sampler_chi_square(rng_seed: int, draws: int = 100_000) -> CheckResult:
    tree = SamplerTree.build([9.0, 16.0])
    rng = np.random.default_rng(rng_seed)
    counts = np.bincount([tree.sample(rng) for _ in range(draws)], minlength=2)
    statistic, p_value = stats.chisquare(counts, draws * np.array([0.36, 0.64]))
    return CheckResult(
        name="sampler_chi_square",
        passed=bool(p_value > CHI_SQUARE_ALPHA),
        detail={"counts": counts.tolist(), "statistic": float(statistic), "p_value": float(p_value)},
    )


def check_sampler_update(rng_seed: int, sequences: int = 100, updates: int = 20) -> CheckResult:
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for _ in range(sequences):
        n = int(rng.integers(1, 41))
        tree = SamplerTree.build(rng.random(n) + 1e-3)
        for _ in range(updates):
            tree.update(int(rng.integers(n)), float(rng.random()) + 1e-3)
        rebuilt = SamplerTree.build(tree.leaf_weights())
        for position in range(1, 2 * tree.capacity):
            expected = rebuilt.node(position)
            worst = max(worst, abs(tree.node(position) - expected) / max(1.0, abs(expected)))
    return CheckResult(name="sampler_update_rebuild", passed=worst <= 1e-9, detail={"max_rel_error": worst})


def check_rejection_exactness(
    rng_seed: int,
    draws: int = 20_000,
    rho: float = 1.0,
    ann_backend: AnnBackend = AnnBackend.EXACT,
) -> CheckResult:
    """10 점 2D, 고정 c1, m = inf: qkmeans 가 고른 c2 의 경험분포와 pi(.|{c1}) 의 TV 거리"""
    rng = np.random.default_rng(rng_seed)
    ds = center(Dataset(points=rng.standard_normal((10, 2)) * [3.0, 1.0]))
    c1 = 0
    diff = ds.points - ds.points[c1]
    target = d2_masses(np.einsum("ij,ij->i", diff, diff))

    counts = np.zeros(ds.n)
    for run in range(draws):
        cfg = RejectionConfig(
            m="inf", rho=rho, rng_seed=rng_seed * draws + run, ann_backend=ann_backend
        )
        result = qkmeans(ds, 2, cfg, first_center=c1)
        counts[result.center_indices[1]] += 1
    tv = 0.5 * float(np.sum(np.abs(counts / draws - target)))
    return CheckResult(
        name="rejection_tv_distance",
        passed=tv <= TV_TOLERANCE,
        detail={"tv": tv, "draws": draws, "rho": rho, "backend": AnnBackend(ann_backend).value},
    )


def check_oversampling(rng_seed: int, tau_scale: float = 1.0, instances: int = 40) -> CheckResult:
    violations = 0
    for i, ds in enumerate(random_instances(instances, rng_seed)):
        seeded = kmeanspp_exact(ds, min(ds.n, 6), rng_seed + i)
        violations += oversampling_violations(ds, seeded.center_indices, 1.0, tau_scale)
    return CheckResult(
        name="oversampling_bound",
        passed=violations == 0,
        detail={"violations": violations, "instances": instances, "tau_scale": tau_scale},
    )


def check_max_renyi_tau(rng_seed: int, instances: int = 20) -> CheckResult:
    """exp(D_inf(pi || kappa)) 는 tau 이하"""
    worst = 0.0
    for i, ds in enumerate(random_instances(instances, rng_seed + 1)):
        seeded = kmeanspp_exact(ds, min(ds.n, 5), rng_seed + i)
        c1_norm_sq = float(ds.norms_sq[seeded.center_indices[0]])
        kappa = kappa_masses(ds.norms_sq, c1_norm_sq)
        for costs in prefix_costs(ds, seeded.center_indices):
            total = float(np.sum(costs))
            if total <= 0:
                continue
            tight = math.exp(max_renyi(costs / total, kappa))
            tau = oversampling_tau(ds.frob_sq, ds.n, c1_norm_sq, total, 1.0)
            worst = max(worst, tight / tau)
    return CheckResult(name="max_renyi_below_tau", passed=worst <= 1.0 + 1e-9, detail={"max_ratio": worst})


def check_ann_sandwich(rng_seed: int, instances: int = 20, probes: int = 1000, rho: float = 0.5) -> CheckResult:
    rng = np.random.default_rng(rng_seed)
    violations = 0
    for i in range(instances):
        dim = int(rng.integers(2, 9))
        centers = rng.standard_normal((int(rng.integers(5, 40)), dim))
        index = init_index(AnnBackend.LSH, rho, rng_seed=rng_seed + i, certify=True)
        for c in centers:
            index.insert(c)
        for p in rng.standard_normal((probes, dim)) * 1.5:
            diff = centers - p
            true_min = float(np.min(np.einsum("ij,ij->i", diff, diff)))
            reported = index.query(p).dist_sq
            if reported < true_min * (1 - 1e-9) or reported > true_min / rho * (1 + 1e-9) + 1e-12:
                violations += 1
    return CheckResult(
        name="ann_sandwich",
        passed=violations == 0,
        detail={"violations": violations, "queries": instances * probes, "rho": rho},
    )


def check_ann_monotone(rng_seed: int, probes: int = 200, inserts: int = 30, rho: float = 0.5) -> CheckResult:
    rng = np.random.default_rng(rng_seed)
    points = rng.standard_normal((probes, 4))
    index = init_index(AnnBackend.LSH, rho, rng_seed=rng_seed)
    last = np.full(probes, np.inf)
    violations = 0
    for c in rng.standard_normal((inserts, 4)):
        index.insert(c)
        for key, p in enumerate(points):
            dist_sq = index.query(p, key=key).dist_sq
            if dist_sq > last[key]:
                violations += 1
            last[key] = dist_sq
    return CheckResult(name="ann_monotone_insertions", passed=violations == 0, detail={"violations": violations})


def check_rho_delta_consistency(rng_seed: int, instances: int = 10) -> CheckResult:
    worst, mismatched = 0.0, 0
    for i, ds in enumerate(random_instances(instances, rng_seed + 2)):
        k = min(ds.n, 5)
        exact_masses, reference_masses = [], []
        exact = kmeanspp_exact(ds, k, rng_seed + i, on_step=lambda t, m: exact_masses.append(m))
        reference = rho_delta_reference(
            ds, k, 1.0, 0.0, rng_seed + i, AnnBackend.EXACT,
            on_step=lambda t, m: reference_masses.append(m),
        )
        if exact.center_indices != reference.center_indices:
            mismatched += 1
        for a, b in zip(exact_masses, reference_masses):
            worst = max(worst, float(np.max(np.abs(a - b))))
    return CheckResult(
        name="rho_delta_matches_kmeanspp",
        passed=worst <= 1e-12 and mismatched == 0,
        detail={"max_abs_diff": worst, "mismatched_runs": mismatched},
    )


def check_power_law_recovery(rng_seed: int) -> CheckResult:
    ks = np.array([4, 8, 16, 32, 64, 128, 256], dtype=np.float64)
    fit = fit_power_law(ks, 2.0 * ks**0.7)
    passed = abs(fit.slope - 0.7) <= 1e-3 and abs(fit.intercept - math.log(2.0)) <= 1e-3
    return CheckResult(
        name="power_law_recovery",
        passed=passed and fit.r_squared >= 1.0 - 1e-9,
        detail={"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared},
    )


def check_mle_hand_example(rng_seed: int) -> CheckResult:
    estimate = mle_id(np.array([[0.0], [1.0], [3.0]]), 2)
    return CheckResult(
        name="mle_id_hand_example",
        passed=abs(estimate - MLE_HAND_VALUE) <= 1e-4,
        detail={"estimate": estimate, "expected": MLE_HAND_VALUE},
    )


def check_lloyd_monotone(rng_seed: int, instances: int = 20) -> CheckResult:
    broken = 0
    for i, ds in enumerate(random_instances(instances, rng_seed + 3)):
        seeded = kmeanspp_exact(ds, min(ds.n, 4), rng_seed + i)
        _, trace = lloyd(ds, ds.points[seeded.center_indices], 30)
        if any(b > a * (1 + 1e-12) for a, b in zip(trace, trace[1:])):
            broken += 1
    return CheckResult(name="lloyd_cost_monotone", passed=broken == 0, detail={"broken_traces": broken})


def brute_force_opt(points: np.ndarray, k: int) -> float:
    """모든 k-분할을 열거한 최적 k-means cost (n <= 10)"""
    best = math.inf
    for labels in itertools.product(range(k), repeat=points.shape[0]):
        labels = np.asarray(labels)
        total = 0.0
        for j in range(k):
            members = points[labels == j]
            if members.shape[0]:
                total += float(np.sum((members - members.mean(axis=0)) ** 2))
        best = min(best, total)
    return best


def check_beta_sandwich(rng_seed: int, instances: int = 6) -> CheckResult:
    """beta(X,C) <= beta_k(X), eta(X,C) <= eta(X) (Lloyd 이전 중심)"""
    violations = 0
    for i, ds in enumerate(random_instances(instances, rng_seed + 4, max_n=8, max_dim=2)):
        for k in (2, 3):
            seeded = kmeanspp_exact(ds, k, rng_seed + i)
            centers = ds.points[seeded.center_indices]
            if cost(ds, centers) < brute_force_opt(ds.points, k) * (1 - 1e-9):
                violations += 1
            if aspect_ratio(centers) > aspect_ratio(ds.points) * (1 + 1e-9):
                violations += 1
    return CheckResult(name="beta_eta_sandwich", passed=violations == 0, detail={"violations": violations})


FALLBACK_CELLS = ((1, 20), (3, 20), (5, 100))


def check_fallback_bound(rng_seed: int, steps: int = 10_000) -> CheckResult:
    """(m, k) 별로 약 steps 개 단계의 fallback 빈도가 상한 + 3 sigma 이하인지"""
    rng = np.random.default_rng(rng_seed)
    ds = center(Dataset(points=rng.standard_normal((300, 2)) * [4.0, 1.0]))
    detail, passed = {}, True
    for m, k in FALLBACK_CELLS:
        runs = math.ceil(steps / (k - 1))
        (cell,) = rejection_sweep(ds, [m], [k], runs, rng_seed=rng_seed, threads=1)
        total = cell.runs * (cell.k - 1)
        b = cell.failure_bound_mean
        limit = b + 3.0 * math.sqrt(b * (1.0 - b) / total) + 1.0 / total
        passed = passed and cell.fallback_fraction <= limit
        detail[f"m={m},k={k}"] = {
            "fallback_fraction": cell.fallback_fraction,
            "limit": limit,
            "steps": total,
        }
    return CheckResult(name="fallback_probability_bound", passed=passed, detail=detail)


def validation_suite(break_oversampling: bool = False) -> list[tuple[str, Callable[[int], CheckResult]]]:
    tau_scale = 0.1 if break_oversampling else 1.0
    return [
        ("sampler_chi_square", check_sampler_chi_square),
        ("sampler_update_rebuild", check_sampler_update),
        ("rejection_tv_distance", check_rejection_exactness),
        ("oversampling_bound", lambda seed: check_oversampling(seed, tau_scale=tau_scale)),
        ("max_renyi_below_tau", check_max_renyi_tau),
        ("ann_sandwich", check_ann_sandwich),
        ("ann_monotone_insertions", check_ann_monotone),
        ("rho_delta_matches_kmeanspp", check_rho_delta_consistency),
        ("power_law_recovery", check_power_law_recovery),
        ("mle_id_hand_example", check_mle_hand_example),
        ("lloyd_cost_monotone", check_lloyd_monotone),
        ("beta_eta_sandwich", check_beta_sandwich),
        ("fallback_probability_bound", check_fallback_bound),
    ]


def run_validation(break_oversampling: bool = False, rng_seed: int = 0) -> ValidationReport:
    checks = []
    for name, check in validation_suite(break_oversampling):
        try:
            result = check(rng_seed)
        except Exception as e:
            logger.error(f"[VALIDATE] {name} 예외: {e}")
            result = CheckResult(name=name, passed=False, detail={"error": str(e)})
        logger.info(f"[VALIDATE] {result.name}: {'PASS' if result.passed else 'FAIL'}")
        checks.append(result)
    return ValidationReport(passed=all(c.passed for c in checks), checks=checks)
