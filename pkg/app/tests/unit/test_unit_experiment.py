import json
import math
from unittest.mock import patch

import numpy as np
import pytest

from app.domain.analysis.services.scaling_services import intrinsic_dim_from_slope
from app.domain.experiment.repository import dumps, to_jsonable, write_csv, write_json
from app.domain.experiment.schemas import BenchRow
from app.domain.experiment.services import (
    bench_entries,
    bench_workers,
    build_manifest,
    run_bench,
    run_id,
    run_scaling,
)
from app.domain.experiment.validate_services import (
    brute_force_opt,
    check_ann_monotone,
    check_beta_sandwich,
    check_mle_hand_example,
    check_oversampling,
    check_power_law_recovery,
    check_rho_delta_consistency,
    run_validation,
)
from app.domain.seeding.schemas import RejectionConfig
from app.domain.seeding.services import run_seeder
from app.exceptions.analysis_exceptions import InvalidNeighborCountException, TooFewPointsException
from app.exceptions.ann_exceptions import UnknownAnnBackendException
from app.exceptions.request_exceptions import InvalidArgumentException
from app.exceptions.seeding_exceptions import UnknownAlgorithmException


def test_to_jsonable_infinite_is_null():
    payload = {"beta": math.inf, "values": np.array([1.0, np.nan]), "n": np.int64(3)}
    assert to_jsonable(payload) == {"beta": None, "values": [1.0, None], "n": 3}


def test_dumps_is_sorted_and_stable():
    assert dumps({"b": 1, "a": 2}) == json.dumps({"a": 2, "b": 1}, indent=2)


def test_write_json_and_csv(tmp_path):
    # given
    rows = [BenchRow(dataset="x", algo="kmeanspp", k=2, seed=0, time_ms=1.5, cost=3.25)]

    # when
    write_json({"a": 1}, tmp_path / "out" / "a.json")
    text = write_csv(rows, list(BenchRow.model_fields), tmp_path / "rows.csv")

    # then
    assert json.loads((tmp_path / "out" / "a.json").read_text()) == {"a": 1}
    assert text.splitlines() == ["dataset,algo,k,seed,time_ms,cost", "x,kmeanspp,2,0,1.5,3.25"]


def test_build_manifest_digest(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("1\n")
    manifest = build_manifest("seed", {"k": 3}, path)
    assert manifest.command == "seed"
    assert len(manifest.input_digest) == 64
    assert "numpy" in manifest.versions


def test_bench_entries_expands_qkmeans():
    entries = bench_entries(["qkmeans", "kmeanspp"], ["exact", "lsh"])
    assert [label for label, _, _ in entries] == ["qkmeans[exact]", "qkmeans[lsh]", "kmeanspp"]
    assert [label for label, _, _ in bench_entries(["qkmeans"], ["lsh"])] == ["qkmeans"]


def test_bench_entries_unknown():
    with pytest.raises(UnknownAlgorithmException):
        bench_entries(["kmedoids"], ["exact"])
    with pytest.raises(UnknownAnnBackendException):
        bench_entries(["qkmeans"], ["faiss"])


def test_run_bench_cardinality_and_cost(blob_dataset):
    # when
    rows, summary = run_bench(
        blob_dataset, "blob", ["qkmeans", "kmeanspp"], [2, 3, 5], [0, 1, 2, 3, 4], m=5
    )

    # then
    assert len(rows) == 30
    assert len(summary) == 6
    row = next(r for r in rows if r.algo == "kmeanspp" and r.k == 5 and r.seed == 3)
    expected = run_seeder(blob_dataset, "kmeanspp", 5, RejectionConfig(rng_seed=3))
    assert row.cost == expected.final_cost


def test_bench_workers_never_exceed_cpu_count():
    with patch("app.domain.experiment.services.os.cpu_count", return_value=1):
        assert bench_workers(8, 30) == 1
    with patch("app.domain.experiment.services.os.cpu_count", return_value=4):
        assert bench_workers(8, 30) == 4
        assert bench_workers(2, 30) == 2
        assert bench_workers(8, 3) == 3


def test_run_bench_single_worker_stays_in_process(blob_dataset):
    # when
    with patch("app.domain.experiment.services.ProcessPoolExecutor") as pool:
        rows, _ = run_bench(blob_dataset, "blob", ["kmeanspp"], [3], [0, 1], threads=1)

    # then
    pool.assert_not_called()
    assert [r.seed for r in rows] == [0, 1]
    assert all(r.time_ms > 0 for r in rows)


def test_run_scaling_report(blob_dataset):
    report = run_scaling(blob_dataset, [2, 3, 4, 6], runs=2, lloyd_iters=10)
    assert report.aggregate == "mean"
    assert len(report.points) == 4
    assert report.d_eps == intrinsic_dim_from_slope(report.eps_hat)


def test_run_scaling_single_k(blob_dataset):
    with pytest.raises(TooFewPointsException):
        run_scaling(blob_dataset, [4], runs=1)


def test_run_id_report(random_dataset):
    # when
    report = run_id(random_dataset, [5, 10], subsample=150, repeats=3, rng_seed=1)

    # then
    assert [entry.k_nn for entry in report.per_k] == [5, 10]
    assert all(len(entry.estimates) == 3 for entry in report.per_k)
    assert report.grand_mean == pytest.approx(np.mean([e.mean for e in report.per_k]))


def test_run_id_full_data_computes_once(random_dataset):
    # given: 부분표본이 n 이상
    report = run_id(random_dataset, [5], subsample=None, repeats=5)
    larger = run_id(random_dataset, [5], subsample=500, repeats=5)

    # then
    assert report.repeats == larger.repeats == 1
    assert len(report.per_k[0].estimates) == 1
    assert report.grand_mean == larger.grand_mean


def test_run_id_errors(random_dataset):
    with pytest.raises(InvalidNeighborCountException):
        run_id(random_dataset, [1])
    with pytest.raises(InvalidArgumentException):
        run_id(random_dataset, [5], repeats=0)


def test_brute_force_opt_line():
    points = np.array([[0.0], [1.0], [10.0], [11.0]])
    assert brute_force_opt(points, 2) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "check",
    [
        check_ann_monotone,
        check_beta_sandwich,
        check_mle_hand_example,
        check_power_law_recovery,
        check_rho_delta_consistency,
        check_oversampling,
    ],
)
def test_individual_checks_pass(check):
    assert check(0).passed


def test_broken_oversampling_fails():
    result = check_oversampling(0, tau_scale=0.1)
    assert not result.passed
    assert result.detail["violations"] > 0


@pytest.mark.slow
def test_run_validation_collects_errors():
    # given: 검사 하나가 예외를 던지는 경우
    with patch(
        "app.domain.experiment.validate_services.check_mle_hand_example",
        side_effect=RuntimeError("boom"),
    ):
        # when
        report = run_validation()

    # then
    assert not report.passed
    assert report.failed == ["mle_id_hand_example"]
    assert len(report.checks) >= 8
