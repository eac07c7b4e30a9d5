import argparse
import logging
import math
import sys
from pathlib import Path

from pydantic import ValidationError

from app.core.config import configure_logging
from app.domain.analysis.services.rejection_services import rejection_sweep
from app.domain.analysis.services.scaling_services import DEFAULT_NOISE_LEVELS, noise_sweep
from app.domain.ann.schemas import AnnBackend
from app.domain.dataset.repository import save_dataset
from app.domain.dataset.schemas import DatasetFormat, ManifoldKind, MixtureSpec, SyntheticSpec
from app.domain.dataset.services import gen_manifold, gen_mixture, inject_noise
from app.domain.experiment.repository import write_csv, write_json
from app.domain.experiment.schemas import BenchRow
from app.domain.experiment.services import (
    build_manifest,
    prepare_dataset,
    run_bench,
    run_id,
    run_scaling,
)
from app.domain.experiment.validate_services import run_validation
from app.domain.seeding.schemas import RejectionConfig, SeedingAlgorithm
from app.domain.seeding.services import run_seeder
from app.exceptions.base_exceptions import CustomException
from app.exceptions.server_exceptions import ValidationFailedException

logger = logging.getLogger(__name__)

MIXTURE_KIND = "mixture"
ID_SUBSAMPLE = 10_000


def chain_length(value: str) -> int | float:
    """--m: 양의 정수 또는 inf"""
    if value.strip().lower() == "inf":
        return math.inf
    try:
        m = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"m 은 정수 또는 inf 여야 합니다: {value}")
    if m < 1:
        raise argparse.ArgumentTypeError(f"m 은 1 이상이어야 합니다: {value}")
    return m


def int_list(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"정수 목록이 아닙니다: {value}")


def float_list(value: str) -> list[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"실수 목록이 아닙니다: {value}")


def str_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _add_input_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True)
    parser.add_argument("--format", choices=[f.value for f in DatasetFormat], default="csv")
    parser.add_argument("--jl-eps", type=float, default=None)
    parser.add_argument("--nsr", type=float, default=0.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--out", default=None)


def _add_rejection_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=chain_length, default=10)
    parser.add_argument("--rho", type=float, default=1.0)
    parser.add_argument("--ann", choices=[b.value for b in AnnBackend], default="exact")
    parser.add_argument("--ann-certify", action="store_true", default=None)


def _load(args, k: int = 2):
    ds = prepare_dataset(args.input, args.format, args.jl_eps, k, args.seed)
    if args.nsr:
        ds = inject_noise(ds, args.nsr, args.seed)
    return ds


def _manifest(args, with_input: bool = True):
    params = {key: value for key, value in vars(args).items() if key != "func"}
    if params.get("m") == math.inf:
        params["m"] = "inf"
    return build_manifest(args.command, params, args.input if with_input else None)


def cmd_seed(args) -> int:
    ds = _load(args, args.k)
    cfg = RejectionConfig(
        m=args.m,
        rho=args.rho,
        rng_seed=args.seed,
        ann_backend=args.ann,
        ann_certify=args.ann_certify,
    )
    result = run_seeder(ds, args.algo, args.k, cfg, args.delta)
    print(write_json({"manifest": _manifest(args), "result": result}, args.out))
    return 0


def cmd_bench(args) -> int:
    ds = _load(args, max(args.ks))
    seeds = [args.seed + i for i in range(args.runs)]
    rows, summary = run_bench(
        ds,
        Path(args.input).stem,
        args.algo,
        args.ks,
        seeds,
        m=args.m,
        rho=args.rho,
        anns=args.anns or [args.ann],
        delta=args.delta,
        threads=args.threads,
        certify=args.ann_certify,
    )
    table = write_csv(rows, list(BenchRow.model_fields), args.out)
    if args.out is None:
        print(table, end="")

    summary_path = args.summary
    if summary_path is None and args.out is not None:
        summary_path = Path(args.out).with_suffix(".summary.json")
    print(write_json({"manifest": _manifest(args), "summary": summary}, summary_path))
    return 0


def cmd_scaling(args) -> int:
    ds = _load(args, max(args.ks))
    report = run_scaling(
        ds, args.ks, args.runs, args.lloyd_iters, args.seed, args.aggregate, args.threads
    )
    print(write_json({"manifest": _manifest(args), "report": report}, args.out))
    return 0


def cmd_id(args) -> int:
    ds = _load(args)
    report = run_id(ds, args.k_nn, args.subsample, args.repeats, args.seed)
    print(write_json({"manifest": _manifest(args), "report": report}, args.out))
    return 0


def cmd_noise(args) -> int:
    # 노이즈는 levels 로만 주입한다
    ds = prepare_dataset(args.input, args.format, args.jl_eps, max(args.ks), args.seed)
    sweep = noise_sweep(
        ds, args.ks, args.runs, args.levels, args.lloyd_iters, args.seed, args.threads
    )
    print(write_json({"manifest": _manifest(args), "levels": sweep}, args.out))
    return 0


def cmd_rejection(args) -> int:
    ds = _load(args, max(args.ks))
    cells = rejection_sweep(
        ds,
        args.ms,
        args.ks,
        args.runs,
        args.rho,
        AnnBackend(args.ann),
        args.seed,
        args.threads,
        certify=args.ann_certify,
    )
    print(write_json({"manifest": _manifest(args), "cells": cells}, args.out))
    return 0


def cmd_validate(args) -> int:
    report = run_validation(args.break_oversampling, args.seed)
    payload = {"manifest": _manifest(args, with_input=False), "report": report}
    print(write_json(payload, args.out))
    if not report.passed:
        raise ValidationFailedException(report.failed)
    return 0


def cmd_generate(args) -> int:
    if args.kind == MIXTURE_KIND:
        ds = gen_mixture(
            MixtureSpec(
                components=args.components,
                ambient_dim=args.ambient_dim,
                n=args.n,
                spread=args.spread,
                rng_seed=args.seed,
            )
        )
    else:
        ds = gen_manifold(
            SyntheticSpec(
                intrinsic_dim=args.intrinsic_dim,
                ambient_dim=args.ambient_dim,
                n=args.n,
                kind=args.kind,
                rng_seed=args.seed,
            )
        )
    path = save_dataset(ds, args.out, args.format)
    payload = {"manifest": _manifest(args, with_input=False), "path": str(path), "n": ds.n, "dim": ds.dim}
    print(write_json(payload, None))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkm", description="QKMeans 시딩 벤치마크 / 분석 도구")
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    seed = sub.add_parser("seed", help="k 개 중심 시딩")
    _add_input_args(seed)
    _add_rejection_args(seed)
    seed.add_argument("--algo", choices=[a.value for a in SeedingAlgorithm], default="qkmeans")
    seed.add_argument("--k", type=int, required=True)
    seed.add_argument("--delta", type=float, default=0.0)
    seed.set_defaults(func=cmd_seed)

    bench = sub.add_parser("bench", help="시딩 시간 / cost 표")
    _add_input_args(bench)
    _add_rejection_args(bench)
    bench.add_argument("--algo", type=str_list, default=["qkmeans", "kmeanspp"])
    bench.add_argument("--anns", type=str_list, default=None)
    bench.add_argument("--ks", type=int_list, required=True)
    bench.add_argument("--runs", type=int, default=5)
    bench.add_argument("--delta", type=float, default=0.0)
    bench.add_argument("--summary", default=None)
    bench.set_defaults(func=cmd_bench)

    scaling = sub.add_parser("scaling", help="beta_k / eta_k 멱법칙 적합")
    _add_input_args(scaling)
    scaling.add_argument("--ks", type=int_list, required=True)
    scaling.add_argument("--runs", type=int, default=10)
    scaling.add_argument("--lloyd-iters", type=int, default=20)
    scaling.add_argument("--aggregate", choices=["mean", "best"], default="mean")
    scaling.set_defaults(func=cmd_scaling)

    id_parser = sub.add_parser("id", help="MLE 내재 차원 추정")
    _add_input_args(id_parser)
    id_parser.add_argument("--k-nn", type=int_list, default=[5, 10, 20, 50, 100])
    id_parser.add_argument("--subsample", type=int, default=ID_SUBSAMPLE)
    id_parser.add_argument("--repeats", type=int, default=10)
    id_parser.set_defaults(func=cmd_id)

    noise = sub.add_parser("noise", help="노이즈 수준별 지수 재적합")
    _add_input_args(noise)
    noise.add_argument("--ks", type=int_list, required=True)
    noise.add_argument("--runs", type=int, default=5)
    noise.add_argument("--lloyd-iters", type=int, default=20)
    noise.add_argument("--levels", type=float_list, default=list(DEFAULT_NOISE_LEVELS))
    noise.set_defaults(func=cmd_noise)

    rejection = sub.add_parser("rejection", help="(m, k) 별 fallback 비율")
    _add_input_args(rejection)
    rejection.add_argument("--ms", type=int_list, default=[1, 3, 5, 10])
    rejection.add_argument("--ks", type=int_list, required=True)
    rejection.add_argument("--runs", type=int, default=10)
    rejection.add_argument("--rho", type=float, default=1.0)
    rejection.add_argument("--ann", choices=[b.value for b in AnnBackend], default="exact")
    rejection.add_argument("--ann-certify", action="store_true", default=None)
    rejection.set_defaults(func=cmd_rejection)

    validate = sub.add_parser("validate", help="불변식 검증 스위트")
    validate.add_argument("--seed", type=int, default=0)
    validate.add_argument("--out", default=None)
    validate.add_argument("--break-oversampling", action="store_true", help=argparse.SUPPRESS)
    validate.set_defaults(func=cmd_validate)

    generate = sub.add_parser("generate", help="합성 데이터 생성")
    generate.add_argument(
        "--kind",
        choices=[k.value for k in ManifoldKind] + [MIXTURE_KIND],
        default=ManifoldKind.UNIT_CUBE.value,
    )
    generate.add_argument("--intrinsic-dim", type=int, default=2)
    generate.add_argument("--ambient-dim", type=int, default=20)
    generate.add_argument("--n", type=int, required=True)
    generate.add_argument("--components", type=int, default=50)
    generate.add_argument("--spread", type=float, default=10.0)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--format", choices=[f.value for f in DatasetFormat], default="csv")
    generate.add_argument("--out", required=True)
    generate.set_defaults(func=cmd_generate)

    serve = sub.add_parser("serve", help="HTTP API 실행")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level)
    logger.info(f"[CLI] 명령 시작: {args.command}")
    try:
        return args.func(args)
    except CustomException as e:
        logger.error(f"[CLI] {e.code}: {e.error}")
        print(f"error: {e.error}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"[CLI] 잘못된 인자: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
