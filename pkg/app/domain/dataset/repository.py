import csv
import hashlib
import logging
import math
from pathlib import Path

import numpy as np

from app.domain.dataset.models import Dataset
from app.domain.dataset.schemas import DatasetFormat
from app.exceptions.dataset_exceptions import (
    DatasetFileNotFoundException,
    DatasetParseException,
    EmptyDatasetException,
)
from app.exceptions.server_exceptions import OutputWriteException

logger = logging.getLogger(__name__)

BIN_MAGIC = b"QKM1"
BIN_HEADER_SIZE = 12


def load_dataset(path: str | Path, format: DatasetFormat | str) -> Dataset:
    path = Path(path)
    if not path.is_file():
        logger.warning(f"[DATA] 파일 없음: {path}")
        raise DatasetFileNotFoundException(str(path))

    format = DatasetFormat(format)
    if format == DatasetFormat.CSV:
        points = _read_csv(path)
    else:
        points = _read_bin(path)

    logger.info(f"[DATA] 로드 완료: path={path}, n={points.shape[0]}, dim={points.shape[1]}")
    return Dataset(points=points)


def save_dataset(ds: Dataset, path: str | Path, format: DatasetFormat | str) -> Path:
    path = Path(path)
    format = DatasetFormat(format)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if format == DatasetFormat.CSV:
            with path.open("w", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                for row in ds.points:
                    writer.writerow([repr(float(v)) for v in row])
        else:
            header = BIN_MAGIC + np.array([ds.n, ds.dim], dtype="<u4").tobytes()
            body = np.ascontiguousarray(ds.points, dtype="<f4").tobytes()
            path.write_bytes(header + body)
    except OSError:
        raise OutputWriteException(str(path))
    return path


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _read_csv(path: Path) -> np.ndarray:
    rows: list[list[float]] = []
    width = None
    with path.open(newline="") as f:
        for row_no, row in enumerate(csv.reader(f), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DatasetParseException(
                    f"열 개수 불일치 (expected={width}, got={len(row)})", row=row_no
                )
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                raise DatasetParseException("실수로 해석할 수 없는 값", row=row_no)
            if not all(math.isfinite(v) for v in values):
                raise DatasetParseException("NaN/Inf 값", row=row_no)
            rows.append(values)

    if not rows:
        raise EmptyDatasetException()
    return np.asarray(rows, dtype=np.float64)


def _read_bin(path: Path) -> np.ndarray:
    data = path.read_bytes()
    if len(data) < BIN_HEADER_SIZE or data[:4] != BIN_MAGIC:
        raise DatasetParseException("QKM1 매직 바이트가 없습니다")

    n, dim = (int(v) for v in np.frombuffer(data, dtype="<u4", count=2, offset=4))
    if n == 0:
        raise EmptyDatasetException()
    expected = BIN_HEADER_SIZE + 4 * n * dim
    if len(data) != expected:
        raise DatasetParseException(
            f"파일 크기 불일치 (expected={expected}, got={len(data)})"
        )

    values = np.frombuffer(data, dtype="<f4", count=n * dim, offset=BIN_HEADER_SIZE)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0]) // max(dim, 1) + 1
        raise DatasetParseException("NaN/Inf 값", row=bad)
    return values.astype(np.float64).reshape(n, dim)
