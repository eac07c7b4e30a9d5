import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np
from pydantic import BaseModel

from app.exceptions.server_exceptions import OutputWriteException

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """pydantic 모델 / numpy 값을 JSON 으로 바꾼다. inf, nan 은 null."""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump())
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False)


def write_json(payload: Any, path: str | Path | None) -> str:
    text = dumps(payload)
    if path is not None:
        _write(Path(path), text + "\n")
    return text


def write_csv(rows: Iterable[BaseModel], fieldnames: list[str], path: str | Path | None) -> str:
    lines = [",".join(fieldnames)]
    for row in rows:
        data = row.model_dump()
        lines.append(",".join(_csv_cell(data[name]) for name in fieldnames))
    text = "\n".join(lines) + "\n"
    if path is not None:
        _write(Path(path), text)
    return text


def _csv_cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError:
        logger.error(f"[CLI] 결과 쓰기 실패: {path}")
        raise OutputWriteException(str(path))
    logger.info(f"[CLI] 결과 저장: {path}")
