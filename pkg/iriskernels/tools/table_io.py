"""
IrisKernels CSV Tables
清单、配对列表、分数、对齐日志等 CSV 表格的读写（pandas）
"""

from pathlib import Path
from typing import Iterable, List, Sequence, Union

import pandas as pd

from ..models.iris_models import ExcludedPair, ManifestEntry, PairKind, PairList, PairScore
from ..utils.error_handler import DataError, ManifestError

PathLike = Union[str, Path]

MANIFEST_COLUMNS = ["class_id", "eye_side", "image", "mask"]
PAIR_COLUMNS = ["path_a", "path_b", "kind"]
SCORE_COLUMNS = ["path_a", "path_b", "kind", "distance", "valid_bits", "shift"]
EXCLUDED_COLUMNS = ["path_a", "path_b", "kind", "reason"]


def _write(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n", float_format="%.17g")
    return path


def _read(path: PathLike, columns: Sequence[str], dtypes=None) -> pd.DataFrame:
    path = Path(path)
    try:
        frame = pd.read_csv(
            path,
            dtype=dtypes if dtypes is not None else str,
            keep_default_na=False,
            encoding="utf-8",
            float_precision="round_trip",
        )
    except pd.errors.EmptyDataError as e:
        raise DataError(
            f"{path} is empty; expected header {list(columns)}", context={"path": str(path)}
        ) from e
    except (pd.errors.ParserError, ValueError) as e:
        raise DataError(f"{path} does not parse as CSV: {e}", context={"path": str(path)}) from e
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataError(f"{path} is missing columns {missing}", context={"path": str(path)})
    return frame


# ==================== 清单 ====================


def read_manifest_rows(path: PathLike) -> pd.DataFrame:
    """读取清单 CSV（全部按字符串处理）"""
    try:
        frame = _read(path, MANIFEST_COLUMNS)
    except DataError as e:
        raise ManifestError(str(e), context=e.context) from e
    return frame[MANIFEST_COLUMNS]


def write_manifest(entries: Iterable[ManifestEntry], path: PathLike) -> Path:
    """写出清单 CSV"""
    rows = [[e.class_id, e.eye_side.value, e.image, e.mask] for e in entries]
    return _write(pd.DataFrame(rows, columns=MANIFEST_COLUMNS), path)


# ==================== 配对列表 ====================


def write_pairs(pair_list: PairList, path: PathLike) -> Path:
    """配对列表 CSV：path_a,path_b,kind"""
    path_a = [a for a, _ in pair_list.pairs]
    path_b = [b for _, b in pair_list.pairs]
    frame = pd.DataFrame(
        {"path_a": path_a, "path_b": path_b, "kind": [pair_list.kind.value] * len(path_a)},
        columns=PAIR_COLUMNS,
    )
    return _write(frame, path)


def read_pairs(path: PathLike) -> List[PairList]:
    """读取配对 CSV，按 kind 拆分为列表（保持文件内顺序）"""
    frame = _read(path, PAIR_COLUMNS)
    lists = []
    for kind in PairKind:
        sub = frame[frame["kind"] == kind.value]
        if len(sub):
            lists.append(PairList(kind=kind, pairs=list(zip(sub["path_a"], sub["path_b"]))))
    unknown = set(frame["kind"]) - {k.value for k in PairKind}
    if unknown:
        raise DataError(f"unknown pair kinds {sorted(unknown)} in {path}")
    return lists


# ==================== 分数 ====================


def write_scores(records: Sequence[PairScore], path: PathLike) -> Path:
    """分数 CSV：path_a,path_b,kind,distance,valid_bits,shift"""
    rows = [[r.path_a, r.path_b, r.kind.value, r.distance, r.valid_bits, r.shift] for r in records]
    return _write(pd.DataFrame(rows, columns=SCORE_COLUMNS), path)


def read_scores(path: PathLike) -> List[PairScore]:
    """读取分数 CSV"""
    frame = _read(
        path,
        SCORE_COLUMNS,
        dtypes={"path_a": str, "path_b": str, "kind": str, "distance": float, "valid_bits": int, "shift": int},
    )
    return [
        PairScore(
            path_a=row.path_a,
            path_b=row.path_b,
            kind=PairKind(row.kind),
            distance=float(row.distance),
            valid_bits=int(row.valid_bits),
            shift=int(row.shift),
        )
        for row in frame.itertuples(index=False)
    ]


def excluded_path_for(scores_path: PathLike) -> Path:
    """分数文件对应的排除记录文件 <stem>.excluded.csv"""
    scores_path = Path(scores_path)
    return scores_path.with_name(f"{scores_path.stem}.excluded.csv")


def write_excluded(excluded: Sequence[ExcludedPair], path: PathLike) -> Path:
    rows = [[e.path_a, e.path_b, e.kind.value, e.reason] for e in excluded]
    return _write(pd.DataFrame(rows, columns=EXCLUDED_COLUMNS), path)


def read_excluded(path: PathLike) -> List[ExcludedPair]:
    frame = _read(path, EXCLUDED_COLUMNS)
    return [
        ExcludedPair(path_a=r.path_a, path_b=r.path_b, kind=PairKind(r.kind), reason=r.reason)
        for r in frame.itertuples(index=False)
    ]


# ==================== 通用 ====================


def write_table(rows: Sequence[Sequence], columns: Sequence[str], path: PathLike) -> Path:
    """写出任意表格"""
    return _write(pd.DataFrame(list(rows), columns=list(columns)), path)


def read_table(path: PathLike, columns: Sequence[str], dtypes=None) -> pd.DataFrame:
    """读取任意表格并检查列"""
    return _read(path, columns, dtypes)
