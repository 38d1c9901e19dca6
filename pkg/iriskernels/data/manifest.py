"""
IrisKernels Dataset Manifest
数据集清单加载与图像/掩码的惰性缓存
"""

import threading
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
from pydantic import ValidationError

from ..models.iris_models import IRIS_SHAPE, DatasetManifest, ManifestEntry
from ..tools.pgm import load_iris_image, load_occlusion_mask, read_pgm_shape
from ..tools.table_io import read_manifest_rows
from ..utils.error_handler import DuplicateEntryError, ImageFormatError, ManifestError
from ..utils.logger import data_logger

PathLike = Union[str, Path]


def load_dataset(manifest_path: PathLike, check_images: bool = True) -> DatasetManifest:
    """
    加载数据集清单

    Args:
        manifest_path: 清单 CSV（表头 class_id,eye_side,image,mask）
        check_images: 是否检查每个文件存在且尺寸为 64x512（只读头部）

    Returns:
        DatasetManifest: 按 (class_id, image) 排序的清单

    Raises:
        ManifestError: 文件缺失、字段不合法、同类眼别不一致
        DuplicateEntryError: 重复的 (class_id, image) 行
        ImageFormatError: 图像尺寸不对或图像/掩码尺寸不一致
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise ManifestError(f"manifest not found: {manifest_path}", context={"path": str(manifest_path)})

    frame = read_manifest_rows(manifest_path)
    root = manifest_path.parent

    entries = []
    seen = set()
    for line_no, row in enumerate(frame.itertuples(index=False), start=2):
        try:
            entry = ManifestEntry(
                class_id=row.class_id,
                eye_side=(row.eye_side or "unknown").strip().lower(),
                image=row.image,
                mask=row.mask,
            )
        except ValidationError as e:
            raise ManifestError(
                f"invalid manifest row {line_no}: {e.errors()[0]['msg']}", context={"line": line_no}
            ) from e

        key = (entry.class_id, entry.image)
        if key in seen:
            raise DuplicateEntryError(
                f"duplicate manifest entry for class {entry.class_id!r}, image {entry.image!r}",
                context={"line": line_no},
            )
        seen.add(key)
        entries.append(entry)

    if check_images:
        for entry in entries:
            _check_entry_files(root, entry)

    entries.sort(key=lambda e: (e.class_id, e.image))
    try:
        manifest = DatasetManifest(root=str(root), entries=entries)
    except ValidationError as e:
        raise ManifestError(e.errors()[0]["msg"]) from e

    data_logger.info_path(
        "加载清单", manifest_path, entries=len(entries), classes=len(manifest.class_ids())
    )
    return manifest


def _check_entry_files(root: Path, entry: ManifestEntry) -> None:
    image_path = root / entry.image
    mask_path = root / entry.mask
    for path in (image_path, mask_path):
        if not path.is_file():
            data_logger.error_path("清单引用的文件不存在", path, class_id=entry.class_id)
            raise ManifestError(f"referenced file does not exist: {path}", context={"path": str(path)})

    image_shape = read_pgm_shape(image_path)
    mask_shape = read_pgm_shape(mask_path)
    if image_shape != IRIS_SHAPE:
        raise ImageFormatError(
            f"image {image_path} is {image_shape[0]}x{image_shape[1]}, expected "
            f"{IRIS_SHAPE[0]}x{IRIS_SHAPE[1]}",
            context={"path": str(image_path)},
        )
    if mask_shape != image_shape:
        raise ImageFormatError(
            f"mask {mask_path} shape {mask_shape} does not match image shape {image_shape}",
            context={"path": str(mask_path)},
        )


class IrisImageStore:
    """
    惰性加载并缓存清单中的图像与掩码

    加载后的数组只读，可在线程间共享。
    """

    def __init__(self, manifest: DatasetManifest):
        self.manifest = manifest
        self.root = Path(manifest.root)
        self._entries: Dict[str, ManifestEntry] = {e.image: e for e in manifest.entries}
        self._cache: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()

    def entry(self, image_ref: str) -> ManifestEntry:
        try:
            return self._entries[image_ref]
        except KeyError:
            raise ManifestError(f"image {image_ref!r} is not in the manifest") from None

    def get(self, image_ref: str) -> Tuple[np.ndarray, np.ndarray]:
        """返回 (图像 float64 [0,1], 掩码 bool)"""
        cached = self._cache.get(image_ref)
        if cached is not None:
            return cached

        entry = self.entry(image_ref)
        image = load_iris_image(self.root / entry.image)
        mask = load_occlusion_mask(self.root / entry.mask)
        image.setflags(write=False)
        mask.setflags(write=False)
        with self._lock:
            self._cache.setdefault(image_ref, (image, mask))
        return self._cache[image_ref]

    def image(self, image_ref: str) -> np.ndarray:
        return self.get(image_ref)[0]

    def mask(self, image_ref: str) -> np.ndarray:
        return self.get(image_ref)[1]
