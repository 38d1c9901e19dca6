"""
IrisKernels Synthetic Iris Textures
桌面规模的合成虹膜数据：每类一张低频带限基纹理，每幅图像做小幅旋转、叠加与纹理同量级的白噪声和眼睑遮挡
"""

from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy.ndimage import gaussian_filter

from ..models.iris_models import IRIS_SHAPE, EyeSide, ManifestEntry
from ..tools.pgm import save_iris_image, save_occlusion_mask
from ..tools.table_io import write_manifest
from ..utils.logger import data_logger
from ..utils.parallel import ordered_map

PathLike = Union[str, Path]


class SyntheticIrisConfig(BaseModel):
    """合成数据参数"""

    texture_sigma: Tuple[float, float] = Field(
        default=(2.0, 6.0), description="基纹理高斯平滑的 (行, 列) 标准差"
    )
    texture_mean: float = Field(default=0.5)
    texture_std: float = Field(default=0.15)
    max_rotation: int = Field(default=3, ge=0, description="每幅图像循环列平移的上限（像素）")
    noise_std: float = Field(
        default=0.12, ge=0.0, description="逐图像白噪声标准差（与纹理同量级）"
    )
    occluded_rows: Tuple[int, int] = Field(
        default=(7, 19), description="遮挡行数范围（含端点），对应 10%–30% 的行"
    )


def class_name(index: int) -> str:
    return f"class_{index:04d}"


class SyntheticIrisGenerator:
    """合成虹膜生成器，结果只由 (seed, 类别下标) 决定"""

    def __init__(
        self, seed: int, config: Optional[SyntheticIrisConfig] = None, shape: Tuple[int, int] = IRIS_SHAPE
    ):
        self.seed = seed
        self.config = config or SyntheticIrisConfig()
        self.shape = tuple(shape)

    def _rng(self, class_index: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, class_index]))

    def base_texture(self, rng: np.random.Generator) -> np.ndarray:
        """环面平滑噪声，归一化到给定均值/标准差并截断到 [0,1]"""
        noise = rng.standard_normal(self.shape)
        smooth = gaussian_filter(noise, sigma=self.config.texture_sigma, mode="wrap")
        smooth = (smooth - smooth.mean()) / smooth.std()
        return np.clip(self.config.texture_mean + self.config.texture_std * smooth, 0.0, 1.0)

    def occlusion_mask(self, rng: np.random.Generator) -> np.ndarray:
        """遮挡外缘连续若干整行（类似下眼睑）"""
        lo, hi = self.config.occluded_rows
        rows = int(rng.integers(lo, hi + 1))
        mask = np.ones(self.shape, dtype=bool)
        if rows:
            mask[-rows:, :] = False
        return mask

    def sample(self, base: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """从基纹理生成一幅图像及其掩码"""
        r = self.config.max_rotation
        shift = int(rng.integers(-r, r + 1))
        image = np.roll(base, shift, axis=1) + rng.normal(0.0, self.config.noise_std, self.shape)
        return np.clip(image, 0.0, 1.0), self.occlusion_mask(rng)

    def generate_class(self, class_index: int, images_per_class: int) -> List[Tuple[np.ndarray, np.ndarray]]:
        """生成一个类别的全部 (图像, 掩码)"""
        rng = self._rng(class_index)
        base = self.base_texture(rng)
        return [self.sample(base, rng) for _ in range(images_per_class)]

    @staticmethod
    def eye_side(class_index: int) -> EyeSide:
        return EyeSide.LEFT if class_index % 2 == 0 else EyeSide.RIGHT

    def write_dataset(
        self, out_dir: PathLike, classes: int, images_per_class: int, threads: int = 1
    ) -> Path:
        """
        生成合成数据集并写出 PGM 与清单

        Args:
            out_dir: 输出目录
            classes: 类别数（>= 1）
            images_per_class: 每类图像数（>= 1）
            threads: 线程数（不影响输出）

        Returns:
            Path: manifest.csv 路径
        """
        if classes < 1 or images_per_class < 1:
            raise ValueError("classes and images_per_class must both be >= 1")
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

        def build(class_index: int) -> List[ManifestEntry]:
            name = class_name(class_index)
            entries = []
            for i, (image, mask) in enumerate(self.generate_class(class_index, images_per_class)):
                image_ref = f"{name}/img_{i:02d}.pgm"
                mask_ref = f"{name}/img_{i:02d}_mask.pgm"
                save_iris_image(out_dir / image_ref, image)
                save_occlusion_mask(out_dir / mask_ref, mask)
                entries.append(
                    ManifestEntry(
                        class_id=name, eye_side=self.eye_side(class_index), image=image_ref, mask=mask_ref
                    )
                )
            return entries

        per_class = ordered_map(build, range(classes), threads)
        manifest_path = write_manifest(
            [e for entries in per_class for e in entries], out_dir / "manifest.csv"
        )
        data_logger.info_path(
            "生成合成数据集", out_dir, classes=classes, images_per_class=images_per_class, seed=self.seed
        )
        return manifest_path
