"""
测试辅助函数
"""

from iriskernels.models.iris_models import DatasetManifest, EyeSide, ManifestEntry


def make_manifest(class_sizes, sides=None) -> DatasetManifest:
    """只含引用、不落盘的清单；class_sizes 为 {class_id: 图像数}"""
    entries = []
    for class_id, size in class_sizes.items():
        side = (sides or {}).get(class_id, EyeSide.LEFT)
        for i in range(size):
            entries.append(
                ManifestEntry(
                    class_id=class_id,
                    eye_side=side,
                    image=f"{class_id}/img_{i:02d}.pgm",
                    mask=f"{class_id}/img_{i:02d}_mask.pgm",
                )
            )
    entries.sort(key=lambda e: (e.class_id, e.image))
    return DatasetManifest(entries=entries)
