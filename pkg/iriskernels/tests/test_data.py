"""
数据层测试：清单加载、真/假配对、类内对齐、合成数据
"""

import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from iriskernels.data.alignment import (
    align_class,
    masked_shift_correlations,
    pearson_cc,
    shift_columns,
    shift_correlations,
)
from iriskernels.data.manifest import IrisImageStore, load_dataset
from iriskernels.data.pairs import generate_genuine_pairs, generate_impostor_pairs
from iriskernels.data.synthetic import SyntheticIrisConfig, SyntheticIrisGenerator
from iriskernels.models.iris_models import EyeSide, PairKind
from iriskernels.tools.pgm import write_pgm
from iriskernels.utils.error_handler import DuplicateEntryError, ImageFormatError, ManifestError

from .helpers import make_manifest

HEADER = "class_id,eye_side,image,mask\n"


def write_images(root, names, shape=(64, 512)):
    for name in names:
        write_pgm(root / name, np.full(shape, 200, dtype=np.uint8))


class TestManifest:
    """清单加载测试"""

    def test_sorted_by_class_then_image(self, tmp_path):
        """测试按 (class_id, image) 排序"""
        write_images(tmp_path, ["b1.pgm", "b1m.pgm", "a2.pgm", "a2m.pgm", "a1.pgm", "a1m.pgm"])
        (tmp_path / "m.csv").write_text(
            HEADER + "B,left,b1.pgm,b1m.pgm\nA,right,a2.pgm,a2m.pgm\nA,right,a1.pgm,a1m.pgm\n",
            encoding="utf-8",
        )
        manifest = load_dataset(tmp_path / "m.csv")
        assert [e.image for e in manifest.entries] == ["a1.pgm", "a2.pgm", "b1.pgm"]
        assert manifest.side_of("A") is EyeSide.RIGHT

    def test_blank_side_is_unknown(self, tmp_path):
        """测试眼别为空时记为 unknown"""
        (tmp_path / "m.csv").write_text(HEADER + "A,,a.pgm,am.pgm\n", encoding="utf-8")
        manifest = load_dataset(tmp_path / "m.csv", check_images=False)
        assert manifest.entries[0].eye_side is EyeSide.UNKNOWN

    def test_header_only(self, tmp_path):
        """测试空清单"""
        (tmp_path / "m.csv").write_text(HEADER, encoding="utf-8")
        assert load_dataset(tmp_path / "m.csv").entries == []

    def test_missing_manifest(self, tmp_path):
        """测试清单文件不存在"""
        with pytest.raises(ManifestError):
            load_dataset(tmp_path / "nope.csv")

    def test_duplicate_entry(self, tmp_path):
        """测试重复条目"""
        (tmp_path / "m.csv").write_text(
            HEADER + "A,left,a.pgm,am.pgm\nA,left,a.pgm,am.pgm\n", encoding="utf-8"
        )
        with pytest.raises(DuplicateEntryError):
            load_dataset(tmp_path / "m.csv", check_images=False)

    def test_missing_mask_names_path(self, tmp_path):
        """测试缺失掩码时错误信息包含路径"""
        write_images(tmp_path, ["a.pgm"])
        (tmp_path / "m.csv").write_text(HEADER + "A,left,a.pgm,missing_mask.pgm\n", encoding="utf-8")
        with pytest.raises(ManifestError, match="missing_mask.pgm"):
            load_dataset(tmp_path / "m.csv")

    def test_wrong_image_size(self, tmp_path):
        """测试图像不是 64x512"""
        write_images(tmp_path, ["a.pgm", "am.pgm"], shape=(64, 256))
        (tmp_path / "m.csv").write_text(HEADER + "A,left,a.pgm,am.pgm\n", encoding="utf-8")
        with pytest.raises(ImageFormatError):
            load_dataset(tmp_path / "m.csv")

    def test_mixed_sides(self, tmp_path):
        """测试同一类别眼别不一致"""
        (tmp_path / "m.csv").write_text(
            HEADER + "A,left,a.pgm,am.pgm\nA,right,b.pgm,bm.pgm\n", encoding="utf-8"
        )
        with pytest.raises(ManifestError):
            load_dataset(tmp_path / "m.csv", check_images=False)

    def test_missing_column(self, tmp_path):
        """测试缺列"""
        (tmp_path / "m.csv").write_text("class_id,image,mask\nA,a.pgm,am.pgm\n", encoding="utf-8")
        with pytest.raises(ManifestError):
            load_dataset(tmp_path / "m.csv", check_images=False)

    def test_store_is_read_only(self, synthetic_manifest):
        """测试缓存数组只读"""
        store = IrisImageStore(synthetic_manifest)
        image, mask = store.get(synthetic_manifest.entries[0].image)
        assert image.shape == (64, 512) and mask.dtype == bool
        with pytest.raises(ValueError):
            image[0, 0] = 0.0
        with pytest.raises(ManifestError):
            store.get("not/in/manifest.pgm")


class TestPairs:
    """真/假配对测试"""

    def test_two_classes(self):
        """测试两类：3 幅 + 2 幅"""
        manifest = make_manifest({"A": 3, "B": 2})
        genuine = generate_genuine_pairs(manifest)
        impostor = generate_impostor_pairs(manifest, seed=5)
        assert genuine.kind is PairKind.GENUINE
        assert len(genuine) == 3 + 1
        assert len(impostor) == 2
        first, second = impostor.pairs
        assert first[0].startswith("A/") and first[1].startswith("B/")
        assert second[0].startswith("B/") and second[1].startswith("A/")

    def test_sides_do_not_mix(self):
        """测试左右眼之间不生成假配对"""
        manifest = make_manifest(
            {"L1": 2, "L2": 2, "L3": 2, "R1": 2, "R2": 2},
            sides={"R1": EyeSide.RIGHT, "R2": EyeSide.RIGHT},
        )
        impostor = generate_impostor_pairs(manifest, seed=0)
        assert len(impostor) == 3 * 2 + 2 * 1
        for a, b in impostor.pairs:
            assert a[0] == b[0]
            assert a.split("/")[0] != b.split("/")[0]

    def test_single_image_classes(self):
        """测试单图类别没有真配对"""
        manifest = make_manifest({"A": 1, "B": 1})
        assert len(generate_genuine_pairs(manifest)) == 0
        assert len(generate_impostor_pairs(manifest, seed=1)) == 2

    def test_empty_manifest(self):
        """测试空清单"""
        manifest = make_manifest({})
        assert len(generate_genuine_pairs(manifest)) == 0
        assert len(generate_impostor_pairs(manifest, seed=1)) == 0

    def test_deterministic_in_seed(self):
        """测试同种子结果一致、不同种子结果不同"""
        manifest = make_manifest({f"c{i}": 10 for i in range(20)})
        a = generate_impostor_pairs(manifest, seed=42).pairs
        b = generate_impostor_pairs(manifest, seed=42).pairs
        c = generate_impostor_pairs(manifest, seed=43).pairs
        assert a == b
        assert a != c

    def test_reference_image_redrawn(self):
        """测试参考图像每次比对重新抽取"""
        manifest = make_manifest({f"c{i:02d}": 10 for i in range(40)})
        pairs = generate_impostor_pairs(manifest, seed=3).pairs
        first_class = [a for a, _ in pairs if a.startswith("c00/")]
        assert len(first_class) == 39
        assert len(set(first_class)) > 1

    @pytest.mark.slow
    def test_casia_shaped_counts(self):
        """测试 1000 左 + 1000 右类别、每类 10 幅的配对数"""
        sides = {f"R{i:04d}": EyeSide.RIGHT for i in range(1000)}
        sizes = {f"L{i:04d}": 10 for i in range(1000)}
        sizes.update({cid: 10 for cid in sides})
        manifest = make_manifest(sizes, sides)
        assert len(generate_genuine_pairs(manifest)) == 90_000
        assert len(generate_impostor_pairs(manifest, seed=0)) == 1_998_000


class TestAlignment:
    """类内对齐测试"""

    def test_pcc_basics(self, rng):
        """测试 PCC 的自相关、反相关与零方差"""
        a = rng.random((8, 16))
        assert pearson_cc(a, a) == pytest.approx(1.0)
        assert pearson_cc(a, 1.0 - a) == pytest.approx(-1.0)
        assert pearson_cc(a, np.full_like(a, 0.3)) == 0.0

    def test_shift_correlations_match_bruteforce(self, rng):
        """测试快速逐平移 PCC 与逐一计算一致"""
        a = rng.random((8, 32))
        b = rng.random((8, 32))
        fast = shift_correlations(a, b)
        brute = [pearson_cc(a, shift_columns(b, s)) for s in range(32)]
        assert np.allclose(fast, brute, atol=1e-12)

    def test_masked_full_masks_equal_plain(self, rng):
        """测试全有效掩码时掩码版与普通版一致"""
        a = rng.random((8, 32))
        b = rng.random((8, 32))
        ones = np.ones((8, 32), dtype=bool)
        assert np.allclose(masked_shift_correlations(a, ones, b, ones), shift_correlations(a, b), atol=1e-12)

    def test_recovers_known_shifts(self, rng):
        """测试恢复已知的循环平移"""
        base = rng.random((64, 512))
        offsets = [0, 5, 509, 100]
        images = [shift_columns(base, k) for k in offsets]
        masks = [np.ones((64, 512), dtype=bool)] * len(images)
        result, shifted, shifted_masks = align_class(images, masks)
        r = result.reference_index
        assert result.shifts[r] == 0
        for i, k in enumerate(offsets):
            assert result.shifts[i] == (offsets[r] - k) % 512
            assert np.array_equal(shifted[i], images[r])
        assert len(shifted_masks) == len(images)

    def test_masks_move_with_images(self, rng):
        """测试掩码随图像平移"""
        base = rng.random((64, 512))
        mask = np.ones((64, 512), dtype=bool)
        mask[:, :10] = False
        images = [base, shift_columns(base, 7)]
        masks = [mask, shift_columns(mask, 7)]
        result, _, shifted_masks = align_class(images, masks)
        assert np.array_equal(shifted_masks[0], shifted_masks[1])
        assert sorted(result.shifts) == sorted([0, (7 * (1 if result.reference_index == 1 else -1)) % 512])

    def test_identical_images_tie(self, rng):
        """测试完全相同的图像：参考取下标 0，平移全为 0"""
        base = rng.random((64, 512))
        result, _, _ = align_class([base, base.copy(), base.copy()], [np.ones((64, 512), dtype=bool)] * 3)
        assert result.reference_index == 0
        assert result.shifts == [0, 0, 0]

    def test_single_image(self, rng):
        """测试单幅图像"""
        result, shifted, _ = align_class([rng.random((64, 512))], [np.ones((64, 512), dtype=bool)])
        assert result.reference_index == 0 and result.shifts == [0]
        assert len(shifted) == 1

    def test_mask_aware_variant(self, rng):
        """测试掩码感知对齐恢复平移"""
        base = rng.random((16, 64))
        mask = np.ones((16, 64), dtype=bool)
        mask[-4:, :] = False
        images = [base, shift_columns(base, 3)]
        result, _, _ = align_class(images, [mask, mask], mask_aware=True)
        r = result.reference_index
        other = 1 - r
        assert result.shifts[other] == (3 if r == 1 else -3) % 64

    def test_realigning_is_identity(self, rng):
        """测试对已对齐的输出再次对齐：平移全为 0"""
        base = rng.random((64, 512))
        images = [shift_columns(base, k) + 0.05 * rng.standard_normal((64, 512)) for k in (0, 40, 300, 511)]
        masks = [np.ones((64, 512), dtype=bool)] * len(images)
        _, aligned, aligned_masks = align_class(images, masks)
        again, realigned, _ = align_class(aligned, aligned_masks)
        assert again.shifts == [0] * len(images)
        for a, b in zip(aligned, realigned):
            assert np.array_equal(a, b)

    def test_shift_keeps_row_values(self, rng):
        """测试循环平移不改变每一行的像素值多重集"""
        images = [rng.random((8, 32)) for _ in range(3)]
        masks = [np.ones((8, 32), dtype=bool)] * 3
        for s in (1, 17, 31, -5):
            shifted = shift_columns(images[0], s)
            assert np.array_equal(np.sort(shifted, axis=1), np.sort(images[0], axis=1))
        _, aligned, _ = align_class(images, masks)
        for original, moved in zip(images, aligned):
            assert np.array_equal(np.sort(moved, axis=1), np.sort(original, axis=1))


class TestSynthetic:
    """合成数据测试"""

    def test_deterministic(self):
        """测试同种子生成结果一致"""
        a = SyntheticIrisGenerator(seed=9).generate_class(2, 2)
        b = SyntheticIrisGenerator(seed=9).generate_class(2, 2)
        for (ia, ma), (ib, mb) in zip(a, b):
            assert np.array_equal(ia, ib) and np.array_equal(ma, mb)

    def test_mask_coverage(self):
        """测试掩码覆盖率在 70%–90%"""
        generator = SyntheticIrisGenerator(seed=1)
        for class_index in range(5):
            for _, mask in generator.generate_class(class_index, 4):
                assert 0.70 <= mask.mean() <= 0.90

    def test_within_class_correlated(self):
        """测试类内相关但远未饱和（噪声与纹理同量级），类间近似不相关"""
        generator = SyntheticIrisGenerator(seed=4)
        classes = [[img for img, _ in generator.generate_class(c, 3)] for c in range(6)]
        within = [pearson_cc(imgs[i], imgs[j]) for imgs in classes for i in range(3) for j in range(i + 1, 3)]
        across = [
            pearson_cc(classes[a][0], classes[b][0]) for a in range(6) for b in range(a + 1, 6)
        ]
        assert 0.4 < np.mean(within) < 0.8
        assert abs(np.mean(across)) < 0.1

    def test_noise_is_high_frequency(self):
        """测试同一基纹理的两幅图像之差基本是白噪声：平滑后方差大幅下降"""
        config = SyntheticIrisConfig(max_rotation=0, occluded_rows=(0, 0))
        (a, _), (b, _) = SyntheticIrisGenerator(seed=2, config=config).generate_class(0, 2)
        diff = a - b
        assert np.std(diff) == pytest.approx(np.sqrt(2.0) * config.noise_std, rel=0.1)
        assert np.std(gaussian_filter(diff, sigma=config.texture_sigma, mode="wrap")) < 0.2 * np.std(diff)

    def test_write_dataset(self, synthetic_manifest):
        """测试写出的清单可加载"""
        assert len(synthetic_manifest.class_ids()) == 6
        assert len(synthetic_manifest.entries) == 24
        assert synthetic_manifest.side_of("class_0000") is EyeSide.LEFT
        assert synthetic_manifest.side_of("class_0001") is EyeSide.RIGHT

    def test_rejects_zero_counts(self, tmp_path):
        """测试数量必须 >= 1"""
        with pytest.raises(ValueError):
            SyntheticIrisGenerator(seed=0).write_dataset(tmp_path, classes=0, images_per_class=3)


if __name__ == "__main__":
    pytest.main([__file__])
