"""
文件格式测试：PGM、卷积核文件、采样点表、虹膜码文件
"""

import numpy as np
import pytest

from iriskernels.models.arrays import SamplingMap
from iriskernels.models.iris_models import CODE_LENGTH, IrisCode
from iriskernels.network.kernels import gabor_init, random_init
from iriskernels.network.sampling import default_sampling_map
from iriskernels.tools.code_io import MAGIC, PLANE_BYTES, load_code, save_code
from iriskernels.tools.kernel_io import (
    export_kernel_heatmaps,
    load_kernels,
    load_sampling_map,
    read_weight_csv,
    save_kernels,
    save_sampling_map,
)
from iriskernels.tools.pgm import (
    load_iris_image,
    load_occlusion_mask,
    read_pgm,
    read_pgm_shape,
    save_iris_image,
    write_pgm,
)
from iriskernels.utils.error_handler import (
    CodeFormatError,
    ImageFormatError,
    KernelFormatError,
    SamplingMapError,
)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


class TestPgm:
    """PGM 读写测试"""

    def test_write_then_read(self, tmp_path, rng):
        """测试写出后逐字节读回"""
        pixels = rng.integers(0, 256, size=(64, 512), dtype=np.uint8)
        path = tmp_path / "img.pgm"
        write_pgm(path, pixels)
        assert np.array_equal(read_pgm(path), pixels)
        assert read_pgm_shape(path) == (64, 512)

    def test_header_comments(self, tmp_path):
        """测试头部注释被跳过"""
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# comment\n3 2\n255\n" + bytes(range(6)))
        assert read_pgm(path).tolist() == [[0, 1, 2], [3, 4, 5]]

    def test_rejects_ascii_pgm(self, tmp_path):
        """测试 P2 文本格式被拒绝"""
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P2\n2 1\n255\n0 1\n")
        with pytest.raises(ImageFormatError):
            read_pgm(path)

    def test_rejects_truncated(self, tmp_path):
        """测试像素数据截断"""
        path = tmp_path / "t.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
        with pytest.raises(ImageFormatError):
            read_pgm(path)

    def test_iris_image_scale(self, tmp_path):
        """测试归一化图像按 /255 缩放"""
        pixels = np.zeros((64, 512), dtype=np.uint8)
        pixels[0, 0] = 255
        write_pgm(tmp_path / "i.pgm", pixels)
        img = load_iris_image(tmp_path / "i.pgm")
        assert img.dtype == np.float64
        assert img[0, 0] == 1.0 and img[1, 1] == 0.0

    def test_wrong_shape_rejected(self, tmp_path):
        """测试尺寸不是 64x512 时报错"""
        write_pgm(tmp_path / "s.pgm", np.zeros((32, 512), dtype=np.uint8))
        with pytest.raises(ImageFormatError):
            load_iris_image(tmp_path / "s.pgm")

    def test_mask_threshold(self, tmp_path):
        """测试掩码像素 >= 128 视为有效"""
        pixels = np.full((64, 512), 127, dtype=np.uint8)
        pixels[:, :10] = 128
        write_pgm(tmp_path / "m.pgm", pixels)
        mask = load_occlusion_mask(tmp_path / "m.pgm")
        assert mask.dtype == bool
        assert mask[:, :10].all() and not mask[:, 10:].any()

    def test_quantization_is_stable(self, tmp_path, rng):
        """测试 8 位图像读入再写出不变"""
        pixels = rng.integers(0, 256, size=(64, 512), dtype=np.uint8)
        write_pgm(tmp_path / "a.pgm", pixels)
        save_iris_image(tmp_path / "b.pgm", load_iris_image(tmp_path / "a.pgm"))
        assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()


class TestKernelFile:
    """卷积核文件测试"""

    def test_weights_round_trip_bit_exact(self, tmp_path):
        """测试权重逐位往返"""
        bank = random_init(3)
        path = save_kernels(bank, tmp_path / "k.txt")
        loaded = load_kernels(path)
        assert loaded.shapes == bank.shapes
        for a, b in zip(bank.kernels, loaded.kernels):
            assert np.array_equal(a, b)

    def test_rejects_wrong_count(self, tmp_path):
        """测试核数量不是 6"""
        path = tmp_path / "k.txt"
        path.write_text("1\n1 1\n0.5\n", encoding="utf-8")
        with pytest.raises(KernelFormatError):
            load_kernels(path)

    def test_rejects_even_size(self, tmp_path):
        """测试偶数尺寸被拒绝"""
        bank = gabor_init()
        path = save_kernels(bank, tmp_path / "k.txt")
        text = path.read_text(encoding="utf-8").replace("9 15", "8 15", 1)
        path.write_text(text, encoding="utf-8")
        with pytest.raises(KernelFormatError):
            load_kernels(path)

    def test_rejects_trailing_data(self, tmp_path):
        """测试多余数据"""
        path = save_kernels(gabor_init(), tmp_path / "k.txt")
        with open(path, "a", encoding="utf-8") as f:
            f.write("1 2 3\n")
        with pytest.raises(KernelFormatError):
            load_kernels(path)

    def test_heatmaps(self, tmp_path):
        """测试热图与权重 CSV 导出"""
        bank = gabor_init()
        written = export_kernel_heatmaps(bank, tmp_path / "heat")
        assert len(written) == 12
        pgm = read_pgm(tmp_path / "heat" / "kernel_0_9x15.pgm")
        assert pgm.shape == (9, 15)
        assert pgm.min() == 0 and pgm.max() == 255
        weights = read_weight_csv(tmp_path / "heat" / "kernel_5_9x51.csv")
        assert np.array_equal(weights, bank.kernels[5])


class TestSamplingMapFile:
    """采样点表文件测试"""

    def test_default_grid_round_trip(self, tmp_path):
        """测试默认网格写出再读回"""
        smap = default_sampling_map()
        loaded = load_sampling_map(save_sampling_map(smap, tmp_path / "map.txt"))
        assert np.array_equal(loaded.points, smap.points)
        assert not loaded.per_map

    def test_per_map_file(self, tmp_path):
        """测试分图点表"""
        base = default_sampling_map().points
        points = np.stack([np.roll(base, i, axis=0) for i in range(6)])
        smap = SamplingMap.from_points(points)
        loaded = load_sampling_map(save_sampling_map(smap, tmp_path / "pm.txt"))
        assert loaded.per_map
        assert np.array_equal(loaded.points_for(3), points[3])

    def test_wrong_point_count(self, tmp_path):
        """测试点数不是 256"""
        path = tmp_path / "bad.txt"
        path.write_text("\n".join(f"0 {c}" for c in range(255)), encoding="utf-8")
        with pytest.raises(SamplingMapError):
            load_sampling_map(path)

    def test_out_of_range_point(self, tmp_path):
        """测试越界点"""
        lines = [f"{r} {c}" for r in range(4, 64, 8) for c in range(8, 512, 16)]
        lines[0] = "64 8"
        path = tmp_path / "oob.txt"
        path.write_text("\n".join(lines), encoding="utf-8")
        with pytest.raises(SamplingMapError):
            load_sampling_map(path)

    def test_duplicate_point(self, tmp_path):
        """测试重复点"""
        lines = [f"{r} {c}" for r in range(4, 64, 8) for c in range(8, 512, 16)]
        lines[1] = lines[0]
        path = tmp_path / "dup.txt"
        path.write_text("\n".join(lines), encoding="utf-8")
        with pytest.raises(SamplingMapError):
            load_sampling_map(path)


class TestCodeFile:
    """虹膜码文件测试"""

    def test_layout(self, tmp_path, rng):
        """测试文件为魔数 + 2x192 字节，且逐位往返"""
        code = IrisCode(
            bits=rng.random(CODE_LENGTH) < 0.5,
            mask_bits=rng.random(CODE_LENGTH) < 0.8,
        )
        path = save_code(code, tmp_path / "a.irc")
        data = path.read_bytes()
        assert data[:4] == MAGIC
        assert PLANE_BYTES == 192
        assert len(data) == 4 + 384
        loaded = load_code(path)
        assert np.array_equal(loaded.bits, code.bits)
        assert np.array_equal(loaded.mask_bits, code.mask_bits)

    def test_msb_first(self, tmp_path):
        """测试字节内高位在前"""
        bits = np.zeros(CODE_LENGTH, dtype=bool)
        bits[0] = True
        code = IrisCode(bits=bits, mask_bits=np.ones(CODE_LENGTH, dtype=bool))
        data = save_code(code, tmp_path / "b.irc").read_bytes()
        assert data[4] == 0x80
        assert data[4 + 192] == 0xFF

    def test_bad_magic(self, tmp_path):
        """测试魔数错误"""
        path = tmp_path / "bad.irc"
        path.write_bytes(b"XXXX" + bytes(384))
        with pytest.raises(CodeFormatError):
            load_code(path)

    def test_bad_length(self, tmp_path):
        """测试长度错误"""
        path = tmp_path / "short.irc"
        path.write_bytes(MAGIC + bytes(100))
        with pytest.raises(CodeFormatError):
            load_code(path)


if __name__ == "__main__":
    pytest.main([__file__])
