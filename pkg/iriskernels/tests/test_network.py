"""
卷积层与采样层测试：环面填充、valid 互相关、Gabor/随机初始化、采样网格、编码
"""

import math

import numpy as np
import pytest

from iriskernels.models.arrays import KernelBank, SamplingMap
from iriskernels.models.iris_models import CODE_LENGTH, DEFAULT_KERNEL_SIZES, GaborParams
from iriskernels.network.coder import (
    binarize,
    combine_masks,
    encode_features,
    encode_features_full,
    encode_iris,
    encode_responses,
    response_maps,
    sample_mask,
)
from iriskernels.network.conv import (
    convolve_valid,
    gather_patches,
    kernel_pads,
    response_map,
    sampled_responses,
    sigmoid,
    wrap_pad,
)
from iriskernels.network.kernels import (
    default_gabor_spec,
    gabor_init,
    gabor_kernel,
    random_init,
    zero_mean,
)
from iriskernels.network.sampling import default_sampling_map, grid_layout, shift_code
from iriskernels.utils.error_handler import ImageFormatError, KernelFormatError


def naive_response(image, kernel):
    """逐像素的环面互相关参考实现"""
    height, width = image.shape
    rows, cols = kernel.shape
    pad_y, pad_x = (rows - 1) // 2, (cols - 1) // 2
    out = np.zeros_like(image)
    for y in range(height):
        for x in range(width):
            total = 0.0
            for u in range(rows):
                for v in range(cols):
                    total += image[(y + u - pad_y) % height, (x + v - pad_x) % width] * kernel[u, v]
            out[y, x] = total
    return out


class TestConvolution:
    """卷积引擎测试"""

    def test_wrap_pad_formula(self, rng):
        """测试填充满足环面下标公式"""
        image = rng.random((6, 10))
        padded = wrap_pad(image, 2, 3)
        assert padded.shape == (10, 16)
        for r in range(10):
            for c in range(16):
                assert padded[r, c] == image[(r - 2) % 6, (c - 3) % 10]

    def test_wrap_pad_too_large(self):
        """测试填充量不小于图像尺寸时报错"""
        with pytest.raises(ImageFormatError):
            wrap_pad(np.zeros((4, 8)), 4, 1)

    def test_valid_output_shape(self, rng):
        """测试 64x512 输入经填充后输出仍为 64x512"""
        image = rng.random((64, 512))
        for shape in ((9, 15), (9, 27), (9, 51)):
            assert response_map(image, rng.random(shape)).shape == (64, 512)

    def test_matches_naive_oracle(self, rng):
        """测试与逐像素实现一致"""
        image = rng.random((8, 12))
        kernel = rng.standard_normal((3, 5))
        assert np.allclose(response_map(image, kernel), naive_response(image, kernel), atol=1e-12)

    def test_no_kernel_flip(self):
        """测试是互相关而非卷积"""
        padded = np.arange(9, dtype=float).reshape(3, 3)
        kernel = np.zeros((3, 3))
        kernel[0, 0] = 1.0
        assert convolve_valid(padded, kernel)[0, 0] == 0.0

    def test_input_smaller_than_kernel(self):
        """测试输入小于核"""
        with pytest.raises(ImageFormatError):
            convolve_valid(np.zeros((2, 2)), np.zeros((3, 3)))

    def test_shift_equivariance(self, rng):
        """测试循环平移输入等于循环平移输出"""
        image = rng.random((16, 32))
        kernel = rng.standard_normal((5, 7))
        shifted = np.roll(image, (3, 11), axis=(0, 1))
        assert np.allclose(
            response_map(shifted, kernel), np.roll(response_map(image, kernel), (3, 11), axis=(0, 1)), atol=1e-12
        )

    def test_linearity(self, rng):
        """测试对权重线性"""
        image = rng.random((16, 32))
        k1, k2 = rng.standard_normal((2, 3, 5))
        lhs = response_map(image, 2.0 * k1 - 0.5 * k2)
        rhs = 2.0 * response_map(image, k1) - 0.5 * response_map(image, k2)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_sigmoid_saturates(self):
        """测试 sigmoid 大幅值时不溢出"""
        values = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
        assert values.tolist() == [0.0, 0.5, 1.0]

    def test_patches_give_sampled_responses(self, rng):
        """测试采样点邻域与完整响应图在采样点处一致"""
        image = rng.random((16, 32))
        kernel = rng.standard_normal((5, 9))
        points = np.array([[0, 0], [15, 31], [7, 3], [2, 30]])
        patches = gather_patches(image, points, kernel.shape)
        assert patches.shape == (4, 5, 9)
        full = response_map(image, kernel)
        assert np.allclose(sampled_responses(patches, kernel), full[points[:, 0], points[:, 1]], atol=1e-12)

    def test_kernel_pads(self):
        assert kernel_pads((9, 51)) == (4, 25)


class TestKernels:
    """核组初始化测试"""

    def test_gabor_bank_shapes(self):
        """测试默认 Gabor 核组尺寸"""
        bank = gabor_init()
        assert bank.shapes == list(DEFAULT_KERNEL_SIZES)

    def test_gabor_even_odd_pairs(self):
        """测试偶核关于中心对称、奇核反对称"""
        bank = gabor_init()
        even, odd = bank.kernels[0], bank.kernels[1]
        assert np.allclose(even, even[:, ::-1], atol=1e-12)
        assert np.allclose(odd, -odd[:, ::-1], atol=1e-12)
        assert even[4, 7] == pytest.approx(1.0)

    def test_gabor_formula(self):
        """测试单个 Gabor 核与公式一致"""
        params = GaborParams(rows=3, cols=5, wavelength=4.0, sigma_x=1.0, sigma_y=2.0, phase=0.3)
        kernel = gabor_kernel(params)
        y, x = 1.0, -2.0
        expected = math.exp(-(x**2 / 2.0 + y**2 / 8.0)) * math.cos(2 * math.pi * x / 4.0 + 0.3)
        assert kernel[2, 0] == pytest.approx(expected)

    def test_gabor_rejects_bad_sigma(self):
        """测试 σ 非正时报错"""
        spec = [p.model_dump() for p in default_gabor_spec()]
        spec[0]["sigma_x"] = 0.0
        with pytest.raises(KernelFormatError):
            gabor_init(spec)

    def test_random_init(self):
        """测试随机初始化的范围与确定性"""
        a, b, c = random_init(1), random_init(1), random_init(2)
        for k in a.kernels:
            assert np.all(np.abs(k) <= 0.05)
        assert all(np.array_equal(x, y) for x, y in zip(a.kernels, b.kernels))
        assert not np.array_equal(a.kernels[0], c.kernels[0])

    def test_zero_mean(self):
        """测试零均值后每个核的权重和 <= 1e-12"""
        bank = zero_mean(gabor_init())
        assert all(abs(s) <= 1e-12 for s in bank.sums())

    def test_bank_needs_six_odd_kernels(self):
        """测试核数量与奇数尺寸"""
        with pytest.raises(KernelFormatError):
            KernelBank.from_arrays([np.zeros((3, 3))] * 5)
        with pytest.raises(KernelFormatError):
            KernelBank.from_arrays([np.zeros((3, 3))] * 5 + [np.zeros((4, 3))])


class TestSampling:
    """采样层测试"""

    def test_default_grid(self):
        """测试默认 8x32 网格"""
        smap = default_sampling_map()
        assert smap.points.shape == (256, 2)
        assert grid_layout(smap) == (8, 32)
        assert tuple(smap.points[0]) == (4, 8)
        assert tuple(smap.points[-1]) == (60, 504)

    def test_irregular_map_has_no_layout(self, rng):
        """测试非网格点表"""
        flat = rng.choice(64 * 512, size=256, replace=False)
        smap = SamplingMap.from_points(np.stack([flat // 512, flat % 512], axis=1))
        assert grid_layout(smap) is None

    def test_uneven_grid_has_no_layout(self):
        """测试列间距乘列数不等于宽度"""
        points = [(r, c) for r in range(4, 64, 8) for c in range(0, 256, 8)]
        assert grid_layout(SamplingMap.from_points(points)) is None

    def test_shift_code_is_column_roll(self):
        """测试码平移等价于采样列循环平移"""
        vector = np.arange(6 * 8 * 32)
        shifted = shift_code(vector, 1, (8, 32))
        grid = shifted.reshape(6, 8, 32)
        assert grid[0, 0, 1] == 0
        assert grid[0, 0, 0] == 31
        assert np.array_equal(shift_code(shifted, -1, (8, 32)), vector)

    def test_shift_matches_image_rotation(self, rng):
        """测试图像平移一个采样列等于码平移一列"""
        image = rng.random((64, 512))
        bank = random_init(5)
        smap = default_sampling_map()
        base = encode_features(image, bank, smap)
        rotated = encode_features(np.roll(image, 16, axis=1), bank, smap)
        assert np.allclose(shift_code(base, 1, (8, 32)), rotated, atol=1e-12)


class TestCoder:
    """编码测试"""

    def test_code_length(self, rng):
        """测试码长 1536"""
        image = rng.random((64, 512))
        mask = np.ones((64, 512), dtype=bool)
        code = encode_iris(image, mask, gabor_init(), default_sampling_map())
        assert code.bits.shape == (CODE_LENGTH,)
        assert code.mask_bits.shape == (CODE_LENGTH,)
        assert code.mask_bits.all()

    def test_fast_path_equals_full_path(self, rng):
        """测试采样点快速路径与完整响应图路径一致"""
        image = rng.random((64, 512))
        bank = random_init(8)
        smap = default_sampling_map()
        assert np.allclose(encode_features(image, bank, smap), encode_features_full(image, bank, smap), atol=1e-12)

    def test_response_maps_shape(self, rng):
        """测试每张响应图 64x512"""
        maps = response_maps(rng.random((64, 512)), gabor_init())
        assert len(maps) == 6
        assert all(m.shape == (64, 512) for m in maps)

    def test_features_in_open_interval(self, rng):
        """测试特征值在 (0,1)"""
        features = encode_features(rng.random((64, 512)), random_init(0), default_sampling_map())
        assert np.all((features > 0.0) & (features < 1.0))

    def test_binarize_half_is_zero(self):
        """测试恰为 0.5 时取 0"""
        assert binarize(np.array([0.5, 0.5000001, 0.4999])).tolist() == [False, True, False]

    def test_binarize_matches_response_sign(self, rng):
        """测试码位等于激活前响应 > 0"""
        image = rng.random((64, 512))
        bank = zero_mean(random_init(5))
        smap = default_sampling_map()
        bits = binarize(encode_features(image, bank, smap))
        assert np.array_equal(bits, encode_responses(image, bank, smap) > 0.0)

    def test_kernel_order_permutes_blocks(self, rng):
        """测试核组顺序置换时特征向量按 256 位块同样置换"""
        image = rng.random((64, 512))
        bank = random_init(6)
        smap = default_sampling_map()
        perm = [3, 0, 5, 1, 4, 2]
        permuted = KernelBank.from_arrays([bank.kernels[i] for i in perm])
        blocks = encode_features(image, bank, smap).reshape(6, 256)
        permuted_blocks = encode_features(image, permuted, smap).reshape(6, 256)
        assert np.array_equal(permuted_blocks, blocks[perm])

    def test_zero_image_zero_mean_kernels(self):
        """测试常数图像配零均值核：全部特征为 0.5，码位全 0"""
        image = np.full((64, 512), 0.4)
        bank = zero_mean(gabor_init())
        features = encode_features(image, bank, default_sampling_map())
        assert np.allclose(features, 0.5, atol=1e-12)

    def test_sample_mask_tiles(self):
        """测试掩码位按响应图重复"""
        mask = np.ones((64, 512), dtype=bool)
        mask[4, :] = False
        bits = sample_mask(mask, default_sampling_map())
        assert bits.shape == (CODE_LENGTH,)
        assert not bits[:32].any() and bits[32:256].all()
        assert np.array_equal(bits[:256], bits[256:512])

    def test_sample_mask_per_map(self):
        """测试分图点表的掩码位"""
        base = default_sampling_map().points
        smap = SamplingMap.from_points(np.stack([np.roll(base, 32 * i, axis=0) for i in range(6)]))
        mask = np.ones((64, 512), dtype=bool)
        mask[4, :] = False
        bits = sample_mask(mask, smap).reshape(6, 256)
        assert not bits[0, :32].any()
        assert not bits[1, 32:64].any() and bits[1, :32].all()

    def test_combine_masks(self):
        """测试掩码与运算及尺寸检查"""
        a = np.array([True, True, False])
        b = np.array([True, False, False])
        assert combine_masks(a, b).tolist() == [True, False, False]
        with pytest.raises(ImageFormatError):
            combine_masks(a, np.ones(4, dtype=bool))

    def test_wrong_image_shape(self, rng):
        """测试图像尺寸不符"""
        with pytest.raises(ImageFormatError):
            encode_features(rng.random((32, 512)), gabor_init(), default_sampling_map())


if __name__ == "__main__":
    pytest.main([__file__])
