"""
测试公共夹具：小规模合成数据集
"""

import numpy as np
import pytest

from iriskernels.data.manifest import IrisImageStore, load_dataset
from iriskernels.data.synthetic import SyntheticIrisGenerator


@pytest.fixture(scope="session")
def synthetic_manifest_path(tmp_path_factory):
    """6 类 x 4 幅的合成数据集（写到磁盘）"""
    out_dir = tmp_path_factory.mktemp("synth")
    return SyntheticIrisGenerator(seed=11).write_dataset(out_dir, classes=6, images_per_class=4)


@pytest.fixture(scope="session")
def synthetic_manifest(synthetic_manifest_path):
    return load_dataset(synthetic_manifest_path)


@pytest.fixture
def synthetic_store(synthetic_manifest):
    return IrisImageStore(synthetic_manifest)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
