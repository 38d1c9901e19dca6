"""
IrisKernels Main Entry Point
虹膜核学习命令行入口：pairs / align / encode / match / train / eval / kernels / synth / compare
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from config import (
    DataConfig,
    OutputConfig,
    ParallelConfig,
    TrainingConfig,
    build_train_config,
    load_config_file,
    setup_directories,
    validate_config,
)
from iriskernels.utils.error_handler import EXIT_OK, EXIT_USAGE, DataError, UsageError, cli_error_boundary
from iriskernels.utils.input_validation import InputValidator, validate_cli_inputs
from iriskernels.utils.logger import set_global_level, setup_logger
from iriskernels.workflows.iris_pipeline import IrisPipeline

# Create CLI logger for user-facing output
cli_logger = setup_logger("iriskernels.cli", level="INFO", log_file=None, console=True)

# 训练参数：命令行选项名 -> TrainConfig 字段
TRAIN_OVERRIDES = {
    "batch_size": int,
    "mining_pool_size": int,
    "total_batches": int,
    "validation_triplets": int,
    "validation_every": int,
    "checkpoint_every": int,
    "learning_rate": float,
    "momentum": float,
    "margin": float,
}


class IrisArgumentParser(argparse.ArgumentParser):
    """用法错误统一以退出码 1 结束"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_out(name: str) -> str:
    return str(Path(OutputConfig.OUTPUT_DIR) / name)


def build_parser() -> IrisArgumentParser:
    """构建命令行解析器"""
    parser = IrisArgumentParser(
        prog="iriskernels",
        description="IrisKernels - 单卷积层虹膜编码、匹配、评估与卷积核训练",
    )
    parser.add_argument("--seed", type=int, default=None, help="随机种子 (默认: 0，训练时可由配置文件给出)")
    parser.add_argument(
        "--threads", type=int, default=ParallelConfig.MAX_WORKERS, help="线程数，不影响输出 (默认: %(default)s)"
    )
    parser.add_argument("--config", default=TrainingConfig.CONFIG_FILE or None, help="TOML 训练配置文件")
    parser.add_argument("-v", "--verbose", action="store_true", help="输出调试日志")
    parser.add_argument("-q", "--quiet", action="store_true", help="只输出警告和错误")
    parser.add_argument("--progress", action="store_true", help="显示进度条")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("pairs", help="生成真/假配对列表")
    p.add_argument("--manifest", required=True, help="数据集清单 CSV")
    p.add_argument("--out", default=default_out("pairs"), help="输出目录 (genuine.csv, impostor.csv)")

    p = sub.add_parser("align", help="类内 PCC 对齐")
    p.add_argument("--manifest", required=True, help="数据集清单 CSV")
    p.add_argument("--out", default=default_out("aligned"), help="输出目录（平移后的图像、清单、alignment.csv）")
    p.add_argument("--mask-aware", action="store_true", help="PCC 只在两掩码共同有效的像素上计算")

    p = sub.add_parser("encode", help="把图像编码为 1536 位虹膜码")
    p.add_argument("--manifest", required=True, help="数据集清单 CSV")
    p.add_argument("--kernels", required=True, help="卷积核文件")
    p.add_argument("--sampling-map", default=None, help="采样点文件 (默认: 8x32 网格)")
    p.add_argument("--out", default=default_out("codes"), help="码文件输出目录")

    p = sub.add_parser("match", help="对配对列表打分")
    p.add_argument("--pairs", nargs="+", required=True, help="配对 CSV（可多个）")
    p.add_argument("--codes", required=True, help="encode 输出目录")
    p.add_argument("--max-shift", type=int, default=0, help="最大列平移（采样列为单位，默认: 0）")
    p.add_argument("--sampling-map", default=None, help="采样点文件（默认读取码目录中的 sampling_map.txt）")
    p.add_argument("--out", default=default_out("scores.csv"), help="分数 CSV")

    p = sub.add_parser("train", help="三元组损失训练卷积核组")
    p.add_argument("--train-manifest", required=True, help="训练集清单")
    p.add_argument("--val-manifest", required=True, help="验证集清单（类别与训练集不相交）")
    p.add_argument(
        "--init", choices=TrainingConfig.INIT_CHOICES, default=TrainingConfig.DEFAULT_INIT, help="初始化方式"
    )
    p.add_argument("--init-kernels", default=None, help="--init file 时的核文件")
    p.add_argument("--sampling-map", default=None, help="采样点文件 (默认: 8x32 网格)")
    p.add_argument("--out", default=default_out("train"), help="训练输出目录")
    p.add_argument("--resume", action="store_true", help="从 <out>/checkpoint 恢复")
    for name, kind in TRAIN_OVERRIDES.items():
        p.add_argument(f"--{name.replace('_', '-')}", type=kind, default=None, help=f"覆盖配置 {name}")
    p.add_argument("--optimizer", choices=["adam", "sgd_momentum"], default=None, help="优化器")
    p.add_argument("--loss", choices=["soft_margin", "hinge"], default=None, help="损失函数")

    p = sub.add_parser("eval", help="分数分布评估：d′、ROC、EER、直方图")
    p.add_argument("--scores", nargs="+", required=True, help="match 输出的分数 CSV（可多个）")
    p.add_argument("--out", default=default_out("eval"), help="报告输出目录")
    p.add_argument("--label", default="", help="摘要中的标签")

    p = sub.add_parser("kernels", help="卷积核工具")
    actions = p.add_subparsers(dest="action", required=True, metavar="ACTION")
    a = actions.add_parser("export-heatmaps", help="导出每个核的 PGM 热图与权重 CSV")
    a.add_argument("--kernels", required=True)
    a.add_argument("--out", default=default_out("heatmaps"))
    a = actions.add_parser("zero-mean", help="核减去均值，使权重和为零")
    a.add_argument("--kernels", required=True)
    a.add_argument("--out", required=True, help="输出核文件")
    a = actions.add_parser("gabor-gen", help="生成默认 Gabor 核组")
    a.add_argument("--out", required=True, help="输出核文件")
    a = actions.add_parser("random-gen", help="按 --seed 生成随机核组")
    a.add_argument("--out", required=True, help="输出核文件")
    a = actions.add_parser("inspect", help="打印核尺寸与统计量")
    a.add_argument("--kernels", required=True)

    p = sub.add_parser("synth", help="生成合成虹膜数据集")
    p.add_argument("--classes", type=int, default=DataConfig.SYNTH_CLASSES)
    p.add_argument("--images-per-class", type=int, default=DataConfig.SYNTH_IMAGES_PER_CLASS)
    p.add_argument("--out", default=default_out("synth"), help="输出目录")

    p = sub.add_parser("compare", help="在同一配对上比较多个核组")
    p.add_argument("--manifest", required=True, help="数据集清单 CSV")
    p.add_argument("--pairs", nargs="+", required=True, help="配对 CSV（可多个）")
    p.add_argument("--kernels", nargs="+", required=True, help="核文件（文件名互不相同）")
    p.add_argument("--max-shift", type=int, default=0)
    p.add_argument("--sampling-map", default=None)
    p.add_argument("--out", default=default_out("compare"), help="输出目录")

    return parser


def resolved_config(args: argparse.Namespace, extra: Optional[Dict[str, Any]] = None) -> str:
    """把解析后的全部参数（及训练配置）序列化为一行 JSON"""
    values = {k: v for k, v in vars(args).items() if not callable(v)}
    if extra:
        values.update(extra)
    return json.dumps(values, ensure_ascii=False, sort_keys=True, default=str)


def check_globals(args: argparse.Namespace) -> None:
    """全局参数检查"""
    validator = InputValidator()
    for ok, error in (
        validator.validate_seed(args.seed if args.seed is not None else 0),
        validator.validate_count(args.threads, "threads"),
    ):
        if not ok:
            raise UsageError(error)


def check_inputs(input_files: Dict[str, Any], output_dirs: Optional[Dict[str, Any]] = None) -> None:
    """输入文件缺失按数据错误处理，输出路径不可用按用法错误处理"""
    result = validate_cli_inputs(input_files=input_files)
    if not result["success"]:
        raise DataError("; ".join(result["errors"]))
    result = validate_cli_inputs(output_dirs=output_dirs or {})
    if not result["success"]:
        raise UsageError("; ".join(result["errors"]))


V = InputValidator


@cli_error_boundary("pairs")
def cmd_pairs(args: argparse.Namespace, pipeline: IrisPipeline) -> int:
    check_inputs({"manifest": (args.manifest, V.MANIFEST_EXTENSIONS)}, {"out": args.out})
    result = pipeline.pairs(args.manifest, args.out)
    cli_logger.info(f"✅ 真配对 {result['genuine']} 个, 假配对 {result['impostor']} 个 → {args.out}")
    return EXIT_OK


@cli_error_boundary("align")
def cmd_align(args: argparse.Namespace, pipeline: IrisPipeline) -> int:
    check_inputs({"manifest": (args.manifest, V.MANIFEST_EXTENSIONS)}, {"out": args.out})
    result = pipeline.align(args.manifest, args.out, mask_aware=args.mask_aware)
    cli_logger.info(f"✅ 对齐 {result['classes']} 个类别, {result['images']} 幅图像 → {args.out}")
    return EXIT_OK


@cli_error_boundary("encode")
def cmd_encode(args: argparse.Namespace, pipeline: IrisPipeline) -> int:
    check_inputs(
        {
            "manifest": (args.manifest, V.MANIFEST_EXTENSIONS),
            "kernels": (args.kernels, V.KERNEL_EXTENSIONS),
            "sampling_map": (args.sampling_map, None),
        },
        {"out": args.out},
    )
    result = pipeline.encode(args.manifest, args.kernels, args.out, args.sampling_map)
    cli_logger.info(f"✅ 编码 {result['codes']} 幅图像 → {args.out}")
    return EXIT_OK


@cli_error_boundary("match")
def cmd_match(args: argparse.Namespace, pipeline: IrisPipeline) -> int:
    if args.max_shift < 0:
        raise UsageError(f"--max-shift must be >= 0: {args.max_shift}")
    inputs = {f"pairs[{i}]": (p, V.TABLE_EXTENSIONS) for i, p in enumerate(args.pairs)}
    inputs["sampling_map"] = (args.sampling_map, None)
    check_inputs(inputs)
    result = pipeline.match(args.pairs, args.codes, args.out, args.max_shift, args.sampling_map)
    cli_logger.info(f"✅ 打分 {result['scored']} 对, 排除 {result['excluded']} 对 → {args.out}")
    return EXIT_OK


@cli_error_boundary("train")
def cmd_train(args: argparse.Namespace, pipeline: IrisPipeline) -> int:
    check_inputs(
        {
            "train_manifest": (args.train_manifest, V.MANIFEST_EXTENSIONS),
            "val_manifest": (args.val_manifest, V.MANIFEST_EXTENSIONS),
            "init_kernels": (args.init_kernels, V.KERNEL_EXTENSIONS),
            "sampling_map": (args.sampling_map, None),
            "config": (args.config, V.CONFIG_EXTENSIONS),
        },
        {"out": args.out},
    )
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {name: getattr(args, name) for name in TRAIN_OVERRIDES}
    overrides.update(optimizer=args.optimizer, loss=args.loss, seed=args.seed, threads=args.threads)
    config = build_train_config(file_values, overrides)
    cli_logger.info(resolved_config(args, {"train_config": config.model_dump(mode="json")}))

    result = pipeline.train(
        config,
        args.train_manifest,
        args.val_manifest,
        args.init,
        args.out,
        init_kernels_path=args.init_kernels,
        sampling_map_path=args.sampling_map,
        resume=args.resume,
    )
    cli_logger.info(
        f"✅ 训练 {result['batches']} 批, 最终验证损失 {result['final_val_loss']:.6f}, "
        f"跳过三元组 {result['skipped_triplets']} → {args.out}"
    )
    return EXIT_OK


@cli_error_boundary("eval")
def cmd_eval(args: argparse.Namespace, pipeline: IrisPipeline) -> int:
    check_inputs({f"scores[{i}]": (p, V.TABLE_EXTENSIONS) for i, p in enumerate(args.scores)}, {"out": args.out})
    result = pipeline.evaluate(args.scores, args.out, args.label)
    cli_logger.info(f"✅ d′={result['d_prime']:.4f}, EER={result['eer']:.4f} → {args.out}")
    return EXIT_OK


@cli_error_boundary("kernels")
def cmd_kernels(args: argparse.Namespace, pipeline: IrisPipeline) -> int:
    kwargs: Dict[str, Any] = {}
    if hasattr(args, "kernels"):
        check_inputs({"kernels": (args.kernels, V.KERNEL_EXTENSIONS)})
        kwargs["kernels_path"] = args.kernels
    if args.action == "export-heatmaps":
        kwargs["out_dir"] = args.out
    elif args.action != "inspect":
        kwargs["out_path"] = args.out
    pipeline.kernels(args.action, **kwargs)
    cli_logger.info(f"✅ kernels {args.action} 完成")
    return EXIT_OK


@cli_error_boundary("synth")
def cmd_synth(args: argparse.Namespace, pipeline: IrisPipeline) -> int:
    for value, name in ((args.classes, "classes"), (args.images_per_class, "images-per-class")):
        ok, error = InputValidator.validate_count(value, name)
        if not ok:
            raise UsageError(error)
    check_inputs({}, {"out": args.out})
    result = pipeline.synth(args.out, args.classes, args.images_per_class)
    cli_logger.info(f"✅ 生成 {result['images']} 幅合成图像 → {result['manifest']}")
    return EXIT_OK


@cli_error_boundary("compare")
def cmd_compare(args: argparse.Namespace, pipeline: IrisPipeline) -> int:
    if args.max_shift < 0:
        raise UsageError(f"--max-shift must be >= 0: {args.max_shift}")
    inputs = {"manifest": (args.manifest, V.MANIFEST_EXTENSIONS), "sampling_map": (args.sampling_map, None)}
    inputs.update({f"pairs[{i}]": (p, V.TABLE_EXTENSIONS) for i, p in enumerate(args.pairs)})
    inputs.update({f"kernels[{i}]": (k, V.KERNEL_EXTENSIONS) for i, k in enumerate(args.kernels)})
    check_inputs(inputs, {"out": args.out})
    result = pipeline.compare(
        args.manifest, args.pairs, args.kernels, args.out, args.max_shift, args.sampling_map
    )
    cli_logger.info(f"✅ 比较 {result['banks']} 个核组 → {Path(args.out) / 'comparison.csv'}")
    return EXIT_OK


COMMANDS = {
    "pairs": cmd_pairs,
    "align": cmd_align,
    "encode": cmd_encode,
    "match": cmd_match,
    "train": cmd_train,
    "eval": cmd_eval,
    "kernels": cmd_kernels,
    "synth": cmd_synth,
    "compare": cmd_compare,
}


@cli_error_boundary("cli")
def run(args: argparse.Namespace) -> int:
    """检查全局参数、记录配置并分派子命令"""
    check_globals(args)
    if args.command != "train":
        cli_logger.info(resolved_config(args))
    pipeline = IrisPipeline(
        threads=args.threads, seed=args.seed if args.seed is not None else 0, progress=args.progress
    )
    return COMMANDS[args.command](args, pipeline)


def main(argv: Optional[List[str]] = None) -> int:
    """主函数：解析参数并运行子命令，返回退出码"""
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_global_level("DEBUG")
    elif args.quiet:
        set_global_level("WARNING")

    if not validate_config():
        return EXIT_USAGE
    setup_directories()

    cli_logger.info(f"🚀 iriskernels {args.command}")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
