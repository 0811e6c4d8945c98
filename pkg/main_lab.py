#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
次二次位势能量临界 NLS 数值实验室 - 命令行入口
"""

import argparse
import sys

from backend.main_controller.main_controller import MainController
from backend.utils.exceptions import LabException
from config.config_loader import ENV_PREFIX, env_overrides, split_seed_workers
from config.enums import Subcommand

DEFAULT_CONFIG = "default_lab_config"
DEFAULT_OUT = "output"

# 配置错误（文件缺失、格式或类型错误）的退出码
CONFIG_EXIT_CODE = 2


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器"""
    parser = argparse.ArgumentParser(
        description='次二次位势下能量临界 NLS 的数值实验室',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"""
示例:
  python main_lab.py verify-potential -c harmonic_action        # 检验位势假设
  python main_lab.py classical action -c harmonic_action        # 作用量与谐振子闭式比较
  python main_lab.py propagate -c fujiwara_mehler --out out/    # 使用 config_file/fujiwara_mehler.json
  python main_lab.py experiment -c strong_convergence --workers 4

环境变量 {ENV_PREFIX}CONFIG、{ENV_PREFIX}OUT、{ENV_PREFIX}WORKERS、{ENV_PREFIX}SEED 与同名参数等价，
命令行参数优先。

退出码: 0 成功；2 配置错误；3 前置条件不满足（如超出焦点时间）；4 数值失败
        """
    )
    parser.add_argument(
        'subcommand',
        choices=[s.value for s in Subcommand],
        help='子命令'
    )
    parser.add_argument(
        'operation',
        nargs='?',
        default=None,
        help='操作名，缺省使用配置文件中该小节的 operation'
    )
    parser.add_argument(
        '-c', '--config',
        type=str,
        default=None,
        help=f'配置文件名（不需要加.json扩展名）或路径，默认为 {DEFAULT_CONFIG}'
    )
    parser.add_argument(
        '-o', '--out',
        type=str,
        default=None,
        help=f'输出目录，默认为 {DEFAULT_OUT}'
    )
    parser.add_argument(
        '--workers',
        type=int,
        default=None,
        help='工作线程数，0 表示 CPU 核数（覆盖配置中的 run.workers）'
    )
    parser.add_argument(
        '--seed',
        type=int,
        default=None,
        help='随机种子（覆盖配置中的 run.seed）'
    )
    return parser


def main(argv=None, environ=None) -> int:
    """主函数

    Returns:
        退出码
    """
    args = build_parser().parse_args(argv)
    overrides = env_overrides(environ)

    try:
        env_seed, env_workers = split_seed_workers(overrides)
    except ValueError as e:
        print(f"配置错误: {e}", file=sys.stderr)
        return CONFIG_EXIT_CODE
    config_name = args.config or overrides.get("config") or DEFAULT_CONFIG
    out_dir = args.out or overrides.get("out") or DEFAULT_OUT
    workers = args.workers if args.workers is not None else env_workers
    seed = args.seed if args.seed is not None else env_seed
    subcommand = Subcommand(args.subcommand)

    print(f"使用配置文件: {config_name}")

    # 创建主控制器
    main_controller = MainController()

    try:
        # 加载配置
        main_controller.load_config(config_name)
        if args.operation is not None:
            main_controller.select_operation(subcommand, args.operation)

        manifest = main_controller.run(subcommand, out_dir, workers=workers, seed=seed)
        print(f"完成: {subcommand.value} {manifest.operation or ''}".rstrip())
        for entry in manifest.outputs:
            print(f"  {entry['file']}  sha256={entry['sha256']}")
    except LabException as e:
        print(f"错误（{type(e).__name__}）: {e}", file=sys.stderr)
        return e.exit_code
    except FileNotFoundError as e:
        print(f"错误: {e}", file=sys.stderr)
        return CONFIG_EXIT_CODE
    except (ValueError, TypeError) as e:
        print(f"配置文件格式错误: {e}", file=sys.stderr)
        return CONFIG_EXIT_CODE

    return 0


if __name__ == "__main__":
    sys.exit(main())
