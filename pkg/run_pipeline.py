"""命令行入口：python run_pipeline.py {train,sketch,plot,run} --config penportrait.ini"""
import argparse
import os
import sys
from typing import List, Optional

import psutil

from common_utils import exit_on_error
from config import DEFAULT_CONFIG_PATH, ENV
from penportrait.api.response import dump_json
from penportrait.core import cmd_plot, cmd_run, cmd_sketch, cmd_train
from penportrait.utils.config import load_config
from logger import setup_logger

# 配置日志
logger = setup_logger(__name__)

COMMANDS = {
    'train': cmd_train,
    'sketch': cmd_sketch,
    'plot': cmd_plot,
    'run': cmd_run,
}


def log_system_info():
    """记录系统资源信息"""
    try:
        process = psutil.Process(os.getpid())
        memory = psutil.virtual_memory()
        logger.debug(
            f"System Info - pid: {process.pid} - rss_mb: {process.memory_info().rss / 1024 / 1024:.2f} - "
            f"available_mb: {memory.available / 1024 / 1024:.2f} - cpus: {psutil.cpu_count()}"
        )
    except Exception as e:
        logger.error(f"Failed to get system info: {e}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='penportrait', description='人像照片到笔式绘图仪的流水线')
    parser.add_argument('command', choices=sorted(COMMANDS), help='要执行的子命令')
    parser.add_argument('--config', default=None, help=f'INI 配置文件（默认 {DEFAULT_CONFIG_PATH}，不存在时只用默认值）')
    parser.add_argument('--seed', type=int, default=None, help='主随机种子')
    parser.add_argument('--out', default=None, help='输出根目录')
    for stage in ('sparsity', 'fusion', 'fills', 'background'):
        parser.add_argument(f'--no-{stage}', dest=f'no_{stage}', action='store_true', help=f'关闭 {stage} 阶段')
    return parser


def _config_path(arg: Optional[str]) -> Optional[str]:
    if arg:
        return arg
    return DEFAULT_CONFIG_PATH if os.path.exists(DEFAULT_CONFIG_PATH) else None


@exit_on_error
def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    disabled = [stage for stage in ('sparsity', 'fusion', 'fills', 'background') if getattr(args, f'no_{stage}')]
    logger.info(f"Command started - command: {args.command} - env: {ENV} - disabled: {disabled}")
    log_system_info()
    cfg = load_config(_config_path(args.config), seed=args.seed, out_dir=args.out, disabled_stages=disabled)
    result = COMMANDS[args.command](cfg)
    sys.stdout.write(dump_json(result))
    logger.info(f"Command finished - command: {args.command}")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
