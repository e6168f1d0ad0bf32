"""生成样例输入：python make_fixture.py [--out data] [--size 64]"""
import argparse
import sys
from typing import List, Optional

from common_utils import exit_on_error
from penportrait.api.response import dump_json
from penportrait.core.fixture import DEFAULT_FIXTURE_SIZE, write_fixture
from logger import setup_logger

# 配置日志
logger = setup_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='make_fixture', description='写出 penportrait.ini 引用的合成样例数据')
    parser.add_argument('--out', default='data', help='输出目录（默认 data）')
    parser.add_argument('--size', type=int, default=DEFAULT_FIXTURE_SIZE, help='图像边长，需为 8 的倍数')
    parser.add_argument('--seed', type=int, default=0, help='照片噪声种子')
    return parser


@exit_on_error
def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    files = write_fixture(args.out, size=args.size, seed=args.seed)
    sys.stdout.write(dump_json(files))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
