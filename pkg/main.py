"""tf-dc 命令入口"""
import sys

from cli import cli


def main() -> None:
    """运行命令行；Ctrl-C 中断长时间积分时以 130 退出"""
    try:
        cli(prog_name="tf-dc")
    except KeyboardInterrupt:
        print("已中断", file=sys.stderr)
        sys.exit(130)


if __name__ == "__main__":
    main()
