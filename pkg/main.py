import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent / 'src'))

# pylint: disable=wrong-import-position
from branch import cli
from branch import config


def main():
    config.load()
    sys.exit(cli.run(sys.argv[1:]))

if __name__ == '__main__':
    main()
