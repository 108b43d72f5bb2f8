"""twoway - 양방향 확산 풀이기의 메인 진입점."""

import sys

from twoway.cli import main

if __name__ == "__main__":
    sys.exit(main())
