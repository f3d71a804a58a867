#!/usr/bin/env python3
"""Print one pass/fail line per acceptance criterion, including the slow trend checks."""

import sys

from varmult.acceptance import ALL


def main() -> int:
    failed = 0
    for check in ALL:
        result = check()
        print(result.line(), flush=True)
        failed += not result.passed
    print(f"{len(ALL) - failed}/{len(ALL)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
