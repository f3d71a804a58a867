#!/usr/bin/env python3
"""Run every config in configs/ and report the exit status of each run.

Usage: python3 scripts/run_all_experiments.py [config_dir]
"""

import sys
import time
from pathlib import Path

from varmult.cli import ConfigError, load_config, run


def main() -> int:
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "configs"
    failures = 0
    for path in sorted(root.glob("*.cfg")):
        t0 = time.perf_counter()
        try:
            status, csv_path, _ = run(load_config(path))
        except ConfigError as exc:
            print(f"{path.name}: invalid config: {exc}")
            failures += 1
            continue
        failures += status != 0
        state = "ok" if status == 0 else "FAILED"
        print(f"{path.name}: {state} -> {csv_path} ({time.perf_counter() - t0:.1f}s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
