#!/usr/bin/env python3
"""
Run every demo experiment twice and check the reports are byte-identical.
"""

import argparse
import sys
import tempfile
from pathlib import Path
from typing import List, Tuple

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT))

from quadlab.main import main as quadlab_main  # noqa: E402


def run_config(config: Path, out_dir: Path, tag: str, fmt: str) -> Tuple[int, bytes]:
    """Run one experiment; return (exit status, report bytes)."""
    target = out_dir / f"{config.stem}.{tag}.{fmt}"
    status = quadlab_main(["--format", fmt, "--output", str(target), "--log-level", "WARNING", "experiment", str(config)])
    body = target.read_bytes() if target.exists() else b""
    return status, body


def main():
    parser = argparse.ArgumentParser(description="Run the demo experiment suite")
    parser.add_argument("--configs", default=str(REPO_ROOT / "config" / "experiments"), help="directory of experiment files")
    parser.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    parser.add_argument("--keep", metavar="DIR", help="keep the reports in this directory")
    args = parser.parse_args()

    configs = sorted(Path(args.configs).glob("*.yaml"))
    if not configs:
        print(f"✗ No experiment files in {args.configs}")
        return 1

    print("Running quadlab demo suite...")
    print("=" * 60)

    results: List[Tuple[bool, str]] = []
    with tempfile.TemporaryDirectory() as tmp:
        out_dir = Path(args.keep) if args.keep else Path(tmp)
        out_dir.mkdir(parents=True, exist_ok=True)
        for config in configs:
            first_status, first = run_config(config, out_dir, "run1", args.format)
            second_status, second = run_config(config, out_dir, "run2", args.format)
            if first_status != 0:
                results.append((False, f"✗ {config.name} - exit {first_status}"))
            elif first != second or second_status != first_status:
                results.append((False, f"✗ {config.name} - reports differ between runs"))
            else:
                results.append((True, f"✓ {config.name} - pass, {len(first)} bytes, deterministic"))
            print(f"  {results[-1][1]}")

    print("\n" + "=" * 60)
    passed = sum(1 for ok, _ in results if ok)
    print(f"Experiments: {passed}/{len(results)} passed")

    if passed == len(results):
        print("✓ All experiments passed!")
        return 0
    print("✗ Some experiments failed")
    return 1


if __name__ == "__main__":
    sys.exit(main())
