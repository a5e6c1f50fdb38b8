"""Shared argument handling for the experiment scripts."""

import argparse
import json
import sys
from pathlib import Path

from fpplab.harness.io import write_json


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--replicates", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, help="write the JSON summary here as well as to stdout")
    return p


def emit(result: dict, out: Path | None) -> None:
    json.dump(result, sys.stdout, indent=2, sort_keys=True, default=float)
    sys.stdout.write("\n")
    if out is not None:
        write_json(out, result)
