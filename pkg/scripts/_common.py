"""Shared argument handling for the experiment scripts."""

import argparse
from pathlib import Path

from afmllg.experiments import DESK_FILM, FILM


def parser(description: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    ap.add_argument("--full", action="store_true", help="use the 50x50x5 film of 2 nm cells instead of the desk grid")
    ap.add_argument("--scheme", default="scheme-a", choices=("gspm", "scheme-a", "scheme-b"))
    return ap


def setup(args):
    args.out.mkdir(parents=True, exist_ok=True)
    return FILM if args.full else DESK_FILM
