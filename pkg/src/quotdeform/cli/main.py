"""``quotdeform run <file.qd> [--seed N] [--cap N]``."""
from __future__ import annotations

import argparse
import sys

from .parser import ScriptError, parse
from .session import CommandError, run_script

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_CAP = 0, 2, 3, 4


def run_text(text: str, out=None, err=None, seed: int = 0, cap: int | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr

    def emit(line: str):
        out.write(line + "\n")

    try:
        script = parse(text)
        return run_script(script, emit, seed=seed, cap=cap)
    except ScriptError as e:
        err.write(f"error: {e.category}: {e}\n")
        return EXIT_PARSE
    except CommandError as e:
        err.write(f"error: {e.category}: {e.detail}\n")
        return e.code


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="quotdeform", description="deformations of quotients from session scripts")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a session file")
    r.add_argument("file")
    r.add_argument("--seed", type=int, default=0, help="seed for randomized spot checks")
    r.add_argument("--cap", type=int, default=None, help="enumeration candidate cap (QD_CAP overrides)")
    args = ap.parse_args(argv)
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        sys.stderr.write(f"error: io: {e}\n")
        return EXIT_PARSE
    return run_text(text, seed=args.seed, cap=args.cap)
