"""Finite-size-scaling collapse pipeline (fit report, theory check, datasets).

    python3 scripts/run_collapse.py out/collapse --lambda=0.5,1,1.5
Extra arguments are passed to ``anisorabi collapse``.
"""

import sys

from anisorabi.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:]
    out, extra = (argv[0], argv[1:]) if argv and not argv[0].startswith("-") else ("out/collapse", argv)
    sys.exit(main(["collapse", "--out-dir", out, "--set", "plot_script=true", *extra]))
