"""Phase diagram sweep over (lambda, g~) with the numerical phase boundary.

    python3 scripts/run_phase_diagram.py out/phase --gtilde-steps 61
"""

import sys

from anisorabi.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:]
    out, extra = (argv[0], argv[1:]) if argv and not argv[0].startswith("-") else ("out/phase", argv)
    sys.exit(main(["phase-diagram", "--out-dir", out, "--set", "plot_script=true", *extra]))
