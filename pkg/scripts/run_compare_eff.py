"""Full model against second-order, fourth-order and resummed effective models.

    python3 scripts/run_compare_eff.py out/eff --eta 2^8
"""

import sys

from anisorabi.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:]
    out, extra = (argv[0], argv[1:]) if argv and not argv[0].startswith("-") else ("out/eff", argv)
    sys.exit(main(["compare-eff", "--out-dir", out, "--set", "plot_script=true", *extra]))
