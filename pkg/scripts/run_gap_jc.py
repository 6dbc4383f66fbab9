"""Normal-phase gap exponents and the Jaynes-Cummings staircase.

Writes gap_scaling.csv (eta, lambda, 1-xi, gap_total, analytic gap) and
fitted log-log slopes, then runs ``anisorabi jc`` into the same directory.

    python3 scripts/run_gap_jc.py out/gap --eta 2^10
"""

import argparse
from pathlib import Path

import numpy as np

from anisorabi.analytic import normal_gap
from anisorabi.cli import _number, main as cli_main, write_csv
from anisorabi.model import ModelParams
from anisorabi.solver import observables


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", nargs="?", default="out/gap")
    ap.add_argument("--eta", default="2^10")
    ap.add_argument("--lambdas", default="0,0.5,1")
    args = ap.parse_args()
    eta = _number(args.eta)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for lam in (float(x) for x in args.lambdas.split(",")):
        w = 1 / eta if lam == 0 else (eta**2 * (1 + lam) ** 2 / (4 * lam)) ** (-1 / 3)
        d = np.geomspace(4 * w, 0.1, 13)
        gaps = []
        for x in d:
            p = ModelParams.from_xi(eta, 1 - x, lam)
            g = observables(p).gap_total
            gaps.append(g)
            rows.append((eta, lam, float(x), g, normal_gap(p.xi, p.xi_prime) / eta))
        print(f"lambda={lam:g}: gap slope {np.polyfit(np.log(d), np.log(gaps), 1)[0]:.4f}")
    write_csv(out / "gap_scaling.csv", ["eta", "lambda", "one_minus_xi", "gap_total", "gap_analytic"], rows)
    return cli_main(["jc", "--eta", args.eta, "--out-dir", str(out / "jc")])


if __name__ == "__main__":
    raise SystemExit(main())
