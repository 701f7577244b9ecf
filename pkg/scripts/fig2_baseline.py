"""Discrete baseline schedule (N=50, regularized power law) with and without the sign constraint."""

import numpy as np

from figdata import out_dir, write_csv
from tim_vwap import discrete as D
from tim_vwap.kernel import RegularizedPowerLaw

N, X0 = 50, 1000.0


def main():
    out = out_dir(__doc__)
    m = D.MarketModel.flat(N)
    kernel = RegularizedPowerLaw(0.5)
    w = D.BenchmarkWindow(1, N)
    free = D.optimize(m, kernel, w, 0.0, X0)
    capped = D.optimize(m, kernel, w, 0.0, X0, lower=np.zeros(N))
    write_csv(out / "fig2_baseline.csv", ["bucket", "unconstrained", "nonneg"],
              zip(range(1, N + 1), free.schedule, capped.schedule))
    write_csv(out / "fig2_profit.csv", ["case", "expected_excess_profit"],
              [("unconstrained", free.expected_excess_profit), ("nonneg", capped.expected_excess_profit)])


if __name__ == "__main__":
    main()
