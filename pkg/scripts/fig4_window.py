"""Benchmark window [25, 38] inside a 50-bucket horizon, with and without the sign constraint."""

import numpy as np

from figdata import out_dir, write_csv
from tim_vwap import discrete as D
from tim_vwap.kernel import RegularizedPowerLaw

N, X0 = 50, 1000.0


def main():
    out = out_dir(__doc__)
    m = D.MarketModel.flat(N)
    kernel = RegularizedPowerLaw(0.5)
    w = D.BenchmarkWindow(25, 38)
    free = D.optimize(m, kernel, w, 0.0, X0).schedule
    capped = D.optimize(m, kernel, w, 0.0, X0, lower=np.zeros(N)).schedule
    write_csv(out / "fig4_window.csv", ["bucket", "in_window", "unconstrained", "nonneg"],
              zip(range(1, N + 1), w.mask(N).astype(int), free, capped))


if __name__ == "__main__":
    main()
