"""Baseline schedule under a drift sweep (gamma=0) and a risk-aversion sweep (sigma^2=0.01)."""

from figdata import out_dir, write_csv
from tim_vwap import discrete as D
from tim_vwap.kernel import RegularizedPowerLaw

N, X0 = 50, 1000.0
DRIFTS = (-4, -2, 0, 2, 4)
GAMMAS = (0, 0.5, 1, 3, 7, 100)


def main():
    out = out_dir(__doc__)
    kernel = RegularizedPowerLaw(0.5)
    w = D.BenchmarkWindow(1, N)
    drift = [D.optimize(D.MarketModel.flat(N, mu=mu), kernel, w, 0.0, X0).schedule for mu in DRIFTS]
    write_csv(out / "fig3_drift.csv", ["bucket", *(f"mu={mu}" for mu in DRIFTS)], zip(range(1, N + 1), *drift))
    m = D.MarketModel.flat(N, sigma2=0.01)
    risk = [D.optimize(m, kernel, w, g, X0).schedule for g in GAMMAS]
    write_csv(out / "fig3_risk.csv", ["bucket", *(f"gamma={g}" for g in GAMMAS)], zip(range(1, N + 1), *risk))


if __name__ == "__main__":
    main()
