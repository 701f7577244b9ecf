"""Expected excess profit of the optimal schedule across benchmark windows (gamma=0)."""

from figdata import out_dir, write_csv
from tim_vwap import discrete as D
from tim_vwap.kernel import RegularizedPowerLaw

N, X0 = 50, 1000.0


def main():
    out = out_dir(__doc__)
    m = D.MarketModel.flat(N)
    kernel = RegularizedPowerLaw(0.5)
    rows = D.profit_scan(m, kernel, 0.0, X0, D.centered_windows(N, range(1, N, 4)))
    write_csv(out / "fig5_centered.csv", ["l1", "l2", "length", "profit"],
              [(w.l1, w.l2, w.length, p) for w, p in rows])
    unit = D.profit_scan(m, kernel, 0.0, X0, [D.BenchmarkWindow(i, i) for i in range(1, N + 1)])
    write_csv(out / "fig5_unit.csv", ["position", "profit"], [(w.l1, p) for w, p in unit])
    grid = D.profit_scan(m, kernel, 0.0, X0,
                         [D.BenchmarkWindow(a, b) for a in range(1, N + 1) for b in range(a, N + 1)])
    write_csv(out / "fig5_all_windows.csv", ["l1", "l2", "profit"], [(w.l1, w.l2, p) for w, p in grid])
    best = max(unit, key=lambda r: r[1])[0]
    print(f"unit-window argmax: {best.l1}")


if __name__ == "__main__":
    main()
