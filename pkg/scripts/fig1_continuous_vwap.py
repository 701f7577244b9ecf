"""Continuous VWAP velocities: power-law closed form per kappa, quadrature check, exponential kernel."""

import numpy as np

from figdata import out_dir, write_csv
from tim_vwap import closed_form as cf
from tim_vwap import quadrature as q
from tim_vwap.kernel import Exponential, PowerLaw

KAPPAS = (0.15, 0.25, 0.35, 0.5, 0.75, 0.9)


def main():
    out = out_dir(__doc__)
    t = np.linspace(0.005, 0.995, 199)
    rows = zip(t, *(cf.vwap_powerlaw_rate(1.0, 1.0, k, t) for k in KAPPAS))
    write_csv(out / "fig1_powerlaw_closed_form.csv", ["t", *(f"kappa={k}" for k in KAPPAS)], rows)

    N = 2000
    cols, grid = [], None
    for k in (0.25, 0.5):
        sol = q.solve_optimal_velocity(q.IntegralEquationSpec(PowerLaw(k), 1.0, 1.0, N))
        grid = sol.grid
        cols += [sol.velocity, cf.vwap_powerlaw_rate(1.0, 1.0, k, sol.grid)]
    write_csv(out / "fig1_powerlaw_quadrature.csv",
              ["t", "quad_0.25", "closed_0.25", "quad_0.5", "closed_0.5"], zip(grid, *cols))

    write_csv(out / "fig1_sign_change.csv", ["kappa", "t_star"],
              [(k, cf.sign_change_time(1.0, 1.0, k)) for k in np.linspace(0.05, 0.95, 19)])

    s = cf.vwap_exponential_schedule(1.0, 1.0, 1.0)
    sol = q.solve_optimal_velocity(q.IntegralEquationSpec(Exponential(1.0), 1.0, 1.0, 400))
    write_csv(out / "fig1_exponential.csv", ["t", "quadrature", "closed_form_rate"],
              zip(sol.grid, sol.velocity, np.full(400, float(s.rate(0.5)))))
    write_csv(out / "fig1_exponential_impulses.csv", ["end", "delta_coefficient", "shares"],
              [("start", s.initial_impulse, s.initial_mass), ("end", s.terminal_impulse, s.terminal_mass)])


if __name__ == "__main__":
    main()
