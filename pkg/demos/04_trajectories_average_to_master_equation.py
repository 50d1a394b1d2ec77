"""Both unravelings average back to the master equation.

Single counting and homodyne trajectories disagree wildly about what the
resonator is doing (cat states vs coherent states), but that is a
statement about conditioning, not dynamics: averaged over many
realizations, both protocols reproduce the density-matrix evolution.
"""

import numpy as np

from kerrtraj import ModelParams, density_from_state, ensemble_average, evolve_me, expval, fock_state, liouvillian_for, number_op, parity_op

params = ModelParams(U=1.0, G=5.0, F=0.0, gamma=0.1, eta=1.0, n_max=15)

grid = np.round(np.arange(0.25, 5.001, 0.25), 10)
L = liouvillian_for(params)
times, rhos = evolve_me(density_from_state(fock_state(0, params.n_max)), L, t_final=5.0, dt=1e-3, sample_every=0.25)
N_op, P_op = number_op(params.n_max), parity_op(params.n_max)
me_n = {t: expval(r, N_op).real for t, r in zip(times, rhos)}
me_p = {t: expval(r, P_op).real for t, r in zip(times, rhos)}

print("ensembles of 200 trajectories vs master equation (z = deviation / std error):\n")
for protocol in ("counting", "homodyne"):
    ens = ensemble_average(protocol, params, n_traj=200, t_grid=grid, seed=3)
    z_n = np.max(np.abs(ens.means["n"] - [me_n[t] for t in grid]) / (ens.std_errors["n"] + 1e-15))
    z_p = np.max(np.abs(ens.means["parity"] - [me_p[t] for t in grid]) / (ens.std_errors["parity"] + 1e-15))
    print(f"  {protocol:9s}: max z(<n>) = {z_n:.2f}, max z(<parity>) = {z_p:.2f}")

print("\nphoton number and parity along the transient:")
print(f"{'t':>6} {'ME <n>':>9} {'count':>9} {'homod':>9}   {'ME <P>':>8} {'count':>8} {'homod':>8}")
ens_c = ensemble_average("counting", params, n_traj=200, t_grid=grid, seed=3)
ens_h = ensemble_average("homodyne", params, n_traj=200, t_grid=grid, seed=3)
for i, t in enumerate(grid[::4]):
    j = 4 * i
    print(
        f"{t:6.2f} {me_n[t]:9.4f} {ens_c.means['n'][j]:9.4f} {ens_h.means['n'][j]:9.4f}   "
        f"{me_p[t]:8.4f} {ens_c.means['parity'][j]:8.4f} {ens_h.means['parity'][j]:8.4f}"
    )
