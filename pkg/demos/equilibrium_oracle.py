"""The comparator sequence: variational equilibria, round by round.

Regret needs x*_t, the equilibrium of round t's game over the coupled
feasible set. The oracle solves it by extragradient with exact projections.
The Cournot costs as implemented have pseudo-gradient (2 + sin(t/12)) 1,
which is positive and constant in x, so every firm's best feasible move is
to produce nothing. We show that, and how far the published closed-form
formula sits from it.
"""

import numpy as np

from banditgne import cournot_closed_form_gne, cournot_game, gne_trajectory, quadratic_test_game, solve_gne

game = cournot_game()
traj = gne_trajectory(game, 200, n_probes=500)
xs = np.array([s.x_star for s in traj])
closed = np.array([cournot_closed_form_gne(t) for t in range(1, len(traj) + 1)])

print(f"Cournot: max |x*| over 201 rounds = {np.abs(xs).max():.2e}")
print(f"         smallest VI residual over random feasible probes = {min(s.residual for s in traj):.3g}")
print(f"         max gap to the closed-form formula = {np.abs(xs - closed).max():.3f}")

# A strongly monotone game where the shared budget binds: the multiplier is
# recovered from the projection step.
budgeted = quadratic_test_game(3, 1, 0.2, centers=[2.0, 1.0, 3.0], budget=[1.0, 1.0, 1.0])
sol = solve_gne(budgeted, 1)
print(f"\nbudgeted quadratic game: x* = {np.round(sol.x_star, 6)}, sum = {sol.x_star.sum():.6f} (budget 3)")
print(f"                         lambda* = {sol.lambda_star[0]:.6f}, residual {sol.residual:.3g}")
# every player is interior, so stationarity reads F_i(x*) + lambda* = 0
marg = budgeted.pseudo_gradient(1, sol.x_star) + sol.lambda_star[0]
print(f"                         F_i(x*) + lambda* = {np.round(marg, 8)}")
