"""What one round of feedback delay costs.

With tau = 1 the value observed at round t belongs to round t - 1, and the
mirror step restarts from the anchor z_{t-1}. The step sizes alpha, beta,
gamma run on the shifted clock t - tau. We run both variants on the same
seeds and compare the per-player regret averages.
"""

import numpy as np

from banditgne import preset_config, run_experiment

HORIZON, RUNS = 2000, 4

fast = run_experiment(preset_config("figure1", horizon=HORIZON, runs=RUNS), write=False)
slow = run_experiment(preset_config("figure3", horizon=HORIZON, runs=RUNS), write=False)

for label, res in (("delay-free", fast), ("tau = 1", slow)):
    reg = res.mean_regret_over_t
    print(f"{label:>10}: Reg/t at t=200 {reg[199].mean():7.3f}, at t={HORIZON} {reg[-1].mean():7.3f}, "
          f"R_g/t at t=200 {res.mean_violation_over_t[199]:7.3f}")

gap = slow.mean_regret_over_t[-1] - fast.mean_regret_over_t[-1]
print(f"\nplayers where the delayed run is behind at t={HORIZON}: {int(np.sum(gap >= 0))}/20")
print(f"largest per-player gap {gap.max():.3f}, smallest {gap.min():.3f}")
