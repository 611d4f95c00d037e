"""Random arrival order: the p_gamma threshold and the hard instance.

The optimal single-threshold rejection probability p_gamma solves
1 - (1-gamma) p = (1-p)/(-log p); the policy that accepts the first
value above the p_gamma max-quantile guarantees 1 - (1-gamma) p_gamma.
The upper-bound family (n long-shot spikes plus one sure value) shows
how far any algorithm can go.
"""

import numpy as np

from lookback_prophet import Instance, ThresholdPolicy, discrete, gamma_decay
from lookback_prophet.distributions import expected_max, solve_max_quantile
from lookback_prophet.evaluation import brute_force_value, monte_carlo
from lookback_prophet.instances import random_order_hard, random_order_hard_a
from lookback_prophet.theory import random_order_lower, random_order_upper, solve_p_gamma

print("p_gamma roots and the guarantee 1 - (1-gamma) p_gamma:")
for gamma in (0.0, 0.25, 0.5, 0.75, 1.0):
    p = solve_p_gamma(gamma).value
    print(
        f"  gamma={gamma:.2f}: p={p:.6f}  lower={random_order_lower(gamma):.5f} "
        f" upper={random_order_upper(gamma):.5f}"
    )

print()
print("exact check on small random instances (enumerating all orders):")
rng = np.random.default_rng(7)
for gamma in (0.0, 0.5):
    p = solve_p_gamma(gamma).value
    bound = random_order_lower(gamma)
    worst = 1.0
    for _ in range(5):
        supports = [np.sort(rng.choice(np.arange(1, 20) / 2.0, 2, replace=False)) for _ in range(5)]
        dists = tuple(discrete(list(s), [0.5, 0.5]) for s in supports)
        inst = Instance("random", dists)
        sol = solve_max_quantile(inst, p)
        policy = ThresholdPolicy(sol.theta, sol.tie_break_accept_prob)
        ratio = brute_force_value(inst, policy, gamma_decay(gamma)) / expected_max(inst)
        worst = min(worst, ratio)
    print(f"  gamma={gamma:.2f}: worst exact ratio {worst:.5f} >= guarantee {bound:.5f}")

print()
print("hard instance (spikes + sure value a), simulated optimal-threshold ratio:")
for gamma in (0.0, 0.5):
    a = random_order_hard_a(gamma)
    inst = random_order_hard(40, a)
    sol = solve_max_quantile(inst, solve_p_gamma(gamma).value)
    policy = ThresholdPolicy(sol.theta, sol.tie_break_accept_prob)
    rep = monte_carlo(inst, policy, gamma_decay(gamma), reps=50_000, seed=11)
    print(
        f"  gamma={gamma:.2f}: a={a:.4f} threshold ratio {rep.ratio:.4f}, "
        f"upper bound {random_order_upper(gamma):.4f}"
    )
