"""Random availability decay: rejected items survive with probability p_j.

The survival coins are revealed only at stopping time, so stopping
rules never see them; guarantees transfer through the expectation maps
H_j(x) = p_j x, and the floor is the terminal survival probability.
"""

from lookback_prophet import Instance, ThresholdPolicy, bernoulli_decay, discrete, point
from lookback_prophet.decay import expected_value, gamma_of, sample_realization
from lookback_prophet.evaluation import brute_force_value, child_rng, monte_carlo

seq = bernoulli_decay([1.0, 0.5], terminal=0.25)
print("availability decay with survival probs 1.0, 0.5, then 0.25:")
print("  floor gamma_D =", gamma_of(seq))
print("  expected lag-2 recovery of 8.0:", expected_value(seq, 2, 8.0))

draws = [sample_realization(seq, 2, 8.0, child_rng(1, r, 0)) for r in range(10_000)]
print(f"  sampled lag-2 mean: {sum(draws) / len(draws):.3f} (values are 8 or 0)")

print()
inst = Instance("adversarial", (point(1.0), discrete([0.0, 2.0], [0.5, 0.5])))
flat = bernoulli_decay([], terminal=0.5)
policy = ThresholdPolicy(2.5)  # never stops: reward is the surviving best
exact = brute_force_value(inst, policy, flat)
rep = monte_carlo(inst, policy, flat, reps=100_000, seed=5)
print("never-stopping on (sure 1.0, fifty-fifty 2.0) with survival 1/2:")
print(f"  exact expected recovery {exact:.5f} (coins integrated in closed form)")
print(f"  simulated              {rep.mean_reward:.5f} +- {rep.ci_half_width:.5f}")
