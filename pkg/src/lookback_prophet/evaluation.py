"""Exact brute-force oracles and seeded Monte Carlo evaluation.

Reproducibility contract: replication r derives its random streams
statelessly from (seed, r, stream tag) through a splitmix64 mix, so
results are bit-identical for identical (seed, reps) regardless of how
replications are scheduled across workers.  Per replication the draw
order is fixed: the n values in distribution-index order, then the
arrival permutation (random order only), then any policy coins and
decay realizations.  Aggregation reduces in replication-index order
with exact compensated summation.

``brute_force_value`` integrates the full outcome space (times all
permutations in the random-order model) and handles tie-break coins
analytically, so it is exact for deterministic decay; bernoulli decay
with a constant availability probability is integrated in closed form
over the recovery coins.  It is the oracle every sampled or
dynamic-programming value is checked against.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from . import decay as decay_mod
from . import theory
from .decay import DecaySequence
from .distributions import Instance, expected_max
from .errors import (
    IntegrationFailure,
    ParameterOutOfRange,
    SpaceTooLarge,
    UnsupportedDecay,
    UnsupportedDistribution,
)
from .policies import ThresholdPolicy, run_policy

ENUMERATION_BUDGET = 10**7
RANDOM_ORDER_ENUM_MAX_N = 8
Z_95 = 1.959963984540054
CI_RELIABLE_MIN_REPS = 1000

_TAG_VALUES = 0x56414C55
_TAG_ORDER = 0x4F524452
_TAG_AUX = 0x434F494E

REPORT_CSV_HEADER = (
    "gamma,mean_reward,expected_opt,ratio,ci_half_width,reps,seed,theory_lower,theory_upper"
)

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def child_seed(seed: int, replication: int, tag: int) -> int:
    """Stateless 64-bit mix of (seed, replication index, stream tag)."""
    z = _splitmix64(seed & _MASK64)
    z = _splitmix64(z ^ replication)
    return _splitmix64(z ^ tag)


def child_rng(seed: int, replication: int, tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(child_seed(seed, replication, tag)))


class _LazyRng:
    """Creates its generator only if a coin is actually needed."""

    __slots__ = ("_seed", "_rep", "_tag", "_gen")

    def __init__(self, seed, rep, tag):
        self._seed, self._rep, self._tag = seed, rep, tag
        self._gen = None

    def random(self, *args):
        if self._gen is None:
            self._gen = child_rng(self._seed, self._rep, self._tag)
        return self._gen.random(*args)


@dataclass(frozen=True)
class SimulationReport:
    mean_reward: float
    expected_opt: float
    ratio: float
    ci_half_width: float
    replications: int
    seed: int
    order: str
    decay: str
    opt_exact: bool
    ci_reliable: bool


def _sampler_plan(inst: Instance):
    """A vectorized inverse transform u[0..n) -> values[0..n).

    Bit-identical to calling Distribution.quantile per index, but one
    numpy pass per kind instead of a Python loop over positions.
    """
    if inst.order == "iid":
        d = inst.distributions[0]
        return d.quantile_many

    dists = inst.distributions
    n = len(dists)
    disc_idx = [i for i, d in enumerate(dists) if d.kind in ("point", "discrete")]
    uni_idx = [i for i, d in enumerate(dists) if d.kind == "uniform"]
    exp_idx = [i for i, d in enumerate(dists) if d.kind == "exponential"]

    if disc_idx:
        width = max(len(dists[i].support) for i in disc_idx)
        cum_mat = np.full((len(disc_idx), width), 2.0)  # 2.0 > any uniform draw
        sup_mat = np.zeros((len(disc_idx), width))
        last = np.empty(len(disc_idx), dtype=np.intp)
        for row, i in enumerate(disc_idx):
            d = dists[i]
            cum_mat[row, : len(d.support)] = d._cum
            sup_mat[row, : len(d.support)] = d.support
            last[row] = len(d.support) - 1
        disc_rows = np.arange(len(disc_idx))
        disc_pos = np.asarray(disc_idx)
    if uni_idx:
        uni_lo = np.array([dists[i].lo for i in uni_idx])
        uni_w = np.array([dists[i].hi - dists[i].lo for i in uni_idx])
        uni_pos = np.asarray(uni_idx)
    if exp_idx:
        exp_rate = np.array([dists[i].rate for i in exp_idx])
        exp_pos = np.asarray(exp_idx)

    def values_from(u: np.ndarray) -> np.ndarray:
        out = np.empty(n)
        if disc_idx:
            idx = np.minimum((u[disc_pos, None] >= cum_mat).sum(axis=1), last)
            out[disc_pos] = sup_mat[disc_rows, idx]
        if uni_idx:
            out[uni_pos] = uni_lo + u[uni_pos] * uni_w
        if exp_idx:
            out[exp_pos] = -np.log1p(-u[exp_pos]) / exp_rate
        return out

    return values_from


def _deterministic_decay(decay: DecaySequence) -> bool:
    return decay.kind != "bernoulli"


def _decayed_max(decay: DecaySequence, xs: np.ndarray, lags: np.ndarray) -> float:
    """max over positions of D_lag(x) for a deterministic decay."""
    if decay.kind == "gamma":
        vals = np.where(lags == 0, xs, decay.param * xs)
    elif decay.kind == "geometric":
        vals = decay.param**lags * xs
    elif decay.kind == "subtractive":
        costs = np.array([0.0] + [decay.cost_at(int(j)) for j in range(1, int(lags.max()) + 1)])
        vals = np.maximum(0.0, xs - costs[lags])
    else:
        vals = np.array(
            [decay_mod.evaluate(decay, int(j), float(x)) for j, x in zip(lags, xs)]
        )
    return float(vals.max()) if len(vals) else 0.0


def _threshold_path_reward(
    observed: np.ndarray, theta: float, q: float, decay: DecaySequence, aux: _LazyRng
) -> float:
    """One threshold trajectory, vectorized along the path."""
    n = len(observed)
    above = observed > theta
    stop = None
    if q > 0.0 and np.any(observed == theta):
        for t in range(n):  # scalar walk only when a tie coin can fire
            x = observed[t]
            if x > theta or (x == theta and aux.random() < q):
                stop = t + 1
                break
    elif above.any():
        stop = int(np.argmax(above)) + 1
    if stop is None:
        reward = _decayed_max(decay, observed, np.arange(n, 0, -1))
    else:
        reward = _decayed_max(decay, observed[:stop], np.arange(stop - 1, -1, -1))
    assert reward <= observed.max() + 1e-12  # decay never exceeds identity
    return reward


def _simulate_chunk(args):
    inst, policy, decay, seed, start, stop = args
    n = inst.n
    values_from = _sampler_plan(inst)
    random_order = inst.order == "random"
    fast = isinstance(policy, ThresholdPolicy) and _deterministic_decay(decay)
    # scalar micro-path: tiny fixed-order paths under constant-fraction decay
    scalar = fast and not random_order and decay.kind == "gamma" and n <= 8
    if scalar:
        quantiles = [d.quantile for d in inst.iter_dists()]
        theta, q, g = policy.theta, policy.tie_break_accept_prob, decay.param
    rewards = [0.0] * (stop - start)
    maxima = [0.0] * (stop - start)
    for r in range(start, stop):
        u = child_rng(seed, r, _TAG_VALUES).random(n)
        if scalar:
            best = 0.0
            stopped_at = -1
            aux = None
            for i in range(n):
                x = quantiles[i](u[i])
                if stopped_at < 0 and x >= theta:
                    if x == theta and q < 1.0:
                        if q > 0.0:
                            aux = aux or _LazyRng(seed, r, _TAG_AUX)
                            accept = aux.random() < q
                        else:
                            accept = False
                    else:
                        accept = True
                    if accept:
                        stopped_at = i
                        reward = x if x > g * best else g * best
                if x > best:
                    best = x
            if stopped_at < 0:
                reward = g * best
            rewards[r - start] = reward
            maxima[r - start] = best
            continue
        values = values_from(u)
        if random_order:
            perm = child_rng(seed, r, _TAG_ORDER).permutation(n)
            observed = values[perm]
        else:
            perm = None
            observed = values
        aux = _LazyRng(seed, r, _TAG_AUX)
        if fast:
            reward = _threshold_path_reward(
                observed, policy.theta, policy.tie_break_accept_prob, decay, aux
            )
        else:
            reward = run_policy(policy, observed, decay, aux, dist_indices=perm).reward
        rewards[r - start] = reward
        maxima[r - start] = float(values.max())
    return np.asarray(rewards), np.asarray(maxima)


def monte_carlo(
    inst: Instance,
    policy,
    decay: DecaySequence,
    reps: int,
    seed: int,
    workers: int = 1,
) -> SimulationReport:
    """Estimate the expected reward of a policy by seeded replication.

    The denominator E[OPT] comes from expected_max when that converges,
    otherwise from the same sampled paths.
    """
    if reps < 1:
        raise ParameterOutOfRange("need reps >= 1")
    if workers < 1:
        raise ParameterOutOfRange("need workers >= 1")

    chunks = _chunk_ranges(reps, workers)
    args = [(inst, policy, decay, seed, start, stop) for start, stop in chunks]
    if workers == 1 or len(chunks) == 1:
        parts = [_simulate_chunk(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_chunk, args))
    rewards = np.concatenate([p[0] for p in parts])
    maxima = np.concatenate([p[1] for p in parts])

    mean = math.fsum(rewards) / reps
    if reps > 1:
        var = math.fsum((x - mean) ** 2 for x in rewards) / (reps - 1)
        ci = Z_95 * math.sqrt(var / reps)
    else:
        ci = 0.0

    try:
        opt = expected_max(inst)
        opt_exact = True
    except IntegrationFailure:
        opt = math.fsum(maxima) / reps
        opt_exact = False

    return SimulationReport(
        mean_reward=mean,
        expected_opt=opt,
        ratio=mean / opt,
        ci_half_width=ci,
        replications=reps,
        seed=seed,
        order=inst.order,
        decay=decay.describe(),
        opt_exact=opt_exact,
        ci_reliable=reps >= CI_RELIABLE_MIN_REPS,
    )


def _chunk_ranges(reps: int, workers: int) -> list[tuple[int, int]]:
    k = min(workers, reps)
    base, extra = divmod(reps, k)
    ranges, start = [], 0
    for i in range(k):
        stop = start + base + (1 if i < extra else 0)
        ranges.append((start, stop))
        start = stop
    return ranges


def _constant_bernoulli_p(decay: DecaySequence) -> float:
    if any(p != decay.terminal for p in decay.prefix):
        raise UnsupportedDecay(
            "exact evaluation supports bernoulli decay only with a constant "
            "availability probability"
        )
    return decay.terminal


def _expected_recovery_max(floor: float, past: list[float], p: float) -> float:
    """E[max(floor, max_k xi_k v_k)] for independent survival coins."""
    total = 0.0
    none_yet = 1.0
    for v in sorted(past, reverse=True):
        if v <= floor:
            break
        total += none_yet * p * v
        none_yet *= 1.0 - p
    return total + none_yet * floor


def _exact_stop_reward(observed, t: int, decay: DecaySequence, bern_p: float | None) -> float:
    x = observed[t - 1]
    if bern_p is not None:
        return _expected_recovery_max(x, list(observed[: t - 1]), bern_p)
    best = x
    for lag in range(1, t):
        best = max(best, decay_mod.evaluate(decay, lag, observed[t - 1 - lag]))
    return best


def _exact_end_reward(observed, decay: DecaySequence, bern_p: float | None) -> float:
    if bern_p is not None:
        return _expected_recovery_max(0.0, list(observed), bern_p)
    n = len(observed)
    best = 0.0
    for lag in range(1, n + 1):
        best = max(best, decay_mod.evaluate(decay, lag, observed[n - lag]))
    return best


def _enumeration_space(dists) -> int:
    space = 1
    for d in dists:
        space *= len(d.support)
    return space


def brute_force_value(inst: Instance, policy, decay: DecaySequence, order: str | None = None) -> float:
    """Exact expected reward by total enumeration.

    Sums probability x pathwise reward over the product outcome space
    (and over all n! arrival orders in the random-order model), with
    tie-break coins integrated analytically through branch weights.
    """
    order = order or inst.order
    dists = list(inst.iter_dists())
    n = len(dists)
    for d in dists:
        if d.kind not in ("point", "discrete"):
            raise UnsupportedDistribution(
                f"total enumeration needs finite support, got kind {d.kind!r}"
            )
    space = _enumeration_space(dists)
    if space > ENUMERATION_BUDGET:
        raise SpaceTooLarge(space, ENUMERATION_BUDGET)
    if order == "random" and n > RANDOM_ORDER_ENUM_MAX_N:
        raise SpaceTooLarge(space * math.factorial(n), ENUMERATION_BUDGET)

    bern_p = None
    if decay.kind == "bernoulli":
        bern_p = _constant_bernoulli_p(decay)

    # vectorized route for the common threshold + constant-fraction case;
    # bounded so the outcome matrix stays small, larger spaces stream below
    if isinstance(policy, ThresholdPolicy) and decay.kind == "gamma" and space <= 10**6:
        return _threshold_gamma_exact(inst, policy, decay.param, order)

    orders = list(permutations(range(n))) if order == "random" else [tuple(range(n))]
    weight_per_order = 1.0 / len(orders)
    full = frozenset(range(n))

    def contributions():
        for outcome in product(*[list(zip(d.support, d.probs)) for d in dists]):
            values = [v for v, _ in outcome]
            prob = math.prod(p for _, p in outcome)
            for perm in orders:
                observed = [values[i] for i in perm]
                acc = 0.0
                alive = 1.0
                running_max = 0.0
                remaining = full
                for t in range(1, n + 1):
                    x = observed[t - 1]
                    rem_after = remaining - {perm[t - 1]}
                    a = policy.stop_probability(t, x, running_max, n, rem_after)
                    if a > 0.0:
                        acc += alive * a * _exact_stop_reward(observed, t, decay, bern_p)
                        alive *= 1.0 - a
                        if alive == 0.0:
                            break
                    running_max = max(running_max, x)
                    remaining = rem_after
                if alive > 0.0:
                    acc += alive * _exact_end_reward(observed, decay, bern_p)
                yield prob * weight_per_order * acc

    return math.fsum(contributions())


def _threshold_gamma_exact(inst: Instance, policy: ThresholdPolicy, gamma: float, order: str) -> float:
    """Vectorized enumeration for threshold policies under gamma decay."""
    dists = list(inst.iter_dists())
    n = len(dists)
    theta, q = policy.theta, policy.tie_break_accept_prob
    outcomes = list(product(*[list(zip(d.support, d.probs)) for d in dists]))
    values = np.array([[v for v, _ in outcome] for outcome in outcomes])
    probs = np.array([math.prod(p for _, p in outcome) for outcome in outcomes])

    orders = list(permutations(range(n))) if order == "random" else [tuple(range(n))]
    totals = []
    for perm in orders:
        obs = values[:, perm]
        accept = (obs > theta).astype(float)
        if q > 0.0:
            accept += q * (obs == theta)
        alive = np.cumprod(1.0 - accept, axis=1)
        alive_before = np.hstack([np.ones((len(obs), 1)), alive[:, :-1]])
        max_excl = np.hstack(
            [np.zeros((len(obs), 1)), np.maximum.accumulate(obs, axis=1)[:, :-1]]
        )
        stop_reward = np.maximum(obs, gamma * max_excl)
        path_value = (alive_before * accept * stop_reward).sum(axis=1)
        path_value += alive[:, -1] * gamma * obs.max(axis=1)
        totals.append(float(probs @ path_value))
    return math.fsum(totals) / len(totals)


def empirical_cr_sweep(
    instance_for_gamma,
    policy_for_gamma,
    decay_for_gamma,
    gamma_grid,
    reps: int,
    seed: int,
    workers: int = 1,
) -> list[dict]:
    """One seeded report per gamma with the matching theory bounds.

    ``instance_for_gamma`` maps gamma to an Instance; ``policy_for_gamma``
    maps (gamma, instance) to a policy; ``decay_for_gamma`` maps gamma to
    a DecaySequence (a fixed sequence is also accepted).
    """
    rows = []
    for g in gamma_grid:
        inst = instance_for_gamma(g)
        policy = policy_for_gamma(g, inst)
        decay = decay_for_gamma(g) if callable(decay_for_gamma) else decay_for_gamma
        report = monte_carlo(inst, policy, decay, reps, seed, workers)
        lower, upper = theory_bounds_for_order(inst.order, g)
        rows.append(
            {"gamma": g, "report": report, "theory_lower": lower, "theory_upper": upper}
        )
    return rows


def theory_bounds_for_order(order: str, gamma: float) -> tuple[float, float]:
    if order == "adversarial":
        tight = theory.adversarial_bound(gamma)
        return tight, tight
    if order == "random":
        return theory.random_order_lower(gamma), theory.random_order_upper(gamma)
    return theory.random_order_lower(gamma), theory.iid_upper(gamma)


def report_csv_rows(rows) -> str:
    """CSV for sweep rows per the report schema, 15 significant digits."""
    lines = [REPORT_CSV_HEADER]
    for row in rows:
        rep: SimulationReport = row["report"]
        lines.append(
            ",".join(
                f"{v:.15g}" if isinstance(v, float) else str(v)
                for v in (
                    row["gamma"],
                    rep.mean_reward,
                    rep.expected_opt,
                    rep.ratio,
                    rep.ci_half_width,
                    rep.replications,
                    rep.seed,
                    row["theory_lower"],
                    row["theory_upper"],
                )
            )
        )
    return "\n".join(lines) + "\n"
