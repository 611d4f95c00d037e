"""Hard worst-case instance families and reduction transforms.

The three generators materialize the instances behind the upper bounds:

- ``adv_hard(gamma, eps)``: a sure value a = 1/(1 - (1-eps) gamma)
  followed by {1/eps w.p. eps, 0 otherwise}; every algorithm earns
  exactly a, the prophet earns 1 + (1-eps) a, and eps -> 0 pins the
  ratio to 1/(2-gamma).
- ``random_order_hard(n, a)``: n spikes {n w.p. 1/n^2, 0 otherwise}
  plus a sure value a, observed in uniformly random order.
- ``iid_hard(n, x, a)``: n IID draws from the three-point distribution
  {n w.p. 1/n^2, a w.p. x/n, 0 otherwise}.

The transforms interleave or append zero values (``zero_pad_*``) and
thin an IID distribution onto a longer horizon (``dilute_iid``), which
stretches the effective lag between meaningful observations; under any
decay sequence whose recovery fraction vanishes in the limit, ratios on
the padded instances collapse to the classical ones.  ``rescale``
multiplies all values by a positive factor, which leaves every
classical ratio unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import Distribution, Instance, discrete, point
from .errors import OrderMismatch, ParameterOutOfRange


@dataclass(frozen=True)
class HardFamilySpec:
    """A serializable description of one hard-family configuration.

    family "adv" takes (gamma, epsilon); "random_order" takes (n, a);
    "iid" takes (n, x, a).  build() validates through the generators.
    """

    family: str
    gamma: float | None = None
    epsilon: float | None = None
    n: int | None = None
    a: float | None = None
    x: float | None = None

    def build(self) -> Instance:
        if self.family == "adv":
            if self.gamma is None or self.epsilon is None:
                raise ParameterOutOfRange("adv family needs gamma and epsilon")
            return adv_hard(self.gamma, self.epsilon)
        if self.family == "random_order":
            if self.n is None or self.a is None:
                raise ParameterOutOfRange("random_order family needs n and a")
            return random_order_hard(self.n, self.a)
        if self.family == "iid":
            if self.n is None or self.x is None or self.a is None:
                raise ParameterOutOfRange("iid family needs n, x and a")
            return iid_hard(self.n, self.x, self.a)
        raise ParameterOutOfRange(f"unknown family: {self.family!r}")


def adv_hard(gamma: float, epsilon: float) -> Instance:
    """Two-step fixed-order instance with support {0, a, 1/eps}."""
    if not 0.0 <= gamma < 1.0:
        raise ParameterOutOfRange(f"gamma must lie in [0,1), got {gamma}")
    if not 0.0 < epsilon < 1.0 - gamma:
        raise ParameterOutOfRange(f"epsilon must lie in (0, 1-gamma), got {epsilon}")
    a = 1.0 / (1.0 - (1.0 - epsilon) * gamma)
    spike = discrete([0.0, 1.0 / epsilon], [1.0 - epsilon, epsilon])
    return Instance(order="adversarial", distributions=(point(a), spike))


def adv_hard_a(gamma: float, epsilon: float) -> float:
    """The sure first value of adv_hard (also its optimal reward)."""
    return 1.0 / (1.0 - (1.0 - epsilon) * gamma)


def random_order_hard(n: int, a: float) -> Instance:
    """n spike distributions plus one sure value a, random order."""
    if n < 2:
        raise ParameterOutOfRange(f"need n >= 2, got {n}")
    if not a > 0.0:
        raise ParameterOutOfRange(f"need a > 0, got {a}")
    spike = discrete([0.0, float(n)], [1.0 - 1.0 / n**2, 1.0 / n**2])
    return Instance(order="random", distributions=(spike,) * n + (point(a),))


def random_order_hard_a(gamma: float) -> float:
    """The sure value minimizing the hard-instance ratio at this gamma."""
    if not 0.0 <= gamma < 1.0:
        raise ParameterOutOfRange(f"gamma must lie in [0,1), got {gamma}")
    return math.sqrt((3.0 - gamma) / (1.0 - gamma)) - 1.0


def iid_hard(n: int, x: float, a: float) -> Instance:
    """n IID draws from the three-point distribution {0, a, n}."""
    if n < 2:
        raise ParameterOutOfRange(f"need n >= 2, got {n}")
    if not (x > 0.0 and a > 0.0):
        raise ParameterOutOfRange("need x > 0 and a > 0")
    p_top, p_mid = 1.0 / n**2, x / n
    if p_top + p_mid > 1.0:
        raise ParameterOutOfRange(f"x/n + 1/n^2 = {p_top + p_mid} exceeds 1")
    pairs = sorted([(0.0, 1.0 - p_mid - p_top), (float(a), p_mid), (float(n), p_top)])
    d = discrete([v for v, _ in pairs], [p for _, p in pairs])
    return Instance(order="iid", distributions=(d,), iid_count=n)


def iid_hard_params(gamma: float) -> tuple[float, float]:
    """The (x, a) pair matching the IID upper-bound curve at this gamma."""
    if not 0.0 <= gamma < 1.0:
        raise ParameterOutOfRange(f"gamma must lie in [0,1), got {gamma}")
    return 2.0, (1.0 - gamma / 2.0) / (1.0 - gamma)


def zero_pad_adversarial(inst: Instance, m: int) -> Instance:
    """Stretch a fixed-order instance to length m*n, the k-th original
    distribution landing at position k*m and zeros everywhere else."""
    if inst.order != "adversarial":
        raise OrderMismatch("zero_pad_adversarial needs an adversarial-order instance")
    if m < 1:
        raise ParameterOutOfRange(f"need m >= 1, got {m}")
    zero = point(0.0)
    padded: list[Distribution] = []
    for d in inst.distributions:
        padded.extend([zero] * (m - 1))
        padded.append(d)
    return Instance(order="adversarial", distributions=tuple(padded))


def zero_pad_random(inst: Instance, m: int) -> Instance:
    """Append m sure zeros to a random-order instance."""
    if inst.order != "random":
        raise OrderMismatch("zero_pad_random needs a random-order instance")
    if m < 0:
        raise ParameterOutOfRange(f"need m >= 0, got {m}")
    if m == 0:
        return inst
    return Instance(order="random", distributions=inst.distributions + (point(0.0),) * m)


def dilute_iid(d: Distribution, n: int, m: int) -> Instance:
    """m IID draws from the thinned mixture: 0 with probability 1 - n/m,
    a draw from d otherwise; the expected number of real draws stays n."""
    if d.kind not in ("point", "discrete"):
        raise ParameterOutOfRange("dilution needs a finite-support distribution")
    if not 1 <= n <= m:
        raise ParameterOutOfRange(f"need m >= n >= 1, got n={n}, m={m}")
    eps = n / m
    if eps == 1.0:
        mixture = d
    else:
        masses: dict[float, float] = {0.0: 1.0 - eps}
        for v, p in zip(d.support, d.probs):
            masses[v] = masses.get(v, 0.0) + eps * p
        support = sorted(masses)
        mixture = discrete(support, [masses[v] for v in support])
    return Instance(order="iid", distributions=(mixture,), iid_count=m)


def rescale(inst: Instance, r: float) -> Instance:
    """Multiply every value in the instance by r > 0."""
    if not r > 0.0:
        raise ParameterOutOfRange(f"need r > 0, got {r}")
    return Instance(
        order=inst.order,
        distributions=tuple(d.rescaled(r) for d in inst.distributions),
        iid_count=inst.iid_count,
    )
