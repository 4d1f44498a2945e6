"""Bernoulli energy harvesting and the relay transmit-power chain.

Relay nodes either transmit at the fixed supply power or, when their
harvest indicator fires, recycle the energy captured from the previous
hop.  Under time-switching (BTEH) a node diverts a fraction ``alpha`` of
its receive slot to harvesting; under power-splitting (BPEH) it taps a
fraction ``beta`` of the received power.  Either way the harvested
transmit power is the previous hop's received power scaled by a
per-architecture gain factor, which makes the power at hop ``t`` a product
over the run of consecutive harvesting nodes behind it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import LinkBudget
from .geometry import as_generator

ARCHITECTURES = ("BTEH", "BPEH")


@dataclass(frozen=True)
class EhPolicy:
    """Harvesting architecture and per-node harvest probabilities.

    ``rho[t-1]`` is the probability node ``t`` harvests (1-indexed nodes).
    The chain endpoints never harvest: the source has no upstream hop and
    the destination never transmits, so ``rho`` is forced to zero there.
    """

    architecture: str
    rho: tuple
    alpha: float = 0.2
    beta: float = 0.8
    eta: float = 1.0

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(
                f"architecture must be one of {ARCHITECTURES}, got {self.architecture!r}")
        rho = tuple(float(r) for r in self.rho)
        if len(rho) < 2:
            raise ValueError("need at least a source and a destination node")
        if any(not 0.0 <= r <= 1.0 for r in rho):
            raise ValueError(f"harvest probabilities must lie in [0,1], got {rho}")
        rho = (0.0,) + rho[1:-1] + (0.0,)
        object.__setattr__(self, "rho", rho)
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0,1), got {self.alpha}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must lie in [0,1), got {self.beta}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0,1], got {self.eta}")

    @property
    def node_count(self) -> int:
        return len(self.rho)

    def rho1(self, t: int) -> float:
        """Probability node t harvests."""
        return self.rho[t - 1]

    def rho0(self, t: int) -> float:
        """Probability node t runs on supply power."""
        return 1.0 - self.rho[t - 1]

    @property
    def is_harvesting(self) -> bool:
        return any(r > 0.0 for r in self.rho)


def uniform_policy(architecture: str, node_count: int, rho: float,
                   alpha: float = 0.2, beta: float = 0.8,
                   eta: float = 1.0) -> EhPolicy:
    """Policy with one interior harvest probability for every relay."""
    if node_count < 2:
        raise ValueError("need at least a source and a destination node")
    vector = (0.0,) + (rho,) * (node_count - 2) + (0.0,)
    return EhPolicy(architecture=architecture, rho=vector, alpha=alpha,
                    beta=beta, eta=eta)


@dataclass(frozen=True)
class EhRealization:
    """Harvest indicator draws for nodes 2..M (node 1 never harvests)."""

    indicators: tuple

    def __post_init__(self):
        ind = tuple(int(i) for i in self.indicators)
        if any(i not in (0, 1) for i in ind):
            raise ValueError("indicators must be 0/1 bits")
        object.__setattr__(self, "indicators", ind)

    def indicator(self, node: int) -> int:
        if node == 1:
            return 0
        return self.indicators[node - 2]


def omega_factor(t: int, policy: EhPolicy, node_count: int) -> float:
    """Power gain applied per harvested hop.

    Time-switching spreads one receive slot's harvest over the shorter
    transmit window, giving ``(M-1) alpha eta / (1 - alpha)``;
    power-splitting simply passes ``beta eta`` through.
    """
    if policy.architecture == "BTEH":
        if policy.alpha >= 1.0:
            raise ValueError("alpha = 1 leaves no transmit window")
        return (node_count - 1) * policy.alpha * policy.eta / (1.0 - policy.alpha)
    return policy.beta * policy.eta


def sample_eh_process(policy: EhPolicy, rng_seed) -> EhRealization:
    rng = as_generator(rng_seed)
    draws = rng.random(policy.node_count - 1)
    bits = tuple(int(u < policy.rho[node - 1])
                 for node, u in zip(range(2, policy.node_count + 1), draws))
    return EhRealization(indicators=bits)


def transmit_power(t: int, realization: EhRealization, hop_gains,
                   policy: EhPolicy, budget: LinkBudget) -> float:
    """Transmit power of node t, resolving the harvest chain behind it.

    ``hop_gains[j]`` is the channel gain of the link received by node
    ``j + 2`` (the gain the node would harvest from).  A node with a zero
    indicator transmits at the supply power; a harvesting node relays the
    accumulated product ``P0 * prod(Omega_i * gain_i)`` back to the most
    recent non-harvesting node, which always exists because node 1 never
    harvests.
    """
    m = policy.node_count
    if not 1 <= t <= m - 1:
        raise ValueError(f"transmitter index {t} outside 1..{m - 1}")
    if realization.indicator(t) == 0:
        return budget.P0
    tau = t - 1
    while realization.indicator(tau) == 1:
        tau -= 1
    power = budget.P0
    for i in range(tau + 1, t + 1):
        gain = hop_gains[i - 2]
        if gain <= 0.0:
            raise ValueError(f"hop gain for node {i} must be positive, got {gain}")
        power *= omega_factor(i, policy, m) * gain
    return power


def transmit_power_recursive(t: int, realization: EhRealization, hop_gains,
                             policy: EhPolicy, budget: LinkBudget) -> float:
    """Same chain written as the step-by-step recursion (cross-check route)."""
    m = policy.node_count
    if not 1 <= t <= m - 1:
        raise ValueError(f"transmitter index {t} outside 1..{m - 1}")
    power = budget.P0
    for i in range(2, t + 1):
        if realization.indicator(i) == 1:
            power = omega_factor(i, policy, m) * hop_gains[i - 2] * power
        else:
            power = budget.P0
    return power
