"""Closed-form performance layer: thresholds, mixture CCDFs, outage, throughput.

The received SNR on any link is a product of independent pieces: the
supply-or-harvested power chain behind the transmitter, one exponential
fade, and (for device links) a random-distance path gain.  Conditioning on
the run length of consecutive harvesting nodes turns every distribution
into a finite mixture whose branches are the product-distribution kernels
from :mod:`nomarelay.specfun`.  Outage assembles those mixtures in
CDF-deficit space so small probabilities keep relative accuracy, and the
small-argument residue expansions provide the high-power asymptotes and
diversity slopes.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import (
    FittedGainDistribution,
    LinkBudget,
    pathloss_linear,
)
from .geometry import log_null_probability
from .network import NetworkTopology, Scheme
from .power import EhPolicy, omega_factor
from .specfun import (
    annulus_kernel,
    annulus_kernel_deficit,
    lower_incomplete_gamma,
    nearest_kernel,
    nearest_kernel_deficit,
    prod_exp_ccdf,
    prod_exp_cdf,
    residue_asymptote_cdf,
)

logger = logging.getLogger(__name__)

CLAMP_TOLERANCE = 1e-6


class ProbabilityBoundError(RuntimeError):
    """A computed probability left [0,1] by more than the clamp tolerance."""


def _clamp(p: float, label: str) -> float:
    if not math.isfinite(p) or p < -CLAMP_TOLERANCE or p > 1.0 + CLAMP_TOLERANCE:
        raise ProbabilityBoundError(f"{label} evaluated to {p!r}")
    if p < 0.0 or p > 1.0:
        logger.debug("clamped %s by %.3e", label, max(-p, p - 1.0))
    return min(max(p, 0.0), 1.0)


# ---------------------------------------------------------------------------
# allocation plans and rate policy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AllocationPlan:
    """Superposition power shares and target rates.

    ``device_shares[t-1]`` lists the com power shares of slot ``t`` in
    ascending order (weakest-allocated device first); together with the
    relayed-message share they sum to one.  ``device_rates`` are the com
    targets, ``nearest_rates`` the qom target for the single served device.
    """

    relay_share: float
    device_shares: tuple
    relay_rate: float
    device_rates: tuple
    nearest_rates: tuple

    def __post_init__(self):
        if not 0.0 < self.relay_share <= 1.0:
            raise ValueError(f"relay share must lie in (0,1], got {self.relay_share}")
        shares = tuple(tuple(float(p) for p in row) for row in self.device_shares)
        rates = tuple(tuple(float(r) for r in row) for row in self.device_rates)
        nearest = tuple(float(r) for r in self.nearest_rates)
        if len(shares) != len(rates) or len(shares) != len(nearest):
            raise ValueError("per-slot plan fields must align")
        for row in shares:
            if any(p < 0.0 for p in row):
                raise ValueError("power shares must be non-negative")
            if any(b < a for a, b in zip(row, row[1:])):
                raise ValueError("device shares must be ascending")
            if abs(self.relay_share + sum(row) - 1.0) > 1e-9:
                raise ValueError("shares must sum to one per slot")
        if self.relay_rate < 0.0 or any(r < 0.0 for row in rates for r in row) \
                or any(r < 0.0 for r in nearest):
            raise ValueError("target rates must be non-negative")
        object.__setattr__(self, "device_shares", shares)
        object.__setattr__(self, "device_rates", rates)
        object.__setattr__(self, "nearest_rates", nearest)

    @property
    def slot_count(self) -> int:
        return len(self.device_shares)

    def subarea_count(self, t: int) -> int:
        return len(self.device_shares[t - 1])


def _time_scale(policy: EhPolicy) -> float:
    """Fraction of a slot carrying information in the worst harvest state."""
    if policy.architecture == "BTEH" and policy.is_harvesting:
        return 1.0 - policy.alpha
    return 1.0


def mrtr(plan: AllocationPlan, policy: EhPolicy, node_count: int, signal):
    """Largest target rate that keeps the decode event possible.

    ``signal`` selects the message: ``"relay"`` for the relayed message,
    ``("device", t, n)`` for the com device in subarea ``n`` of slot ``t``,
    ``"nearest"`` for the qom-served device.  Returns ``None`` where no
    finite ceiling exists: full relay share (nothing left to interfere), a
    subarea-1 device (all interference cancelled by the SIC order), or the
    qom device (sole superposed message).
    """
    scale = _time_scale(policy) / (node_count - 1)
    if signal == "relay":
        if plan.relay_share >= 1.0:
            return None
        ratio = plan.relay_share / (1.0 - plan.relay_share)
        return scale * math.log2(1.0 + ratio)
    if signal == "nearest":
        return None
    kind, t, n = signal
    if kind != "device":
        raise ValueError(f"unknown signal {signal!r}")
    if n == 1:
        return None
    shares = plan.device_shares[t - 1]
    interference = sum(shares[:n - 1])
    return scale * math.log2(1.0 + shares[n - 1] / interference)


def default_allocation(topology: NetworkTopology, policy: EhPolicy,
                       relay_share: float = 0.8, rate_fraction: float = 0.5,
                       rate_cap: float = 0.75) -> AllocationPlan:
    """Geometric com shares plus the half-MRTR-capped rate rule.

    Device shares follow powers of two (weakest first) normalized to the
    non-relayed budget, which respects the ascending-share constraint.
    Every target rate is ``min(rate_fraction * MRTR, rate_cap)``; signals
    without a finite MRTR take the cap.
    """
    m = topology.node_count
    shares = []
    for kt in topology.subarea_counts:
        raw = [2.0 ** (k - 1) for k in range(1, kt + 1)]
        total = sum(raw)
        shares.append(tuple((1.0 - relay_share) * w / total for w in raw))
    plan = AllocationPlan(
        relay_share=relay_share,
        device_shares=tuple(shares),
        relay_rate=0.0,
        device_rates=tuple(tuple(0.0 for _ in row) for row in shares),
        nearest_rates=(0.0,) * topology.hop_count,
    )

    def pick(signal):
        ceiling = mrtr(plan, policy, m, signal)
        if ceiling is None:
            return rate_cap
        return min(rate_fraction * ceiling, rate_cap)

    device_rates = tuple(
        tuple(pick(("device", t, n)) for n in range(1, len(row) + 1))
        for t, row in enumerate(plan.device_shares, start=1))
    return AllocationPlan(
        relay_share=relay_share,
        device_shares=plan.device_shares,
        relay_rate=pick("relay"),
        device_rates=device_rates,
        nearest_rates=(pick("nearest"),) * topology.hop_count,
    )


def baseline_plan(reference: AllocationPlan, hop_count: int) -> AllocationPlan:
    """Conventional-relaying plan: full share on the relayed message.

    The target rate is inherited from the reference plan so the baseline
    competes at the same rate the harvesting schemes aim for.
    """
    return AllocationPlan(
        relay_share=1.0,
        device_shares=((),) * hop_count,
        relay_rate=reference.relay_rate,
        device_rates=((),) * hop_count,
        nearest_rates=(0.0,) * hop_count,
    )


# ---------------------------------------------------------------------------
# decoding thresholds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdSet:
    """SNR thresholds; +inf marks a decode event that cannot happen.

    ``relay[i][j]``: threshold on the hop SNR given harvest state ``i`` of
    the receiving node and device-activity state ``j`` of the transmitter's
    disk.  ``com_device[t-1][k-1]`` and ``qom_device[t-1]`` hold the
    ``(i=0, i=1)`` threshold pair for the device served in slot ``t``;
    power-splitting leaves device decoding untouched, so there the two
    entries coincide.
    """

    relay: tuple
    com_device: tuple
    qom_device: tuple


def _rate_threshold(rate: float, node_count: int, time_scale: float) -> float:
    return 2.0 ** ((node_count - 1) * rate / time_scale) - 1.0


def _noma_threshold(tau0: float, relay_share: float) -> float:
    """Invert the relayed-message SINR through the superposed interference."""
    denom = 1.0 - (tau0 + 1.0) * (1.0 - relay_share)
    if denom <= 0.0:
        return math.inf
    return tau0 / denom


def decoding_thresholds(plan: AllocationPlan, policy: EhPolicy,
                        node_count: int, scheme: Scheme) -> ThresholdSet:
    if policy.node_count != node_count:
        raise ValueError("policy and node count disagree")
    if scheme.harvesting is not None and scheme.harvesting != policy.architecture:
        raise ValueError(f"{scheme.value} expects {scheme.harvesting}")
    bteh = policy.architecture == "BTEH"
    alpha, beta = policy.alpha, policy.beta

    def relay_threshold(i: int, j: int) -> float:
        if bteh:
            scale = 1.0 - alpha if i == 1 else 1.0
            tau0 = _rate_threshold(plan.relay_rate, node_count, scale)
            return tau0 if j == 0 else _noma_threshold(tau0, plan.relay_share)
        tau0 = _rate_threshold(plan.relay_rate, node_count, 1.0)
        base = tau0 if j == 0 else _noma_threshold(tau0, plan.relay_share)
        return base / (1.0 - beta) if i == 1 else base

    relay = tuple(tuple(relay_threshold(i, j) for j in (0, 1)) for i in (0, 1))

    def device_rate_threshold(rate: float, i: int) -> float:
        # harvesting at the next relay compresses the information window
        # under time-switching; power-splitting does not touch the device
        scale = 1.0 - alpha if (bteh and i == 1) else 1.0
        return _rate_threshold(rate, node_count, scale)

    def device_relayed_threshold(i: int) -> float:
        # the device must also peel off the relayed message, at its own
        # (split-free) receive chain
        tau0 = device_rate_threshold(plan.relay_rate, i)
        return _noma_threshold(tau0, plan.relay_share)

    def com_pair(t: int, k: int):
        shares = plan.device_shares[t - 1]
        rates = plan.device_rates[t - 1]
        out = []
        for i in (0, 1):
            best = device_relayed_threshold(i)
            for n in range(k, len(shares) + 1):
                tau0 = device_rate_threshold(rates[n - 1], i)
                denom = shares[n - 1] - tau0 * sum(shares[:n - 1])
                best = max(best, tau0 / denom if denom > 0.0 else math.inf)
            out.append(best)
        return tuple(out)

    def qom_pair(t: int):
        own_share = 1.0 - plan.relay_share
        out = []
        for i in (0, 1):
            tau0 = device_rate_threshold(plan.nearest_rates[t - 1], i)
            own = tau0 / own_share if own_share > 0.0 else math.inf
            out.append(max(device_relayed_threshold(i), own))
        return tuple(out)

    com_device = tuple(
        tuple(com_pair(t, k) for k in range(1, len(plan.device_shares[t - 1]) + 1))
        for t in range(1, plan.slot_count + 1))
    qom_device = tuple(qom_pair(t) for t in range(1, plan.slot_count + 1))
    return ThresholdSet(relay=relay, com_device=com_device, qom_device=qom_device)


# ---------------------------------------------------------------------------
# mixture CCDFs of the normalized received powers
# ---------------------------------------------------------------------------

def _chain_weights(t: int, policy: EhPolicy):
    """(tau, weight) for the harvest-run states of transmitter t.

    Branch ``tau`` means node ``tau`` ran on supply power and every node
    ``tau+1..t`` harvested; the weights sum to one.
    """
    out = []
    for tau in range(1, t + 1):
        w = policy.rho0(tau)
        for j in range(tau + 1, t + 1):
            w *= policy.rho1(j)
        out.append((tau, w))
    return out


def _xi_product(tau: int, t: int, topology: NetworkTopology, policy: EhPolicy,
                budget: LinkBudget) -> float:
    """Mean-gain product of the harvested chain tau+1..t."""
    xi = 1.0
    for i in range(tau + 1, t + 1):
        xi *= omega_factor(i, policy, topology.node_count) \
            * pathloss_linear(topology.hop_distances[i - 2], budget)
    return xi


def _check_slot(t: int, topology: NetworkTopology) -> None:
    if not 1 <= t <= topology.hop_count:
        raise ValueError(f"slot {t} outside 1..{topology.hop_count}")


def ccdf_X(x: float, t: int, topology: NetworkTopology, policy: EhPolicy,
           budget: LinkBudget) -> float:
    """Survival function of the hop SNR received by node t+1."""
    return _mix_X(x, t, topology, policy, budget, deficit=False)


def cdf_X(x: float, t: int, topology: NetworkTopology, policy: EhPolicy,
          budget: LinkBudget) -> float:
    return _mix_X(x, t, topology, policy, budget, deficit=True)


def _mix_X(x, t, topology, policy, budget, deficit):
    _check_slot(t, topology)
    if x <= 0.0:
        raise ValueError(f"argument must be positive, got {x}")
    ell_next = pathloss_linear(topology.hop_distances[t - 1], budget)
    total = 0.0
    for tau, w in _chain_weights(t, policy):
        if w == 0.0:
            continue
        means = [omega_factor(i, policy, topology.node_count)
                 * pathloss_linear(topology.hop_distances[i - 2], budget)
                 for i in range(tau + 1, t + 1)]
        means.append(ell_next)
        n = t - tau + 1
        value = (prod_exp_cdf if deficit else prod_exp_ccdf)(
            x / budget.gamma_bar0, n, means)
        total += w * value
    return _clamp(total, f"{'cdf' if deficit else 'ccdf'}_X(t={t})")


def ccdf_Y(y: float, t: int, k: int, topology: NetworkTopology, policy: EhPolicy,
           budget: LinkBudget) -> float:
    """Survival function of the com device SNR in subarea k of slot t."""
    return _mix_Y(y, t, k, topology, policy, budget, deficit=False)


def cdf_Y(y: float, t: int, k: int, topology: NetworkTopology, policy: EhPolicy,
          budget: LinkBudget) -> float:
    return _mix_Y(y, t, k, topology, policy, budget, deficit=True)


def _mix_Y(y, t, k, topology, policy, budget, deficit):
    _check_slot(t, topology)
    kt = topology.subarea_counts[t - 1]
    if not 1 <= k <= kt:
        raise ValueError(f"subarea {k} outside 1..{kt}")
    if y <= 0.0:
        raise ValueError(f"argument must be positive, got {y}")
    eps = budget.epsilon
    c_exp = 2.0 / eps
    chi_hi = k * k / (2.0 * k - 1.0)
    chi_lo = (k - 1.0) ** 2 / (2.0 * k - 1.0)
    ell_edge = pathloss_linear(topology.disk_radii[t - 1], budget)
    kernel = annulus_kernel_deficit if deficit else annulus_kernel
    total = 0.0
    for tau, w in _chain_weights(t, policy):
        if w == 0.0:
            continue
        v = t - tau
        c_tau = y / (budget.gamma_bar0 * ell_edge
                     * _xi_product(tau, t, topology, policy, budget))
        term = chi_hi * kernel(c_tau * (k / kt) ** eps, v, c_exp)
        if k > 1:
            term -= chi_lo * kernel(c_tau * ((k - 1) / kt) ** eps, v, c_exp)
        total += w * c_exp * term
    return _clamp(total, f"{'cdf' if deficit else 'ccdf'}_Y(t={t},k={k})")


def ccdf_Z(z: float, t: int, topology: NetworkTopology, policy: EhPolicy,
           budget: LinkBudget, fit: FittedGainDistribution) -> float:
    """Survival function of the qom (nearest-device) SNR in slot t."""
    return _mix_Z(z, t, topology, policy, budget, fit, deficit=False)


def cdf_Z(z: float, t: int, topology: NetworkTopology, policy: EhPolicy,
          budget: LinkBudget, fit: FittedGainDistribution) -> float:
    return _mix_Z(z, t, topology, policy, budget, fit, deficit=True)


def _mix_Z(z, t, topology, policy, budget, fit, deficit):
    _check_slot(t, topology)
    if z <= 0.0:
        raise ValueError(f"argument must be positive, got {z}")
    gamma_m = math.gamma(fit.m)
    kernel = nearest_kernel_deficit if deficit else nearest_kernel
    total = 0.0
    for tau, w in _chain_weights(t, policy):
        if w == 0.0:
            continue
        v = t - tau
        scale = budget.gamma_bar0 * fit.mu \
            * _xi_product(tau, t, topology, policy, budget)
        total += w / gamma_m * kernel((z / scale) ** fit.theta, v, fit.theta, fit.m)
    return _clamp(total, f"{'cdf' if deficit else 'ccdf'}_Z(t={t})")


# ---------------------------------------------------------------------------
# high-power asymptotes
# ---------------------------------------------------------------------------

def annulus_small_gain_coefficient(k: int, kt: int, eps: float) -> float:
    """Leading slope constant of the subarea-k gain CDF near zero."""
    c = 2.0 / eps
    chi_hi = k * k / (2.0 * k - 1.0)
    chi_lo = (k - 1.0) ** 2 / (2.0 * k - 1.0)
    return c / (c + 1.0) * (chi_hi * (k / kt) ** eps - chi_lo * ((k - 1) / kt) ** eps)


def nearest_small_gain_coefficient(density: float, radius: float,
                                   eps: float) -> float:
    """Leading slope constant of the nearest-device gain CDF near zero."""
    a = math.pi * density * radius**2
    if a <= 0.0:
        raise ValueError("needs a positive active density")
    return a ** (-eps / 2.0) * lower_incomplete_gamma(eps / 2.0 + 1.0, a) \
        / -math.expm1(-a)


def asymptotic_cdf_X(x: float, t: int, topology: NetworkTopology,
                     policy: EhPolicy, budget: LinkBudget) -> float:
    """Residue-series approximation of cdf_X, accurate at high power."""
    return _asymptotic_mix(x, t, topology, policy, budget,
                           pathloss_linear(topology.hop_distances[t - 1], budget),
                           1.0, "X")


def asymptotic_cdf_Y(y: float, t: int, k: int, topology: NetworkTopology,
                     policy: EhPolicy, budget: LinkBudget) -> float:
    coeff = annulus_small_gain_coefficient(k, topology.subarea_counts[t - 1],
                                           budget.epsilon)
    return _asymptotic_mix(y, t, topology, policy, budget,
                           pathloss_linear(topology.disk_radii[t - 1], budget),
                           coeff, "Y")


def asymptotic_cdf_Z(z: float, t: int, topology: NetworkTopology,
                     policy: EhPolicy, budget: LinkBudget) -> float:
    coeff = nearest_small_gain_coefficient(topology.density_active,
                                           topology.disk_radii[t - 1],
                                           budget.epsilon)
    return _asymptotic_mix(z, t, topology, policy, budget,
                           pathloss_linear(topology.disk_radii[t - 1], budget),
                           coeff, "Z")


def _asymptotic_mix(x, t, topology, policy, budget, ell, coeff, label):
    _check_slot(t, topology)
    if x <= 0.0:
        raise ValueError(f"argument must be positive, got {x}")
    total = 0.0
    for tau, w in _chain_weights(t, policy):
        if w == 0.0:
            continue
        scaled = coeff * x / (budget.gamma_bar0 * ell
                              * _xi_product(tau, t, topology, policy, budget))
        # branches still outside their small-argument regime saturate at
        # certain outage instead of overshooting
        term = residue_asymptote_cdf(scaled, t - tau)
        total += w * min(max(term, 0.0), 1.0)
    return _clamp(total, f"asymptotic_cdf_{label}(t={t})")


# ---------------------------------------------------------------------------
# outage probabilities
# ---------------------------------------------------------------------------

def _deficit_at(threshold: float, evaluate) -> float:
    """CDF deficit at a threshold, honoring the +inf / degenerate corners."""
    if threshold <= 0.0:
        return 0.0
    if math.isinf(threshold):
        return 1.0
    return evaluate(threshold)


def op_typeI(t: int, scheme: Scheme, topology: NetworkTopology,
             policy: EhPolicy, budget: LinkBudget, plan: AllocationPlan,
             asymptotic: bool = False) -> float:
    """Outage of the relayed message at the receiver of slot t.

    Mixes the hop-SNR CDF over the receiver's harvest state and the
    transmitter disk's device-activity state; identical for com and qom
    pairing because the relayed message sees the same total interference
    share either way.
    """
    thresholds = decoding_thresholds(plan, policy, topology.node_count, scheme)
    log_idle = log_null_probability(topology.density_active,
                                    topology.disk_radii[t - 1])
    iota = (math.exp(log_idle), -math.expm1(log_idle))
    rho = (policy.rho0(t + 1), policy.rho1(t + 1))

    if asymptotic:
        def evaluate(x):
            return asymptotic_cdf_X(x, t, topology, policy, budget)
    else:
        def evaluate(x):
            return cdf_X(x, t, topology, policy, budget)

    op = 0.0
    for i in (0, 1):
        if rho[i] == 0.0:
            continue
        for j in (0, 1):
            if iota[j] == 0.0:
                continue
            op += rho[i] * iota[j] * _deficit_at(thresholds.relay[i][j], evaluate)
    return _clamp(op, f"op_typeI(t={t})")


def op_typeII_com(t: int, k: int, scheme: Scheme, topology: NetworkTopology,
                  policy: EhPolicy, budget: LinkBudget, plan: AllocationPlan,
                  asymptotic: bool = False) -> float:
    """Outage of the com device in subarea k of slot t (given it is served)."""
    thresholds = decoding_thresholds(plan, policy, topology.node_count, scheme)
    rho = (policy.rho0(t + 1), policy.rho1(t + 1))

    if asymptotic:
        def evaluate(y):
            return asymptotic_cdf_Y(y, t, k, topology, policy, budget)
    else:
        def evaluate(y):
            return cdf_Y(y, t, k, topology, policy, budget)

    op = 0.0
    for i in (0, 1):
        if rho[i] == 0.0:
            continue
        op += rho[i] * _deficit_at(thresholds.com_device[t - 1][k - 1][i], evaluate)
    return _clamp(op, f"op_typeII_com(t={t},k={k})")


def op_typeII_qom(t: int, scheme: Scheme, topology: NetworkTopology,
                  policy: EhPolicy, budget: LinkBudget, plan: AllocationPlan,
                  fit: Optional[FittedGainDistribution] = None,
                  asymptotic: bool = False) -> float:
    """Outage of the nearest served device in slot t (given one exists)."""
    thresholds = decoding_thresholds(plan, policy, topology.node_count, scheme)
    rho = (policy.rho0(t + 1), policy.rho1(t + 1))

    if asymptotic:
        def evaluate(z):
            return asymptotic_cdf_Z(z, t, topology, policy, budget)
    else:
        if fit is None:
            raise ValueError("exact qom outage needs the nearest-gain fit")

        def evaluate(z):
            return cdf_Z(z, t, topology, policy, budget, fit)

    op = 0.0
    for i in (0, 1):
        if rho[i] == 0.0:
            continue
        op += rho[i] * _deficit_at(thresholds.qom_device[t - 1][i], evaluate)
    return _clamp(op, f"op_typeII_qom(t={t})")


def _success_product(ops) -> float:
    log_success = sum(math.log1p(-min(op, 1.0)) if op < 1.0 else -math.inf
                      for op in ops)
    return -math.expm1(log_success) if math.isfinite(log_success) else 1.0


def e2e_op(node, scheme: Scheme, topology: NetworkTopology, policy: EhPolicy,
           budget: LinkBudget, plan: AllocationPlan,
           fits: Optional[tuple] = None, asymptotic: bool = False) -> float:
    """End-to-end outage under the rare-harvest product approximation.

    ``node`` is ``"destination"`` for the relayed message, or ``(t, k)``
    for the device served in slot ``t`` (``k=None`` selects the qom
    device).  A device is reached once its slot's transmitter holds the
    message, so its chain covers hops 1..t-1 plus the device's own
    decode; the slot's forward hop is a separate event.
    """
    hop_ops = {}

    def hop(t):
        if t not in hop_ops:
            hop_ops[t] = op_typeI(t, scheme, topology, policy, budget, plan,
                                  asymptotic=asymptotic)
        return hop_ops[t]

    if node == "destination":
        return _clamp(_success_product(hop(t) for t in range(1, topology.hop_count + 1)),
                      "e2e_op(destination)")
    t, k = node
    if k is None:
        fit = fits[t - 1] if fits is not None else None
        device = op_typeII_qom(t, scheme, topology, policy, budget, plan,
                               fit=fit, asymptotic=asymptotic)
    else:
        device = op_typeII_com(t, k, scheme, topology, policy, budget, plan,
                               asymptotic=asymptotic)
    chain = [hop(i) for i in range(1, t)] + [device]
    return _clamp(_success_product(chain), f"e2e_op(t={t},k={k})")


# ---------------------------------------------------------------------------
# throughput and energy efficiency
# ---------------------------------------------------------------------------

def sum_throughput(plan: AllocationPlan, destination_e2e: float,
                   device_e2e: tuple, pairing: Optional[str],
                   node_count: int) -> float:
    """Aggregate goodput per block, normalized by the slot count.

    ``device_e2e[t-1]`` lists the end-to-end outage of every device served
    in slot ``t`` (com: one per subarea, in subarea order; qom: a single
    entry; baseline: empty).
    """
    slots = node_count - 1
    total = plan.relay_rate * (1.0 - destination_e2e)
    for t, ops in enumerate(device_e2e, start=1):
        if pairing == "com":
            rates = plan.device_rates[t - 1]
        elif pairing == "qom":
            rates = (plan.nearest_rates[t - 1],)
        else:
            rates = ()
        if len(ops) != len(rates):
            raise ValueError(f"slot {t}: {len(ops)} outage values for "
                             f"{len(rates)} served devices")
        total += sum(r * (1.0 - op) for r, op in zip(rates, ops))
    return total / slots


def energy_efficiency(throughput: float, budget: LinkBudget, policy: EhPolicy,
                      bandwidth_hz: float):
    """(EE, consumed supply power): harvested hops cost no supply power."""
    if bandwidth_hz <= 0.0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth_hz}")
    p_tol = budget.P0 * sum(policy.rho0(j)
                            for j in range(1, policy.node_count))
    return bandwidth_hz * throughput / p_tol, p_tol


# ---------------------------------------------------------------------------
# diversity order
# ---------------------------------------------------------------------------

def diversity_order_estimate(p0_dbm, op_values, floor: float = 1e-290) -> float:
    """Negative log-log outage slope over the last decade of transmit SNR.

    Points at or below the numeric floor are excluded (reported via a
    warning); at least four usable points must remain in the top 10 dB.
    """
    p0 = np.asarray(p0_dbm, dtype=float)
    ops = np.asarray(op_values, dtype=float)
    if p0.shape != ops.shape:
        raise ValueError("grid and outage arrays must align")
    usable = np.isfinite(ops) & (ops > floor)
    if not np.all(usable):
        warnings.warn(f"excluded {int((~usable).sum())} outage points at the "
                      "numeric floor", RuntimeWarning)
    p0, ops = p0[usable], ops[usable]
    if p0.size:
        window = p0 >= p0.max() - 10.0
        p0, ops = p0[window], ops[window]
    if p0.size < 4:
        raise ValueError("need at least four usable points in the last decade")
    slope = np.polyfit(p0 / 10.0, np.log10(ops), 1)[0]
    return -slope
