"""Exact-event simulator used as ground truth for the closed-form layer.

Every random element of one relaying block is drawn explicitly - harvest
indicators, device activity, pairing distances, fades - and decode events
come from the instantaneous rate formulas, never from the analytic
thresholds.  Trials are vectorized in fixed-size blocks; block ``b`` of a
run draws from its own counter-derived stream, so estimates are
bit-identical however the blocks are distributed over workers, and a
shorter run is a prefix of a longer one with the same seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel import pathloss_linear
from .geometry import as_generator, log_null_probability
from .network import Scenario
from .power import omega_factor

BLOCK_SIZE = 1 << 16
_CI_FACTOR = 1.96
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class Estimate:
    mean: float
    half_width: float
    trials: int

    @classmethod
    def from_binomial(cls, successes: int, trials: int) -> "Estimate":
        if trials <= 0:
            raise ValueError("estimate needs at least one trial")
        p = successes / trials
        return cls(mean=p,
                   half_width=_CI_FACTOR * math.sqrt(p * (1.0 - p) / trials),
                   trials=trials)

    @classmethod
    def from_moments(cls, total: float, total_sq: float, trials: int) -> "Estimate":
        if trials <= 0:
            raise ValueError("estimate needs at least one trial")
        mean = total / trials
        var = max(total_sq / trials - mean * mean, 0.0)
        if trials > 1:
            var *= trials / (trials - 1)
        return cls(mean=mean,
                   half_width=_CI_FACTOR * math.sqrt(var / trials),
                   trials=trials)


@dataclass(frozen=True)
class TrialOutcome:
    """Fully resolved single relaying block.

    ``device_rates``/``device_success`` hold one entry per served device
    of each slot (com: subarea order; qom: the nearest device; baseline:
    empty).  A device success bit requires its whole SIC chain, so it can
    be False even when the own-message rate clears its target.
    """

    eh_indicators: tuple
    device_present: tuple
    powers_w: tuple
    hop_rates: tuple
    hop_success: tuple
    device_rates: tuple
    device_success: tuple


class _Block:
    """Raw per-trial arrays for one simulated block."""

    __slots__ = ("n", "indicators", "active", "com_present", "powers",
                 "hop_snr", "hop_rates", "hop_ok", "device_snr",
                 "device_rates", "device_ok", "prefix_ok", "msg_ok",
                 "supply_units", "throughput")

    def __init__(self, **kw):
        for name in self.__slots__:
            setattr(self, name, kw[name])


def _simulate_block(scenario: Scenario, rng: np.random.Generator, n: int,
                    empty_annulus: str = "resample") -> _Block:
    """Draw and resolve ``n`` independent relaying blocks.

    The draw order is part of the determinism contract: harvest
    indicators, disk activity, hop fades, then per-slot device geometry
    and fades.
    """
    if empty_annulus not in ("resample", "skip"):
        raise ValueError(f"unknown empty-annulus mode {empty_annulus!r}")
    topo, policy, plan = scenario.topology, scenario.policy, scenario.plan
    budget, scheme = scenario.budget, scenario.scheme
    m, hops = topo.node_count, topo.hop_count
    pairing = scheme.pairing if scheme.serves_devices else None
    g0 = budget.gamma_bar0
    bteh = policy.architecture == "BTEH"
    p_m = plan.relay_share

    # 1. harvest indicators of nodes 2..M
    u_eh = rng.random((m - 1, n))
    indicators = np.empty((m - 1, n), dtype=bool)
    for row in range(m - 1):
        indicators[row] = u_eh[row] < policy.rho1(row + 2)

    # 2. device activity per slot (skip mode resolves it per subarea)
    com_present = None
    if pairing == "com" and empty_annulus == "skip":
        com_present, active = [], np.zeros((hops, n), dtype=bool)
        for t in range(1, hops + 1):
            disk = topo.disk(t)
            rows = np.empty((topo.subarea_counts[t - 1], n), dtype=bool)
            for k in range(1, topo.subarea_counts[t - 1] + 1):
                lo, hi = disk.annulus_bounds(k)
                occupied = -math.expm1(-topo.density_active * math.pi
                                       * (hi * hi - lo * lo))
                rows[k - 1] = rng.random(n) < occupied
            com_present.append(rows)
            active[t - 1] = rows.any(axis=0)
    else:
        active = np.empty((hops, n), dtype=bool)
        for t in range(1, hops + 1):
            p_active = -math.expm1(log_null_probability(
                topo.density_active, topo.disk_radii[t - 1]))
            active[t - 1] = rng.random(n) < p_active

    # 3. hop fades; each doubles as the receiving node's harvest input
    hop_fades = rng.standard_exponential((hops, n))

    # 4. device geometry and fades
    device_dist, device_fade = [], []
    if pairing == "com":
        for t in range(1, hops + 1):
            kt = topo.subarea_counts[t - 1]
            radius = topo.disk_radii[t - 1]
            u = rng.random((kt, n))
            ks = np.arange(1, kt + 1, dtype=float)[:, None]
            device_dist.append(radius / kt * np.sqrt((ks - 1.0) ** 2
                                                     + (2.0 * ks - 1.0) * u))
            device_fade.append(rng.standard_exponential((kt, n)))
    elif pairing == "qom":
        for t in range(1, hops + 1):
            radius = topo.disk_radii[t - 1]
            a = math.pi * topo.density_active * radius * radius
            u = rng.random(n)
            # contact law truncated to the disk, valid given activity
            dist = np.sqrt(-np.log1p(-u * -math.expm1(-a))
                           / (math.pi * topo.density_active))
            device_dist.append(dist[None, :])
            device_fade.append(rng.standard_exponential((1, n)))
    else:
        device_dist = [np.zeros((0, n))] * hops
        device_fade = [np.zeros((0, n))] * hops

    # 5. transmit power chain, in units of P0
    powers = np.ones((hops, n))
    chain = np.ones(n)
    for t in range(2, hops + 1):
        gain = omega_factor(t, policy, m) \
            * pathloss_linear(topo.hop_distances[t - 2], budget) \
            * hop_fades[t - 2]
        chain = np.where(indicators[t - 2], chain * gain, 1.0)
        powers[t - 1] = chain

    # 6. receiver adjustments: harvesting at the receiving relay either
    # compresses the information window or splits the received power
    recv = indicators[:hops]
    if bteh:
        time_factor = (1.0 - policy.alpha * recv) / (m - 1)
        split = 1.0
    else:
        time_factor = np.full((hops, n), 1.0 / (m - 1))
        split = 1.0 - policy.beta * recv

    # 7. hop decoding
    ell_hop = pathloss_linear(np.asarray(topo.hop_distances), budget)[:, None]
    hop_snr = g0 * powers * ell_hop * hop_fades
    eff = hop_snr * split
    if pairing is not None and p_m < 1.0:
        sinr = np.where(active, p_m * eff / ((1.0 - p_m) * eff + 1.0), eff)
    else:
        sinr = eff
    hop_rates = time_factor * np.log1p(sinr) / _LN2
    hop_ok = hop_rates >= plan.relay_rate
    prefix_ok = np.logical_and.accumulate(hop_ok, axis=0)
    # slot t serves its devices iff its transmitter holds the message,
    # i.e. hops 1..t-1 all succeeded; the slot's own hop is a separate event
    msg_ok = np.vstack([np.ones((1, n), dtype=bool), prefix_ok[:-1]])

    # 8. device decoding: the own message plus its full SIC chain
    device_snr, device_rates, device_ok = [], [], []
    throughput = plan.relay_rate * prefix_ok[-1].astype(float)
    for t in range(1, hops + 1):
        dist, fade = device_dist[t - 1], device_fade[t - 1]
        served = active[t - 1]
        count = dist.shape[0]
        if count == 0:
            empty = np.zeros((0, n))
            device_snr.append(empty)
            device_rates.append(empty)
            device_ok.append(empty.astype(bool))
            continue
        snr = g0 * powers[t - 1] * pathloss_linear(dist, budget) * fade
        tf = time_factor[t - 1]
        # every device first peels the relayed message off the superposition
        relayed_ok = tf * np.log1p(p_m * snr / ((1.0 - p_m) * snr + 1.0)) \
            / _LN2 >= plan.relay_rate
        rates = np.empty((count, n))
        ok = np.empty((count, n), dtype=bool)
        if pairing == "com":
            present = com_present[t - 1] if com_present is not None \
                else np.broadcast_to(served, (count, n))
            shares = plan.device_shares[t - 1]
            targets = plan.device_rates[t - 1]
            below = np.cumsum((0.0,) + shares)
            for k in range(count, 0, -1):
                y = snr[k - 1]
                rates[k - 1] = tf * np.log1p(shares[k - 1] * y
                                             / (below[k - 1] * y + 1.0)) / _LN2
                # device k peels every weaker-protected message n >= k
                chain = relayed_ok[k - 1]
                for nn in range(count, k - 1, -1):
                    peel = tf * np.log1p(shares[nn - 1] * y
                                         / (below[nn - 1] * y + 1.0)) / _LN2
                    chain = chain & (peel >= targets[nn - 1])
                ok[k - 1] = present[k - 1] & chain
                throughput += targets[k - 1] * (msg_ok[t - 1] & ok[k - 1])
        else:
            target = plan.nearest_rates[t - 1]
            rates[0] = tf * np.log1p((1.0 - p_m) * snr[0]) / _LN2
            ok[0] = served & relayed_ok[0] & (rates[0] >= target)
            throughput += target * (msg_ok[t - 1] & ok[0])
        device_snr.append(snr)
        device_rates.append(rates)
        device_ok.append(ok)

    throughput /= m - 1
    supply_units = hops - indicators[:hops - 1].sum(axis=0)

    # event nesting: a credited device message implies its transmitter
    # received it, which implies every earlier hop succeeded
    for t in range(2, hops + 1):
        assert not np.any((msg_ok[t - 1] & device_ok[t - 1])
                          & ~prefix_ok[t - 2])

    return _Block(n=n, indicators=indicators, active=active,
                  com_present=com_present, powers=powers, hop_snr=hop_snr,
                  hop_rates=hop_rates, hop_ok=hop_ok, device_snr=device_snr,
                  device_rates=device_rates, device_ok=device_ok,
                  prefix_ok=prefix_ok, msg_ok=msg_ok,
                  supply_units=supply_units, throughput=throughput)


def run_block_trial(config: Scenario, rng_seed) -> TrialOutcome:
    """Resolve a single relaying block from the given seed or generator."""
    block = _simulate_block(config, as_generator(rng_seed), 1)
    hops = config.topology.hop_count
    return TrialOutcome(
        eh_indicators=tuple(int(v) for v in block.indicators[:, 0]),
        device_present=tuple(bool(v) for v in block.active[:, 0]),
        powers_w=tuple(config.budget.P0 * float(p)
                       for p in block.powers[:, 0]),
        hop_rates=tuple(float(r) for r in block.hop_rates[:, 0]),
        hop_success=tuple(bool(v) for v in block.hop_ok[:, 0]),
        device_rates=tuple(tuple(float(r) for r in block.device_rates[t][:, 0])
                           for t in range(hops)),
        device_success=tuple(tuple(bool(v) for v in block.device_ok[t][:, 0])
                             for t in range(hops)),
    )


@dataclass
class _Tallies:
    trials: int = 0
    hop_fail: dict = field(default_factory=dict)
    present: dict = field(default_factory=dict)
    device_fail: dict = field(default_factory=dict)
    e2e_destination_fail: int = 0
    e2e_device_fail: dict = field(default_factory=dict)
    throughput_sum: float = 0.0
    throughput_sumsq: float = 0.0
    supply_w_sum: float = 0.0
    supply_w_sumsq: float = 0.0


def _blocked_streams(seed: int, n_trials: int):
    """Yield (generator, rows-used) for each full block of a run."""
    n_blocks = -(-n_trials // BLOCK_SIZE)
    for b in range(n_blocks):
        rng = np.random.Generator(np.random.Philox(
            np.random.SeedSequence(seed, spawn_key=(b,))))
        yield rng, min(BLOCK_SIZE, n_trials - b * BLOCK_SIZE)


@lru_cache(maxsize=8)
def _accumulate(scenario: Scenario, n_trials: int, seed: int,
                empty_annulus: str) -> _Tallies:
    if n_trials <= 0:
        raise ValueError(f"trial count must be positive, got {n_trials}")
    hops = scenario.topology.hop_count
    tal = _Tallies()
    for rng, used in _blocked_streams(seed, n_trials):
        # blocks are always drawn in full so a longer run extends a
        # shorter one instead of reshuffling it
        block = _simulate_block(scenario, rng, BLOCK_SIZE, empty_annulus)
        cut = slice(0, used)
        tal.trials += used
        for t in range(1, hops + 1):
            row = block.hop_ok[t - 1, cut]
            tal.hop_fail[t] = tal.hop_fail.get(t, 0) + int((~row).sum())
            ok = block.device_ok[t - 1]
            if ok.shape[0] == 0:
                continue
            served = block.active[t - 1, cut]
            tal.present[t] = tal.present.get(t, 0) + int(served.sum())
            for k in range(1, ok.shape[0] + 1):
                key = (t, k if scenario.scheme.pairing == "com" else None)
                fail = served & ~ok[k - 1, cut]
                tal.device_fail[key] = tal.device_fail.get(key, 0) \
                    + int(fail.sum())
                e2e_fail = served & ~(ok[k - 1, cut]
                                      & block.msg_ok[t - 1, cut])
                tal.e2e_device_fail[key] = tal.e2e_device_fail.get(key, 0) \
                    + int(e2e_fail.sum())
        tal.e2e_destination_fail += int((~block.prefix_ok[-1, cut]).sum())
        tp = block.throughput[cut]
        tal.throughput_sum += float(tp.sum())
        tal.throughput_sumsq += float((tp * tp).sum())
        watts = scenario.budget.P0 * block.supply_units[cut]
        tal.supply_w_sum += float(watts.sum())
        tal.supply_w_sumsq += float((watts * watts).sum())
    return tal


def estimate_outage(config: Scenario, node_selector, n_trials: int,
                    seed: int, empty_annulus: str = "resample") -> Estimate:
    """Outage estimate for one decode event.

    Selectors: ``("hop", t)``, ``("device", t, k)``, ``("e2e_destination",)``
    and ``("e2e_device", t, k)``; ``k=None`` addresses the qom device.
    Device estimates condition on the slot's disk being active, so their
    trial count is the number of conditioning trials.
    """
    tal = _accumulate(config, n_trials, seed, empty_annulus)
    kind, rest = node_selector[0], node_selector[1:]
    hops = config.topology.hop_count
    if kind == "e2e_destination":
        return Estimate.from_binomial(tal.e2e_destination_fail, tal.trials)
    t = rest[0]
    if not 1 <= t <= hops:
        raise ValueError(f"slot {t} outside 1..{hops}")
    if kind == "hop":
        return Estimate.from_binomial(tal.hop_fail[t], tal.trials)
    if kind not in ("device", "e2e_device"):
        raise ValueError(f"unknown selector {node_selector!r}")
    key = (t, rest[1])
    table = tal.device_fail if kind == "device" else tal.e2e_device_fail
    if key not in table:
        raise ValueError(f"no served device matches selector {node_selector!r}")
    return Estimate.from_binomial(table[key], tal.present[t])


def estimate_throughput(config: Scenario, n_trials: int, seed: int,
                        empty_annulus: str = "resample") -> Estimate:
    """Mean delivered rate per block from exact joint end-to-end events."""
    tal = _accumulate(config, n_trials, seed, empty_annulus)
    return Estimate.from_moments(tal.throughput_sum, tal.throughput_sumsq,
                                 tal.trials)


def estimate_supply_power(config: Scenario, n_trials: int, seed: int,
                          empty_annulus: str = "resample") -> Estimate:
    """Mean grid-supplied transmit power in watts (harvested slots are free)."""
    tal = _accumulate(config, n_trials, seed, empty_annulus)
    return Estimate.from_moments(tal.supply_w_sum, tal.supply_w_sumsq,
                                 tal.trials)


def empirical_ccdf_oracle(config: Scenario, variable, grid, n_trials: int,
                          seed: int) -> tuple:
    """Empirical survival curve of a received-power variable.

    ``variable`` is ``("X", t)`` for the hop SNR, ``("Y", t, k)`` for the
    subarea-k device SNR, or ``("Z", t)`` for the nearest-device SNR; the
    device variables condition on the slot being active.  Returns one
    Estimate per grid point.
    """
    if n_trials <= 0:
        raise ValueError(f"trial count must be positive, got {n_trials}")
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0.0) \
            or np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be positive and strictly increasing")
    kind = variable[0]
    t = variable[1]
    hops = config.topology.hop_count
    if not 1 <= t <= hops:
        raise ValueError(f"slot {t} outside 1..{hops}")
    if kind not in ("X", "Y", "Z"):
        raise ValueError(f"unknown variable {variable!r}")
    pairing = config.scheme.pairing
    if kind == "Y" and pairing != "com":
        raise ValueError("Y requires a com scheme")
    if kind == "Z" and pairing != "qom":
        raise ValueError("Z requires a qom scheme")
    above = np.zeros(grid.size, dtype=np.int64)
    count = 0
    for rng, used in _blocked_streams(seed, n_trials):
        block = _simulate_block(config, rng, BLOCK_SIZE)
        cut = slice(0, used)
        if kind == "X":
            samples = block.hop_snr[t - 1, cut]
        else:
            row = variable[2] - 1 if kind == "Y" else 0
            samples = block.device_snr[t - 1][row, cut]
            samples = samples[block.active[t - 1, cut]]
        count += samples.size
        above += (samples[None, :] > grid[:, None]).sum(axis=1)
    return tuple(Estimate.from_binomial(int(a), count) for a in above)
