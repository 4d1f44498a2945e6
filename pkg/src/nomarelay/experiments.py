"""Sweep runner: configs to deterministic result tables.

A run config (YAML) names a topology, link budget, harvesting policy,
allocation rule, and one swept variable; the runner evaluates each
requested metric per grid point and scheme through the closed-form layer,
its high-power asymptote, and/or the exact simulator, then emits rows
with a fixed column contract.  Analytic and simulated rows for the same
point are compared against a declared margin and disagreements are
flagged: slot-level outage and supply power are exact so their margin is
purely statistical, while end-to-end compositions carry a documented
correlation envelope that grows with the harvesting probability.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import yaml

from . import analytics, montecarlo
from .channel import (
    LinkBudget,
    dbm_to_watts,
    fit_singh_maddala,
    fit_singh_maddala_cached,
    noise_power_w,
)
from .network import NetworkTopology, Scenario, Scheme, build_policy

TOPOLOGY_PRESETS = {
    "t1": {"hop_distances": (200.0, 200.0, 200.0),
           "disk_radii": (100.0, 100.0, 100.0),
           "subarea_counts": (3, 2, 1)},
    "t2": {"hop_distances": (200.0, 100.0, 100.0),
           "disk_radii": (100.0, 50.0, 50.0),
           "subarea_counts": (3, 2, 1)},
    "t3": {"hop_distances": (50.0, 50.0),
           "disk_radii": (25.0, 25.0),
           "subarea_counts": (2, 2)},
    "t4": {"hop_distances": (200.0, 200.0, 200.0),
           "disk_radii": (100.0, 100.0, 100.0),
           "subarea_counts": (2, 2, 2)},
    "t5": {"hop_distances": (200.0, 200.0, 200.0, 200.0),
           "disk_radii": (100.0, 100.0, 100.0, 100.0),
           "subarea_counts": (2, 2, 2, 2)},
}

RESULT_COLUMNS = ("sweep_var", "value", "scheme", "metric", "source",
                  "mean", "ci_half_width", "trials", "seed")

SWEEP_VARIABLES = ("p0_dbm", "rho", "alpha", "beta", "density_active",
                   "node_count", "subarea_counts")

_SCALAR_METRICS = ("throughput", "ee", "eed", "p_tol")

# offset separating the no-harvest twin's stream from the main run
_TWIN_SEED_OFFSET = 1_000_003


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable with its grid, scheme list, and metric list."""

    variable: str
    grid: tuple
    schemes: tuple
    metrics: tuple
    include_asymptotic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(
            Scheme.parse(s) if isinstance(s, str) else s
            for s in self.schemes))
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if len(self.grid) == 0:
            raise ValueError("sweep grid must be nonempty")
        if self.variable == "subarea_counts":
            if len(set(self.grid)) != len(self.grid):
                raise ValueError("subarea patterns must be unique")
        else:
            diffs = [b - a for a, b in zip(self.grid, self.grid[1:])]
            if any(d <= 0 for d in diffs):
                raise ValueError("sweep grid must be strictly increasing")
        if not self.schemes:
            raise ValueError("scheme list must be nonempty")
        for metric in self.metrics:
            parse_metric(metric)
        if not self.metrics:
            raise ValueError("metric list must be nonempty")


@dataclass(frozen=True)
class RunConfig:
    topology: NetworkTopology
    sweep: SweepSpec
    p0_dbm: float = 0.0
    bandwidth_hz: float = 1.0e7
    f_c_ghz: float = 3.0
    gain_rx_dbi: float = 5.0
    gain_tx_dbi: float = 5.0
    epsilon: float = 3.67
    rho: float = 0.1
    alpha: float = 0.2
    beta: float = 0.8
    eta: float = 1.0
    relay_share: float = 0.8
    rate_fraction: float = 0.5
    rate_cap: float = 0.75
    trials_outage: int = 1_000_000
    trials_throughput: int = 100_000
    seed: int = 1
    fit_cache: Optional[str] = None
    topology_by_node_count: Optional[dict] = None


@dataclass(frozen=True)
class ResultRow:
    sweep_var: str
    value: str
    scheme: str
    metric: str
    source: str
    mean: float
    ci_half_width: float
    trials: int
    seed: int


@dataclass
class SweepResult:
    rows: list
    flagged: list
    failures: list

    @property
    def clean(self) -> bool:
        return not self.flagged and not self.failures


def parse_metric(metric: str):
    """Translate a metric string into an event selector tuple."""
    parts = metric.split(":")
    try:
        if parts[0] == "hop_op" and len(parts) == 2:
            return ("hop", int(parts[1]))
        if parts[0] == "device_op" and len(parts) == 3:
            k = None if parts[2] == "nearest" else int(parts[2])
            return ("device", int(parts[1]), k)
        if parts[0] == "e2e_op":
            if parts[1:] == ["destination"]:
                return ("e2e_destination",)
            if parts[1] == "device" and len(parts) == 4:
                k = None if parts[3] == "nearest" else int(parts[3])
                return ("e2e_device", int(parts[2]), k)
        if len(parts) == 1 and parts[0] in _SCALAR_METRICS:
            return (parts[0],)
    except (ValueError, IndexError):
        pass
    raise ValueError(f"unknown metric {metric!r}")


def _topology_from_spec(spec, densities) -> NetworkTopology:
    if isinstance(spec, str):
        try:
            spec = TOPOLOGY_PRESETS[spec.lower()]
        except KeyError:
            raise ValueError(f"unknown topology preset {spec!r}") from None
    return NetworkTopology(
        hop_distances=tuple(float(d) for d in spec["hop_distances"]),
        disk_radii=tuple(float(r) for r in spec["disk_radii"]),
        subarea_counts=tuple(int(k) for k in spec["subarea_counts"]),
        density_active=float(densities.get("active", 1e-2)),
        density_inactive=float(densities.get("inactive", 1e-3)),
    )


def load_config(path) -> RunConfig:
    """Parse a YAML run config; unknown keys are rejected."""
    raw = yaml.safe_load(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a mapping")
    known = {"topology", "densities", "topology_by_node_count", "budget",
             "policy", "plan", "sweep", "trials", "seed", "fit_cache"}
    extra = set(raw) - known
    if extra:
        raise ValueError(f"{path}: unknown config keys {sorted(extra)}")
    densities = raw.get("densities", {})
    topology = _topology_from_spec(raw.get("topology", "t1"), densities)
    sweep_raw = raw.get("sweep", {})
    grid = sweep_raw.get("grid", ())
    if sweep_raw.get("variable") == "subarea_counts":
        grid = tuple(tuple(int(k) for k in row) for row in grid)
    else:
        grid = tuple(float(v) if not isinstance(v, int) else v for v in grid)
    sweep = SweepSpec(
        variable=sweep_raw.get("variable", "p0_dbm"),
        grid=grid,
        schemes=tuple(Scheme.parse(s) for s in sweep_raw.get("schemes", ())),
        metrics=tuple(sweep_raw.get("metrics", ())),
        include_asymptotic=bool(sweep_raw.get("include_asymptotic", False)),
    )
    budget = raw.get("budget", {})
    policy = raw.get("policy", {})
    plan = raw.get("plan", {})
    trials = raw.get("trials", {})
    by_m = raw.get("topology_by_node_count")
    if by_m is not None:
        by_m = {int(m): _topology_from_spec(spec, densities)
                for m, spec in by_m.items()}
    return RunConfig(
        topology=topology,
        sweep=sweep,
        p0_dbm=float(budget.get("p0_dbm", 0.0)),
        bandwidth_hz=float(budget.get("bandwidth_hz", 1.0e7)),
        f_c_ghz=float(budget.get("f_c_ghz", 3.0)),
        gain_rx_dbi=float(budget.get("gain_rx_dbi", 5.0)),
        gain_tx_dbi=float(budget.get("gain_tx_dbi", 5.0)),
        epsilon=float(budget.get("epsilon", 3.67)),
        rho=float(policy.get("rho", 0.1)),
        alpha=float(policy.get("alpha", 0.2)),
        beta=float(policy.get("beta", 0.8)),
        eta=float(policy.get("eta", 1.0)),
        relay_share=float(plan.get("relay_share", 0.8)),
        rate_fraction=float(plan.get("rate_fraction", 0.5)),
        rate_cap=float(plan.get("rate_cap", 0.75)),
        trials_outage=int(trials.get("outage", 1_000_000)),
        trials_throughput=int(trials.get("throughput", 100_000)),
        seed=int(raw.get("seed", 1)),
        fit_cache=raw.get("fit_cache"),
        topology_by_node_count=by_m,
    )


# ---------------------------------------------------------------------------
# scenario construction per (grid value, scheme)
# ---------------------------------------------------------------------------

class _PointContext:
    """Everything needed to evaluate one (grid value, scheme) pair."""

    def __init__(self, config: RunConfig, scheme: Scheme, value):
        var = config.sweep.variable
        topology = config.topology
        rho, alpha, beta = config.rho, config.alpha, config.beta
        p0_dbm = config.p0_dbm
        if var == "p0_dbm":
            p0_dbm = value
        elif var == "rho":
            rho = value
        elif var == "alpha":
            alpha = value
        elif var == "beta":
            beta = value
        elif var == "density_active":
            topology = dataclasses.replace(topology, density_active=value)
        elif var == "node_count":
            table = config.topology_by_node_count
            if table is None or int(value) not in table:
                raise ValueError(f"no topology configured for node count {value}")
            topology = table[int(value)]
        elif var == "subarea_counts":
            topology = dataclasses.replace(topology, subarea_counts=value)
        m = topology.node_count
        if var == "node_count" and m != int(value):
            raise ValueError(f"topology for node count {value} has {m} nodes")
        budget = LinkBudget(P0=dbm_to_watts(p0_dbm),
                            sigma2=noise_power_w(config.bandwidth_hz),
                            f_c=config.f_c_ghz, G_r=config.gain_rx_dbi,
                            G_t=config.gain_tx_dbi, epsilon=config.epsilon)
        policy = build_policy(scheme, m, rho, alpha=alpha, beta=beta,
                              eta=config.eta)
        # every scheme competes at the rates the time-switching reference
        # can sustain; the baseline inherits only the relayed-message rate
        reference = analytics.default_allocation(
            topology, build_policy(Scheme.TCOM, m, rho, alpha=alpha,
                                   beta=beta, eta=config.eta),
            relay_share=config.relay_share,
            rate_fraction=config.rate_fraction, rate_cap=config.rate_cap)
        if scheme is Scheme.CNRR:
            topology = topology.without_devices()
            plan = analytics.baseline_plan(reference, topology.hop_count)
        elif scheme.harvesting is None:
            plan = reference
        elif scheme.harvesting == "BTEH":
            plan = reference
        else:
            plan = analytics.default_allocation(
                topology, policy, relay_share=config.relay_share,
                rate_fraction=config.rate_fraction, rate_cap=config.rate_cap)
        fits = None
        if scheme.pairing == "qom":
            if config.fit_cache is None:
                fits = tuple(fit_singh_maddala(topology.disk(t), budget)
                             for t in range(1, topology.hop_count + 1))
            else:
                fits = tuple(
                    fit_singh_maddala_cached(topology.disk(t), budget,
                                             config.fit_cache)
                    for t in range(1, topology.hop_count + 1))
        self.config = config
        self.scheme = scheme
        self.value = value
        self.bandwidth_hz = config.bandwidth_hz
        self.scenario = Scenario(scheme=scheme, topology=topology,
                                 policy=policy, budget=budget, plan=plan,
                                 nearest_fits=fits)
        self._twin = None

    @property
    def twin(self) -> "Scenario":
        """Same scheme with harvesting disabled; reference point for EED."""
        if self._twin is None:
            s = self.scenario
            policy = build_policy(s.scheme, s.policy.node_count, 0.0,
                                  alpha=s.policy.alpha, beta=s.policy.beta,
                                  eta=s.policy.eta)
            self._twin = dataclasses.replace(s, policy=policy)
        return self._twin

    # -- analytic side ----------------------------------------------------

    def _device_e2e(self, scenario, asymptotic=False):
        s = scenario
        out = []
        for t in range(1, s.topology.hop_count + 1):
            if s.scheme.pairing == "com":
                out.append(tuple(
                    analytics.e2e_op((t, k), s.scheme, s.topology, s.policy,
                                     s.budget, s.plan, asymptotic=asymptotic)
                    for k in range(1, s.topology.subarea_counts[t - 1] + 1)))
            elif s.scheme.pairing == "qom":
                out.append((analytics.e2e_op(
                    (t, None), s.scheme, s.topology, s.policy, s.budget,
                    s.plan, fits=s.nearest_fits, asymptotic=asymptotic),))
            else:
                out.append(())
        return tuple(out)

    def _analytic_throughput(self, scenario, asymptotic=False) -> float:
        s = scenario
        dest = analytics.e2e_op("destination", s.scheme, s.topology, s.policy,
                                s.budget, s.plan, asymptotic=asymptotic)
        return analytics.sum_throughput(
            s.plan, dest, self._device_e2e(s, asymptotic),
            s.scheme.pairing if s.scheme.serves_devices else None,
            s.topology.node_count)

    def analytic(self, selector, asymptotic=False) -> float:
        s = self.scenario
        kind = selector[0]
        if kind == "hop":
            return analytics.op_typeI(selector[1], s.scheme, s.topology,
                                      s.policy, s.budget, s.plan,
                                      asymptotic=asymptotic)
        if kind == "device":
            t, k = selector[1], selector[2]
            if k is None:
                fit = None if s.nearest_fits is None else s.nearest_fits[t - 1]
                return analytics.op_typeII_qom(t, s.scheme, s.topology,
                                               s.policy, s.budget, s.plan,
                                               fit=fit, asymptotic=asymptotic)
            return analytics.op_typeII_com(t, k, s.scheme, s.topology,
                                           s.policy, s.budget, s.plan,
                                           asymptotic=asymptotic)
        if kind == "e2e_destination":
            return analytics.e2e_op("destination", s.scheme, s.topology,
                                    s.policy, s.budget, s.plan,
                                    asymptotic=asymptotic)
        if kind == "e2e_device":
            return analytics.e2e_op((selector[1], selector[2]), s.scheme,
                                    s.topology, s.policy, s.budget, s.plan,
                                    fits=s.nearest_fits, asymptotic=asymptotic)
        if kind == "throughput":
            return self._analytic_throughput(s, asymptotic)
        if kind == "ee":
            tp = self._analytic_throughput(s, asymptotic)
            return analytics.energy_efficiency(tp, s.budget, s.policy,
                                               self.bandwidth_hz)[0]
        if kind == "eed":
            if not s.policy.is_harvesting:
                return 0.0
            tp = self._analytic_throughput(s, asymptotic)
            ee = analytics.energy_efficiency(tp, s.budget, s.policy,
                                             self.bandwidth_hz)[0]
            twin = self.twin
            tp0 = self._analytic_throughput(twin, asymptotic)
            ee0 = analytics.energy_efficiency(tp0, twin.budget, twin.policy,
                                              self.bandwidth_hz)[0]
            return ee - ee0
        if kind == "p_tol":
            return analytics.energy_efficiency(0.0, s.budget, s.policy,
                                               self.bandwidth_hz)[1]
        raise ValueError(f"unknown selector {selector!r}")

    # -- simulated side ---------------------------------------------------

    def simulated(self, selector, seed: int) -> montecarlo.Estimate:
        cfg, s = self.config, self.scenario
        kind = selector[0]
        if kind in ("hop", "device", "e2e_destination", "e2e_device"):
            return montecarlo.estimate_outage(s, selector, cfg.trials_outage,
                                              seed)
        n = cfg.trials_throughput
        if kind == "throughput":
            return montecarlo.estimate_throughput(s, n, seed)
        if kind == "p_tol":
            return montecarlo.estimate_supply_power(s, n, seed)
        scale = self.bandwidth_hz
        tp = montecarlo.estimate_throughput(s, n, seed)
        _, p_tol = analytics.energy_efficiency(0.0, s.budget, s.policy, scale)
        if kind == "ee":
            return montecarlo.Estimate(mean=scale * tp.mean / p_tol,
                                       half_width=scale * tp.half_width / p_tol,
                                       trials=tp.trials)
        if kind == "eed":
            if not s.policy.is_harvesting:
                return montecarlo.Estimate(0.0, 0.0, tp.trials)
            twin = self.twin
            tp0 = montecarlo.estimate_throughput(twin, n,
                                                 seed + _TWIN_SEED_OFFSET)
            _, p0 = analytics.energy_efficiency(0.0, twin.budget, twin.policy,
                                                scale)
            hw = scale * math.hypot(tp.half_width / p_tol, tp0.half_width / p0)
            return montecarlo.Estimate(
                mean=scale * (tp.mean / p_tol - tp0.mean / p0),
                half_width=hw, trials=tp.trials)
        raise ValueError(f"unknown selector {selector!r}")

    def declared_margin(self, selector, analytic_value: float,
                        estimate: montecarlo.Estimate) -> float:
        """Disagreement threshold beyond which a row is flagged."""
        sigma = estimate.half_width / 1.96
        kind = selector[0]
        if kind not in _SCALAR_METRICS and estimate.trials > 0:
            # rare-event rows can report an empirical deviation of zero;
            # the binomial deviation at the analytic value is the honest one
            p = min(max(analytic_value, 0.0), 1.0)
            sigma = max(sigma, math.sqrt(p * (1.0 - p) / estimate.trials))
        sigma3 = 3.0 * sigma
        floor = 1e-9 * abs(analytic_value)
        if kind in ("hop", "p_tol"):
            return sigma3 + floor
        if kind == "device":
            allowance = 0.0
            if selector[2] is None and self.scenario.nearest_fits:
                allowance = 2.0 * max(f.fit_error
                                      for f in self.scenario.nearest_fits)
            return sigma3 + allowance + floor
        # end-to-end compositions multiply per-slot marginals; the simulator
        # resolves the exact joint events, where a harvesting node reuses the
        # fade it later relays over, so composed rows carry a correlation
        # envelope that grows with the harvesting probability.  The nearest-
        # device surrogate adds a tail bias for qom schemes, measured at
        # up to 6% of the composed value near rho = 0.7.
        rho = max((self.scenario.policy.rho1(j)
                   for j in range(2, self.scenario.policy.node_count)),
                  default=0.0)
        qom = self.scenario.scheme.pairing == "qom"
        scale = abs(analytic_value)
        if kind in ("e2e_destination", "e2e_device"):
            return sigma3 + (0.05 + 0.45 * rho) * scale + floor
        if kind == "eed":
            # a difference of two efficiencies inherits the error of the
            # larger one, so the envelope tracks their magnitudes instead
            s, tw = self.scenario, self.twin
            ee = analytics.energy_efficiency(
                self._analytic_throughput(s), s.budget, s.policy,
                self.bandwidth_hz)[0]
            ee0 = analytics.energy_efficiency(
                self._analytic_throughput(tw), tw.budget, tw.policy,
                self.bandwidth_hz)[0]
            scale = abs(ee) + abs(ee0)
        envelope = (0.01 + 0.12 * rho) if qom else (0.005 + 0.02 * rho)
        return sigma3 + envelope * scale + floor


# ---------------------------------------------------------------------------
# the sweep loop
# ---------------------------------------------------------------------------

def _format_value(value) -> str:
    return repr(value)


def run_sweep(config: RunConfig, out_path=None, *, source: str = "both",
              trials: Optional[int] = None, seed: Optional[int] = None,
              fmt: str = "csv") -> SweepResult:
    """Evaluate the config's sweep and optionally emit the table.

    ``source`` selects which rows are produced; with ``both``, analytic
    and simulated rows for the same point are compared and disagreements
    beyond the declared margin are flagged.  Numeric failures abort the
    affected row only.
    """
    if source not in ("analytic", "mc", "both"):
        raise ValueError(f"unknown source {source!r}")
    if trials is not None:
        config = dataclasses.replace(config, trials_outage=trials,
                                     trials_throughput=trials)
    if seed is not None:
        config = dataclasses.replace(config, seed=seed)
    result = SweepResult(rows=[], flagged=[], failures=[])
    for value in config.sweep.grid:
        for scheme in config.sweep.schemes:
            try:
                ctx = _PointContext(config, scheme, value)
            except Exception as exc:
                result.failures.append(
                    (value, scheme.value, "*", f"{type(exc).__name__}: {exc}"))
                continue
            for metric in config.sweep.metrics:
                selector = parse_metric(metric)
                _emit_point(ctx, metric, selector, source, config.seed,
                            result)
    if out_path is not None:
        emit_results(result.rows, fmt, out_path)
    return result


def _emit_point(ctx: _PointContext, metric: str, selector, source: str,
                seed: int, result: SweepResult) -> None:
    base = dict(sweep_var=ctx.config.sweep.variable,
                value=_format_value(ctx.value), scheme=ctx.scheme.value,
                metric=metric, seed=seed)
    analytic_value = None
    if source in ("analytic", "both"):
        try:
            analytic_value = ctx.analytic(selector)
            result.rows.append(ResultRow(source="analytic",
                                         mean=analytic_value,
                                         ci_half_width=0.0, trials=0, **base))
        except Exception as exc:
            result.rows.append(ResultRow(source="analytic", mean=math.nan,
                                         ci_half_width=math.nan, trials=0,
                                         **base))
            result.failures.append((ctx.value, ctx.scheme.value, metric,
                                    f"{type(exc).__name__}: {exc}"))
        if ctx.config.sweep.include_asymptotic:
            try:
                result.rows.append(ResultRow(
                    source="asymptotic",
                    mean=ctx.analytic(selector, asymptotic=True),
                    ci_half_width=0.0, trials=0, **base))
            except Exception as exc:
                result.rows.append(ResultRow(source="asymptotic",
                                             mean=math.nan,
                                             ci_half_width=math.nan,
                                             trials=0, **base))
                result.failures.append((ctx.value, ctx.scheme.value, metric,
                                        f"{type(exc).__name__}: {exc}"))
    if source in ("mc", "both"):
        try:
            estimate = ctx.simulated(selector, seed)
        except Exception as exc:
            result.rows.append(ResultRow(source="mc", mean=math.nan,
                                         ci_half_width=math.nan, trials=0,
                                         **base))
            result.failures.append((ctx.value, ctx.scheme.value, metric,
                                    f"{type(exc).__name__}: {exc}"))
            return
        result.rows.append(ResultRow(source="mc", mean=estimate.mean,
                                     ci_half_width=estimate.half_width,
                                     trials=estimate.trials, **base))
        if analytic_value is not None and math.isfinite(analytic_value):
            margin = ctx.declared_margin(selector, analytic_value, estimate)
            gap = abs(analytic_value - estimate.mean)
            if gap > margin:
                result.flagged.append(
                    (ctx.value, ctx.scheme.value, metric, analytic_value,
                     estimate.mean, gap, margin))


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _row_cells(row: ResultRow):
    return (row.sweep_var, row.value, row.scheme, row.metric, row.source,
            repr(row.mean), repr(row.ci_half_width), str(row.trials),
            str(row.seed))


def render_results(rows, fmt: str) -> str:
    """Serialize rows as CSV or JSON lines; reruns are byte-identical."""
    if not rows:
        raise ValueError("result table is empty")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow(_row_cells(row))
        return buf.getvalue()
    if fmt == "json-lines":
        lines = []
        for row in rows:
            cells = _row_cells(row)
            record = dict(zip(RESULT_COLUMNS, cells[:5]))
            record["mean"] = row.mean
            record["ci_half_width"] = row.ci_half_width
            record["trials"] = row.trials
            record["seed"] = row.seed
            lines.append(json.dumps(record))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_results(rows, fmt: str, path) -> None:
    payload = render_results(rows, fmt)
    path = Path(path)
    try:
        path.write_text(payload)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_results(path) -> list:
    """Parse an emitted CSV back into ResultRow objects (lossless)."""
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        if header != RESULT_COLUMNS:
            raise ValueError(f"unexpected header {header!r}")
        for cells in reader:
            rows.append(ResultRow(
                sweep_var=cells[0], value=cells[1], scheme=cells[2],
                metric=cells[3], source=cells[4], mean=float(cells[5]),
                ci_half_width=float(cells[6]), trials=int(cells[7]),
                seed=int(cells[8])))
    return rows
