"""Certify or refute mechanism properties on concrete networks.

Accounting properties (feasibility, WBB, BB, IR) are checked on a single
run.  Propagation incentive compatibility is checked by brute force: every
agent withholds every nonempty subset of its out-edges and the mechanism is
re-run on the resulting network.  Time efficiency is checked by delaying an
agent's propagation and re-running.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

from .errors import EnumerationCapExceeded
from .mechanisms import BASELINES, MechanismConfig, RewardVector, run_mechanism
from .network import AgentId, Network, compute_layering, hide_edges, shift_times

ACCOUNTING_TOL = 1e-9
STRICT_GAP = 1e-12
ENUMERATION_CAP = 12

# Properties each mechanism is expected to satisfy; a failure of anything
# else is an informative refutation rather than a defect.
CLAIMS: dict[str, frozenset[str]] = {
    "starter": frozenset({"feasibility", "wbb", "ir", "pic"}),
    "scheme": frozenset({"feasibility", "wbb", "bb", "ir", "pic", "spic", "time_efficiency"}),
    "fixed": frozenset(),
    "uniform": frozenset(),
}


@dataclass
class Violation:
    agent: AgentId
    deviation: Any
    reward_before: float
    reward_after: float
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class PropertyReport:
    name: str
    verdict: str
    violations: list[Violation] = field(default_factory=list)
    instances_checked: int = 0
    tolerance: float = ACCOUNTING_TOL

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"

    def to_dict(self) -> dict[str, Any]:
        return {
            "property": self.name,
            "verdict": self.verdict,
            "instances": self.instances_checked,
            "tolerance": self.tolerance,
            "violations": [v.to_dict() for v in self.violations],
        }


def _verdict(violations: list[Violation], checked: int) -> str:
    if violations:
        return "fail"
    return "pass" if checked else "vacuous"


def check_accounting(
    net: Network, cfg: MechanismConfig, result: Optional[RewardVector] = None
) -> dict[str, PropertyReport]:
    """Feasibility, WBB, BB and IR of one mechanism run, reported separately."""
    r = result or run_mechanism(net, cfg)
    budget = cfg.budget
    slack = ACCOUNTING_TOL * budget
    total = r.total
    sponsor = net.sponsor
    reports = {}

    bad = [] if abs(total - budget) <= slack else [Violation(sponsor, "sum of rewards", budget, total)]
    reports["feasibility"] = PropertyReport("feasibility", _verdict(bad, 1), bad, 1)

    rs = r.sponsor_remainder
    bad = [] if rs >= -slack else [Violation(sponsor, "sponsor remainder", 0.0, rs)]
    reports["wbb"] = PropertyReport("wbb", _verdict(bad, 1), bad, 1)

    bad = [] if abs(rs) <= slack else [Violation(sponsor, "sponsor remainder", 0.0, rs)]
    reports["bb"] = PropertyReport("bb", _verdict(bad, 1), bad, 1)

    bad = [Violation(a, "reward", 0.0, v) for a, v in sorted(r.rewards.items()) if v < -slack]
    reports["ir"] = PropertyReport("ir", _verdict(bad, len(r.rewards)), bad, len(r.rewards))
    return reports


def check_pic(
    net: Network,
    cfg: MechanismConfig,
    strict: bool = False,
    cap: int = ENUMERATION_CAP,
    base: Optional[RewardVector] = None,
) -> PropertyReport:
    """Exhaustive unilateral edge-hiding check.

    The weak inequality r_i(G) >= r_i(G'_e) - tol is asserted for every
    agent and every nonempty subset of its out-edges.  With ``strict`` the
    gain must also be at least ``STRICT_GAP * budget`` whenever the hidden
    edges change the kept-edge layered graph; hiding only edges that the
    layering drops cannot change anything, so no strict gain is demanded
    there.
    """
    lay = compute_layering(net)
    base = base or run_mechanism(net, cfg, lay)
    kept = lay.kept_pairs()
    slack = ACCOUNTING_TOL * cfg.budget
    gap = STRICT_GAP * cfg.budget
    violations = []
    checked = 0
    for agent in sorted(lay.reachable):
        outs = net.out_edges(agent)
        if len(outs) > cap:
            raise EnumerationCapExceeded(f"{agent!r} has {len(outs)} out-edges, cap is {cap}")
        before = base.rewards[agent]
        for mask in range(1, 1 << len(outs)):
            hidden = [outs[k] for k in range(len(outs)) if mask >> k & 1]
            after = run_mechanism(hide_edges(net, agent, hidden), cfg).rewards[agent]
            checked += 1
            pairs = [list(e.pair) for e in hidden]
            if after > before + slack:
                violations.append(Violation(agent, pairs, before, after, "weak"))
            elif strict and any(e.pair in kept for e in hidden) and before - after < gap:
                violations.append(Violation(agent, pairs, before, after, "strict"))
    name = "spic" if strict else "pic"
    return PropertyReport(name, _verdict(violations, checked), violations, checked, ACCOUNTING_TOL)


def _rank_times(net: Network) -> Network:
    ranks = {t: float(k) for k, t in enumerate(sorted({e.t for e in net.edges}))}
    return shift_times(net, ranks.__getitem__)


RETIMINGS = {
    "2t+1": lambda net: shift_times(net, lambda t: 2 * t + 1),
    "rank": _rank_times,
}


def check_time_efficiency(
    net: Network,
    cfg: MechanismConfig,
    perturbations: int = 50,
    seed: int = 0,
    per_edge: bool = False,
    base: Optional[RewardVector] = None,
) -> PropertyReport:
    """Delaying propagation must never raise the delayed agent's reward.

    Each perturbation picks an agent with out-edges and adds one random
    delay to all of them (``per_edge`` delays a single random edge
    instead).  Delays range from tiny shifts to pushing past every other
    event.  Order-preserving global re-timings must leave the reward vector
    bit-identical.
    """
    lay = compute_layering(net)
    base = base or run_mechanism(net, cfg, lay)
    rng = random.Random(seed)
    slack = ACCOUNTING_TOL * cfg.budget
    violations = []
    checked = 0

    for label, retime in RETIMINGS.items():
        other = run_mechanism(retime(net), cfg)
        checked += 1
        if other.rewards != base.rewards or other.sponsor_remainder != base.sponsor_remainder:
            changed = sorted(a for a in base.rewards if base.rewards[a] != other.rewards.get(a))
            for a in changed or [net.sponsor]:
                violations.append(
                    Violation(a, f"retime {label}", base.rewards.get(a, 0.0), other.rewards.get(a, 0.0), "retiming")
                )

    movers = sorted(a for a in lay.reachable if net.out_edges(a))
    if movers and net.edges:
        times = [e.t for e in net.edges]
        span = max(times) - min(times) + 1.0
        for _ in range(perturbations):
            agent = rng.choice(movers)
            outs = net.out_edges(agent)
            chosen = [rng.choice(outs)] if per_edge else outs
            # random() can return exactly 0.0, which would not be a delay
            frac = rng.random() or 0.5
            delay = span * (frac if rng.random() < 0.5 else 1.0 + frac)
            delayed = shift_times(net, lambda t: t + delay, [e.pair for e in chosen])
            after = run_mechanism(delayed, cfg).rewards[agent]
            checked += 1
            if after > base.rewards[agent] + slack:
                desc = {"edges": [list(e.pair) for e in chosen], "delay": delay}
                violations.append(Violation(agent, desc, base.rewards[agent], after, "delay"))
    return PropertyReport("time_efficiency", _verdict(violations, checked), violations, checked, ACCOUNTING_TOL)


@dataclass
class SuiteRow:
    network: str
    mechanism: str
    reports: list[PropertyReport]

    @property
    def passed(self) -> bool:
        claims = CLAIMS[self.mechanism]
        return all(r.passed for r in self.reports if r.name in claims)

    def records(self) -> list[dict[str, Any]]:
        claims = CLAIMS[self.mechanism]
        return [
            {"network": self.network, "mechanism": self.mechanism, "claimed": r.name in claims, **r.to_dict()}
            for r in self.reports
        ]


@dataclass
class SuiteReport:
    rows: list[SuiteRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True unless a non-baseline mechanism fails a property it claims.

        A suite of baselines alone is run to refute them, so there any
        failing verdict counts.
        """
        gated = [row for row in self.rows if row.mechanism not in BASELINES]
        if gated or not self.rows:
            return all(row.passed for row in gated)
        return all(r.passed for row in self.rows for r in row.reports)

    def records(self) -> list[dict[str, Any]]:
        return [rec for row in self.rows for rec in row.records()]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in self.records())


def run_property_suite(
    nets: Union[Mapping[str, Network], Iterable[tuple[str, Network]]],
    mechanisms: Sequence[str],
    cfg: MechanismConfig,
    strict: bool = True,
    perturbations: int = 50,
    seed: int = 0,
    cap: int = ENUMERATION_CAP,
) -> SuiteReport:
    """Run every applicable checker on every (network, mechanism) pair.

    ``cfg`` supplies the shared parameters; its ``mechanism`` field is
    replaced for each entry of ``mechanisms``.
    """
    items = list(nets.items()) if isinstance(nets, Mapping) else list(nets)
    suite = SuiteReport()
    for name, net in items:
        for mech in mechanisms:
            mcfg = MechanismConfig(**{**asdict(cfg), "mechanism": mech})
            base = run_mechanism(net, mcfg)
            reports = list(check_accounting(net, mcfg, base).values())
            reports.append(check_pic(net, mcfg, strict=strict and mech == "scheme", cap=cap, base=base))
            if mech == "scheme":
                reports.append(check_time_efficiency(net, mcfg, perturbations, seed, base=base))
            suite.rows.append(SuiteRow(name, mech, reports))
    return suite
