"""Reward mechanisms: starter, budget distribution scheme and two baselines.

Every mechanism maps a network and a budget to a ``RewardVector``.  The
scheme keeps a per-agent ledger of a base value ``vb`` and a propagation
bonus ``vh``.  Each propagation event moves a slice of some payer's ``vb``
to the propagating parent (share beta) and to the newly informed child
(share 1 - beta).  Rewards are read off the ledger only after the last
layer, because single-agent layers tax agents of earlier layers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional

from .errors import EmptyNetwork, InvalidParameters, SchemeRequiresTwoFirstLayerAgents
from .network import (
    AgentId,
    AncestorCase,
    Layering,
    LeafCase,
    Network,
    ORDERINGS,
    compute_layering,
    layer_events,
    single_layer_context,
)

SPLIT_FUNCTIONS: dict[str, Callable[[int], float]] = {
    "identity": lambda n: float(n),
    "shifted": lambda n: float(n + 1),
    "exp": lambda n: float(2**n),
}
MECHANISMS = ("starter", "scheme", "fixed", "uniform")
BASELINES = frozenset({"fixed", "uniform"})


def _check_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise InvalidParameters(f"{name} must lie in (0, 1), got {value!r}")


def _check_budget(budget: float) -> None:
    if not (budget > 0 and math.isfinite(budget)):
        raise InvalidParameters(f"budget must be positive and finite, got {budget!r}")


@dataclass(frozen=True)
class StarterConfig:
    beta: float = 0.5
    f: str = "shifted"
    budget: float = 1.0

    def __post_init__(self) -> None:
        _check_unit("beta", self.beta)
        _check_budget(self.budget)
        if self.f not in SPLIT_FUNCTIONS:
            raise InvalidParameters(f"unknown split function {self.f!r}")


@dataclass(frozen=True)
class SchemeConfig:
    alpha: float = 0.2
    beta: float = 0.2
    budget: float = 1.0
    ordering: str = "arrival"
    seed: int = 0

    def __post_init__(self) -> None:
        _check_unit("alpha", self.alpha)
        _check_unit("beta", self.beta)
        _check_budget(self.budget)
        if self.ordering not in ORDERINGS:
            raise InvalidParameters(f"unknown ordering {self.ordering!r}")


@dataclass(frozen=True)
class MechanismConfig:
    """Mechanism selector plus the union of all mechanism parameters."""

    mechanism: str = "scheme"
    alpha: float = 0.2
    beta: float = 0.2
    budget: float = 1.0
    f: str = "shifted"
    ordering: str = "arrival"
    seed: int = 0
    fixed_reward: float = 1.0

    def __post_init__(self) -> None:
        if self.mechanism not in MECHANISMS:
            raise InvalidParameters(f"unknown mechanism {self.mechanism!r}")
        _check_budget(self.budget)
        if self.mechanism == "starter":
            self.starter()
        elif self.mechanism == "scheme":
            self.scheme()
        elif self.mechanism == "fixed" and not self.fixed_reward > 0:
            raise InvalidParameters(f"fixed reward must be positive, got {self.fixed_reward!r}")

    def starter(self) -> StarterConfig:
        return StarterConfig(beta=self.beta, f=self.f, budget=self.budget)

    def scheme(self) -> SchemeConfig:
        return SchemeConfig(
            alpha=self.alpha, beta=self.beta, budget=self.budget, ordering=self.ordering, seed=self.seed
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"budget": self.budget}
        if self.mechanism == "scheme":
            out.update(alpha=self.alpha, beta=self.beta, ordering=self.ordering)
            if self.ordering == "random":
                out["seed"] = self.seed
        elif self.mechanism == "starter":
            out.update(beta=self.beta, f=self.f)
        elif self.mechanism == "fixed":
            out["fixed_reward"] = self.fixed_reward
        return out


@dataclass
class AgentLedger:
    vb: float = 0.0
    vh: float = 0.0

    @property
    def total(self) -> float:
        return self.vb + self.vh


@dataclass(frozen=True)
class Transfer:
    """One propagation event: ``payer`` funds ``parent`` and ``child``.

    ``rule`` is ``adjacent`` for the two-layer algorithm, ``leaf`` and
    ``ancestor`` for the two single-agent-layer cases.
    """

    layer: int
    rule: str
    child: AgentId
    parent: AgentId
    payer: AgentId
    parent_gain: float
    child_gain: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "event": "transfer",
            "layer": self.layer,
            "rule": self.rule,
            "child": self.child,
            "parent": self.parent,
            "payer": self.payer,
            "parent_gain": self.parent_gain,
            "child_gain": self.child_gain,
        }


@dataclass(frozen=True)
class Seed:
    """Initial budget placed on a first-layer agent."""

    agent: AgentId
    amount: float

    def to_dict(self) -> dict[str, Any]:
        return {"event": "seed", "agent": self.agent, "amount": self.amount}


@dataclass
class LayerAccount:
    """Budget flowing through one layer of the scheme.

    ``incoming`` is the sum of the layer's initial base values, ``retained``
    and ``passed_down`` are measured on the ledger right after the layer is
    processed, ``b_prime``/``vb_after`` hold the per-agent values.
    """

    l: int
    incoming: float
    retained: float
    passed_down: float
    b_prime: dict[AgentId, float]
    vb_after: dict[AgentId, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "l": self.l,
            "incoming": self.incoming,
            "retained": self.retained,
            "passed_down": self.passed_down,
            "b_prime": dict(sorted(self.b_prime.items())),
        }


@dataclass
class RewardVector:
    mechanism: str
    budget: float
    rewards: dict[AgentId, float]
    sponsor_remainder: float
    trace: list[Any] = field(default_factory=list)
    layers: list[LayerAccount] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, agent: AgentId) -> float:
        return self.rewards[agent]

    @property
    def total(self) -> float:
        return self.sponsor_remainder + math.fsum(self.rewards.values())

    def to_dict(self, trace: bool = False) -> dict[str, Any]:
        out = {
            "mechanism": self.mechanism,
            "config": self.config,
            "rewards": dict(sorted(self.rewards.items())),
            "sponsor_remainder": self.sponsor_remainder,
            "layers": [acc.to_dict() for acc in self.layers],
        }
        if trace:
            out["trace"] = [rec.to_dict() for rec in self.trace]
        return out


def starter_layer_budget(l: int, cfg: StarterConfig) -> float:
    """Budget of layer ``l`` under the starter: beta^(l-1) (1 - beta) B."""
    if l < 1:
        raise InvalidParameters(f"layers are numbered from 1, got {l}")
    return cfg.beta ** (l - 1) * (1 - cfg.beta) * cfg.budget


def run_starter(net: Network, cfg: StarterConfig, lay: Optional[Layering] = None) -> RewardVector:
    """Split each layer's geometric budget in proportion to f(n_i).

    A layer whose weights all vanish returns its budget to the sponsor.
    """
    lay = lay or compute_layering(net)
    f = SPLIT_FUNCTIONS[cfg.f]
    rewards: dict[AgentId, float] = {}
    handed_out = 0.0
    for l, members in enumerate(lay.layers, start=1):
        weights = {i: f(lay.informed(i)) for i in members}
        denom = math.fsum(weights.values())
        budget_l = starter_layer_budget(l, cfg)
        if denom > 0:
            for i in members:
                rewards[i] = weights[i] / denom * budget_l
            handed_out += budget_l
        else:
            rewards.update(dict.fromkeys(members, 0.0))
    return RewardVector(
        mechanism="starter",
        budget=cfg.budget,
        rewards=rewards,
        sponsor_remainder=cfg.budget - handed_out,
        config={"beta": cfg.beta, "f": cfg.f, "budget": cfg.budget},
    )


def _pay(
    ledger: dict[AgentId, AgentLedger],
    payer: AgentId,
    parent: AgentId,
    child: AgentId,
    fraction: float,
    beta: float,
    layer: int,
    rule: str,
) -> Transfer:
    # The slice leaves the payer in one piece so the ledger total is preserved.
    slice_ = fraction * ledger[payer].vb
    parent_gain = beta * slice_
    child_gain = slice_ - parent_gain
    ledger[payer].vb -= slice_
    ledger[parent].vh += parent_gain
    ledger[child].vb += child_gain
    return Transfer(layer, rule, child, parent, payer, parent_gain, child_gain)


def distribute_adjacent_layers(
    ledger: dict[AgentId, AgentLedger],
    lay: Layering,
    l: int,
    cfg: SchemeConfig,
    rng: Optional[random.Random] = None,
) -> list[Transfer]:
    members = lay.layer(l)
    if len(members) < 2:
        raise InvalidParameters(f"layer {l} has fewer than two agents")
    records = []
    for edge in layer_events(lay, l, cfg.ordering, rng):
        for payer in members:
            if payer != edge.src:
                records.append(_pay(ledger, payer, edge.src, edge.dst, cfg.alpha, cfg.beta, l, "adjacent"))
    return records


def distribute_single_agent_layer(
    ledger: dict[AgentId, AgentLedger],
    lay: Layering,
    net: Network,
    i: AgentId,
    cfg: SchemeConfig,
    rng: Optional[random.Random] = None,
) -> list[Transfer]:
    ctx = single_layer_context(lay, net, i)
    l = lay.depth[i]
    kids = [e.dst for e in layer_events(lay, l, cfg.ordering, rng)]
    if not kids:
        return []
    records = []
    if isinstance(ctx, LeafCase):
        for j in kids:
            for leaf in ctx.leaves:
                records.append(_pay(ledger, leaf, i, j, cfg.alpha, cfg.beta, l, "leaf"))
    else:
        assert isinstance(ctx, AncestorCase)
        fraction = cfg.alpha / ctx.divisor
        payers = [e.src for e in lay.parents[ctx.ancestor]]
        for j in kids:
            for y in payers:
                records.append(_pay(ledger, y, i, j, fraction, cfg.beta, l, "ancestor"))
    return records


def run_scheme(net: Network, cfg: SchemeConfig, lay: Optional[Layering] = None) -> RewardVector:
    lay = lay or compute_layering(net)
    first = lay.layer(1)
    if len(first) < 2:
        raise SchemeRequiresTwoFirstLayerAgents(
            f"the scheme needs at least two agents in the first layer, got {len(first)}"
        )
    rng = random.Random(cfg.seed) if cfg.ordering == "random" else None
    ledger = {a: AgentLedger() for a in lay.reachable}
    share = cfg.budget / len(first)
    trace: list[Any] = []
    for a in first:
        ledger[a].vb = share
        trace.append(Seed(a, share))

    accounts = []
    for l, members in enumerate(lay.layers, start=1):
        b_prime = {i: ledger[i].vb for i in members}
        if len(members) > 1:
            trace.extend(distribute_adjacent_layers(ledger, lay, l, cfg, rng))
        else:
            trace.extend(distribute_single_agent_layer(ledger, lay, net, members[0], cfg, rng))
        accounts.append(
            LayerAccount(
                l=l,
                incoming=math.fsum(b_prime.values()),
                retained=math.fsum(ledger[i].total for i in members),
                passed_down=math.fsum(ledger[j].vb for j in lay.layer(l + 1)),
                b_prime=b_prime,
                vb_after={i: ledger[i].vb for i in members},
            )
        )

    return RewardVector(
        mechanism="scheme",
        budget=cfg.budget,
        rewards={a: led.total for a, led in ledger.items()},
        sponsor_remainder=0.0,
        trace=trace,
        layers=accounts,
        config={"alpha": cfg.alpha, "beta": cfg.beta, "budget": cfg.budget, "ordering": cfg.ordering},
    )


@dataclass(frozen=True)
class LayerTotal:
    """Closed-form split of a multi-agent layer's incoming budget."""

    retained: float
    passed_down: float


def scheme_layer_total(
    lay: Layering,
    l: int,
    before: Mapping[AgentId, float],
    after: Optional[Mapping[AgentId, Any]] = None,
    alpha: float = 0.2,
    beta: float = 0.2,
) -> LayerTotal:
    """Retained and passed-down totals of layer ``l`` from its base values.

    retained = beta * sum(b') + (1 - beta) * sum((1 - alpha)^{n_-i} b'),
    which is what the two-layer algorithm produces: every event moves a
    beta share to a parent inside the layer and 1 - beta to the next layer.
    When ``after`` (ledger entries or totals right after the layer) is
    given, the ledger-measured totals must agree, else ``AssertionError``.
    """
    members = lay.layer(l)
    incoming = math.fsum(before[i] for i in members)
    surviving = math.fsum((1 - alpha) ** lay.informed_by_others(i) * before[i] for i in members)
    retained = beta * incoming + (1 - beta) * surviving
    total = LayerTotal(retained=retained, passed_down=incoming - retained)
    if after is not None:
        measured = math.fsum(getattr(after[i], "total", after[i]) for i in members)
        if not math.isclose(measured, retained, rel_tol=1e-9, abs_tol=1e-12 * max(incoming, 1.0)):
            raise AssertionError(f"layer {l}: ledger retains {measured}, closed form {retained}")
    return total


def baseline_fixed_reward(net: Network, r: float, budget: float, lay: Optional[Layering] = None) -> RewardVector:
    """Pay every participating agent ``r``; the sponsor may go negative."""
    lay = lay or compute_layering(net)
    agents = lay.reachable
    return RewardVector(
        mechanism="fixed",
        budget=budget,
        rewards=dict.fromkeys(agents, float(r)),
        sponsor_remainder=budget - len(agents) * r,
        config={"budget": budget, "fixed_reward": r},
    )


def baseline_uniform(net: Network, budget: float, lay: Optional[Layering] = None) -> RewardVector:
    """Split the budget evenly among all participating agents."""
    lay = lay or compute_layering(net)
    agents = lay.reachable
    if not agents:
        raise EmptyNetwork("uniform split needs at least one agent")
    return RewardVector(
        mechanism="uniform",
        budget=budget,
        rewards=dict.fromkeys(agents, budget / len(agents)),
        sponsor_remainder=0.0,
        config={"budget": budget},
    )


def run_mechanism(net: Network, cfg: MechanismConfig, lay: Optional[Layering] = None) -> RewardVector:
    lay = lay or compute_layering(net)
    if cfg.mechanism == "starter":
        out = run_starter(net, cfg.starter(), lay)
    elif cfg.mechanism == "scheme":
        out = run_scheme(net, cfg.scheme(), lay)
    elif cfg.mechanism == "fixed":
        out = baseline_fixed_reward(net, cfg.fixed_reward, cfg.budget, lay)
    else:
        out = baseline_uniform(net, cfg.budget, lay)
    out.config = cfg.to_dict()
    return out


def replay_trace(trace: Iterable[Any], budget: float) -> list[float]:
    """Rebuild ledger totals from a serialized trace.

    Returns the sum of all ledger entries after every record; useful to
    audit conservation independently of the engine that produced the log.
    """
    vb: dict[str, float] = {}
    vh: dict[str, float] = {}
    sums = []
    for rec in trace:
        rec = rec.to_dict() if hasattr(rec, "to_dict") else rec
        if rec["event"] == "seed":
            vb[rec["agent"]] = vb.get(rec["agent"], 0.0) + rec["amount"]
        else:
            paid = rec["parent_gain"] + rec["child_gain"]
            vb[rec["payer"]] = vb.get(rec["payer"], 0.0) - paid
            vh[rec["parent"]] = vh.get(rec["parent"], 0.0) + rec["parent_gain"]
            vb[rec["child"]] = vb.get(rec["child"], 0.0) + rec["child_gain"]
        sums.append(math.fsum(vb.values()) + math.fsum(vh.values()))
    return sums
