"""Propagation networks, BFS layering and counterfactual edge hiding.

A network is a sponsor-rooted digraph whose edges carry arrival timestamps.
Reward mechanisms never look at the raw digraph: they look at its
``Layering``, where every agent sits at its BFS distance from the sponsor and
only edges going exactly one layer down are kept.  Back, cross and skip edges
are reported but carry no reward, which is how arbitrary digraphs (cycles
included) are reduced to the layered DAG model.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Mapping, Sequence, Union

from .errors import (
    EdgeNotOwned,
    EmptyNetwork,
    InvalidNetwork,
    NoAncestorFound,
    NotSingleAgentLayer,
    SchemeRequiresTwoFirstLayerAgents,
)

AgentId = str
DEFAULT_SPONSOR: AgentId = "S"


@dataclass(frozen=True, order=True)
class PropagationEvent:
    """Agent ``src`` informs agent ``dst`` at time ``t``.

    Field order makes the natural ordering ``(t, src, dst)``.
    """

    t: float
    src: AgentId
    dst: AgentId

    @property
    def pair(self) -> tuple[AgentId, AgentId]:
        return (self.src, self.dst)

    def to_dict(self) -> dict[str, Any]:
        return {"from": self.src, "to": self.dst, "t": self.t}


@dataclass(frozen=True)
class Network:
    sponsor: AgentId
    agents: frozenset[AgentId]
    edges: tuple[PropagationEvent, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", frozenset(self.agents) - {self.sponsor})
        object.__setattr__(self, "edges", tuple(self.edges))
        seen: set[tuple[AgentId, AgentId]] = set()
        known = self.agents | {self.sponsor}
        for e in self.edges:
            if e.src == e.dst:
                raise InvalidNetwork(f"self-loop on {e.src!r}")
            if e.pair in seen:
                raise InvalidNetwork(f"duplicate edge {e.src!r}->{e.dst!r}")
            seen.add(e.pair)
            for end in e.pair:
                if end not in known:
                    raise InvalidNetwork(f"edge {e.src!r}->{e.dst!r} names unknown agent {end!r}")
            if not math.isfinite(e.t):
                raise InvalidNetwork(f"edge {e.src!r}->{e.dst!r} has non-finite time {e.t!r}")

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[AgentId, AgentId]],
        sponsor: AgentId = DEFAULT_SPONSOR,
        agents: Iterable[AgentId] = (),
    ) -> "Network":
        """Build a network whose arrival times follow listing order."""
        edges = tuple(PropagationEvent(float(k), a, b) for k, (a, b) in enumerate(pairs))
        names = set(agents)
        for e in edges:
            names.update(e.pair)
        return cls(sponsor, frozenset(names), edges)

    def out_edges(self, agent: AgentId) -> list[PropagationEvent]:
        return sorted(e for e in self.edges if e.src == agent)

    def with_edges(self, edges: Iterable[PropagationEvent]) -> "Network":
        return Network(self.sponsor, self.agents, tuple(edges))

    def to_dict(self) -> dict[str, Any]:
        return {
            "sponsor": self.sponsor,
            "agents": sorted(self.agents),
            "edges": [e.to_dict() for e in self.edges],
        }


def network_from_dict(data: Mapping[str, Any]) -> Network:
    """Parse the JSON network format.

    Missing timestamps default to list position; a missing agent list is
    inferred from the edges.
    """
    try:
        sponsor = str(data.get("sponsor", DEFAULT_SPONSOR))
        raw_edges = data.get("edges", [])
        edges = []
        for k, raw in enumerate(raw_edges):
            t = raw.get("t")
            edges.append(PropagationEvent(float(k if t is None else t), str(raw["from"]), str(raw["to"])))
        if "agents" in data:
            agents = {str(a) for a in data["agents"]}
        else:
            agents = {end for e in edges for end in e.pair}
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise InvalidNetwork(f"malformed network document: {exc}") from exc
    return Network(sponsor, frozenset(agents), tuple(edges))


def load_network(source: Union[str, IO[str]]) -> Network:
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return load_network(fh)
    try:
        data = json.load(source)
    except json.JSONDecodeError as exc:
        raise InvalidNetwork(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidNetwork("network document must be a JSON object")
    return network_from_dict(data)


def dump_network(net: Network) -> str:
    return json.dumps(net.to_dict(), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class Layering:
    """BFS layers of a network plus the kept (layer-respecting) edges.

    ``layers[0]`` is the first layer L_1.  Children and parents are indexed
    over kept edges only and listed in arrival order ``(t, src, dst)``.
    """

    sponsor: AgentId
    depth: Mapping[AgentId, int]
    layers: tuple[tuple[AgentId, ...], ...]
    kept_edges: tuple[PropagationEvent, ...]
    dropped_edges: tuple[PropagationEvent, ...]
    unreachable: tuple[AgentId, ...]
    children: Mapping[AgentId, tuple[PropagationEvent, ...]] = field(repr=False)
    parents: Mapping[AgentId, tuple[PropagationEvent, ...]] = field(repr=False)

    @property
    def max_depth(self) -> int:
        return len(self.layers)

    def layer(self, l: int) -> tuple[AgentId, ...]:
        """Agents of layer ``l`` (1-based); empty beyond the last layer."""
        if 1 <= l <= len(self.layers):
            return self.layers[l - 1]
        return ()

    def informed(self, agent: AgentId) -> int:
        """n_i: the number of agents ``agent`` informs over kept edges."""
        return len(self.children.get(agent, ()))

    def informed_by_others(self, agent: AgentId) -> int:
        """n_{-i}: kept edges leaving the other members of the agent's layer."""
        return sum(self.informed(k) for k in self.layer(self.depth[agent]) if k != agent)

    def kept_pairs(self) -> frozenset[tuple[AgentId, AgentId]]:
        return frozenset(e.pair for e in self.kept_edges)

    @property
    def reachable(self) -> tuple[AgentId, ...]:
        return tuple(a for layer in self.layers for a in layer)


def compute_layering(net: Network) -> Layering:
    adjacency: dict[AgentId, set[AgentId]] = {}
    for e in net.edges:
        adjacency.setdefault(e.src, set()).add(e.dst)

    depth = {net.sponsor: 0}
    queue = deque([net.sponsor])
    while queue:
        node = queue.popleft()
        for nxt in adjacency.get(node, ()):
            if nxt not in depth:
                depth[nxt] = depth[node] + 1
                queue.append(nxt)

    kept, dropped = [], []
    children: dict[AgentId, list[PropagationEvent]] = {}
    parents: dict[AgentId, list[PropagationEvent]] = {}
    for e in sorted(net.edges):
        if e.src in depth and depth.get(e.dst) == depth[e.src] + 1:
            kept.append(e)
            children.setdefault(e.src, []).append(e)
            parents.setdefault(e.dst, []).append(e)
        else:
            dropped.append(e)

    n_layers = max(depth.values())
    buckets: list[list[AgentId]] = [[] for _ in range(n_layers)]
    for agent, d in depth.items():
        if d > 0:
            buckets[d - 1].append(agent)

    return Layering(
        sponsor=net.sponsor,
        depth=depth,
        layers=tuple(tuple(sorted(b)) for b in buckets),
        kept_edges=tuple(kept),
        dropped_edges=tuple(dropped),
        unreachable=tuple(sorted(net.agents - depth.keys())),
        children={k: tuple(v) for k, v in children.items()},
        parents={k: tuple(v) for k, v in parents.items()},
    )


@dataclass
class ValidationReport:
    ok: bool
    errors: list[Exception] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def raise_for_errors(self) -> None:
        if self.errors:
            raise self.errors[0]


def validate_network(net: Network, cfg: Any = "scheme") -> ValidationReport:
    """Check a network against the requirements of a mechanism.

    ``cfg`` is a mechanism name or any object with a ``mechanism`` attribute.
    Unreachable agents are not an error: they are dropped and reported as
    warnings.
    """
    mechanism = getattr(cfg, "mechanism", cfg)
    lay = compute_layering(net)
    errors: list[Exception] = []
    if not net.agents:
        errors.append(EmptyNetwork("network has no agents besides the sponsor"))
    elif mechanism == "scheme" and len(lay.layer(1)) < 2:
        errors.append(
            SchemeRequiresTwoFirstLayerAgents(
                f"the scheme needs at least two agents in the first layer, got {len(lay.layer(1))}"
            )
        )
    warnings = [f"{a} unreachable, dropped" for a in lay.unreachable]
    return ValidationReport(ok=not errors, errors=errors, warnings=warnings)


def hide_edges(net: Network, owner: AgentId, e: Iterable[Any]) -> Network:
    """The network left when ``owner`` withholds the edges ``e``.

    Edges may be given as ``PropagationEvent`` objects or ``(src, dst)`` pairs.
    Agents no longer reachable from the sponsor are removed together with all
    their edges; the owner itself is never removed.
    """
    hidden: set[tuple[AgentId, AgentId]] = set()
    for edge in e:
        pair = edge.pair if isinstance(edge, PropagationEvent) else tuple(edge)
        if pair[0] != owner:
            raise EdgeNotOwned(f"edge {pair[0]!r}->{pair[1]!r} does not start at {owner!r}")
        hidden.add(pair)
    if not hidden:
        return net

    remaining = [edge for edge in net.edges if edge.pair not in hidden]
    adjacency: dict[AgentId, list[AgentId]] = {}
    for edge in remaining:
        adjacency.setdefault(edge.src, []).append(edge.dst)
    reach = {net.sponsor}
    stack = [net.sponsor]
    while stack:
        for nxt in adjacency.get(stack.pop(), ()):
            if nxt not in reach:
                reach.add(nxt)
                stack.append(nxt)
    reach.add(owner)
    kept = tuple(edge for edge in remaining if edge.src in reach and edge.dst in reach)
    return Network(net.sponsor, frozenset(net.agents & reach), kept)


@dataclass(frozen=True)
class LeafCase:
    """Single-agent layer with leaves elsewhere in the graph to tax."""

    leaves: tuple[AgentId, ...]


@dataclass(frozen=True)
class AncestorCase:
    """Single-agent layer without spare leaves.

    ``ancestor`` is the nearest node on the agent's single-parent chain
    (the agent itself included) with more than one parent, ``parents`` the
    size of its parent set and ``hops`` its distance to the agent plus one.
    """

    ancestor: AgentId
    parents: int
    hops: int

    @property
    def divisor(self) -> int:
        return self.parents * 2**self.hops


def single_layer_context(lay: Layering, net: Network, i: AgentId) -> Union[LeafCase, AncestorCase]:
    d = lay.depth.get(i)
    if d is None or d == 0 or lay.layer(d) != (i,):
        raise NotSingleAgentLayer(f"{i!r} does not form a single-agent layer")
    leaves = tuple(
        a for a in lay.reachable if a != i and lay.depth[a] <= d and lay.informed(a) == 0
    )
    if leaves:
        return LeafCase(leaves)
    x = i
    while True:
        ps = lay.parents.get(x, ())
        if len(ps) > 1:
            return AncestorCase(ancestor=x, parents=len(ps), hops=d - lay.depth[x] + 1)
        if not ps or ps[0].src == lay.sponsor:
            raise NoAncestorFound(f"no multi-parent ancestor above {i!r}")
        x = ps[0].src


ORDERINGS = ("arrival", "child-arrival", "id", "random")


def layer_events(lay: Layering, l: int, ordering: str = "arrival", rng: Any = None) -> list[PropagationEvent]:
    """Kept edges from layer ``l`` to layer ``l + 1`` in processing order.

    ``arrival`` processes every edge at its own timestamp ``(t, src, dst)``.
    The other policies group the edges by child and list each child's
    parents by timestamp: ``child-arrival`` orders children by their
    earliest kept in-edge (ties by child id, then parent id), ``id`` by child
    id and ``random`` shuffles the children with ``rng``.
    """
    kids = list(lay.layer(l + 1))
    if ordering == "arrival":
        return sorted(e for j in kids for e in lay.parents[j])
    if ordering == "child-arrival":
        kids.sort(key=lambda j: (lay.parents[j][0].t, j, lay.parents[j][0].src))
    elif ordering == "random":
        if rng is None:
            raise ValueError("random ordering needs an rng")
        rng.shuffle(kids)
    elif ordering != "id":
        raise ValueError(f"unknown ordering {ordering!r}")
    return [e for j in kids for e in lay.parents[j]]


def shift_times(net: Network, fn: Any, edges: Union[Sequence[tuple[AgentId, AgentId]], None] = None) -> Network:
    """Apply ``fn`` to the timestamps of ``edges`` (all edges when omitted)."""
    chosen = None if edges is None else set(edges)
    return net.with_edges(
        PropagationEvent(fn(e.t), e.src, e.dst) if chosen is None or e.pair in chosen else e
        for e in net.edges
    )
