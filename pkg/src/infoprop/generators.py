"""Worked-example fixtures and seeded random graph families."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import InvalidParameters, UnknownFixture
from .network import DEFAULT_SPONSOR, AgentId, Network

# example1 only needs n_A = 2, n_B = 3 and C the only
# layer-2 propagator; the starter numbers depend on nothing else.
_FIXTURES: dict[str, list[tuple[str, str]]] = {
    "example1": [
        ("S", "A"), ("S", "B"),
        ("A", "C"), ("A", "D"),
        ("B", "F"), ("B", "G"), ("B", "H"),
        ("C", "I"),
    ],
    "example2": [
        ("S", "A"), ("S", "B"), ("S", "C"),
        ("A", "D"), ("B", "E"),
    ],
    "figure3": [
        ("S", "A"), ("S", "B"), ("S", "D"),
        ("A", "C"), ("B", "C"), ("D", "C"),
        ("C", "E"),
    ],
}

FIXTURE_NAMES = tuple(_FIXTURES)
FAMILIES = ("chain", "star", "layered-random", "single-chain-tail")


def paper_fixture(name: str) -> Network:
    try:
        pairs = _FIXTURES[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; expected one of {', '.join(FIXTURE_NAMES)}") from None
    return Network.from_pairs(pairs)


def agent_names(count: int, skip: frozenset[str] = frozenset({DEFAULT_SPONSOR})) -> list[AgentId]:
    """Spreadsheet-style names A, B, ..., Z, AA, AB, ... avoiding ``skip``."""
    names: list[AgentId] = []
    k = 0
    while len(names) < count:
        n, label = k, ""
        while True:
            label = chr(ord("A") + n % 26) + label
            n = n // 26 - 1
            if n < 0:
                break
        k += 1
        if label not in skip:
            names.append(label)
    return names


@dataclass(frozen=True)
class GraphFamily:
    """Parameters for ``gen_graph``.

    ``length``: chain nodes below the first layer's first agent (chain).
    ``width``: first-layer size (star, single-chain-tail).
    ``tail``: singleton layers below the funnel node (single-chain-tail).
    ``widths``: layer sizes (layered-random).
    ``max_out_degree``: cap on kept out-edges in layered-random.
    ``extra_edges``: probability of each extra (cross/back/skip) edge.
    ``leaves``: extra childless first-layer agents (single-chain-tail).
    """

    name: str
    length: int = 3
    width: int = 3
    tail: int = 2
    widths: tuple[int, ...] = (3, 2, 2)
    max_out_degree: int = 4
    extra_edges: float = 0.0
    leaves: int = 0
    seed: int = 0
    shuffle_times: bool = False


def _finish(pairs: list[tuple[str, str]], fam: GraphFamily, rng: random.Random) -> Network:
    if fam.shuffle_times:
        rng.shuffle(pairs)
    return Network.from_pairs(pairs)


def gen_graph(fam: GraphFamily) -> Network:
    rng = random.Random(fam.seed)
    if fam.name == "chain":
        if fam.length < 1:
            raise InvalidParameters("chain length must be at least 1")
        names = agent_names(fam.length + 1)
        head, other, rest = names[0], names[1], names[2:]
        pairs = [("S", head), ("S", other)]
        prev = head
        for a in rest:
            pairs.append((prev, a))
            prev = a
        return _finish(pairs, fam, rng)

    if fam.name == "star":
        if fam.width < 2:
            raise InvalidParameters("star needs at least two leaves")
        return _finish([("S", a) for a in agent_names(fam.width)], fam, rng)

    if fam.name == "single-chain-tail":
        if fam.width < 2 or fam.tail < 0 or fam.leaves < 0:
            raise InvalidParameters("single-chain-tail needs width >= 2, tail >= 0, leaves >= 0")
        names = agent_names(fam.width + fam.leaves + 1 + fam.tail)
        top = names[: fam.width]
        spare = names[fam.width : fam.width + fam.leaves]
        funnel = names[fam.width + fam.leaves]
        chain = names[fam.width + fam.leaves + 1 :]
        pairs = [("S", a) for a in top + spare]
        pairs += [(a, funnel) for a in top]
        prev = funnel
        for a in chain:
            pairs.append((prev, a))
            prev = a
        return _finish(pairs, fam, rng)

    if fam.name == "layered-random":
        return _layered_random(fam, rng)

    raise InvalidParameters(f"unknown family {fam.name!r}")


def _layered_random(fam: GraphFamily, rng: random.Random) -> Network:
    widths = list(fam.widths)
    if not widths or any(w < 1 for w in widths) or widths[0] < 2:
        raise InvalidParameters("layered-random needs a first layer of width >= 2 and positive widths")
    if fam.max_out_degree < 1:
        raise InvalidParameters("max_out_degree must be positive")
    if not 0.0 <= fam.extra_edges <= 1.0:
        raise InvalidParameters("extra_edges must be a probability")
    for upper, lower in zip(widths, widths[1:]):
        if lower > upper * fam.max_out_degree:
            raise InvalidParameters("a layer is wider than its parents can reach under max_out_degree")

    names = agent_names(sum(widths))
    layers, k = [], 0
    for w in widths:
        layers.append(names[k : k + w])
        k += w

    pairs = [("S", a) for a in layers[0]]
    out_deg: dict[str, int] = {}
    for upper, lower in zip(layers, layers[1:]):
        for child in lower:
            open_parents = [p for p in upper if out_deg.get(p, 0) < fam.max_out_degree]
            p = rng.choice(open_parents)
            pairs.append((p, child))
            out_deg[p] = out_deg.get(p, 0) + 1
        for p in upper:
            for child in lower:
                if (p, child) in pairs or out_deg.get(p, 0) >= fam.max_out_degree:
                    continue
                if rng.random() < fam.extra_edges:
                    pairs.append((p, child))
                    out_deg[p] = out_deg.get(p, 0) + 1

    # Non-layer-respecting edges: back, cross and skip edges that BFS drops.
    if fam.extra_edges > 0:
        everyone = names
        for src in everyone:
            if out_deg.get(src, 0) >= fam.max_out_degree or rng.random() >= fam.extra_edges / 2:
                continue
            dst = rng.choice(everyone)
            if dst == src or (src, dst) in pairs:
                continue
            pairs.append((src, dst))
            out_deg[src] = out_deg.get(src, 0) + 1
    return _finish(pairs, fam, rng)


def random_family(rng: random.Random, max_agents: int, max_out_degree: int = 4) -> GraphFamily:
    """Draw family parameters with at most ``max_agents`` non-sponsor agents."""
    if max_agents < 3:
        raise InvalidParameters("need room for at least three agents")
    seed = rng.randrange(2**31)
    shuffle = rng.random() < 0.3
    kind = rng.choices(FAMILIES, weights=(1, 1, 5, 3))[0]
    if kind == "chain":
        return GraphFamily("chain", length=rng.randint(1, max_agents - 1), seed=seed, shuffle_times=shuffle)
    if kind == "star":
        return GraphFamily("star", width=rng.randint(2, max_agents), seed=seed, shuffle_times=shuffle)
    if kind == "single-chain-tail":
        width = rng.randint(2, min(max_out_degree, max_agents - 1))
        leaves = rng.randint(0, min(2, max_agents - width - 1))
        tail = rng.randint(0, max_agents - width - leaves - 1)
        return GraphFamily(
            "single-chain-tail", width=width, leaves=leaves, tail=tail, seed=seed, shuffle_times=shuffle
        )
    budget = rng.randint(3, max_agents)
    widths = [rng.randint(2, min(max(2, budget // 2), budget))]
    left = budget - widths[0]
    while left > 0:
        w = rng.randint(1, min(left, widths[-1] * max_out_degree, max(1, left)))
        if rng.random() < 0.35:
            w = 1
        widths.append(w)
        left -= w
    return GraphFamily(
        "layered-random",
        widths=tuple(widths),
        max_out_degree=max_out_degree,
        extra_edges=rng.choice([0.0, 0.2, 0.4]),
        seed=seed,
        shuffle_times=shuffle,
    )


def random_corpus(count: int, max_agents: int, seed: int = 0, max_out_degree: int = 4) -> Iterator[Network]:
    """``count`` networks drawn from the mixed families, deterministic in ``seed``."""
    rng = random.Random(seed)
    for _ in range(count):
        yield gen_graph(random_family(rng, max_agents, max_out_degree))
