"""Fixture networks and a seeded generator of small random two-unicast DAGs."""
from __future__ import annotations

import random

from .netgraph import Network


def single_edge() -> Network:
    return Network.build([("s1", "t1")])


def butterfly() -> Network:
    return Network.build([("s1", "m"), ("s2", "m"), ("m", "w"), ("w", "t1"), ("w", "t2"),
                          ("s1", "t2"), ("s2", "t1")])


def relay() -> Network:
    """Low-interference network: two private routes per session, one cross route each."""
    return Network.build([("s1", "t1"), ("s1", "a"), ("a", "t1"),
                          ("s2", "t2"), ("s2", "b"), ("b", "t2"),
                          ("s1", "t2"), ("s2", "c"), ("c", "t1")])


def parallel_pairs() -> Network:
    return Network.build([("s1", "t1"), ("s1", "t1"), ("s2", "t2"), ("s2", "t2")])


def random_dag(seed: int, max_nodes: int = 12, max_edges: int = 14) -> Network:
    """Random DAG on nodes n0..n{k-1} in topological index order.

    Sources are drawn from the first few nodes and sinks from the last few,
    so most instances carry traffic; edges into sources or out of sinks do
    occur and exercise normalization.
    """
    rng = random.Random(seed)
    n = rng.randint(4, max_nodes)
    names = [f"n{i}" for i in range(n)]
    early = list(range(min(3, n - 2)))
    s1, s2 = rng.sample(early, 2) if len(early) >= 2 else (0, 1)
    late = [i for i in range(max(n - 3, 2), n) if i not in (s1, s2)]
    t1, t2 = rng.sample(late, 2)
    m = rng.randint(max(3, n - 1), max_edges)
    edges = []
    for _ in range(m):
        a, b = sorted(rng.sample(range(n), 2))
        edges.append((names[a], names[b]))
    return Network.build(edges, s1=names[s1], s2=names[s2], t1=names[t1], t2=names[t2], nodes=names)


def random_corpus(count: int = 50, start: int = 0, **kw) -> list[Network]:
    return [random_dag(start + i, **kw) for i in range(count)]
