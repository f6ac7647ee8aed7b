"""Directed acyclic networks with two unicast sessions, and their cut vectors."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, fields, replace

from .errors import CycleError, ParseError

ROLE_KEYWORDS = {"source1": "s1", "source2": "s2", "sink1": "t1", "sink2": "t2"}


@dataclass(frozen=True)
class Network:
    """A DAG of unit-capacity edges.

    Parallel edges are repeated ``(tail, head)`` pairs; an edge is identified
    by its index in ``edges``.  ``artificial`` maps nodes added by
    :func:`normalize` to the original node they feed or drain.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    s1: str
    s2: str
    t1: str
    t2: str
    artificial: tuple[tuple[str, str], ...] = ()

    @classmethod
    def build(cls, edges, s1="s1", s2="s2", t1="t1", t2="t2", nodes=()) -> "Network":
        order: dict[str, None] = {}
        for n in (*nodes, s1, s2, t1, t2):
            order[n] = None
        edge_list = []
        for tail, head in edges:
            order[tail] = None
            order[head] = None
            edge_list.append((tail, head))
        return cls(tuple(order), tuple(edge_list), s1, s2, t1, t2)

    @property
    def sources(self) -> tuple[str, str]:
        return (self.s1, self.s2)

    @property
    def sinks(self) -> tuple[str, str]:
        return (self.t1, self.t2)

    def in_edges(self, node: str) -> list[int]:
        return [i for i, (_, h) in enumerate(self.edges) if h == node]

    def out_edges(self, node: str) -> list[int]:
        return [i for i, (t, _) in enumerate(self.edges) if t == node]

    def swapped(self) -> "Network":
        """Same graph with session labels exchanged: (s1, t1) <-> (s2, t2)."""
        return replace(self, s1=self.s2, s2=self.s1, t1=self.t2, t2=self.t1)


@dataclass(frozen=True)
class CutVector:
    """The nine min-cut values ``k_{N1-N2}``.

    Field names drop the dash: ``k121`` is the cut from {s1, s2} to t1 and
    ``k112`` the cut from s1 to {t1, t2}.
    """

    k11: int
    k22: int
    k12: int
    k21: int
    k121: int
    k122: int
    k112: int
    k212: int
    k1212: int

    @classmethod
    def from_sequence(cls, values) -> "CutVector":
        values = [int(v) for v in values]
        if len(values) != 9:
            raise ValueError(f"cut vector needs 9 values, got {len(values)}")
        if any(v < 0 for v in values):
            raise ValueError("cut values must be nonnegative")
        return cls(*values)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def swapped(self) -> "CutVector":
        return CutVector(self.k22, self.k11, self.k21, self.k12,
                         self.k122, self.k121, self.k212, self.k112, self.k1212)

    def violations(self) -> list[str]:
        """Cut-structure inequalities this vector fails; empty for graph-derived vectors."""
        out = []
        checks = [
            ("k11 <= min(k121, k112)", self.k11 <= min(self.k121, self.k112)),
            ("k22 <= min(k122, k212)", self.k22 <= min(self.k122, self.k212)),
            ("k12 <= min(k122, k112)", self.k12 <= min(self.k122, self.k112)),
            ("k21 <= min(k121, k212)", self.k21 <= min(self.k121, self.k212)),
            ("max(k121, k122, k112, k212) <= k1212",
             max(self.k121, self.k122, self.k112, self.k212) <= self.k1212),
            ("k1212 <= k121 + k122", self.k1212 <= self.k121 + self.k122),
            ("k1212 <= k112 + k212", self.k1212 <= self.k112 + self.k212),
        ]
        for name, ok in checks:
            if not ok:
                out.append(name)
        return out


def parse_network(text: str) -> Network:
    roles: dict[str, str] = {}
    nodes: dict[str, None] = {}
    edges: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw, args = parts[0], parts[1:]
        if kw == "node":
            if len(args) != 1:
                raise ParseError("expected 'node <id>'", lineno)
            nodes[args[0]] = None
        elif kw in ROLE_KEYWORDS:
            if len(args) != 1:
                raise ParseError(f"expected '{kw} <id>'", lineno)
            role = ROLE_KEYWORDS[kw]
            if role in roles:
                raise ParseError(f"duplicate {kw} declaration", lineno)
            roles[role] = args[0]
            nodes[args[0]] = None
        elif kw == "edge":
            if len(args) not in (2, 3):
                raise ParseError("expected 'edge <tail> <head> [multiplicity]'", lineno)
            mult = 1
            if len(args) == 3:
                try:
                    mult = int(args[2])
                except ValueError:
                    raise ParseError(f"bad multiplicity {args[2]!r}", lineno) from None
                if mult < 1:
                    raise ParseError("multiplicity must be >= 1", lineno)
            tail, head = args[0], args[1]
            if tail == head:
                raise ParseError("self-loop", lineno)
            nodes[tail] = None
            nodes[head] = None
            edges.extend([(tail, head)] * mult)
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno)
    for kw, role in ROLE_KEYWORDS.items():
        if role not in roles:
            raise ParseError(f"missing {kw} declaration")
    if len(set(roles.values())) != 4:
        raise ParseError("sources and sinks must be four distinct nodes")
    net = Network(tuple(nodes), tuple(edges), roles["s1"], roles["s2"], roles["t1"], roles["t2"])
    topological_order(net)
    return net


def format_network(net: Network) -> str:
    lines = [f"source1 {net.s1}", f"source2 {net.s2}", f"sink1 {net.t1}", f"sink2 {net.t2}"]
    lines += [f"node {n}" for n in net.nodes if n not in (net.s1, net.s2, net.t1, net.t2)]
    lines += [f"edge {t} {h}" for t, h in net.edges]
    return "\n".join(lines) + "\n"


def topological_order(net: Network) -> list[str]:
    """Kahn's algorithm; ties broken by node declaration order."""
    indeg = {n: 0 for n in net.nodes}
    succ: dict[str, list[str]] = {n: [] for n in net.nodes}
    for t, h in net.edges:
        indeg[h] += 1
        succ[t].append(h)
    rank = {n: i for i, n in enumerate(net.nodes)}
    ready = sorted((n for n in net.nodes if indeg[n] == 0), key=rank.__getitem__)
    order = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        new = []
        for h in succ[n]:
            indeg[h] -= 1
            if indeg[h] == 0:
                new.append(h)
        if new:
            ready = sorted(ready + new, key=rank.__getitem__)
    if len(order) != len(net.nodes):
        raise CycleError("network contains a directed cycle")
    return order


def min_cut(net: Network, S, T) -> int:
    """Maximum number of edge-disjoint paths from node set S to node set T.

    BFS augmenting paths on the unit-capacity residual graph, with a
    supersource and supersink attached by edges of capacity |E| + 1.
    """
    S, T = list(S), list(T)
    if not S or not T:
        raise ValueError("S and T must be nonempty")
    if set(S) & set(T):
        raise ValueError("S and T must be disjoint")
    big = len(net.edges) + 1
    src, snk = ("__src__",), ("__snk__",)
    # arc list: head, capacity, index of reverse arc
    adj: dict = {n: [] for n in net.nodes}
    adj[src] = []
    adj[snk] = []
    heads, caps, rev = [], [], []

    def add(u, v, c):
        heads.append(v), caps.append(c), rev.append(len(heads))
        adj[u].append(len(heads) - 1)
        heads.append(u), caps.append(0), rev.append(len(heads) - 2)
        adj[v].append(len(heads) - 1)

    for s in S:
        add(src, s, big)
    for t in T:
        add(t, snk, big)
    for t, h in net.edges:
        add(t, h, 1)

    flow = 0
    while True:
        parent = {src: None}
        queue = deque([src])
        while queue and snk not in parent:
            u = queue.popleft()
            for a in adj[u]:
                v = heads[a]
                if caps[a] > 0 and v not in parent:
                    parent[v] = a
                    queue.append(v)
        if snk not in parent:
            return flow
        # S and T are disjoint, so every augmenting path crosses a unit arc
        v = snk
        while parent[v] is not None:
            a = parent[v]
            caps[a] -= 1
            caps[rev[a]] += 1
            v = heads[rev[a]]
        flow += 1


def cut_vector(net: Network) -> CutVector:
    topological_order(net)
    s1, s2, t1, t2 = net.s1, net.s2, net.t1, net.t2
    return CutVector(
        k11=min_cut(net, [s1], [t1]),
        k22=min_cut(net, [s2], [t2]),
        k12=min_cut(net, [s1], [t2]),
        k21=min_cut(net, [s2], [t1]),
        k121=min_cut(net, [s1, s2], [t1]),
        k122=min_cut(net, [s1, s2], [t2]),
        k112=min_cut(net, [s1], [t1, t2]),
        k212=min_cut(net, [s2], [t1, t2]),
        k1212=min_cut(net, [s1, s2], [t1, t2]),
    )


def _fresh(name: str, taken) -> str:
    cand = name
    i = 1
    while cand in taken:
        cand = f"{name}{i}"
        i += 1
    return cand


def normalize(net: Network) -> Network:
    """Give s_i exactly k_{i-12} out-edges and t_i exactly k_{12-i} in-edges.

    A role node that has the wrong degree, or any incoming edge (sources) or
    outgoing edge (sinks), is replaced by an artificial node joined to it by
    the required number of parallel edges.  The cut vector is unchanged.
    """
    cv = cut_vector(net)
    nodes = list(net.nodes)
    edges = list(net.edges)
    roles = {"s1": net.s1, "s2": net.s2, "t1": net.t1, "t2": net.t2}
    artificial = list(net.artificial)
    changed = False
    need = {"s1": cv.k112, "s2": cv.k212, "t1": cv.k121, "t2": cv.k122}
    for role in ("s1", "s2"):
        n = roles[role]
        out_deg = sum(1 for t, _ in edges if t == n)
        in_deg = sum(1 for _, h in edges if h == n)
        if out_deg != need[role] or in_deg:
            new = _fresh(f"{role}_art", nodes)
            nodes.append(new)
            edges.extend([(new, n)] * need[role])
            artificial.append((new, n))
            roles[role] = new
            changed = True
    for role in ("t1", "t2"):
        n = roles[role]
        out_deg = sum(1 for t, _ in edges if t == n)
        in_deg = sum(1 for _, h in edges if h == n)
        if in_deg != need[role] or out_deg:
            new = _fresh(f"{role}_art", nodes)
            nodes.append(new)
            edges.extend([(n, new)] * need[role])
            artificial.append((new, n))
            roles[role] = new
            changed = True
    if not changed:
        return net
    out = Network(tuple(nodes), tuple(edges), roles["s1"], roles["s2"], roles["t1"], roles["t2"],
                  tuple(artificial))
    after = cut_vector(out)
    assert after == cv, f"normalization changed the cut vector: {cv} -> {after}"
    return out


def is_normalized(net: Network) -> bool:
    cv = cut_vector(net)
    return (
        len(net.out_edges(net.s1)) == cv.k112 and not net.in_edges(net.s1)
        and len(net.out_edges(net.s2)) == cv.k212 and not net.in_edges(net.s2)
        and len(net.in_edges(net.t1)) == cv.k121 and not net.out_edges(net.t1)
        and len(net.in_edges(net.t2)) == cv.k122 and not net.out_edges(net.t2)
    )
