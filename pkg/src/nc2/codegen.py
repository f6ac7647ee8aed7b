"""Random linear network codes and their transfer matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gfmat
from .errors import ConstructionError, PreconditionError
from .netgraph import CutVector, Network, cut_vector, is_normalized, topological_order

ATTEMPTS_PER_TIER = 32


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


@dataclass(frozen=True, eq=False)
class CodedNetwork:
    """A normalized network with local coding coefficients and global vectors.

    For an edge leaving source s_i, ``local[n]`` holds the coefficients that
    mix the source's interface symbols (width k_{i-12}) onto that edge.  For
    every other edge it holds one coefficient per incoming edge of the tail
    node, listed in ``inputs[n]``.  ``global_vectors`` has one row
    ``[alpha | beta]`` per edge.
    """

    net: Network
    q: int
    width1: int
    width2: int
    inputs: tuple[tuple[int, ...], ...]
    local: tuple[np.ndarray, ...]
    global_vectors: np.ndarray
    edge_order: tuple[int, ...]
    seed: int = 0
    attempts: int = 1

    def source_of(self, n: int) -> int | None:
        tail = self.net.edges[n][0]
        if tail == self.net.s1:
            return 1
        if tail == self.net.s2:
            return 2
        return None

    def swapped(self) -> "CodedNetwork":
        """The same code with session labels exchanged."""
        w1 = self.width1
        G = np.concatenate([self.global_vectors[:, w1:], self.global_vectors[:, :w1]], axis=1)
        return CodedNetwork(self.net.swapped(), self.q, self.width2, self.width1, self.inputs,
                            self.local, G, self.edge_order, self.seed, self.attempts)

    def propagate(self, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
        """Push interface symbols through the network edge by edge.

        ``u1`` is width1 x batch, ``u2`` width2 x batch; returns |E| x batch.
        """
        q = self.q
        batch = u1.shape[1] if u1.ndim == 2 else 1
        Y = np.zeros((len(self.net.edges), batch), dtype=np.int64)
        for n in self.edge_order:
            src = self.source_of(n)
            coeffs = self.local[n]
            if src == 1:
                Y[n] = coeffs @ u1 % q
            elif src == 2:
                Y[n] = coeffs @ u2 % q
            elif self.inputs[n]:
                Y[n] = coeffs @ Y[list(self.inputs[n])] % q
        return Y


@dataclass(frozen=True, eq=False)
class TransferMatrices:
    """H[i][j] maps s_j's interface symbols to t_i's incoming edges."""

    H11: np.ndarray
    H12: np.ndarray
    H21: np.ndarray
    H22: np.ndarray
    q: int

    def swapped(self) -> "TransferMatrices":
        return TransferMatrices(self.H22, self.H21, self.H12, self.H11, self.q)

    def as_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("H11", "H12", "H21", "H22")}


def assign_random_code(net: Network, field: gfmat.FieldSpec | int, seed: int,
                       attempt: int = 0, cv: CutVector | None = None) -> CodedNetwork:
    q = field.q if isinstance(field, gfmat.FieldSpec) else gfmat.FieldSpec(field).q
    cv = cv or cut_vector(net)
    w1, w2 = cv.k112, cv.k212
    rng = _rng(seed, q, attempt)
    inputs = tuple(tuple(net.in_edges(t)) for t, _ in net.edges)
    local = []
    for n, (tail, _) in enumerate(net.edges):
        if tail == net.s1:
            local.append(gfmat.random_matrix(rng, 1, w1, q)[0])
        elif tail == net.s2:
            local.append(gfmat.random_matrix(rng, 1, w2, q)[0])
        else:
            local.append(gfmat.random_matrix(rng, 1, len(inputs[n]), q)[0])
    pos = {v: i for i, v in enumerate(topological_order(net))}
    order = tuple(sorted(range(len(net.edges)), key=lambda n: (pos[net.edges[n][0]], n)))
    G = np.zeros((len(net.edges), w1 + w2), dtype=np.int64)
    for n in order:
        tail = net.edges[n][0]
        if tail == net.s1:
            G[n, :w1] = local[n]
        elif tail == net.s2:
            G[n, w1:] = local[n]
        elif inputs[n]:
            G[n] = local[n] @ G[list(inputs[n])] % q
    return CodedNetwork(net, q, w1, w2, inputs, tuple(local), G, order, seed, attempt + 1)


def transfer_matrices(coded: CodedNetwork) -> TransferMatrices:
    net, w1 = coded.net, coded.width1
    G = coded.global_vectors
    rows1 = G[net.in_edges(net.t1)]
    rows2 = G[net.in_edges(net.t2)]
    return TransferMatrices(rows1[:, :w1].copy(), rows1[:, w1:].copy(),
                            rows2[:, :w1].copy(), rows2[:, w1:].copy(), coded.q)


def rank_profile(tm: TransferMatrices) -> dict[str, int]:
    q = tm.q
    return {
        "H11": gfmat.rank(tm.H11, q),
        "H12": gfmat.rank(tm.H12, q),
        "H21": gfmat.rank(tm.H21, q),
        "H22": gfmat.rank(tm.H22, q),
        "H11|H12": gfmat.rank(gfmat.hstack(tm.H11, tm.H12), q),
        "H21|H22": gfmat.rank(gfmat.hstack(tm.H21, tm.H22), q),
    }


def expected_profile(cv: CutVector) -> dict[str, int]:
    return {"H11": cv.k11, "H12": cv.k21, "H21": cv.k12, "H22": cv.k22,
            "H11|H12": cv.k121, "H21|H22": cv.k122}


def validate_rank_profile(tm: TransferMatrices, cv: CutVector) -> bool:
    shapes = {
        "H11": (cv.k121, cv.k112), "H12": (cv.k121, cv.k212),
        "H21": (cv.k122, cv.k112), "H22": (cv.k122, cv.k212),
    }
    for name, shape in shapes.items():
        if getattr(tm, name).shape != shape:
            raise PreconditionError("shape", f"{name} is {getattr(tm, name).shape}, expected {shape}")
    return rank_profile(tm) == expected_profile(cv)


def generate_valid_code(net: Network, seed: int = 0, q: int | None = None,
                        attempts_per_tier: int = ATTEMPTS_PER_TIER):
    """Draw random codes until every transfer matrix has its maximal rank.

    Tries ``attempts_per_tier`` codes per field size, escalating along the
    prime ladder.  Returns ``(coded, tm)``; ``coded.attempts`` counts draws in
    the successful tier.
    """
    if not is_normalized(net):
        raise PreconditionError("not-normalized", "call normalize() first")
    cv = cut_vector(net)
    for p in gfmat.field_ladder(q):
        for attempt in range(attempts_per_tier):
            coded = assign_random_code(net, p, seed, attempt, cv)
            tm = transfer_matrices(coded)
            if validate_rank_profile(tm, cv):
                return coded, tm
    raise ConstructionError(f"no valid code found up to GF({gfmat.field_ladder(q)[-1]})")


def code_to_json(coded: CodedNetwork) -> dict:
    net = coded.net
    edges = []
    f_coeffs = []
    a_coeffs = []
    for n, (tail, head) in enumerate(net.edges):
        g = coded.global_vectors[n]
        edges.append({"index": n, "tail": tail, "head": head,
                      "alpha": g[:coded.width1].tolist(), "beta": g[coded.width1:].tolist()})
        src = coded.source_of(n)
        if src is not None:
            a_coeffs.append({"edge": n, "source": src, "coeffs": coded.local[n].tolist()})
        else:
            for m, c in zip(coded.inputs[n], coded.local[n].tolist()):
                f_coeffs.append({"from": m, "to": n, "coeff": c})
    return {"q": coded.q, "attempts": coded.attempts, "edges": edges,
            "local": {"a": a_coeffs, "f": f_coeffs}}
