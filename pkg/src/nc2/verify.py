"""Achievability checks: symbol-level simulation, terminal decoding, and brute-force oracles."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import gfmat
from .codegen import CodedNetwork, _rng
from .encoders import EncoderPair
from .errors import LemmaAssertionError, PreconditionError
from .netgraph import Network, topological_order
from .regions import BOTH, OWN, RatePoint, fraction_json

EXHAUSTIVE_CAP = 10 ** 6
ORACLE_EDGE_CAP = 20
DEFAULT_TRIALS = 100
MAX_DENOMINATOR = 8


class SimulationMismatch(AssertionError):
    """Matrix-form and edge-by-edge simulation disagree."""


def simulate(coded: CodedNetwork, enc: EncoderPair, X1: np.ndarray, X2: np.ndarray):
    """Received symbols (Z1, Z2) at both terminals for message columns X1, X2.

    Computed from the transfer matrices and, independently, by pushing the
    actual symbols through every edge; the two must agree.
    """
    from .codegen import transfer_matrices

    q = coded.q
    X1 = gfmat.columns(X1, enc.V1.shape[1])
    X2 = gfmat.columns(X2, enc.V2.shape[1])
    u1 = gfmat.matmul(enc.M1, gfmat.matmul(enc.V1, X1, q), q)
    u2 = gfmat.matmul(enc.M2, gfmat.matmul(enc.V2, X2, q), q)
    tm = transfer_matrices(coded)
    Z1 = (gfmat.matmul(tm.H11, u1, q) + gfmat.matmul(tm.H12, u2, q)) % q
    Z2 = (gfmat.matmul(tm.H21, u1, q) + gfmat.matmul(tm.H22, u2, q)) % q
    Y = coded.propagate(u1, u2)
    net = coded.net
    E1 = Y[net.in_edges(net.t1)].reshape(Z1.shape)
    E2 = Y[net.in_edges(net.t2)].reshape(Z2.shape)
    if not (np.array_equal(E1, Z1) and np.array_equal(E2, Z2)):
        raise SimulationMismatch("edge propagation disagrees with the transfer matrices")
    return Z1, Z2


def decode_terminal(Z: np.ndarray, own: np.ndarray, other: np.ndarray, mode: str, q: int):
    """Decode at one terminal receiving Z = own @ Y_own + other @ Y_other.

    ``mode == "both"`` returns ``(Y_own, Y_other)``; ``"own"`` returns
    ``(Y_own, None)`` via interference projection.
    """
    if mode == BOTH:
        Y = gfmat.solve(gfmat.hstack(own, other), Z, q)
        k = own.shape[1]
        return Y[:k], Y[k:]
    if mode == OWN:
        return gfmat.solve_partial(Z, other, own, q), None
    raise ValueError(f"unknown decode mode {mode!r}")


def other_stream_decodable(own: np.ndarray, other: np.ndarray, q: int) -> bool:
    """Whether Y_other is uniquely determined by Z (given own has full column rank)."""
    return gfmat.rank(gfmat.hstack(own, other), q) == own.shape[1] + other.shape[1]


@dataclass
class CheckResult:
    trials: int = 0
    failures: int = 0
    witness: dict | None = None
    exhaustive: bool = False


def check_encoders(coded: CodedNetwork, enc: EncoderPair, modes, X1: np.ndarray, X2: np.ndarray,
                   rx: EncoderPair | None = None) -> CheckResult:
    """Simulate a batch of messages (as columns) and decode at both terminals.

    ``rx`` are the encoders the receivers believe in; defaults to ``enc``.
    """
    from .codegen import transfer_matrices

    rx = rx or enc
    q = coded.q
    tm = transfer_matrices(coded)
    Z1, Z2 = simulate(coded, enc, X1, X2)
    Y1 = gfmat.matmul(enc.V1, X1, q)
    Y2 = gfmat.matmul(enc.V2, X2, q)
    batch = X1.shape[1]
    ok = np.ones(batch, dtype=bool)
    reason = None
    views = (
        (Z1, gfmat.matmul(tm.H11, rx.M1, q), gfmat.matmul(tm.H12, rx.M2, q), Y1, Y2, modes[0]),
        (Z2, gfmat.matmul(tm.H22, rx.M2, q), gfmat.matmul(tm.H21, rx.M1, q), Y2, Y1, modes[1]),
    )
    for i, (Z, own, other, want_own, want_other, mode) in enumerate(views, start=1):
        try:
            got_own, got_other = decode_terminal(Z, own, other, mode, q)
        except PreconditionError as exc:
            ok[:] = False
            reason = f"t{i}: {exc}"
            continue
        good = np.all(got_own == want_own, axis=0)
        if got_other is not None:
            good &= np.all(got_other == want_other, axis=0)
        ok &= good
        if reason is None and not good.all():
            reason = f"t{i}: decoded symbols differ"
    res = CheckResult(trials=batch, failures=int((~ok).sum()))
    if res.failures:
        j = int(np.argmin(ok))
        res.witness = {"X1": X1[:, j].tolist(), "X2": X2[:, j].tolist(), "reason": reason,
                       "M1": enc.M1.tolist(), "M2": enc.M2.tolist()}
    return res


def random_messages(k1: int, k2: int, q: int, trials: int, seed: int):
    """Per-trial messages drawn from seed + trial index."""
    X1 = np.zeros((k1, trials), dtype=np.int64)
    X2 = np.zeros((k2, trials), dtype=np.int64)
    for t in range(trials):
        rng = _rng(seed + t, q, 29)
        X1[:, t] = rng.integers(0, q, size=k1)
        X2[:, t] = rng.integers(0, q, size=k2)
    return X1, X2


def all_messages(k1: int, k2: int, q: int, cap: int = EXHAUSTIVE_CAP):
    total = q ** (k1 + k2)
    if total > cap:
        raise PreconditionError("cap", f"{q}^{k1 + k2} = {total} message pairs exceeds {cap}")
    grid = np.array(list(itertools.product(range(q), repeat=k1 + k2)), dtype=np.int64)
    grid = grid.reshape(total, k1 + k2).T
    return grid[:k1].copy(), grid[k1:].copy()


def all_effective_messages(enc: EncoderPair, cap: int = EXHAUSTIVE_CAP):
    """Messages X whose images V X cover every (Y1, Y2) exactly once.

    Decoding depends on X only through V X, so this is exhaustive over the
    q^(R1+R2) effective inputs.
    """
    q = enc.q
    r1, r2 = enc.rates
    Y1, Y2 = all_messages(r1, r2, q, cap)
    W1 = _right_inverse(enc.V1, q)
    W2 = _right_inverse(enc.V2, q)
    return gfmat.matmul(W1, Y1, q), gfmat.matmul(W2, Y2, q)


def _right_inverse(V: np.ndarray, q: int) -> np.ndarray:
    # W is the inverse of an invertible column subset of V, zero elsewhere
    r, k = V.shape
    if r == 0:
        return gfmat.zeros(k, 0)
    piv = gfmat.independent_column_subset(V, r, q)
    sub = V[:, piv]
    W = gfmat.zeros(k, r)
    W[piv] = gfmat.solve(sub, gfmat.identity(r), q)
    return W


@dataclass
class VerificationReport:
    rate_point: RatePoint
    trials: int
    failures: int
    modes: tuple[str, str]
    q: int
    seed: int
    exhaustive: bool = False
    blocks: list = field(default_factory=list)
    witness: dict | None = None
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    @property
    def status(self) -> str:
        return "PASS" if self.failures == 0 else "FAIL"

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "rate_point": [fraction_json(self.rate_point[0]), fraction_json(self.rate_point[1])],
            "status": self.status,
            "trials": self.trials,
            "failures": self.failures,
            "modes": {"t1": self.modes[0], "t2": self.modes[1]},
            "q": self.q,
            "seed": self.seed,
            "exhaustive": self.exhaustive,
            "blocks": self.blocks,
            "witness": self.witness,
        }
        if timing:
            out["elapsed"] = self.elapsed
        return out


def _run_block(analysis, construction, trials: int, seed: int, exhaustive: bool, cap: int,
               tamper=None) -> CheckResult:
    coded = analysis.coded
    enc = construction.encoders
    tx = tamper(enc) if tamper else enc
    cv = analysis.cut_vector
    if exhaustive is None:
        exhaustive = coded.q ** sum(enc.rates) <= cap
    if exhaustive:
        X1, X2 = all_effective_messages(enc, cap)
    else:
        X1, X2 = random_messages(cv.k11, cv.k22, coded.q, trials, seed)
    res = check_encoders(coded, tx, construction.modes, X1, X2, rx=enc)
    res.exhaustive = bool(exhaustive)
    return res


def _timeshare_weights(p: RatePoint, a: RatePoint, b: RatePoint):
    """lambda with p = lambda a + (1 - lambda) b, or None."""
    if a == b:
        return Fraction(1) if p == a else None
    if a.r1 != b.r1:
        lam = (p.r1 - b.r1) / (a.r1 - b.r1)
    else:
        lam = (p.r2 - b.r2) / (a.r2 - b.r2)
    if not 0 <= lam <= 1:
        return None
    if lam * a.r1 + (1 - lam) * b.r1 != p.r1 or lam * a.r2 + (1 - lam) * b.r2 != p.r2:
        return None
    return lam


def schedule_for(analysis, p, max_denominator: int = MAX_DENOMINATOR):
    """Blocks [(vertex, count)] whose average rate is p.

    Hull vertices, and integer points some construction reaches directly,
    get one block; other points must be a rational timeshare of two hull
    vertices with denominator <= max_denominator.
    """
    p = RatePoint.of(*p)
    verts = list(analysis.report.hull.vertices)
    if p in verts:
        return [(p, 1)]
    if p.r1.denominator == 1 and p.r2.denominator == 1 and analysis.report.hull.contains(p):
        try:
            analysis.realize(p)
            return [(p, 1)]
        except LemmaAssertionError:
            pass
    for a, b in itertools.combinations(verts, 2):
        lam = _timeshare_weights(p, a, b)
        if lam is None:
            continue
        d = lam.denominator
        if d > max_denominator:
            raise PreconditionError("denominator", f"weight {lam} has denominator above {max_denominator}")
        return [(a, lam.numerator), (b, d - lam.numerator)]
    raise PreconditionError("not-timeshare", f"{p} is neither a hull vertex nor on a chord of two")


def verify_rate_point(analysis, p, trials: int = DEFAULT_TRIALS, seed: int | None = None,
                      exhaustive: bool | None = False, cap: int = EXHAUSTIVE_CAP,
                      max_denominator: int = MAX_DENOMINATOR, tamper=None) -> VerificationReport:
    """Build encoders for p (or a block schedule for a timeshared p) and decode test messages.

    ``analysis`` is a :class:`nc2.pipeline.Analysis` or a :class:`Network`.
    """
    from .pipeline import Analysis, analyze

    if isinstance(analysis, Network):
        analysis = analyze(analysis, seed=seed or 0)
    if not isinstance(analysis, Analysis):
        raise TypeError("expected an Analysis or a Network")
    seed = analysis.seed if seed is None else seed
    t0 = time.perf_counter()
    p = RatePoint.of(*p)
    blocks = schedule_for(analysis, p, max_denominator)
    total_trials = failures = 0
    witness = None
    modes = None
    block_info = []
    index = 0
    all_exhaustive = True
    for vertex, count in blocks:
        cons = analysis.realize(vertex)
        modes = cons.modes if modes is None else tuple(
            m if m == cons.modes[i] else OWN for i, m in enumerate(modes))
        for _ in range(count):
            res = _run_block(analysis, cons, trials, seed + index * trials, exhaustive, cap, tamper)
            all_exhaustive = all_exhaustive and res.exhaustive
            total_trials += res.trials
            failures += res.failures
            if res.witness and witness is None:
                witness = dict(res.witness, block=index, vertex=[fraction_json(x) for x in vertex],
                               seed=seed)
            block_info.append({"block": index, "vertex": [fraction_json(x) for x in vertex],
                               "region": cons.label, "rates": list(cons.point),
                               "trials": res.trials, "failures": res.failures})
            index += 1
    return VerificationReport(
        rate_point=p, trials=total_trials, failures=failures, modes=modes, q=analysis.q,
        seed=seed, exhaustive=all_exhaustive, blocks=block_info, witness=witness,
        elapsed=time.perf_counter() - t0)


def exhaustive_verify(net, p, q: int, seed: int = 0, cap: int = EXHAUSTIVE_CAP,
                      tamper=None) -> VerificationReport:
    """Verify p over GF(q) against every message pair."""
    from .pipeline import analyze

    analysis = analyze(net, seed=seed, q=q)
    cv = analysis.cut_vector
    if analysis.q ** (cv.k11 + cv.k22) > cap:
        raise PreconditionError("cap", f"{analysis.q}^{cv.k11 + cv.k22} message pairs exceeds {cap}")
    return verify_rate_point(analysis, p, seed=seed, exhaustive=True, cap=cap, tamper=tamper)


def _simple_paths(net: Network, S, T) -> list[int]:
    """All S->T paths that stop at their first sink, as edge bitmasks."""
    out_edges: dict[str, list[int]] = {n: [] for n in net.nodes}
    for i, (t, _) in enumerate(net.edges):
        out_edges[t].append(i)
    T = set(T)
    paths = []

    def walk(node, mask):
        for e in out_edges[node]:
            head = net.edges[e][1]
            m = mask | (1 << e)
            if head in T:
                paths.append(m)
            else:
                walk(head, m)

    for s in S:
        walk(s, 0)
    return paths


def oracle_mincut(net: Network, S, T) -> int:
    """Largest family of pairwise edge-disjoint S->T paths, by exhaustive search."""
    if len(net.edges) > ORACLE_EDGE_CAP:
        raise PreconditionError("cap", f"oracle limited to {ORACLE_EDGE_CAP} edges")
    topological_order(net)
    paths = sorted(set(_simple_paths(net, S, T)), key=lambda m: bin(m).count("1"))
    first_edges = 0
    for i, (t, _) in enumerate(net.edges):
        if t in S:
            first_edges |= 1 << i
    best = 0

    def search(i, used, count):
        nonlocal best
        if count > best:
            best = count
        # disjoint paths need distinct first edges out of S
        room = min(len(paths) - i, bin(first_edges & ~used).count("1"))
        if count + room <= best:
            return
        for j in range(i, len(paths)):
            if not paths[j] & used:
                search(j + 1, used | paths[j], count + 1)

    search(0, 0, 0)
    return best
