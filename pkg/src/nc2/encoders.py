"""Source encoding matrices for the base region and its extensions.

Every construction works on fixed transfer matrices and only changes what the
sources inject: ``M_i`` (interface width x R_i) and the precoder ``V_i``
(R_i x k_{i-i}).  Each step checks the rank/span facts it relies on and raises
:class:`LemmaAssertionError` if one fails.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gfmat
from .codegen import TransferMatrices, _rng
from .errors import ConstructionError, LemmaAssertionError, PreconditionError
from .netgraph import CutVector

BASE_ATTEMPTS = 128
RANDOM_CANDIDATES = 64

# salt values keep the random streams of different constructions apart
_SALT_BASE, _SALT_PRECODER, _SALT_INCREASE = 11, 13, 17


@dataclass(frozen=True, eq=False)
class EncoderPair:
    M1: np.ndarray
    M2: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    q: int

    @property
    def rates(self) -> tuple[int, int]:
        return self.M1.shape[1], self.M2.shape[1]

    def swapped(self) -> "EncoderPair":
        return EncoderPair(self.M2, self.M1, self.V2, self.V1, self.q)

    def truncated(self, r1: int, r2: int) -> "EncoderPair":
        """Keep the first r1 / r2 streams; decodability only improves."""
        if r1 > self.M1.shape[1] or r2 > self.M2.shape[1]:
            raise ValueError("cannot truncate to larger rates")
        return EncoderPair(self.M1[:, :r1].copy(), self.M2[:, :r2].copy(),
                           self.V1[:r1].copy(), self.V2[:r2].copy(), self.q)

    def check(self) -> None:
        q = self.q
        for name, M, V in (("1", self.M1, self.V1), ("2", self.M2, self.V2)):
            R = M.shape[1]
            if V.shape[0] != R:
                raise LemmaAssertionError(f"V{name} has {V.shape[0]} rows, expected {R}")
            if gfmat.rank(M, q) != R:
                raise LemmaAssertionError(f"M{name} is not full column rank")
            if gfmat.rank(V, q) != R:
                raise LemmaAssertionError(f"V{name} is not full row rank")

    def as_dict(self) -> dict:
        return {"rates": list(self.rates), "M1": self.M1.tolist(), "M2": self.M2.tolist(),
                "V1": self.V1.tolist(), "V2": self.V2.tolist()}


@dataclass(frozen=True)
class BoundaryPoints:
    q1: tuple[int, int]
    q2: tuple[int, int]


def boundary_points(cv: CutVector) -> BoundaryPoints:
    """The two corner points of the base region on its sum-rate face."""
    both = min(cv.k121, cv.k122)
    r1s = min(cv.k12, cv.k11)
    r2s = min(min(cv.k21, cv.k22), both - r1s)
    r2ss = min(cv.k21, cv.k22)
    r1ss = min(min(cv.k12, cv.k11), both - r2ss)
    return BoundaryPoints((r1s, r2s), (r1ss, r2ss))


def in_base_region(cv: CutVector, r1: int, r2: int) -> bool:
    return (0 <= r1 <= min(cv.k12, cv.k11) and 0 <= r2 <= min(cv.k21, cv.k22)
            and r1 + r2 <= min(cv.k121, cv.k122))


def random_precoders(cv: CutVector, r1: int, r2: int, q: int, seed: int):
    rng = _rng(seed, q, _SALT_PRECODER, r1, r2)
    if r1 > cv.k11 or r2 > cv.k22:
        raise PreconditionError("rate", f"rates ({r1}, {r2}) exceed message lengths ({cv.k11}, {cv.k22})")
    return (gfmat.random_full_rank(rng, r1, cv.k11, q),
            gfmat.random_full_rank(rng, r2, cv.k22, q))


def joint(H1: np.ndarray, M1: np.ndarray, H2: np.ndarray, M2: np.ndarray, q: int) -> np.ndarray:
    return gfmat.hstack(gfmat.matmul(H1, M1, q), gfmat.matmul(H2, M2, q))


def base_encoders(tm: TransferMatrices, cv: CutVector, r1: int, r2: int, seed: int = 0,
                  attempts: int = BASE_ATTEMPTS) -> EncoderPair:
    """Encoders that let both terminals decode both streams at (r1, r2)."""
    if not in_base_region(cv, r1, r2):
        raise PreconditionError("rate", f"({r1}, {r2}) is outside the base region")
    q = tm.q
    rng = _rng(seed, q, _SALT_BASE, r1, r2)
    for _ in range(attempts):
        M1 = gfmat.random_matrix(rng, cv.k112, r1, q)
        M2 = gfmat.random_matrix(rng, cv.k212, r2, q)
        if (gfmat.rank(joint(tm.H11, M1, tm.H12, M2, q), q) == r1 + r2
                and gfmat.rank(joint(tm.H21, M1, tm.H22, M2, q), q) == r1 + r2):
            V1, V2 = random_precoders(cv, r1, r2, q, seed)
            enc = EncoderPair(M1, M2, V1, V2, q)
            enc.check()
            return enc
    raise ConstructionError(f"no base encoders for ({r1}, {r2}) over GF({q}) in {attempts} attempts")


def rate_increase(H11: np.ndarray, H12: np.ndarray, M1: np.ndarray, M2: np.ndarray, n: int,
                  q: int, seed: int = 0) -> np.ndarray:
    """Prepend n columns to M1, each raising rank([H11 M1 | H12 M2]) by one.

    Candidates are the interface basis vectors in order, then random columns.
    """
    base = M1.shape[1] + M2.shape[1]
    start = gfmat.rank(joint(H11, M1, H12, M2, q), q)
    if start != base:
        raise PreconditionError("rank-deficient", "[H11 M1 | H12 M2] must have full column rank")
    r = gfmat.rank(gfmat.hstack(H11, gfmat.matmul(H12, M2, q)), q)
    if not 0 <= n <= r - base:
        raise PreconditionError("range", f"n={n} outside [0, {r - base}]")
    if n == 0:
        return M1.copy()
    width = H11.shape[1]
    HM2 = gfmat.matmul(H12, M2, q)
    new_cols: list[np.ndarray] = []
    current = start

    def stacked(extra=()) -> np.ndarray:
        cols = [c.reshape(width, 1) for c in (*extra, *new_cols)]
        return gfmat.hstack(*cols, M1)

    def try_add(col: np.ndarray) -> None:
        nonlocal current
        rk = gfmat.rank(gfmat.hstack(gfmat.matmul(H11, stacked([col]), q), HM2), q)
        if rk > current:
            new_cols.insert(0, col)
            current = rk

    for j in range(width):
        if len(new_cols) == n:
            break
        e = np.zeros(width, dtype=np.int64)
        e[j] = 1
        try_add(e)
    rng = _rng(seed, q, _SALT_INCREASE, width, n)
    tries = 0
    while len(new_cols) < n and tries < RANDOM_CANDIDATES:
        try_add(gfmat.random_matrix(rng, width, 1, q)[:, 0])
        tries += 1
    if len(new_cols) < n:
        raise LemmaAssertionError(f"rate increase stalled at {len(new_cols)} of {n} new columns")
    out = stacked()
    if gfmat.rank(out, q) != out.shape[1]:
        raise LemmaAssertionError("rate increase produced a rank-deficient encoder")
    if gfmat.rank(joint(H11, out, H12, M2, q), q) != base + n:
        raise LemmaAssertionError("rate increase missed its joint-rank target")
    return out


def rate_exchange(H11: np.ndarray, M1p: np.ndarray, H12: np.ndarray, M2: np.ndarray,
                  q: int) -> np.ndarray:
    """Drop one column of M2 so that span(H11 M1p) and span(H12 M2') meet only in 0.

    Columns are tried lowest index first.
    """
    R2 = M2.shape[1]
    if R2 == 0:
        raise PreconditionError("range", "M2 has no column to give up")
    r = gfmat.rank(gfmat.hstack(H11, gfmat.matmul(H12, M2, q)), q)
    if gfmat.rank(joint(H11, M1p, H12, M2, q), q) != r:
        raise PreconditionError("rank", "rank([H11 M1p | H12 M2]) != rank([H11 | H12 M2])")
    HM1 = gfmat.matmul(H11, M1p, q)
    if M1p.shape[1] != r - R2 + 1 or gfmat.rank(HM1, q) != r - R2 + 1:
        raise PreconditionError("rank", f"H11 M1p must have rank {r - R2 + 1} = its width")
    for j in range(R2):
        keep = [c for c in range(R2) if c != j]
        M2p = M2[:, keep]
        if gfmat.span_intersection_dim(HM1, gfmat.matmul(H12, M2p, q), q) == 0:
            return M2p.copy()
    raise LemmaAssertionError("no column of M2 can be removed to separate the spans")


def rank_term(tm: TransferMatrices, M2: np.ndarray) -> int:
    """rank([H11 | H12 M2])."""
    return gfmat.rank(gfmat.hstack(tm.H11, gfmat.matmul(tm.H12, M2, tm.q)), tm.q)


def lower_bound_rank(cv: CutVector, r1s: int, r2s: int) -> int:
    return max(cv.k11, cv.k121 - cv.k21 + r2s, r1s + r2s)


def complement_columns(H11: np.ndarray, H12: np.ndarray, q: int) -> list[int]:
    """Columns of H11 that, together with H12, span [H11 H12] without overlap.

    Greedy lowest-index-first; the chosen columns are independent modulo
    span(H12), so their span meets span(H12) only in 0.
    """
    stacked = gfmat.hstack(H12, H11)
    k = gfmat.rank(stacked, q)
    picked = gfmat.independent_column_subset(stacked, k, q)
    offset = H12.shape[1]
    cols = [j - offset for j in picked if j >= offset]
    # the H12 block comes first, so it contributes exactly rank(H12) pivots
    assert len(cols) == k - gfmat.rank(H12, q)
    return cols


def region1_encoders(tm: TransferMatrices, cv: CutVector, seed: int = 0) -> EncoderPair:
    """Encoders at the Region 1 corner (k121 - k21, k122 - k12).

    Each terminal decodes its own stream only; the other stream's image lies
    in a subspace disjoint from the intended one.
    """
    q = tm.q
    if cv.k12 + cv.k21 > min(cv.k121, cv.k122):
        raise PreconditionError("regime", "Region 1 needs k12 + k21 <= min(k121, k122)")
    if cv.k12 > cv.k11 or cv.k21 > cv.k22:
        raise PreconditionError("regime", "Region 1 needs k12 <= k11 and k21 <= k22")
    start = base_encoders(tm, cv, cv.k12, cv.k21, seed)
    M1p = rate_increase(tm.H11, tm.H12, start.M1, start.M2, cv.k121 - cv.k12 - cv.k21, q, seed)
    M2p = rate_increase(tm.H22, tm.H21, start.M2, start.M1, cv.k122 - cv.k12 - cv.k21, q, seed)
    r1, r2 = cv.k121 - cv.k21, cv.k122 - cv.k12
    for own_H, M, other_H, want in ((tm.H11, M1p, tm.H12, r1), (tm.H22, M2p, tm.H21, r2)):
        HM = gfmat.matmul(own_H, M, q)
        if M.shape[1] != want or gfmat.rank(HM, q) != want:
            raise LemmaAssertionError("Region 1 encoder lacks full rank")
        if gfmat.span_intersection_dim(HM, other_H, q) != 0:
            raise LemmaAssertionError("Region 1 encoder image meets the interference span")
    V1, V2 = random_precoders(cv, r1, r2, q, seed)
    enc = EncoderPair(M1p, M2p, V1, V2, q)
    enc.check()
    return enc


def region2_range(tm: TransferMatrices, cv: CutVector, seed: int = 0):
    """(Q1 encoders, achieved rank term, R1', max delta) for the Region 2 sweep."""
    if cv.k12 > cv.k11:
        raise PreconditionError("guard", "Region 2 needs k12 <= k11")
    r1s, r2s = boundary_points(cv).q1
    if r1s == cv.k11:
        raise PreconditionError("saturated", "R1* = k11; R1 cannot be increased")
    start = base_encoders(tm, cv, r1s, r2s, seed)
    rho = rank_term(tm, start.M2)
    if rho < lower_bound_rank(cv, r1s, r2s):
        raise LemmaAssertionError(f"rank term {rho} below its lower bound")
    r1p = rho - r2s
    return start, rho, r1p, min(r2s, cv.k11 - r1p)


def region2_point_encoders(tm: TransferMatrices, cv: CutVector, delta: int, seed: int = 0):
    """Encoders at (R1' + delta, R2* - delta) on the Region 2 boundary.

    Returns ``(encoders, (r1, r2))``.  Terminal t1 decodes both streams,
    t2 decodes its own stream only.
    """
    q = tm.q
    start, rho, r1p, dmax = region2_range(tm, cv, seed)
    r1s, r2s = start.rates
    if not 0 <= delta <= dmax:
        raise PreconditionError("range", f"delta={delta} outside [0, {dmax}]")
    M1 = rate_increase(tm.H11, tm.H12, start.M1, start.M2, rho - r1s - r2s, q, seed)
    M2 = start.M2
    empty_h = gfmat.zeros(tm.H11.shape[0], 0)
    empty_m = gfmat.zeros(0, 0)
    for step in range(delta):
        M1p = rate_increase(tm.H11, empty_h, M1, empty_m, 1, q, seed + step)
        M2 = rate_exchange(tm.H11, M1p, tm.H12, M2, q)
        M1 = M1p
    r1, r2 = r1p + delta, r2s - delta
    assert M1.shape[1] == r1 and M2.shape[1] == r2
    if gfmat.rank(joint(tm.H11, M1, tm.H12, M2, q), q) != r1 + r2:
        raise LemmaAssertionError("t1 cannot decode both streams on the Region 2 boundary")
    HM1 = gfmat.matmul(tm.H21, M1, q)
    HM2 = gfmat.matmul(tm.H22, M2, q)
    if gfmat.rank(HM2, q) != r2 or gfmat.span_intersection_dim(HM1, HM2, q) != 0:
        raise LemmaAssertionError("t2 lost its own stream on the Region 2 boundary")
    V1, V2 = random_precoders(cv, r1, r2, q, seed)
    enc = EncoderPair(M1, M2, V1, V2, q)
    enc.check()
    return enc, (r1, r2)


def region3_point_encoders(tm: TransferMatrices, cv: CutVector, delta: int, seed: int = 0):
    """Region 2 construction on the label-swapped instance, swapped back."""
    enc, (r2, r1) = region2_point_encoders(tm.swapped(), cv.swapped(), delta, seed)
    return enc.swapped(), (r1, r2)


def region3_range(tm: TransferMatrices, cv: CutVector, seed: int = 0):
    start, rho, r2p, dmax = region2_range(tm.swapped(), cv.swapped(), seed)
    return start.swapped(), rho, r2p, dmax
