"""Matrix algebra over prime fields GF(q).

Matrices are plain 2-D ``numpy`` integer arrays with entries reduced mod q.
Zero-row and zero-column shapes are legal everywhere.  All routines pivot on
the first nonzero entry so results are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

DEFAULT_Q = 257
PRIME_LADDER = (257, 521, 1031, 2053)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    q: int = DEFAULT_Q

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"field size must be prime, got {self.q}")

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.q - 2, self.q)


def field_ladder(q: int | None = None) -> list[int]:
    """Field sizes to try, starting at ``q`` and escalating along the ladder."""
    if q is None:
        return list(PRIME_LADDER)
    FieldSpec(q)
    return [q] + [p for p in PRIME_LADDER if p > q]


def columns(X, rows: int) -> np.ndarray:
    """View X as a rows x batch block; a 1-D X is a single column."""
    X = np.asarray(X, dtype=np.int64)
    if X.ndim == 1:
        if X.size != rows:
            raise ValueError(f"vector of length {X.size}, expected {rows}")
        return X.reshape(rows, 1)
    if X.ndim != 2 or X.shape[0] != rows:
        raise ValueError(f"block of shape {X.shape}, expected {rows} rows")
    return X


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    # entries < q <= 2053 keep row sums far below int64 overflow
    return np.mod(A @ B, q)


def hstack(*mats: np.ndarray) -> np.ndarray:
    rows = {m.shape[0] for m in mats}
    if len(rows) > 1:
        raise ValueError(f"row-count mismatch: {sorted(rows)}")
    return np.concatenate(mats, axis=1) if mats else zeros(0, 0)


def rref(A: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    R = np.mod(np.array(A, dtype=np.int64), q)
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = (R[r] * pow(int(R[r, c]), q - 2, q)) % q
        col = R[:, c].copy()
        col[r] = 0
        R = (R - np.outer(col, R[r])) % q
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: np.ndarray, q: int) -> int:
    if A.size == 0:
        return 0
    return len(rref(A, q)[1])


def nullspace(A: np.ndarray, q: int) -> np.ndarray:
    """Basis of the right nullspace of A, as columns."""
    rows, cols = A.shape
    R, pivots = rref(A, q)
    free = [c for c in range(cols) if c not in pivots]
    N = zeros(cols, len(free))
    for j, f in enumerate(free):
        N[f, j] = 1
        for i, p in enumerate(pivots):
            N[p, j] = (-R[i, f]) % q
    return N


def left_nullspace(A: np.ndarray, q: int) -> np.ndarray:
    """Matrix P with independent rows, P @ A = 0 and rank(P) = rows(A) - rank(A)."""
    return nullspace(A.T, q).T.copy()


def span_intersection_dim(A: np.ndarray, B: np.ndarray, q: int) -> int:
    """Dimension of span(A) ∩ span(B) for column spans."""
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"row-count mismatch: {A.shape[0]} vs {B.shape[0]}")
    return rank(A, q) + rank(B, q) - rank(hstack(A, B), q)


def solve(A: np.ndarray, Z: np.ndarray, q: int) -> np.ndarray:
    """Unique X with A @ X = Z; A must have full column rank.

    ``Z`` may hold several right-hand sides as columns.
    """
    Z = columns(Z, A.shape[0])
    n = A.shape[1]
    if rank(A, q) != n:
        raise PreconditionError("rank-deficient", "coefficient matrix lacks full column rank")
    R, pivots = rref(hstack(A, Z), q)
    if any(p >= n for p in pivots):
        raise PreconditionError("inconsistent", "right-hand side is not in the column span")
    return R[:n, n:].copy()


def solve_partial(Z: np.ndarray, H1: np.ndarray, H2: np.ndarray, q: int) -> np.ndarray:
    """Recover X2 from Z = H1 X1 + H2 X2 when X1 cannot (and need not) be recovered.

    Requires span(H1) ∩ span(H2) = {0} and H2 of full column rank.  The
    interference term is projected away with the left nullspace of H1.
    """
    z = H1.shape[0]
    if H2.shape[0] != z:
        raise ValueError(f"row-count mismatch: {z} vs {H2.shape[0]}")
    Z = columns(Z, z)
    l1, l2 = H1.shape[1], H2.shape[1]
    if rank(H2, q) != l2:
        raise PreconditionError("rank-deficient", "own matrix lacks full column rank")
    if span_intersection_dim(H1, H2, q) != 0:
        raise PreconditionError("span-overlap", "column spans of the two matrices intersect")
    sigma = l1 - rank(H1, q)
    if z < l1 + l2 - sigma:
        raise PreconditionError("too-few-rows", f"{z} rows < {l1 + l2 - sigma}")
    P = left_nullspace(H1, q)
    PH2 = matmul(P, H2, q)
    assert rank(PH2, q) == l2, "projected own matrix must keep full column rank"
    PZ = matmul(P, Z, q)
    try:
        X2 = solve(PH2, PZ, q)
    except PreconditionError:
        raise PreconditionError("inconsistent", "received vector is outside span([H1 H2])") from None
    resid = np.mod(Z - matmul(H2, X2, q), q)
    if rank(hstack(H1, resid), q) != rank(H1, q):
        raise PreconditionError("inconsistent", "received vector is outside span([H1 H2])")
    return X2


def independent_column_subset(A: np.ndarray, k: int, q: int) -> list[int]:
    """First k columns (greedy, lowest index first) that are linearly independent."""
    r = rank(A, q)
    if k > r:
        raise PreconditionError("rank-deficient", f"k={k} exceeds rank {r}")
    # pivot columns of the echelon form are exactly the greedy choice
    return rref(A, q)[1][:k]


def random_matrix(rng: np.random.Generator, rows: int, cols: int, q: int) -> np.ndarray:
    return rng.integers(0, q, size=(rows, cols), dtype=np.int64)


def random_full_rank(rng: np.random.Generator, rows: int, cols: int, q: int,
                     tries: int = 64) -> np.ndarray:
    """Uniform random matrix conditioned on rank min(rows, cols)."""
    target = min(rows, cols)
    for _ in range(tries):
        M = random_matrix(rng, rows, cols, q)
        if rank(M, q) == target:
            return M
    raise RuntimeError(f"no full-rank {rows}x{cols} sample over GF({q}) in {tries} tries")
