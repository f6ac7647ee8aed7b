import functools

import numpy as np
import pytest

from nc2 import corpus, encoders, gfmat
from nc2.pipeline import analyze

CORPUS_SIZE = 50


@functools.lru_cache(maxsize=None)
def corpus_networks():
    nets = {"butterfly": corpus.butterfly(), "relay": corpus.relay()}
    for i, net in enumerate(corpus.random_corpus(CORPUS_SIZE)):
        nets[f"dag{i}"] = net
    return nets


@functools.lru_cache(maxsize=None)
def analysis_of(name, seed=0, swapped=False):
    net = corpus_networks()[name]
    return analyze(net.swapped() if swapped else net, seed=seed)


@pytest.fixture(scope="session")
def nets():
    return corpus_networks()


def _low_rank(rng, rows, cols, q):
    inner = int(rng.integers(0, min(rows, cols) + 1))
    A = gfmat.random_matrix(rng, rows, inner, q)
    B = gfmat.random_matrix(rng, inner, cols, q)
    return gfmat.matmul(A, B, q)


def _matrix(rng, rows, cols, q):
    return _low_rank(rng, rows, cols, q) if rng.random() < 0.3 else gfmat.random_matrix(rng, rows, cols, q)


def increase_instance(seed, q=7):
    """Random valid input (H11, H12, M1, M2, n) for rate_increase."""
    rng = np.random.default_rng([seed, 1])
    while True:
        z, a, b = int(rng.integers(1, 6)), int(rng.integers(1, 5)), int(rng.integers(0, 4))
        H11, H12 = _matrix(rng, z, a, q), _matrix(rng, z, b, q)
        R1, R2 = int(rng.integers(0, a + 1)), int(rng.integers(0, b + 1))
        M1, M2 = gfmat.random_matrix(rng, a, R1, q), gfmat.random_matrix(rng, b, R2, q)
        J = encoders.joint(H11, M1, H12, M2, q)
        if gfmat.rank(J, q) != R1 + R2:
            continue
        r = gfmat.rank(gfmat.hstack(H11, gfmat.matmul(H12, M2, q)), q)
        n = int(rng.integers(0, r - R1 - R2 + 1))
        return H11, H12, M1, M2, n, q


def exchange_instance(seed, q=7):
    """Random valid input (H11, M1p, H12, M2) for rate_exchange."""
    rng = np.random.default_rng([seed, 2])
    while True:
        z, a, b = int(rng.integers(2, 6)), int(rng.integers(1, 5)), int(rng.integers(1, 4))
        H11, H12 = _matrix(rng, z, a, q), _matrix(rng, z, b, q)
        R2 = int(rng.integers(1, b + 1))
        M2 = gfmat.random_matrix(rng, b, R2, q)
        HM2 = gfmat.matmul(H12, M2, q)
        if gfmat.rank(HM2, q) != R2:
            continue
        r = gfmat.rank(gfmat.hstack(H11, HM2), q)
        w = r - R2 + 1
        if w < 1 or w > a:
            continue
        if rng.random() < 0.5:
            M1p = gfmat.random_matrix(rng, a, w, q)
        else:
            # the Region 2 route: fill up jointly, then one more column against H11 alone
            M1 = encoders.rate_increase(H11, H12, gfmat.zeros(a, 0), M2, r - R2, q, seed)
            if gfmat.rank(H11, q) <= r - R2:
                continue
            M1p = encoders.rate_increase(H11, gfmat.zeros(z, 0), M1, gfmat.zeros(0, 0), 1, q, seed)
        HM1 = gfmat.matmul(H11, M1p, q)
        if gfmat.rank(HM1, q) == w and gfmat.rank(gfmat.hstack(HM1, HM2), q) == r:
            return H11, M1p, H12, M2, q


ACCEPTANCE_RESULTS = {}


def record_acceptance(number, title, passed, detail=""):
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_RESULTS[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[n])
