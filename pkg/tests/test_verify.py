from fractions import Fraction as F

import numpy as np
import pytest

from nc2 import corpus, gfmat
from nc2.encoders import EncoderPair
from nc2.errors import PreconditionError
from nc2.netgraph import Network, cut_vector
from nc2.pipeline import analyze
from nc2.regions import BOTH, OWN
from nc2.verify import (SimulationMismatch, all_effective_messages, all_messages, decode_terminal,
                        exhaustive_verify, oracle_mincut, other_stream_decodable, random_messages,
                        schedule_for, simulate, verify_rate_point)

from conftest import analysis_of


def corrupt_m1(enc):
    # the sender silently zeroes its first encoding column
    M1 = enc.M1.copy()
    M1[:, 0] = 0
    return EncoderPair(M1, enc.M2, enc.V1, enc.V2, enc.q)


def test_simulate_matches_matrix_form():
    a = analysis_of("relay")
    enc = a.construction("region1").encoders
    X1, X2 = random_messages(2, 2, a.q, 10, 0)
    Z1, Z2 = simulate(a.coded, enc, X1, X2)
    assert Z1.shape == (3, 10) and Z2.shape == (3, 10)


def test_simulate_detects_inconsistent_code():
    a = analyze(corpus.butterfly(), seed=0)
    c = a.coded
    G = c.global_vectors.copy()
    G[c.net.in_edges(c.net.t1)[0]] += 1
    broken = type(c)(c.net, c.q, c.width1, c.width2, c.inputs, c.local, G % c.q, c.edge_order)
    with pytest.raises(SimulationMismatch):
        simulate(broken, a.q1_encoders, np.ones((1, 1), dtype=np.int64), np.ones((1, 1), dtype=np.int64))


def test_decode_modes():
    q = 7
    own = np.array([[1], [0]])
    other = np.array([[0], [1]])
    Z = np.array([[3], [5]])
    y_own, y_other = decode_terminal(Z, own, other, BOTH, q)
    assert y_own.tolist() == [[3]] and y_other.tolist() == [[5]]
    y_own, none = decode_terminal(Z, own, other, OWN, q)
    assert y_own.tolist() == [[3]] and none is None
    with pytest.raises(ValueError):
        decode_terminal(Z, own, other, "neither", q)


def test_other_stream_decodable():
    q = 7
    assert other_stream_decodable(np.array([[1], [0]]), np.array([[0], [1]]), q)
    assert not other_stream_decodable(np.array([[1], [0], [0]]), np.array([[0, 0], [1, 1], [0, 0]]), q)


def test_message_enumeration():
    X1, X2 = all_messages(1, 1, 3)
    assert X1.shape == (1, 9) and len({(a, b) for a, b in zip(X1[0], X2[0])}) == 9
    with pytest.raises(PreconditionError):
        all_messages(4, 4, 257)


def test_effective_messages_cover_images():
    q = 5
    V1 = np.array([[1, 2, 0]])
    enc = EncoderPair(gfmat.zeros(1, 1), gfmat.zeros(1, 0), V1, gfmat.zeros(0, 2), q)
    X1, X2 = all_effective_messages(enc)
    assert X1.shape == (3, 5) and X2.shape == (2, 5)
    assert sorted(gfmat.matmul(V1, X1, q)[0].tolist()) == list(range(5))


def test_butterfly_exhaustive_gf5():
    rep = exhaustive_verify(corpus.butterfly(), (1, 1), q=5)
    assert rep.passed and rep.trials == 25 and rep.exhaustive
    assert rep.modes == (BOTH, BOTH) and rep.q == 5


def test_single_edge_gf2():
    rep = exhaustive_verify(corpus.single_edge(), (1, 0), q=2)
    assert rep.passed and rep.trials == 2


def test_corrupted_encoder_fails_with_witness():
    a = analyze(corpus.butterfly(), seed=0, q=5)
    rep = verify_rate_point(a, (1, 1), exhaustive=True, tamper=corrupt_m1)
    assert not rep.passed and rep.status == "FAIL"
    assert rep.witness is not None and "X1" in rep.witness
    assert rep.failures > 0


@pytest.mark.parametrize("name", ["butterfly", "relay", "dag0", "dag3", "dag8"])
def test_every_hull_vertex_passes(name):
    a = analysis_of(name)
    for v in a.report.hull.vertices:
        assert verify_rate_point(a, v, trials=30).passed, v


def test_relay_region1_point_is_own_own():
    a = analysis_of("relay")
    rep = verify_rate_point(a, (2, 2), trials=50)
    assert rep.passed and rep.modes == (OWN, OWN)


def test_timeshare_schedule_and_verify():
    a = analysis_of("relay")
    sched = schedule_for(a, (F(3, 2), 2))
    # 3/4 of the blocks at (2, 2), 1/4 at (0, 2)
    assert sorted((tuple(v), n) for v, n in sched) == [((0, 2), 1), ((2, 2), 3)]
    rep = verify_rate_point(a, (F(3, 2), 2), trials=20)
    assert rep.passed and len(rep.blocks) == 4


def test_timeshare_rejects_large_denominator_and_outside_points():
    a = analysis_of("relay")
    with pytest.raises(PreconditionError):
        schedule_for(a, (F(1, 9), 2))
    with pytest.raises(PreconditionError):
        schedule_for(a, (F(5, 2), 2))


def test_interior_integer_point_is_realized_directly():
    a = analysis_of("relay")
    assert schedule_for(a, (1, 1)) == [((1, 1), 1)]


def test_report_json_is_deterministic():
    a = analysis_of("relay")
    j1 = verify_rate_point(a, (2, 2), trials=10).to_json()
    j2 = verify_rate_point(a, (2, 2), trials=10).to_json()
    assert j1 == j2 and "elapsed" not in j1
    assert "elapsed" in verify_rate_point(a, (2, 2), trials=10).to_json(timing=True)


def test_oracle_mincut_small_cases():
    net = Network.build([("s1", "a"), ("a", "t1"), ("s1", "b"), ("b", "t1"), ("a", "b")])
    assert oracle_mincut(net, ["s1"], ["t1"]) == 2
    assert oracle_mincut(corpus.butterfly(), ["s1", "s2"], ["t1", "t2"]) == 3
    assert oracle_mincut(corpus.single_edge(), ["s2"], ["t2"]) == 0


def test_network_argument_is_analyzed():
    rep = verify_rate_point(corpus.relay(), (1, 1), trials=5)
    assert rep.passed
    assert cut_vector(corpus.relay()).k11 == 2
