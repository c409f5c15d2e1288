"""Tests for relzkp.protocol and the prover strategies"""
import json

from collections import Counter
from itertools import product

import numpy as np
import pytest

from compress_pickle import dump

from relzkp.errors import ConfigError, InvalidGraph, InvalidParameter, NotAProver, ProtocolViolation
from relzkp.field import FieldSpec
from relzkp.graph import (
    ColoredGraph,
    ColorPermutation,
    calibrate_edge_prob,
    generate,
    is_proper,
    monochrome_edges,
)
from relzkp.protocol import (
    REJECT_COLOR_RANGE,
    REJECT_MONOCHROME,
    REJECT_TIMING,
    Channels,
    Harness,
    ProverState,
    RoundTranscript,
    RunContext,
    Verdict,
    VerifierState,
    audit_information_flow,
    load_session,
    load_strategy,
    prover_commit,
    prover_reveal,
    round_prepare,
    run_protocol,
    run_socket_round,
    verifier_challenge,
    verifier_check,
    verifier_query,
    worker_count,
)
from relzkp.rng import CLOCK_STREAM, GRAPH_STREAM, PROVER_TAPE_STREAM, V2_STREAM, SeededRng
from relzkp.spacetime import P1, P2, V1, V2, ClockModel, SpacetimeConfig
from relzkp.strategies import equivocation, one_bad_edge, random_invalid, relay
from relzkp.strategies.generic import ProverP1, ProverP2
from relzkp.wire import Frame, Phase


@pytest.fixture
def gf32():
    return FieldSpec.preset(32)


def verifiers(graph, spec, tau_ns=1000.0):
    return (
        VerifierState(graph.public(), spec, V1, tau_ns),
        VerifierState(graph.public(), spec, V2, tau_ns),
    )


def transcript_for(X, A, C, B_C, t4=700.0):
    return RoundTranscript(0, tuple(X), tuple(A), tuple(C), tuple(B_C), 0.0, 680.0, 0.0, t4)


def within_sigmas(count, n, p, sigmas=5):
    return abs(count - n * p) < sigmas * (n * p * (1 - p)) ** 0.5


# Single round operations


def test_honest_round_accepts(gf32, twenty_edge_graph):
    report = run_protocol(twenty_edge_graph, gf32, m=200, seed=1)
    assert report.overall_accept
    assert report.accepts == 200
    assert report.first_reject_round is None
    assert report.rejects_by_reason == {REJECT_TIMING: 0, REJECT_COLOR_RANGE: 0, REJECT_MONOCHROME: 0}
    assert report.audit["violations"] == 0


def test_completeness_exhaustive(triangle, gf8):
    v1, v2 = verifiers(triangle, gf8)
    keys = (gf8.element(3), gf8.element(0), gf8.element(6))
    nonzero = list(gf8.elements())[1:]
    for pi in ColorPermutation.all():
        state = ProverState(triangle, gf8, triangle.witness, P1, 0, pi, keys)
        for X in product(nonzero, repeat=3):
            A = prover_commit(state, X)
            for C in triangle.edges:
                B_C = prover_reveal(state, C)
                verdict = verifier_check(v1, v2, transcript_for(X, A, C, B_C))
                assert verdict.accepted
                assert verdict.colors == (pi(triangle.witness[C[0]]), pi(triangle.witness[C[1]]))


def test_prover_needs_witness(triangle, gf8):
    with pytest.raises(NotAProver):
        ProverState.for_graph(triangle.public(), gf8, P1)
    with pytest.raises(NotAProver):
        run_protocol(triangle.public(), gf8, m=3, seed=0)
    state = ProverState(triangle, gf8, None, P1)
    with pytest.raises(NotAProver):
        round_prepare(state, SeededRng(0, PROVER_TAPE_STREAM, 0))


def test_round_structure_violations(triangle, gf8):
    state = ProverState.for_graph(triangle, gf8, P1)
    X = (gf8.one,) * 3
    with pytest.raises(ProtocolViolation):
        prover_commit(state, X)
    with pytest.raises(ProtocolViolation):
        prover_reveal(state, (0, 1))

    round_prepare(state, SeededRng(0, PROVER_TAPE_STREAM, 0))
    with pytest.raises(ProtocolViolation):
        prover_commit(state, X[:2])
    with pytest.raises(ProtocolViolation):
        prover_commit(state, (gf8.one, gf8.zero, gf8.one))

    path = ColoredGraph(3, ((0, 1), (1, 2)), (0, 1, 0))
    path_state = ProverState.for_graph(path, gf8, P2)
    round_prepare(path_state, SeededRng(0, PROVER_TAPE_STREAM, 0))
    with pytest.raises(ProtocolViolation):
        prover_reveal(path_state, (0, 2))


def test_prover_rejects_wrong_phase(triangle, gf8):
    p1 = ProverP1(triangle, gf8, 0)
    p2 = ProverP2(triangle, gf8, 0)
    with pytest.raises(ProtocolViolation):
        p1.handle(Frame(0, Phase.CHALLENGE, (0, 1)))
    with pytest.raises(ProtocolViolation):
        p2.handle(Frame(0, Phase.QUERY, (1, 1, 1)))
    with pytest.raises(ProtocolViolation):
        p2.handle(Frame(0, Phase.CHALLENGE, (0, 1, 2)))
    with pytest.raises(ProtocolViolation):
        p1.receive_cross("anything", ())


def test_provers_share_the_tape(twenty_edge_graph, gf32):
    p1 = ProverP1(twenty_edge_graph, gf32, 5)
    p2 = ProverP2(twenty_edge_graph, gf32, 5)
    for r in (0, 3, 3, 10):
        p1.prepare(r)
        p2.prepare(r)
        assert p1.state.permutation == p2.state.permutation
        assert p1.state.keys == p2.state.keys
        assert p1.state.round_index == r


def test_no_edge_to_challenge(gf8):
    lonely = ColoredGraph(2, (), (0, 0))
    v1, v2 = verifiers(lonely, gf8)
    with pytest.raises(InvalidGraph):
        verifier_challenge(v2, SeededRng(0, V2_STREAM, 0))
    with pytest.raises(InvalidGraph):
        run_protocol(lonely, gf8, m=1, seed=0)


def test_forged_rounds_are_rejected(triangle, gf8):
    v1, v2 = verifiers(triangle, gf8)
    x = gf8.element(3)
    X = (x, x, x)
    pi = ColorPermutation.identity()
    keys = (gf8.element(1), gf8.element(2), gf8.element(4))

    bad = ProverState(triangle, gf8, (0, 0, 1), P1, 0, pi, keys)
    A = prover_commit(bad, X)
    verdict = verifier_check(v1, v2, transcript_for(X, A, (0, 1), keys[:2]))
    assert verdict == Verdict.reject(REJECT_MONOCHROME, (0, 0))

    good = ProverState(triangle, gf8, triangle.witness, P1, 0, pi, keys)
    A = prover_commit(good, X)
    # x * 5 shifts the opening of vertex 0 to 5
    shifted = (keys[0] + x * gf8.element(5), keys[1])
    verdict = verifier_check(v1, v2, transcript_for(X, A, (0, 1), shifted))
    assert verdict == Verdict.reject(REJECT_COLOR_RANGE)

    late = transcript_for(X, A, (0, 1), keys[:2], t4=1000.0)
    assert verifier_check(v1, v2, late) == Verdict.reject(REJECT_TIMING)
    assert str(verifier_check(v1, v2, late)) == "reject(timing)"
    assert verifier_check(v1, v2, transcript_for(X, A, (0, 1), keys[:2])).accepted


def test_zero_query_in_a_replayed_transcript_is_rejected(triangle, gf8):
    v1, v2 = verifiers(triangle, gf8)
    x = gf8.element(3)
    keys = (gf8.element(1), gf8.element(2), gf8.element(4))
    good = ProverState(triangle, gf8, triangle.witness, P1, 0, ColorPermutation.identity(), keys)
    A = prover_commit(good, (x, x, x))
    X = (gf8.element(0), x, x)
    verdict = verifier_check(v1, v2, transcript_for(X, A, (0, 1), keys[:2]))
    assert verdict == Verdict.reject(REJECT_COLOR_RANGE)
    verdict = verifier_check(v1, v2, transcript_for(X[::-1], A, (1, 2), keys[1:]))
    assert verdict == Verdict.reject(REJECT_COLOR_RANGE)


def test_worst_case_timing(triangle, gf8):
    config = SpacetimeConfig.from_profile("deployment")
    v1 = VerifierState.for_config(triangle, gf8, V1, config, worst_case=True)
    v2 = VerifierState.for_config(triangle, gf8, V2, config, worst_case=True)
    assert not v1.graph.has_witness
    x = gf8.one
    keys = (gf8.element(1), gf8.element(2), gf8.element(4))
    state = ProverState(triangle, gf8, triangle.witness, P1, 0, ColorPermutation.identity(), keys)
    X = (x, x, x)
    A = prover_commit(state, X)
    assert verifier_check(v1, v2, transcript_for(X, A, (0, 1), keys[:2], t4=939.0)).accepted
    assert not verifier_check(v1, v2, transcript_for(X, A, (0, 1), keys[:2], t4=941.0)).accepted


# Uniformity of the random choices


def test_permutation_is_uniform(triangle, gf8):
    state = ProverState.for_graph(triangle, gf8, P1)
    n = 6 * 10**4
    counts = Counter(
        round_prepare(state, SeededRng(8, PROVER_TAPE_STREAM, r))[0] for r in range(n)
    )
    assert set(counts) == set(ColorPermutation.all())
    for count in counts.values():
        assert within_sigmas(count, n, 1 / 6)


def test_challenge_is_uniform(twenty_edge_graph, gf8):
    v1, v2 = verifiers(twenty_edge_graph, gf8)
    n = 20 * 1000
    counts = Counter(verifier_challenge(v2, SeededRng(4, V2_STREAM, r)) for r in range(n))
    assert set(counts) == set(twenty_edge_graph.edges)
    for count in counts.values():
        assert within_sigmas(count, n, 1 / 20)


def test_queries_are_nonzero(twenty_edge_graph, gf8):
    v1, _ = verifiers(twenty_edge_graph, gf8)
    for r in range(100):
        X = verifier_query(v1, SeededRng(2, 1, r))
        assert len(X) == 10
        assert all(x.value for x in X)


# Cheating strategies


def test_one_bad_edge_coloring(twenty_edge_graph):
    coloring, bad = one_bad_edge.one_bad_edge_coloring(twenty_edge_graph)
    assert not is_proper(twenty_edge_graph, coloring)
    assert len(bad) == 1
    differing = [v for v in range(10) if coloring[v] != twenty_edge_graph.witness[v]]
    assert len(differing) == 1
    with pytest.raises(NotAProver):
        one_bad_edge.one_bad_edge_coloring(twenty_edge_graph.public())
    with pytest.raises(InvalidGraph):
        one_bad_edge.one_bad_edge_coloring(ColoredGraph(2, (), (0, 0)))


def blown_up_hexagon():
    """Six slots of two vertices, consecutive slots fully joined

    Every vertex has two neighbours of each other color, so recoloring a
    single vertex always breaks two edges.
    """
    edges = []
    for slot in range(6):
        nxt = (slot + 1) % 6
        edges += [(2 * slot + a, 2 * nxt + b) for a in range(2) for b in range(2)]
    return ColoredGraph(12, tuple(edges), tuple((v // 2) % 3 for v in range(12)))


def test_one_bad_edge_coloring_beyond_single_recolorings():
    graph = blown_up_hexagon()
    coloring, bad = one_bad_edge.one_bad_edge_coloring(graph)
    assert len(bad) == 1
    assert monochrome_edges(graph, coloring) == bad


def test_one_bad_edge_coloring_may_not_exist():
    # Merging the endpoints of any edge of K_{2,2,2} leaves a K4
    octahedron = ColoredGraph(
        6,
        tuple((u, v) for u in range(6) for v in range(u + 1, 6) if u % 3 != v % 3),
        tuple(v % 3 for v in range(6)),
    )
    with pytest.raises(InvalidGraph):
        one_bad_edge.one_bad_edge_coloring(octahedron)


def has_one_bad_edge_coloring(graph):
    colorings = np.array(list(product(range(3), repeat=graph.num_vertices)))
    u, v = np.array(graph.edges).T
    return bool(((colorings[:, u] == colorings[:, v]).sum(axis=1) == 1).any())


def test_one_bad_edge_coloring_on_generated_graphs():
    p = calibrate_edge_prob(10, 20)
    found = 0
    for seed in range(400):
        graph = generate(10, p, SeededRng(seed, GRAPH_STREAM))
        try:
            coloring, bad = one_bad_edge.one_bad_edge_coloring(graph)
        except InvalidGraph:
            assert not has_one_bad_edge_coloring(graph)
            continue
        found += 1
        assert len(bad) == 1
        assert monochrome_edges(graph, coloring) == bad
    assert found > 300


def test_one_bad_edge_rejection_rate(twenty_edge_graph, gf32):
    strategy = one_bad_edge.Strategy(twenty_edge_graph, gf32, 3)
    rate = strategy.expected_rejection_rate
    assert rate == 1 / 20
    n = 2000
    report = run_protocol(twenty_edge_graph, gf32, m=n, mode="cheat:one_bad_edge", seed=3)
    rejected = n - report.accepts
    assert report.rejects_by_reason[REJECT_MONOCHROME] == rejected
    assert within_sigmas(rejected, n, rate, sigmas=3)
    assert not report.overall_accept
    assert report.soundness_bound == pytest.approx((19 / 20) ** n)


def test_relay_is_caught_by_timing(twenty_edge_graph, gf32):
    report = run_protocol(twenty_edge_graph, gf32, m=100, mode="cheat:relay", seed=6)
    assert report.rejects_by_reason[REJECT_TIMING] == 100
    assert report.first_reject_round == 0
    assert report.audit["violations"] == 200
    assert "P2 signaled P1: challenge_at_p1" in report.audit["examples"][0]
    assert report.timing["query_reveal_ns"]["min"] > 2000


def test_relay_passes_without_timing(twenty_edge_graph, gf32):
    loopback = SpacetimeConfig.from_profile("loopback")
    report = run_protocol(
        twenty_edge_graph, gf32, m=100, mode="cheat:relay", seed=6, spacetime_config=loopback
    )
    assert report.overall_accept
    assert report.audit["violations"] == 200


def test_relay_openings(twenty_edge_graph, gf32):
    context = RunContext(
        twenty_edge_graph,
        gf32,
        SpacetimeConfig.from_profile("loopback"),
        ClockModel(),
        seed=2,
        mode="cheat:relay",
    )
    transcript, channels, timing = Harness(context).play_round(0, record_log=True)
    assert transcript.verdict.colors == (0, 1)
    assert len(timing.log) == 10
    assert Counter(m.name for m in channels.messages() if m.name) == {
        relay.CHALLENGE_AT_P1: 1,
        relay.KEYS_AT_P2: 1,
    }


def test_equivocation_rates(twenty_edge_graph, gf8):
    strategy = equivocation.Strategy(twenty_edge_graph, gf8, 12)
    rates = strategy.expected_rates()
    assert rates == pytest.approx({"accept": 1 / 7, "monochrome": 1 / 7, "color_range": 5 / 7})
    n = 7000
    report = run_protocol(twenty_edge_graph, gf8, m=n, mode="cheat:equivocation", seed=12)
    assert report.rejects_by_reason[REJECT_TIMING] == 0
    assert within_sigmas(report.accepts, n, rates["accept"])
    assert within_sigmas(report.rejects_by_reason[REJECT_MONOCHROME], n, rates["monochrome"])
    assert within_sigmas(report.rejects_by_reason[REJECT_COLOR_RANGE], n, rates["color_range"])
    assert equivocation.third_color(0, 2) == 1


def test_random_invalid(twenty_edge_graph, gf32):
    coloring = random_invalid.random_improper_coloring(twenty_edge_graph, SeededRng(1, 9))
    assert not is_proper(twenty_edge_graph, coloring)
    with pytest.raises(InvalidGraph):
        random_invalid.random_improper_coloring(ColoredGraph(2, (), (0, 0)), SeededRng(1, 9))

    report = run_protocol(twenty_edge_graph, gf32, m=500, mode="cheat:random_invalid", seed=4)
    assert report.rejects_by_reason[REJECT_TIMING] == 0
    assert report.rejects_by_reason[REJECT_COLOR_RANGE] == 0
    assert report.rejects_by_reason[REJECT_MONOCHROME] > 0
    assert report.accepts > 0


# Run machinery


def test_load_strategy():
    assert load_strategy("honest").name == "honest"
    assert load_strategy("cheat:one_bad_edge") is one_bad_edge.Strategy
    assert load_strategy("cheat:one-bad-edge") is one_bad_edge.Strategy
    assert load_strategy("cheat:random-invalid") is random_invalid.Strategy
    for mode in ("cheat:generic", "cheat:teleport", "cheat:", "dishonest"):
        with pytest.raises(ConfigError):
            load_strategy(mode)


def test_run_arguments(triangle, gf8):
    with pytest.raises(InvalidParameter):
        run_protocol(triangle, gf8, k=1, m=3, seed=0)
    with pytest.raises(InvalidParameter):
        run_protocol(triangle, gf8, seed=0)
    with pytest.raises(InvalidParameter):
        run_protocol(triangle, gf8, m=3)
    with pytest.raises(InvalidParameter):
        run_protocol(triangle, gf8, m=-1, seed=0)
    with pytest.raises(ConfigError):
        run_protocol(triangle, gf8, m=3, seed=0, mode="cheat:teleport")


def test_k_sets_the_round_count(triangle, gf8):
    report = run_protocol(triangle, gf8, k=4, seed=0)
    assert report.rounds == 12
    assert report.params["m"] == 12
    assert report.params["k"] == 4


def test_zero_rounds(triangle, gf8):
    report = run_protocol(triangle, gf8, m=0, seed=0)
    assert report.rounds == 0
    assert report.overall_accept
    assert report.soundness_bound == 1.0
    assert report.timing == {"query_reveal_ns": {}, "commit_challenge_ns": {}}


def test_worker_count(monkeypatch):
    monkeypatch.setenv("RELZKP_THREADS", "2")
    assert worker_count(8) == 2
    assert worker_count(1) == 1
    monkeypatch.setenv("RELZKP_THREADS", "many")
    with pytest.raises(ConfigError):
        worker_count(4)
    monkeypatch.setenv("RELZKP_THREADS", "0")
    with pytest.raises(ConfigError):
        worker_count(4)
    monkeypatch.delenv("RELZKP_THREADS")
    assert worker_count(3) == 3


def test_transcripts_are_reproducible(tmp_path, twenty_edge_graph, gf32):
    paths = [tmp_path / f"t{idx}.jsonl" for idx in range(3)]
    run_protocol(twenty_edge_graph, gf32, m=50, seed=77, transcript_path=paths[0])
    run_protocol(twenty_edge_graph, gf32, m=50, seed=77, transcript_path=paths[1])
    run_protocol(twenty_edge_graph, gf32, m=50, seed=77, transcript_path=paths[2], workers=2)
    assert paths[0].read_bytes() == paths[1].read_bytes() == paths[2].read_bytes()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["t0.jsonl", "t1.jsonl", "t2.jsonl"]

    lines = paths[0].read_text().splitlines()
    assert len(lines) == 50
    first = json.loads(lines[0])
    assert first["round_index"] == 0
    assert first["verdict"] == "accept"
    assert len(first["X"]) == 10
    assert len(first["B_C"]) == 2

    transcript = RoundTranscript.from_dict(first, gf32)
    assert transcript.to_json() == lines[0]


def test_failed_run_leaves_no_transcript_parts(tmp_path, monkeypatch, twenty_edge_graph, gf32):
    import relzkp.protocol as protocol

    play_chunk = protocol._play_chunk

    def failing_chunk(context, chunk, part):
        play_chunk(context, chunk, part)
        raise RuntimeError("chunk failed")

    monkeypatch.setattr(protocol, "_play_chunk", failing_chunk)
    with pytest.raises(RuntimeError):
        run_protocol(twenty_edge_graph, gf32, m=10, seed=5, transcript_path=tmp_path / "t.jsonl")
    assert list(tmp_path.iterdir()) == []


def test_parallel_report_matches_serial(twenty_edge_graph, gf8):
    serial = run_protocol(twenty_edge_graph, gf8, m=300, mode="cheat:equivocation", seed=9)
    parallel = run_protocol(
        twenty_edge_graph, gf8, m=300, mode="cheat:equivocation", seed=9, workers=3
    )
    assert serial.round_reasons == parallel.round_reasons
    assert serial.rejects_by_reason == parallel.rejects_by_reason
    assert serial.timing == parallel.timing


def test_audit_information_flow():
    channels = Channels()
    assert audit_information_flow(channels) == []
    channels.deliver(V1, P2, Frame(0, Phase.QUERY, (1, 2)))
    channels.deliver(V2, P1, Frame(0, Phase.CHALLENGE, (0, 1)))
    channels.deliver(P2, V2, Frame(0, Phase.REVEAL, (1, 2, 3)))
    channels.deliver(P1, P2, name="hint", size=1)
    violations = audit_information_flow(channels)
    assert violations == [
        "P1 received the challenge",
        "P2 received the query",
        "P1 signaled P2: hint",
        "Reveal carried 3 keys",
    ]
    assert [m.receiver for m in channels.inbox(P1)] == [P1]


def test_session_save_and_load(tmp_path, triangle, gf8):
    report = run_protocol(triangle, gf8, m=30, seed=21)
    path = tmp_path / "run.lzma"
    report.save_session(path)
    loaded = load_session(path)
    assert loaded == report
    assert loaded.round_reasons == [None] * 30
    assert json.loads(loaded.to_json())["rounds"] == 30

    other = tmp_path / "other.lzma"
    dump({"rounds": 30}, other, compression="lzma")
    with pytest.raises(ConfigError):
        load_session(other)


def test_report_content(twenty_edge_graph, gf32):
    report = run_protocol(twenty_edge_graph, gf32, k=2, seed=8)
    params = report.params
    assert params["num_edges"] == 20
    assert params["field"] == gf32.to_config()
    assert params["spacetime"]["name"] == "deployment"
    assert set(params["clock_skews_ns"]) == {V1, V2}
    assert report.analytic_cheat_success["per_round"] < 1
    assert 500 < report.timing["query_reveal_ns"]["min"] <= report.timing["query_reveal_ns"]["max"] < 900
    assert report.rejection_rate == 0.0


def test_socket_round(twenty_edge_graph, gf32):
    transcript, channels = run_socket_round(twenty_edge_graph, gf32, seed=5, round_index=2)
    assert transcript.verdict.accepted
    assert transcript.round_index == 2
    assert audit_information_flow(channels) == []
    assert transcript.t4 >= transcript.t3 >= transcript.t2 >= transcript.t1


def test_socket_round_matches_simulated_round(twenty_edge_graph, gf32):
    transcript, _ = run_socket_round(twenty_edge_graph, gf32, seed=5, round_index=2)
    context = RunContext(
        twenty_edge_graph,
        gf32,
        SpacetimeConfig.from_profile("loopback"),
        ClockModel.draw(SpacetimeConfig.from_profile("loopback"), SeededRng(5, CLOCK_STREAM)),
        seed=5,
    )
    simulated, _, _ = Harness(context).play_round(2)
    assert (simulated.X, simulated.A, simulated.C, simulated.B_C) == (
        transcript.X,
        transcript.A,
        transcript.C,
        transcript.B_C,
    )


def test_socket_relay_is_audited(twenty_edge_graph, gf32):
    transcript, channels = run_socket_round(twenty_edge_graph, gf32, seed=5, mode="cheat:relay")
    assert transcript.verdict.accepted
    assert "P2 signaled P1: challenge_at_p1" in audit_information_flow(channels)
