import random

import pytest

from motetrust.rwp import AddressedMatrix, RwpState
from motetrust.simnet import (
    Engine,
    EnergyCosts,
    LinkEvent,
    LinkTruth,
    MoteState,
    SafetyObservation,
    SafetyWeights,
    Scenario,
    ScenarioError,
    analyze,
    build_topology,
    charge_energy,
    observe_link,
    run,
    safety_score,
    select_peer,
)

DEFAULT_TRUTH = LinkTruth()


def make_mote(engine, addr=0, peers=(1, 2), energy=100.0):
    minor = AddressedMatrix([addr, *peers])
    minor.set(addr, addr, 2)
    rwp = RwpState(addr=addr, theta=60.0, a_minor=minor)
    return MoteState(
        addr=addr, energy=energy, capacity=100.0, harvest_rate=0.0, engine=engine, rwp=rwp
    )


def plentiful(**overrides):
    """A scenario whose batteries comfortably outlast the run."""
    base = dict(
        motes=6,
        intervals=5,
        capacity=5000.0,
        init_energy=5000.0,
        harvest_rate=1.0,
    )
    base.update(overrides)
    return Scenario(**base)


class TestBuildTopology:
    def test_two_mote_ring_has_one_edge(self):
        adj = build_topology(Scenario(motes=2))
        assert adj == {0: (1,), 1: (0,)}

    def test_ring_wraps(self):
        adj = build_topology(Scenario(motes=5))
        assert adj[0] == (1, 4)
        assert adj[3] == (2, 4)

    def test_grid_center_has_four_neighbors(self):
        adj = build_topology(Scenario(motes=9, topology="grid"))
        assert adj[4] == (1, 3, 5, 7)
        assert adj[0] == (1, 3)

    def test_geometric_is_deterministic_and_symmetric(self):
        s = Scenario(motes=12, topology="geometric", radius=0.6, seed=5)
        a, b = build_topology(s), build_topology(s)
        assert a == b
        for src, neighbors in a.items():
            for dst in neighbors:
                assert src in a[dst]

    def test_single_mote_has_no_edges(self):
        assert build_topology(Scenario(motes=1)) == {0: ()}


class TestObserveLink:
    def test_zero_noise_reproduces_truth(self):
        truth = LinkTruth(noise_scale=0.0)
        obs = observe_link(truth, random.Random(1))
        assert obs == SafetyObservation(
            truth.link_quality, truth.tx_rate, truth.response_time, truth.uptime
        )

    def test_consumes_four_draws_deterministically(self):
        a = observe_link(DEFAULT_TRUTH, random.Random(3))
        b = observe_link(DEFAULT_TRUTH, random.Random(3))
        assert a == b

    def test_huge_noise_stays_in_bounds(self):
        truth = LinkTruth(noise_scale=5.0)
        rng = random.Random(0)
        for _ in range(200):
            obs = observe_link(truth, rng)
            assert 0.0 <= obs.link_quality <= 1.0
            assert 0.0 <= obs.uptime <= 1.0
            assert obs.tx_rate >= 0.0
            assert obs.response_time >= 0.0


class TestSafetyScore:
    def test_equal_weight_example(self):
        obs = SafetyObservation(0.8, 125_000.0, 50.0, 0.9)
        score = safety_score(obs, SafetyWeights(), 250_000.0, 100.0)
        assert score == pytest.approx(0.675)

    def test_rate_saturates_and_latency_floors(self):
        obs = SafetyObservation(1.0, 900_000.0, 400.0, 1.0)
        score = safety_score(obs, SafetyWeights(), 250_000.0, 100.0)
        assert score == pytest.approx(0.25 * (1.0 + 1.0 + 0.0 + 1.0))

    def test_references_must_be_positive(self):
        with pytest.raises(ValueError):
            safety_score(SafetyObservation(1, 1, 1, 1), SafetyWeights(), 0.0, 100.0)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            SafetyWeights(0.5, 0.5, 0.5, 0.5)


class TestAnalyze:
    def test_qad_quantizes_into_the_minor(self):
        mote = make_mote(Engine.QAD)
        obs = SafetyObservation(0.95, 250_000.0, 10.0, 0.99)
        scenario = Scenario()
        score = analyze(mote, 1, obs, scenario)
        assert score >= 0.8
        assert mote.rwp.a_minor.get(0, 1) == 2

    def test_beta_tallies_against_threshold(self):
        mote = make_mote(Engine.BETA)
        good = SafetyObservation(0.9, 250_000.0, 10.0, 0.99)
        bad = SafetyObservation(0.1, 1_000.0, 400.0, 0.2)
        scenario = Scenario()
        analyze(mote, 1, good, scenario)
        analyze(mote, 1, bad, scenario)
        counts = mote.counts_by_peer[1]
        assert (counts.normal, counts.misbehavior) == (2.0, 2.0)

    def test_bayes_records_joint_evidence(self):
        mote = make_mote(Engine.BAYES)
        obs = SafetyObservation(0.9, 250_000.0, 10.0, 0.99)
        analyze(mote, 1, obs, Scenario())
        table = mote.evidence_by_peer[1]
        assert table.count(hypothesis=True, d1=True, d2=True) == 1


class TestSelectPeer:
    def test_qad_prefers_higher_assessment(self):
        mote = make_mote(Engine.QAD)
        mote.rwp.a_minor.set(0, 1, -1)
        mote.rwp.a_minor.set(0, 2, 1)
        assert select_peer(mote, [1, 2]) == 2

    def test_unassessed_ranks_below_everything(self):
        mote = make_mote(Engine.QAD)
        mote.rwp.a_minor.set(0, 2, -2)
        assert select_peer(mote, [1, 2]) == 2

    def test_tie_goes_to_lowest_address(self):
        mote = make_mote(Engine.BETA)
        assert select_peer(mote, [2, 1]) == 1

    def test_rejects_self_and_empty(self):
        mote = make_mote(Engine.BETA)
        with pytest.raises(ValueError):
            select_peer(mote, [])
        with pytest.raises(ValueError):
            select_peer(mote, [0, 1])


class TestChargeEnergy:
    def test_costs_subtract(self):
        mote = make_mote(Engine.BETA, energy=1.0)
        charge_energy(mote, "rx", EnergyCosts())
        assert mote.energy == pytest.approx(0.99)
        assert mote.alive

    def test_exact_zero_kills(self):
        mote = make_mote(Engine.BETA, energy=0.01)
        charge_energy(mote, "rx", EnergyCosts())
        assert mote.energy == 0.0
        assert not mote.alive

    def test_overdraw_floors_at_zero(self):
        mote = make_mote(Engine.BETA, energy=0.005)
        charge_energy(mote, "rx", EnergyCosts())
        assert mote.energy == 0.0
        assert not mote.alive

    def test_dead_motes_are_never_billed(self):
        mote = make_mote(Engine.BETA, energy=0.01)
        charge_energy(mote, "rx", EnergyCosts())
        charge_energy(mote, "tx", EnergyCosts())
        assert mote.energy == 0.0

    def test_unconstrained_motes_ignore_costs(self):
        minor = AddressedMatrix([0])
        rwp = RwpState(addr=0, theta=60.0, a_minor=minor)
        mote = MoteState(
            addr=0, energy=5.0, capacity=5.0, harvest_rate=0.0,
            engine=Engine.BETA, rwp=rwp, unconstrained=True,
        )
        charge_energy(mote, "tx", EnergyCosts())
        assert mote.energy == 5.0

    def test_unknown_action_rejected(self):
        mote = make_mote(Engine.BETA)
        with pytest.raises(ValueError):
            charge_energy(mote, "teleport", EnergyCosts())

    def test_harvest_caps_at_capacity(self):
        mote = make_mote(Engine.BETA, energy=99.0)
        mote.harvest_rate = 10.0
        mote.harvest(60.0)
        assert mote.energy == 100.0


class TestRun:
    def test_single_mote_society(self):
        trace = run(plentiful(motes=1, intervals=3))
        assert len(trace.records) == 3
        for rec in trace.records:
            assert rec.active_hacp == 0
            assert not rec.service_gap
            assert rec.motes[0].is_hacp

    def test_trace_is_deterministic(self):
        s = plentiful(intervals=4, engine=Engine.QAD, seed=11)
        assert run(s) == run(s)

    def test_seed_changes_the_noise(self):
        base = dict(intervals=4, engine=Engine.QAD, default_link=LinkTruth(noise_scale=0.3))
        a = run(plentiful(**base, seed=1))
        b = run(plentiful(**base, seed=2))
        assert a.records != b.records

    def test_energy_stays_in_bounds(self):
        trace = run(plentiful(intervals=6, harvest_rate=0.01))
        for rec in trace.records:
            for m in rec.motes:
                assert 0.0 <= m.energy <= 5000.0

    def test_full_batteries_elect_lowest_address(self):
        trace = run(plentiful())
        for rec in trace.records:
            assert rec.elected_hacp == 0
            assert rec.active_hacp == 0
            hacp_flags = [m.is_hacp for m in rec.motes]
            assert hacp_flags.count(True) == 1 and hacp_flags[0]

    def test_announcements_cover_living_society(self):
        trace = run(plentiful())
        for rec in trace.records:
            addrs = [a for a, _ in rec.announcements]
            assert addrs == sorted(addrs)
            assert len(addrs) == sum(1 for m in rec.motes if m.alive)

    def test_kill_event_is_permanent(self):
        s = plentiful(intervals=8, mote_kills={3: (2,)})
        trace = run(s)
        for rec in trace.records:
            state = next(m for m in rec.motes if m.addr == 2)
            assert state.alive is (rec.index < 3)

    def test_killing_the_host_fails_over_to_backup(self):
        s = plentiful(intervals=8, mote_kills={3: (0,)})
        trace = run(s)
        rec = trace.records[3]
        assert rec.elected_hacp == 0
        assert rec.active_hacp == rec.backup_hacp == 1
        assert not rec.service_gap
        assert not any(r.service_gap for r in trace.records)

    def test_without_failover_the_interval_goes_dark(self):
        s = plentiful(intervals=8, failover=False, mote_kills={3: (0,)})
        trace = run(s)
        gaps = [r.index for r in trace.records if r.service_gap]
        assert gaps == [3]
        assert trace.records[3].active_hacp is None
        assert trace.records[4].active_hacp == 1

    def test_sink_serves_every_interval(self):
        trace = run(plentiful(architecture="sink"))
        for rec in trace.records:
            assert rec.active_hacp == 0
            assert rec.announcements == ()
            assert not rec.service_gap

    def test_sink_battery_never_drains(self):
        trace = run(plentiful(architecture="sink", harvest_rate=0.0, init_energy=1.0, capacity=5000.0))
        sink_energy = [next(m for m in rec.motes if m.addr == 0).energy for rec in trace.records]
        assert all(e == sink_energy[0] for e in sink_energy)

    def test_beta_run_reports_system_trustworthiness(self):
        trace = run(plentiful())
        assert trace.final_system_trustworthiness is not None
        assert 0.0 <= trace.final_system_trustworthiness <= 1.0

    def test_link_event_validation_catches_unknown_edge(self):
        with pytest.raises(ScenarioError):
            run(plentiful(link_events=[LinkEvent(at=1, a=0, b=3, changes={"link_quality": 0.5})]))

    def test_link_event_changes_observed_quality(self):
        # ring of 6: degrade 0-1 midway; observer 0 scores peer 1 by link quality alone
        s = plentiful(
            intervals=10,
            engine=Engine.QAD,
            weights=SafetyWeights(1.0, 0.0, 0.0, 0.0),
            default_link=LinkTruth(noise_scale=0.0),
            link_events=[LinkEvent(at=5, a=0, b=1, changes={"link_quality": 0.1})],
        )
        trace = run(s)

        def metric(rec, src, dst):
            return next(p.metric for p in rec.pairs if p.src == src and p.dst == dst)

        assert metric(trace.records[4], 0, 1) == 2.0
        assert metric(trace.records[5], 0, 1) == -2.0
        assert metric(trace.records[5], 1, 0) == -2.0  # the link, not the mote, degraded
        assert metric(trace.records[5], 2, 1) == 2.0


class TestScenarioValidation:
    def test_motes_bounds(self):
        with pytest.raises(ScenarioError):
            run(Scenario(motes=0))
        with pytest.raises(ScenarioError):
            Scenario(motes=300).validate()

    def test_init_energy_cannot_exceed_capacity(self):
        with pytest.raises(ScenarioError):
            Scenario(capacity=10.0, init_energy=11.0).validate()

    def test_threshold_open_interval(self):
        with pytest.raises(ScenarioError):
            Scenario(misbehavior_threshold=1.0).validate()

    def test_kill_event_names_known_mote(self):
        with pytest.raises(ScenarioError):
            Scenario(motes=4, mote_kills={2: (9,)}).validate()

    def test_error_carries_line_prefix_when_present(self):
        assert str(ScenarioError("bad", line=7)) == "line 7: bad"
        assert str(ScenarioError("bad")) == "bad"
