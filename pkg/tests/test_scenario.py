import textwrap

import pytest

from motetrust.qad import OperatorChoice
from motetrust.scenario import load_scenario, parse_scenario
from motetrust.simnet import Engine, ScenarioError

MINIMAL = "[network]\nmotes = 4\n"

FULL = textwrap.dedent(
    """
    # full-width scenario
    [network]
    motes = 6
    intervals = 12
    topology = ring
    seed = 9

    [rwp]
    theta_base_s = 50
    theta_min_s = 5
    theta_max_s = 500
    failover = false
    architecture = sink

    [trust]
    engine = qad
    misbehavior_threshold = 0.4
    weights = 0.4, 0.3, 0.2, 0.1
    qad_operator = consensus
    ref_tx_rate_bps = 125000
    ref_response_time_ms = 80

    [energy]
    capacity_j = 900
    init_j = 450
    harvest_j_per_s = 0.25
    tx_cost_j = 0.04
    rx_cost_j = 0.02
    compute_cost_j = 0.01

    [links]
    link_quality = 0.8          # becomes the default for every link
    noise_scale = 0.05
    2-3.link_quality = 0.3
    2-3.uptime = 0.6

    [events]
    at=4 link=1-2 link_quality=0.2 uptime=0.5
    at=6 mote=5 action=kill
    """
)


def error_of(text):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    return str(info.value)


class TestDefaults:
    def test_minimal_scenario_fills_defaults(self):
        s = parse_scenario(MINIMAL)
        assert s.motes == 4
        assert s.intervals == 20
        assert s.topology == "ring"
        assert s.engine is Engine.BETA
        assert s.theta_base == 60.0
        assert s.failover is True
        assert s.costs.tx == 0.02
        assert s.default_link.link_quality == 0.9

    def test_network_section_required(self):
        assert "missing [network]" in error_of("[rwp]\nfailover = true\n")


class TestFullParse:
    def test_every_section_lands(self):
        s = parse_scenario(FULL)
        assert (s.motes, s.intervals, s.seed) == (6, 12, 9)
        assert (s.theta_base, s.theta_min, s.theta_max) == (50.0, 5.0, 500.0)
        assert s.failover is False
        assert s.architecture == "sink"
        assert s.engine is Engine.QAD
        assert s.qad_operator is OperatorChoice.CONSENSUS_SEEKER
        assert s.misbehavior_threshold == 0.4
        assert (s.weights.link_quality, s.weights.uptime) == (0.4, 0.1)
        assert (s.ref_tx_rate, s.ref_response_time) == (125_000.0, 80.0)
        assert (s.capacity, s.init_energy, s.harvest_rate) == (900.0, 450.0, 0.25)
        assert (s.costs.tx, s.costs.rx, s.costs.compute) == (0.04, 0.02, 0.01)
        assert s.default_link.link_quality == 0.8
        assert s.default_link.noise_scale == 0.05
        assert s.default_link.tx_rate == 250_000.0  # untouched default

    def test_overrides_and_events(self):
        s = parse_scenario(FULL)
        assert s.link_overrides == {(2, 3): {"link_quality": 0.3, "uptime": 0.6}}
        assert len(s.link_events) == 1
        ev = s.link_events[0]
        assert (ev.at, ev.a, ev.b) == (4, 1, 2)
        assert ev.changes == {"link_quality": 0.2, "uptime": 0.5}
        assert s.mote_kills == {6: (5,)}


class TestErrors:
    def test_unknown_section_with_line(self):
        assert error_of("[network]\nmotes = 4\n[banana]\n").startswith("line 3:")

    def test_unknown_key_with_line(self):
        msg = error_of("[network]\nmotes = 4\nvolume = 11\n")
        assert msg.startswith("line 3:") and "volume" in msg

    def test_duplicate_key(self):
        msg = error_of("[network]\nmotes = 4\nmotes = 5\n")
        assert "duplicate" in msg and msg.startswith("line 3:")

    def test_duplicate_section(self):
        msg = error_of("[network]\nmotes = 4\n[network]\n")
        assert "duplicate section" in msg

    def test_key_outside_section(self):
        assert error_of("motes = 4\n").startswith("line 1:")

    def test_bad_integer(self):
        msg = error_of("[network]\nmotes = four\n")
        assert "integer" in msg and msg.startswith("line 2:")

    def test_bad_bool(self):
        msg = error_of("[network]\nmotes = 4\n[rwp]\nfailover = maybe\n")
        assert "true or false" in msg

    def test_bad_enum_lists_choices(self):
        msg = error_of("[network]\nmotes = 4\n[trust]\nengine = psychic\n")
        assert "qad" in msg and "beta" in msg and "bayes" in msg

    def test_weights_need_four_numbers(self):
        msg = error_of("[network]\nmotes = 4\n[trust]\nweights = 0.5, 0.5\n")
        assert "4" in msg

    def test_weights_must_sum_to_one(self):
        msg = error_of("[network]\nmotes = 4\n[trust]\nweights = 0.5, 0.5, 0.5, 0.5\n")
        assert "sum" in msg and msg.startswith("line 4:")

    def test_override_needs_existing_edge(self):
        msg = error_of("[network]\nmotes = 4\n[links]\n0-2.link_quality = 0.5\n")
        assert "0-2" in msg

    def test_override_duplicate_field(self):
        text = "[network]\nmotes = 4\n[links]\n0-1.uptime = 0.5\n1-0.uptime = 0.6\n"
        assert "duplicate" in error_of(text)

    def test_malformed_link_spec(self):
        msg = error_of("[network]\nmotes = 4\n[links]\nzero-one.uptime = 0.5\n")
        assert "A-B" in msg

    def test_event_requires_at(self):
        msg = error_of("[network]\nmotes = 4\n[events]\nlink=0-1 uptime=0.5\n")
        assert "at=" in msg

    def test_event_unknown_field(self):
        msg = error_of("[network]\nmotes = 4\n[events]\nat=1 link=0-1 color=red\n")
        assert "color" in msg

    def test_mote_event_requires_kill(self):
        msg = error_of("[network]\nmotes = 4\n[events]\nat=1 mote=2 action=sleep\n")
        assert "kill" in msg

    def test_event_needs_a_target(self):
        msg = error_of("[network]\nmotes = 4\n[events]\nat=1 uptime=0.5\n")
        assert "link=A-B or mote=N" in msg

    def test_out_of_range_value_reports_validation_error(self):
        assert "link_quality" in error_of("[network]\nmotes = 4\n[links]\nlink_quality = 1.5\n")

    def test_comment_only_lines_are_skipped(self):
        s = parse_scenario("# header\n\n[network]  # trailing\nmotes = 4  # why not\n")
        assert s.motes == 4


class TestLoadScenario:
    def test_reads_from_disk(self, tmp_path):
        path = tmp_path / "demo.scn"
        path.write_text(FULL, encoding="utf-8")
        assert load_scenario(path).motes == 6

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_scenario(tmp_path / "nope.scn")
