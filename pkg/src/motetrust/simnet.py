"""Deterministic interval simulator for trust-managed mote societies.

Builds a static radio topology, seeds per-link ground truth, and repeats
the monitor / announce / elect / serve cycle for a configured number of
intervals. Within an interval:

* every mote polls its neighbors, scores the link, and feeds the score to
  its trust engine (quintile assessments, behavior tallies, or evidence
  counts);
* every mote floods an (address, PCP) announcement and the society elects
  the interval's aggregation host, with an optional hot standby;
* motes upload their neighborhood matrices to the host, which aggregates
  them, adapts the next interval length to the reported churn, answers
  trust queries, and receives one greedily trust-routed application
  message per mote.

Every action costs energy; a mote that hits zero is dead for good and
neither sends nor receives. All randomness flows from named substreams of
the scenario seed and every within-interval sweep runs in ascending
address order, so a scenario reproduces the same trace byte for byte.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from . import rwp as rwp_proto
from .beliefs import EvidenceCounts, bayes_posterior2
from .qad import OperatorChoice, quantize_observation, rate_of_change
from .rwp import AddressedMatrix, MajorMatrix, RwpPhase, RwpState
from .trustworthiness import (
    BehaviorCounts,
    Outcome,
    TrustRecord,
    system_trustworthiness,
    update_counts,
)

TOPOLOGIES = ("ring", "grid", "geometric")
ARCHITECTURES = ("p2p", "sink")
SINK_ADDRESS = 0


class Engine(Enum):
    QAD = "qad"
    BETA = "beta"
    BAYES = "bayes"


class ScenarioError(ValueError):
    """A scenario that cannot be simulated; ``line`` points at the source when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line

    def __str__(self) -> str:
        base = super().__str__()
        return f"line {self.line}: {base}" if self.line is not None else base


# ---------------------------------------------------------------------------
# configuration types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnergyCosts:
    """Joules charged per elementary action."""

    tx: float = 0.02
    rx: float = 0.01
    compute: float = 0.005

    def __post_init__(self) -> None:
        if self.tx < 0.0 or self.rx < 0.0 or self.compute < 0.0:
            raise ScenarioError("energy costs must be non-negative")

    def of(self, action: str) -> float:
        try:
            return {"tx": self.tx, "rx": self.rx, "compute": self.compute}[action]
        except KeyError:
            raise ValueError(f"unknown action {action!r}") from None


@dataclass(frozen=True)
class SafetyWeights:
    """Convex weights of the four safety terms."""

    link_quality: float = 0.25
    tx_rate: float = 0.25
    response_time: float = 0.25
    uptime: float = 0.25

    def __post_init__(self) -> None:
        values = (self.link_quality, self.tx_rate, self.response_time, self.uptime)
        if any(w < 0.0 for w in values):
            raise ScenarioError("safety weights must be non-negative")
        if abs(math.fsum(values) - 1.0) > 1e-9:
            raise ScenarioError(f"safety weights must sum to 1, got {math.fsum(values)}")


@dataclass(frozen=True)
class SafetyObservation:
    """One sample of a link as a mote saw it."""

    link_quality: float
    tx_rate: float
    response_time: float
    uptime: float


@dataclass
class LinkTruth:
    """Ground truth behind one link, plus its scheduled mid-run changes."""

    link_quality: float = 0.9
    tx_rate: float = 250_000.0
    response_time: float = 20.0
    uptime: float = 0.99
    noise_scale: float = 0.02
    schedule: dict[int, dict[str, float]] = field(default_factory=dict)

    def validate(self) -> None:
        if not 0.0 <= self.link_quality <= 1.0:
            raise ScenarioError(f"link_quality {self.link_quality} outside [0, 1]")
        if not 0.0 <= self.uptime <= 1.0:
            raise ScenarioError(f"uptime {self.uptime} outside [0, 1]")
        if self.tx_rate < 0.0 or self.response_time < 0.0:
            raise ScenarioError("tx_rate and response_time must be non-negative")
        if self.noise_scale < 0.0:
            raise ScenarioError("noise_scale must be non-negative")


#: LinkTruth attributes an override or event may touch.
LINK_FIELDS = ("link_quality", "tx_rate", "response_time", "uptime", "noise_scale")


@dataclass
class LinkEvent:
    """At the start of interval ``at``, rewrite fields of link (a, b)."""

    at: int
    a: int
    b: int
    changes: dict[str, float]


@dataclass
class Scenario:
    """Everything a run depends on; `validate` is the single gatekeeper."""

    motes: int = 8
    intervals: int = 20
    topology: str = "ring"
    radius: float = 0.35
    seed: int = 1
    theta_base: float = 60.0
    theta_min: float = 6.0
    theta_max: float = 600.0
    failover: bool = True
    architecture: str = "p2p"
    engine: Engine = Engine.BETA
    misbehavior_threshold: float = 0.5
    weights: SafetyWeights = field(default_factory=SafetyWeights)
    qad_operator: OperatorChoice = OperatorChoice.MODERATE_OPTIMISTIC
    ref_tx_rate: float = 250_000.0
    ref_response_time: float = 100.0
    capacity: float = 1000.0
    init_energy: float = 1000.0
    harvest_rate: float = 0.5
    costs: EnergyCosts = field(default_factory=EnergyCosts)
    default_link: LinkTruth = field(default_factory=LinkTruth)
    link_overrides: dict[tuple[int, int], dict[str, float]] = field(default_factory=dict)
    link_events: list[LinkEvent] = field(default_factory=list)
    mote_kills: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def validate(self) -> None:
        if not isinstance(self.motes, int) or self.motes < 1:
            raise ScenarioError(f"motes must be an integer >= 1, got {self.motes}")
        if self.motes > rwp_proto.MAX_SOCIETY_SIZE:
            raise ScenarioError(f"motes must be <= {rwp_proto.MAX_SOCIETY_SIZE}, got {self.motes}")
        if not isinstance(self.intervals, int) or self.intervals < 1:
            raise ScenarioError(f"intervals must be an integer >= 1, got {self.intervals}")
        if self.topology not in TOPOLOGIES:
            raise ScenarioError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        if self.topology == "geometric" and self.radius <= 0.0:
            raise ScenarioError("geometric topology needs radius > 0")
        if not 0.0 < self.theta_min <= self.theta_base <= self.theta_max:
            raise ScenarioError("need 0 < theta_min_s <= theta_base_s <= theta_max_s")
        if self.architecture not in ARCHITECTURES:
            raise ScenarioError(f"architecture must be one of {ARCHITECTURES}, got {self.architecture!r}")
        if not isinstance(self.engine, Engine):
            raise ScenarioError(f"engine must be an Engine, got {self.engine!r}")
        if not isinstance(self.qad_operator, OperatorChoice):
            raise ScenarioError(f"qad_operator must be an OperatorChoice, got {self.qad_operator!r}")
        if not 0.0 < self.misbehavior_threshold < 1.0:
            raise ScenarioError(f"misbehavior_threshold must be in (0, 1), got {self.misbehavior_threshold}")
        if self.ref_tx_rate <= 0.0 or self.ref_response_time <= 0.0:
            raise ScenarioError("reference tx rate and response time must be positive")
        if self.capacity <= 0.0:
            raise ScenarioError(f"capacity_j must be positive, got {self.capacity}")
        if not 0.0 <= self.init_energy <= self.capacity:
            raise ScenarioError(f"init_j must be in [0, capacity_j], got {self.init_energy}")
        if self.harvest_rate < 0.0:
            raise ScenarioError(f"harvest_j_per_s must be non-negative, got {self.harvest_rate}")
        self.default_link.validate()
        adjacency = build_topology(self)
        for (a, b), changes in sorted(self.link_overrides.items()):
            self._check_edge(a, b, adjacency)
            self._check_link_changes(changes)
        for ev in self.link_events:
            if ev.at < 0:
                raise ScenarioError(f"event interval must be >= 0, got {ev.at}")
            self._check_edge(ev.a, ev.b, adjacency)
            self._check_link_changes(ev.changes)
        for at, addrs in sorted(self.mote_kills.items()):
            if at < 0:
                raise ScenarioError(f"event interval must be >= 0, got {at}")
            for addr in addrs:
                if not 0 <= addr < self.motes:
                    raise ScenarioError(f"kill event names unknown mote {addr}")

    def _check_edge(self, a: int, b: int, adjacency: dict[int, tuple[int, ...]]) -> None:
        if not (0 <= a < self.motes and 0 <= b < self.motes) or a == b:
            raise ScenarioError(f"link {a}-{b} names invalid endpoints")
        if b not in adjacency[a]:
            raise ScenarioError(f"link {a}-{b} does not exist in the {self.topology} topology")

    def _check_link_changes(self, changes: dict[str, float]) -> None:
        if not changes:
            raise ScenarioError("a link entry must set at least one field")
        for name in changes:
            if name not in LINK_FIELDS:
                raise ScenarioError(f"unknown link field {name!r}")
        probe = _merge_truth(self.default_link, changes)
        probe.validate()


def _merge_truth(base: LinkTruth, changes: dict[str, float]) -> LinkTruth:
    merged = LinkTruth(base.link_quality, base.tx_rate, base.response_time, base.uptime, base.noise_scale)
    for name, value in changes.items():
        setattr(merged, name, value)
    return merged


# ---------------------------------------------------------------------------
# topology
# ---------------------------------------------------------------------------


def build_topology(scenario: Scenario) -> dict[int, tuple[int, ...]]:
    """Adjacency (sorted neighbor tuples) for the scenario's static topology."""
    n = scenario.motes
    adjacency: dict[int, set[int]] = {a: set() for a in range(n)}

    def connect(a: int, b: int) -> None:
        adjacency[a].add(b)
        adjacency[b].add(a)

    if scenario.topology == "ring":
        if n == 2:
            connect(0, 1)
        elif n > 2:
            for a in range(n):
                connect(a, (a + 1) % n)
    elif scenario.topology == "grid":
        cols = math.ceil(math.sqrt(n))
        for a in range(n):
            if (a % cols) + 1 < cols and a + 1 < n:
                connect(a, a + 1)
            if a + cols < n:
                connect(a, a + cols)
    else:  # geometric: uniform points in the unit square, edges within radius
        rng = random.Random(f"{scenario.seed}:topology")
        points = [(rng.random(), rng.random()) for _ in range(n)]
        for a in range(n):
            for b in range(a + 1, n):
                if math.dist(points[a], points[b]) <= scenario.radius:
                    connect(a, b)
    return {a: tuple(sorted(peers)) for a, peers in adjacency.items()}


# ---------------------------------------------------------------------------
# mote state and elementary operations
# ---------------------------------------------------------------------------


@dataclass
class MoteState:
    """One mote: its battery, its protocol state, and its trust engine's memory."""

    addr: int
    energy: float
    capacity: float
    harvest_rate: float
    engine: Engine
    rwp: RwpState
    alive: bool = True
    unconstrained: bool = False
    counts_by_peer: dict[int, BehaviorCounts] = field(default_factory=dict)
    evidence_by_peer: dict[int, EvidenceCounts] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.energy <= 0.0 and not self.unconstrained:
            self.alive = False

    def harvest(self, seconds: float) -> None:
        """Credit the interval's energy intake; dead motes stay dead."""
        if self.alive and not self.unconstrained:
            self.energy = min(self.capacity, self.energy + self.harvest_rate * seconds)


def charge_energy(mote: MoteState, action: str, costs: EnergyCosts) -> MoteState:
    """Bill one action. Hitting zero kills the mote; dead motes are never billed."""
    cost = costs.of(action)
    if not mote.alive or mote.unconstrained:
        return mote
    mote.energy = max(0.0, mote.energy - cost)
    if mote.energy == 0.0:
        mote.alive = False
    return mote


def observe_link(truth: LinkTruth, rng: random.Random) -> SafetyObservation:
    """One noisy sample of a link, consuming exactly four draws from ``rng``.

    Noise is zero-mean uniform, truncated into each field's range. The
    scale reads as an absolute spread on the [0, 1] fields and a relative
    spread on the unbounded ones, so a scale of 0 reproduces the truth
    exactly.
    """
    s = truth.noise_scale
    lq = min(1.0, max(0.0, truth.link_quality + rng.uniform(-1.0, 1.0) * s))
    tx = max(0.0, truth.tx_rate * (1.0 + rng.uniform(-1.0, 1.0) * s))
    rt = max(0.0, truth.response_time * (1.0 + rng.uniform(-1.0, 1.0) * s))
    up = min(1.0, max(0.0, truth.uptime + rng.uniform(-1.0, 1.0) * s))
    return SafetyObservation(lq, tx, rt, up)


def safety_score(
    obs: SafetyObservation, weights: SafetyWeights, ref_tx_rate: float, ref_response_time: float
) -> float:
    """Weighted safety of an observation, in [0, 1].

    Rate saturates at its reference; response time scores linearly down to
    zero at the reference and is floored there.
    """
    if ref_tx_rate <= 0.0 or ref_response_time <= 0.0:
        raise ValueError("references must be positive")
    tx_term = min(1.0, obs.tx_rate / ref_tx_rate)
    rt_term = max(0.0, 1.0 - obs.response_time / ref_response_time)
    score = (
        weights.link_quality * obs.link_quality
        + weights.tx_rate * tx_term
        + weights.response_time * rt_term
        + weights.uptime * obs.uptime
    )
    return min(1.0, max(0.0, score))


def analyze(mote: MoteState, peer: int, obs: SafetyObservation, scenario: Scenario) -> float:
    """Feed one observation of ``peer`` to the mote's trust engine; returns the score.

    The engines digest the same score differently: the assessment engine
    quantizes it into the neighborhood matrix, the behavior-count engine
    tallies it against the misbehavior threshold, and the evidence engine
    records (trusted, rate at reference, mostly up) as a joint observation.
    """
    score = safety_score(obs, scenario.weights, scenario.ref_tx_rate, scenario.ref_response_time)
    if mote.engine is Engine.QAD:
        mote.rwp.a_minor.set(mote.addr, peer, quantize_observation(score))
    elif mote.engine is Engine.BETA:
        prior = mote.counts_by_peer.get(peer, BehaviorCounts())
        outcome = Outcome.NORMAL if score >= scenario.misbehavior_threshold else Outcome.MISBEHAVIOR
        mote.counts_by_peer[peer] = update_counts(prior, outcome)
    else:
        table = mote.evidence_by_peer.setdefault(peer, EvidenceCounts(evidence_arity=2))
        table.record(
            score >= scenario.misbehavior_threshold,
            obs.tx_rate >= scenario.ref_tx_rate,
            obs.uptime > 0.5,
        )
    return score


def _selection_metric(mote: MoteState, peer: int) -> float:
    if mote.engine is Engine.QAD:
        value = mote.rwp.a_minor.get(mote.addr, peer) if mote.rwp.a_minor.covers(peer) else None
        return -3.0 if value is None else float(value)  # unassessed ranks below the scale
    if mote.engine is Engine.BETA:
        counts = mote.counts_by_peer.get(peer, BehaviorCounts())
        return TrustRecord.from_counts(counts).combined
    table = mote.evidence_by_peer.get(peer)
    return 0.5 if table is None else bayes_posterior2(table)


def select_peer(mote: MoteState, candidates: Iterable[int]) -> int:
    """The most trusted candidate under the mote's engine; ties go to the lowest address."""
    ordered = sorted(candidates)
    if not ordered:
        raise ValueError("peer selection needs at least one candidate")
    if mote.addr in ordered:
        raise ValueError("a mote cannot select itself")
    best, best_metric = ordered[0], _selection_metric(mote, ordered[0])
    for peer in ordered[1:]:
        metric = _selection_metric(mote, peer)
        if metric > best_metric:
            best, best_metric = peer, metric
    return best


# ---------------------------------------------------------------------------
# trace types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MoteIntervalRecord:
    addr: int
    alive: bool
    energy: float
    pcp: int | None
    roc: int | None
    is_hacp: bool
    selected_peer: int | None


@dataclass(frozen=True)
class PairRecord:
    """One observer's view of one peer at the end of an interval."""

    src: int
    dst: int
    metric: float
    trust: float | None = None
    confidence: float | None = None
    combined: float | None = None


@dataclass(frozen=True)
class MessageStats:
    floods: int = 0
    minors_sent: int = 0
    minors_delivered: int = 0
    queries_sent: int = 0
    queries_answered: int = 0
    app_sent: int = 0
    app_delivered: int = 0


@dataclass(frozen=True)
class IntervalRecord:
    index: int
    theta: float
    theta_next: float
    elected_hacp: int | None
    active_hacp: int | None
    backup_hacp: int | None
    service_gap: bool
    announcements: tuple[tuple[int, int], ...]
    motes: tuple[MoteIntervalRecord, ...]
    pairs: tuple[PairRecord, ...]
    stats: MessageStats


@dataclass(frozen=True)
class SimulationTrace:
    seed: int
    engine: Engine
    architecture: str
    records: tuple[IntervalRecord, ...]
    final_system_trustworthiness: float | None


# ---------------------------------------------------------------------------
# the simulation proper
# ---------------------------------------------------------------------------


class _Simulation:
    def __init__(self, scenario: Scenario):
        scenario.validate()
        self.sc = scenario
        self.adjacency = build_topology(scenario)
        self.noise_rng = random.Random(f"{scenario.seed}:noise")
        self.hop_rng = random.Random(f"{scenario.seed}:hop")
        self.society = list(range(scenario.motes))
        self.truths: dict[tuple[int, int], LinkTruth] = {}
        for a in self.society:
            for b in self.adjacency[a]:
                if b > a:
                    truth = _merge_truth(scenario.default_link, scenario.link_overrides.get((a, b), {}))
                    self.truths[(a, b)] = truth
        for ev in scenario.link_events:
            edge = (min(ev.a, ev.b), max(ev.a, ev.b))
            self.truths[edge].schedule.setdefault(ev.at, {}).update(ev.changes)
        self.motes: dict[int, MoteState] = {}
        for a in self.society:
            neighborhood = sorted({a, *self.adjacency[a]})
            minor = AddressedMatrix(neighborhood)
            minor.set(a, a, 2)  # self-assessment starts fully trusted
            sink = scenario.architecture == "sink" and a == SINK_ADDRESS
            self.motes[a] = MoteState(
                addr=a,
                energy=scenario.capacity if sink else scenario.init_energy,
                capacity=scenario.capacity,
                harvest_rate=scenario.harvest_rate,
                engine=scenario.engine,
                rwp=RwpState(addr=a, theta=scenario.theta_base, a_minor=minor),
                unconstrained=sink,
            )
        self.theta = scenario.theta_base
        self.records: list[IntervalRecord] = []

    # -- helpers ------------------------------------------------------------

    def _truth(self, a: int, b: int) -> LinkTruth:
        return self.truths[(min(a, b), max(a, b))]

    def _alive(self, addr: int) -> bool:
        return self.motes[addr].alive

    def _alive_motes(self) -> list[MoteState]:
        return [self.motes[a] for a in self.society if self.motes[a].alive]

    def _flood(self, origin: int) -> set[int]:
        """Duplicate-suppressed broadcast; returns the motes that processed it."""
        costs = self.sc.costs
        if not self._alive(origin):
            return set()
        processed = {origin}
        frontier = [origin]
        hops = 0
        while frontier and hops < self.sc.motes:
            next_frontier: list[int] = []
            for a in sorted(frontier):
                mote = self.motes[a]
                if not mote.alive:  # died earlier in this flood, never transmitted
                    continue
                charge_energy(mote, "tx", costs)  # the broadcast leaves even if it drains the sender
                for b in self.adjacency[a]:
                    peer = self.motes[b]
                    if b in processed or not peer.alive:
                        continue  # duplicates are discarded without processing
                    charge_energy(peer, "rx", costs)
                    if peer.alive:
                        processed.add(b)
                        next_frontier.append(b)
            frontier = next_frontier
            hops += 1
        return processed

    def _shortest_path(self, src: int, dst: int) -> list[int] | None:
        if src == dst:
            return [src]
        if not self._alive(src) or not self._alive(dst):
            return None
        parents: dict[int, int | None] = {src: None}
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            for b in self.adjacency[cur]:  # ascending: deterministic parents
                if b in parents or not self._alive(b):
                    continue
                parents[b] = cur
                if b == dst:
                    path = [b]
                    while path[-1] != src:
                        path.append(parents[path[-1]])  # type: ignore[arg-type]
                    path.reverse()
                    return path
                queue.append(b)
        return None

    def _unicast(self, src: int, dst: int) -> bool:
        """Hop-by-hop delivery along the shortest live path; False when it breaks."""
        path = self._shortest_path(src, dst)
        if path is None:
            return False
        costs = self.sc.costs
        for sender, receiver in zip(path, path[1:]):
            s, r = self.motes[sender], self.motes[receiver]
            if not s.alive:
                return False
            charge_energy(s, "tx", costs)
            if not r.alive:
                return False
            charge_energy(r, "rx", costs)
            if not r.alive:  # drained by the reception itself
                return False
        return True

    def _route_greedy(self, src: int, dst: int) -> bool:
        """Forward hop by hop to each holder's most trusted neighbor; capped at n hops."""
        current = src
        for _ in range(self.sc.motes):
            mote = self.motes[current]
            if not mote.alive:
                return False
            candidates = [b for b in self.adjacency[current] if self._alive(b)]
            if not candidates:
                return False
            nxt = select_peer(mote, candidates)
            charge_energy(mote, "tx", self.sc.costs)
            peer = self.motes[nxt]
            if not peer.alive:
                return False
            charge_energy(peer, "rx", self.sc.costs)
            if not peer.alive:
                return False
            current = nxt
            if current == dst:
                return True
        return False

    def _merge_row(self, mote: MoteState, peer: int, row: dict[int, int]) -> None:
        # the poll reply carries the peer's own assessment row; keep what overlaps
        for subject, value in row.items():
            if mote.rwp.a_minor.covers(subject):
                mote.rwp.a_minor.set(peer, subject, value)

    def _apply_link_events(self, k: int) -> None:
        for edge in sorted(self.truths):
            truth = self.truths[edge]
            changes = truth.schedule.get(k)
            if changes:
                for name, value in changes.items():
                    setattr(truth, name, value)
                truth.validate()

    def _apply_kills(self, k: int) -> None:
        for addr in self.sc.mote_kills.get(k, ()):
            mote = self.motes[addr]
            mote.alive = False
            if not mote.unconstrained:
                mote.energy = 0.0

    # -- one interval ---------------------------------------------------------

    def run_interval(self, k: int) -> None:
        sc = self.sc
        costs = sc.costs
        theta = self.theta
        self._apply_link_events(k)

        # ---- monitoring: poll neighbors, score links, feed the engine
        if k > 0:
            for mote in self._alive_motes():
                mote.rwp.begin_phase(RwpPhase.MONITORING)
        row_snapshots = {m.addr: m.rwp.a_minor.row(m.addr) for m in self._alive_motes()}
        prev_minors = {m.addr: m.rwp.a_minor.matrix.copy() for m in self._alive_motes()}
        for a in self.society:
            mote = self.motes[a]
            if not mote.alive:
                continue
            for b in self.adjacency[a]:
                if not mote.alive:
                    break
                peer = self.motes[b]
                charge_energy(mote, "tx", costs)  # poll request
                if not peer.alive:
                    continue  # request goes unanswered
                charge_energy(peer, "rx", costs)
                if not peer.alive:
                    continue
                charge_energy(peer, "tx", costs)  # reply with safety data and own row
                if not mote.alive:
                    continue
                charge_energy(mote, "rx", costs)
                if not mote.alive:
                    continue
                obs = observe_link(self._truth(a, b), self.noise_rng)
                analyze(mote, b, obs, sc)
                charge_energy(mote, "compute", costs)
                self._merge_row(mote, b, row_snapshots.get(b, {}))

        pcp_map: dict[int, int] = {}
        roc_map: dict[int, int] = {}
        for a in self.society:
            mote = self.motes[a]
            if not mote.alive or a not in prev_minors:
                continue
            mote.rwp.roc = rate_of_change(prev_minors[a], mote.rwp.a_minor.matrix)
            mote.rwp.pcp = rwp_proto.compute_pcp(mote.energy, mote.harvest_rate, theta, mote.capacity)
            charge_energy(mote, "compute", costs)
            if mote.alive:
                pcp_map[a] = mote.rwp.pcp
                roc_map[a] = mote.rwp.roc

        # ---- announcing: flood (address, PCP); collapsed under a sink
        for mote in self._alive_motes():
            mote.rwp.begin_phase(RwpPhase.ANNOUNCING)
        announcements: list[tuple[int, int]] = []
        floods = 0
        if sc.architecture == "p2p":
            for a in self.society:
                mote = self.motes[a]
                if not mote.alive or a not in pcp_map:
                    continue
                self._flood(a)
                floods += 1
                announcements.append((a, pcp_map[a]))

        # ---- electing
        for mote in self._alive_motes():
            mote.rwp.begin_phase(RwpPhase.ELECTING)
        elected: int | None = None
        backup: int | None = None
        if sc.architecture == "sink":
            elected = SINK_ADDRESS if self._alive(SINK_ADDRESS) else None
        elif announcements:
            order = rwp_proto.election_order(announcements)
            elected = order[0]
            if sc.failover and len(order) > 1:
                backup = order[1]

        # ---- serving
        for mote in self._alive_motes():
            mote.rwp.begin_phase(RwpPhase.SERVING, elected, backup)
        self._apply_kills(k)  # scripted failures land mid-interval, after the election
        provider: int | None = None
        if elected is not None:
            provider = rwp_proto.failover(elected, backup, self._alive)

        theta_next = theta  # an unserved interval keeps the current period
        major: MajorMatrix | None = None
        minors_sent = minors_delivered = 0
        if provider is not None:
            host = self.motes[provider]
            minors = [(provider, host.rwp.a_minor.copy(), sc.qad_operator)]
            rocs = [host.rwp.roc]
            for a in self.society:
                mote = self.motes[a]
                if a == provider or not mote.alive:
                    continue
                minors_sent += 1
                if self._unicast(a, provider):
                    minors.append((a, mote.rwp.a_minor.copy(), sc.qad_operator))
                    rocs.append(mote.rwp.roc)
                    minors_delivered += 1
            if host.alive:
                charge_energy(host, "compute", costs)  # aggregation
            if host.alive:
                major = rwp_proto.aggregate_major(minors, self.society, k, rng=self.hop_rng)
                theta_next = rwp_proto.next_interval(rocs, sc.theta_base, sc.theta_min, sc.theta_max)
                major.theta_next = theta_next
                charge_energy(host, "compute", costs)
                if host.alive:
                    self._flood(provider)  # push the aggregate and next period out
                    floods += 1
                else:
                    provider, major, theta_next = None, None, theta
            else:
                provider, major, theta_next = None, None, theta

        # ---- peer selection, trust queries, greedily routed traffic
        selections: dict[int, int] = {}
        queries_sent = queries_answered = app_sent = app_delivered = 0
        for a in self.society:
            mote = self.motes[a]
            if not mote.alive:
                continue
            candidates = [b for b in self.adjacency[a] if self._alive(b)]
            if not candidates:
                continue
            choice = select_peer(mote, candidates)
            selections[a] = choice
            if provider is None or major is None:
                continue
            queries_sent += 1
            if a == provider:
                rwp_proto.handle_query(major, choice, self.society)
                queries_answered += 1
            elif self._unicast(a, provider) and self._alive(provider):
                rwp_proto.handle_query(major, choice, self.society)
                if self._unicast(provider, a):
                    queries_answered += 1
            if a != provider:
                app_sent += 1
                if self._route_greedy(a, provider):
                    app_delivered += 1

        # ---- wrap up: harvest, then photograph the interval
        for mote in self._alive_motes():
            mote.harvest(theta)
            mote.rwp.theta = theta_next
        mote_records = []
        for a in self.society:
            mote = self.motes[a]
            mote_records.append(
                MoteIntervalRecord(
                    addr=a,
                    alive=mote.alive,
                    energy=mote.energy,
                    pcp=pcp_map.get(a),
                    roc=roc_map.get(a),
                    is_hacp=(a == provider),
                    selected_peer=selections.get(a),
                )
            )
        self.records.append(
            IntervalRecord(
                index=k,
                theta=theta,
                theta_next=theta_next,
                elected_hacp=elected,
                active_hacp=provider,
                backup_hacp=backup,
                service_gap=provider is None,
                announcements=tuple(announcements),
                motes=tuple(mote_records),
                pairs=tuple(self._pair_records()),
                stats=MessageStats(
                    floods=floods,
                    minors_sent=minors_sent,
                    minors_delivered=minors_delivered,
                    queries_sent=queries_sent,
                    queries_answered=queries_answered,
                    app_sent=app_sent,
                    app_delivered=app_delivered,
                ),
            )
        )
        self.theta = theta_next

    def _pair_records(self) -> list[PairRecord]:
        out: list[PairRecord] = []
        for a in self.society:
            mote = self.motes[a]
            if not mote.alive:
                continue
            if mote.engine is Engine.QAD:
                row = mote.rwp.a_minor.row(a)
                for dst in sorted(row):
                    if dst != a:
                        out.append(PairRecord(a, dst, float(row[dst])))
            elif mote.engine is Engine.BETA:
                for dst in sorted(mote.counts_by_peer):
                    rec = TrustRecord.from_counts(mote.counts_by_peer[dst])
                    out.append(PairRecord(a, dst, rec.combined, rec.trust, rec.confidence, rec.combined))
            else:
                for dst in sorted(mote.evidence_by_peer):
                    out.append(PairRecord(a, dst, bayes_posterior2(mote.evidence_by_peer[dst])))
        return out

    def final_system_trustworthiness(self) -> float | None:
        records = [
            TrustRecord.from_counts(counts)
            for a in self.society
            for _, counts in sorted(self.motes[a].counts_by_peer.items())
        ]
        if not records:
            return None
        return system_trustworthiness(records)


def run(scenario: Scenario) -> SimulationTrace:
    """Simulate the scenario start to finish; same scenario, same trace, always."""
    sim = _Simulation(scenario)
    for k in range(scenario.intervals):
        sim.run_interval(k)
    return SimulationTrace(
        seed=scenario.seed,
        engine=scenario.engine,
        architecture=scenario.architecture,
        records=tuple(sim.records),
        final_system_trustworthiness=sim.final_system_trustworthiness(),
    )
