"""Deterministic tick-based broadcast simulator.

Time model: a transmission at tick t reaches every 1-hop neighbor at
tick t+1; nodes take their transmit opportunities in ascending id
order; there is no loss or contention.  Redundancy, not collision, is
the measured cost.

Each run owns all per-node state and produces a complete event log
plus transmission counters.  Identical scenarios (including the
possession seed) give byte-identical logs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from enum import Enum

from . import coding, metrics
from .coding import (NodeState, Packet, PacketKind, SizeClass, enqueue,
                     obtain_code_set, update_nbr_recv_table)
from .pruning import ForwardDecision, PruningProtocol, select_forwarders
from .topology import Topology, all_neighbor_views

SEND_NATIVE = "SEND_NATIVE"
SEND_CODED = "SEND_CODED"
RECEIVE = "RECEIVE"
DECODE = "DECODE"
DEFER = "DEFER"
TIMEOUT = "TIMEOUT"
DROP_REDUNDANT = "DROP_REDUNDANT"

SEND_KINDS = (SEND_NATIVE, SEND_CODED)

DEFAULT_TIMEOUT_TICKS = 3
DEFAULT_TICK_CAP = 10_000
SMALL_PAYLOAD_BYTES = 60
LARGE_PAYLOAD_BYTES = 200


class LoadScenario(Enum):
    LOW_LOAD = "low"
    HIGH_LOAD = "high"
    MIXED = "mixed"


class DtMode(Enum):
    WITH = "with"
    WITHOUT = "without"


@dataclass(frozen=True)
class WorkloadPacket:
    pid: int
    origin: int
    length: int
    delay_tolerance: float


@dataclass(frozen=True)
class Scenario:
    topology: Topology
    protocol: PruningProtocol
    coding_enabled: bool
    source: int
    workload: tuple[WorkloadPacket, ...]
    prob_gate: float = 0.4
    dt_gate: float = 0.8
    guess_threshold: float = coding.DEFAULT_GUESS_THRESHOLD
    timeout_ticks: int = DEFAULT_TIMEOUT_TICKS
    possession_seed: int = 0
    load: LoadScenario = LoadScenario.LOW_LOAD
    small_threshold: int = coding.DEFAULT_SMALL_THRESHOLD
    tick_cap: int = DEFAULT_TICK_CAP

    def validate(self) -> None:
        if not self.workload:
            raise ValueError("workload must be nonempty")
        if not 0 <= self.source < self.topology.node_count:
            raise ValueError(f"invalid source {self.source}")
        for name in ("prob_gate", "dt_gate", "guess_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.timeout_ticks < 1:
            raise ValueError("timeout_ticks must be positive")


@dataclass(frozen=True)
class Event:
    tick: int
    actor: int
    kind: str
    pids: tuple[int, ...]
    forward_list: tuple[int, ...] = ()


EventLog = list


def format_event_log(log: list[Event]) -> str:
    lines = []
    for ev in log:
        pids = ",".join(str(p) for p in ev.pids) or "-"
        fwd = ",".join(str(f) for f in ev.forward_list) or "-"
        lines.append(f"{ev.tick} {ev.actor} {ev.kind} {pids} {fwd}")
    return "\n".join(lines) + ("\n" if lines else "")


def payload_bytes(seed: int, pid: int, length: int) -> bytes:
    return random.Random(f"{seed}:payload:{pid}").randbytes(length)


def build_workload(count: int, load: LoadScenario, source: int,
                   dt_mode: DtMode, seed: int,
                   small_threshold: int = coding.DEFAULT_SMALL_THRESHOLD
                   ) -> tuple[WorkloadPacket, ...]:
    """Native packets originated at the source.

    Low load is all small packets, high load all large, mixed
    alternates (which exercises zero-padded coding).  With delay
    tolerance, per-packet tolerances are drawn uniformly from the seed;
    without, every packet is fully tolerant and only the run going
    quiet forces it out of the queue.
    """
    rng = random.Random(f"{seed}:dt")
    out = []
    for pid in range(count):
        if load is LoadScenario.LOW_LOAD:
            length = SMALL_PAYLOAD_BYTES
        elif load is LoadScenario.HIGH_LOAD:
            length = LARGE_PAYLOAD_BYTES
        else:
            length = SMALL_PAYLOAD_BYTES if pid % 2 == 0 else LARGE_PAYLOAD_BYTES
        dt = rng.random() if dt_mode is DtMode.WITH else 1.0
        out.append(WorkloadPacket(pid=pid, origin=source, length=length,
                                  delay_tolerance=dt))
    return tuple(out)


class _Run:
    def __init__(self, sc: Scenario):
        sc.validate()
        self.sc = sc
        self.t = sc.topology
        self.n = self.t.node_count
        self.views = all_neighbor_views(self.t)
        self.log: list[Event] = []
        self.states = [NodeState(node=v, small_threshold=sc.small_threshold)
                       for v in range(self.n)]
        self.outgoing_fwd: list[dict[int, tuple[int, ...]]] = [
            {} for _ in range(self.n)]
        self.duty: dict[int, dict[int, tuple[int, ...]]] = {}
        self.schedule_cache: dict[int, tuple[dict[int, tuple[int, ...]],
                                             int]] = {}
        self.decision_cache: dict[tuple[int | None, int], ForwardDecision] = {}
        self.next_coded_pid = 1_000_000
        self.send_actors: set[int] = set()
        self.uncovered_total = 0
        self.counters = metrics.SendCounters()
        self.natives: dict[int, Packet] = {}
        self.origins = {wp.origin for wp in sc.workload}
        self._setup()

    # -- setup ---------------------------------------------------------

    def _setup(self) -> None:
        sc = self.sc
        for wp in sc.workload:
            self.natives[wp.pid] = coding.make_native(
                wp.pid, wp.origin,
                payload_bytes(sc.possession_seed, wp.pid, wp.length),
                delay_tolerance=wp.delay_tolerance,
                small_threshold=sc.small_threshold)

        # Per-(node, packet) possession probabilities.  A value at or
        # above the guess threshold means the node really does start out
        # holding the packet, so guessed possession is never wrong and a
        # coded transmission is decodable by everyone it was built for.
        rng = random.Random(f"{sc.possession_seed}:possession")
        prior: dict[tuple[int, int], float] = {}
        pids = sorted(self.natives)
        for v in range(self.n):
            for pid in pids:
                p = rng.random()
                prior[(v, pid)] = 1.0 if self.natives[pid].origin == v else p
        for v in range(self.n):
            st = self.states[v]
            for nbr in sorted(self.t.adj[v]):
                for pid in pids:
                    st.possession[(nbr, pid)] = prior[(nbr, pid)]
            for pid in pids:
                native = self.natives[pid]
                if native.origin != v and coding.guess_possession(
                        prior[(v, pid)], sc.guess_threshold):
                    st.packet_pool[pid] = native

        for wp in sc.workload:
            duty, uncovered = self._schedule(wp.origin)
            self.duty[wp.pid] = duty
            self.uncovered_total += uncovered
            for v, forward_list in duty.items():
                self.outgoing_fwd[v][wp.pid] = forward_list
            st = self.states[wp.origin]
            enqueue(st, self.natives[wp.pid])
            st.seen.add(wp.pid)

    def _decision(self, u: int | None, v: int) -> ForwardDecision:
        key = (u, v)
        if key not in self.decision_cache:
            self.decision_cache[key] = select_forwarders(
                self.sc.protocol, self.t, u, v)
        return self.decision_cache[key]

    def _schedule(self, origin: int) -> tuple[dict[int, tuple[int, ...]], int]:
        """Forwarding duty for one origin, fixed before the run starts.

        The pruning cascade is evaluated structurally, wave by wave from
        the origin, so a node's duty depends only on the topology and
        the protocol -- never on which copy happens to arrive first at
        run time.  (An arrival-order duty would let coding delays
        reshuffle forward lists and change the transmission count for
        reasons unrelated to coding itself.)  Nodes the cascade leaves
        uncovered are mopped up by the lowest-id covered neighbor.
        """
        if origin in self.schedule_cache:
            return self.schedule_cache[origin]
        duty: dict[int, tuple[int, ...]] = {}
        uncovered = 0
        decision = self._decision(None, origin)
        duty[origin] = decision.forward_list
        uncovered += len(decision.uncovered)
        covered = set(self.views[origin].one_hop)
        frontier = [origin]
        while frontier:
            designated = []
            for v in frontier:
                for f in duty[v]:
                    if f in duty:
                        continue
                    d = self._decision(v, f)
                    duty[f] = d.forward_list
                    uncovered += len(d.uncovered)
                    covered |= self.views[f].one_hop
                    designated.append(f)
            frontier = sorted(set(designated))
        everyone = set(range(self.n))
        while covered != everyone:
            helpers = sorted(v for v in covered if self.t.adj[v] - covered)
            if not helpers:
                break  # disconnected: the remainder is unreachable
            rescue = helpers[0]
            duty.setdefault(rescue, ())
            covered |= self.views[rescue].one_hop
        self.schedule_cache[origin] = (duty, uncovered)
        return self.schedule_cache[origin]

    # -- reception -----------------------------------------------------

    def on_receive(self, st: NodeState, pkt: Packet, sender: int,
                   tick: int) -> None:
        if pkt.kind is PacketKind.NATIVE:
            pids = (pkt.pid,)
        else:
            pids = tuple(sorted(pkt.coded_ids))
        self.log.append(Event(tick, st.node, RECEIVE, pids, pkt.forward_list))
        update_nbr_recv_table(st, pkt, sender)

        if pkt.kind is PacketKind.NATIVE:
            if pkt.pid in st.seen:
                self.log.append(Event(tick, st.node, DROP_REDUNDANT,
                                      (pkt.pid,)))
            else:
                self._handle_native(st, coding.strip_annotations(pkt))
        else:
            native = coding.decode(st, pkt)
            if native is not None:
                self.log.append(Event(tick, st.node, DECODE, (native.pid,)))
            elif pkt.pid in st.deferred:
                self.log.append(Event(tick, st.node, DEFER, pids))
            else:
                self.log.append(Event(tick, st.node, DROP_REDUNDANT, pids))
            # Every constituent the node can resolve counts as received:
            # possession of a coded packet implies possession of each part.
            for pid in pids:
                if pid in st.packet_pool and pid not in st.seen:
                    self._handle_native(st, st.packet_pool[pid])
        self._retry_deferred(st, tick)

    def _handle_native(self, st: NodeState, native: Packet) -> None:
        st.seen.add(native.pid)
        st.packet_pool.setdefault(native.pid, native)
        if st.node in self.duty[native.pid]:
            enqueue(st, native)

    def _retry_deferred(self, st: NodeState, tick: int) -> None:
        progress = True
        while progress:
            progress = False
            for cpid in sorted(st.deferred):
                carrier = st.deferred[cpid]
                native = coding.decode(st, carrier)
                if native is None:
                    continue
                progress = True
                self.log.append(Event(tick, st.node, DECODE, (native.pid,)))
                for pid in sorted(carrier.coded_ids):
                    if pid in st.packet_pool and pid not in st.seen:
                        self._handle_native(st, st.packet_pool[pid])

    # -- transmission --------------------------------------------------

    def _needing_min_prob(self, st: NodeState, pid: int, nbrs) -> float:
        probs = [st.possession.get((v, pid), 0.0) for v in nbrs
                 if st.possession.get((v, pid), 0.0) < 1.0]
        return min(probs) if probs else 1.0

    def on_transmit_opportunity(self, st: NodeState,
                                tick: int) -> tuple[int, Packet] | None:
        sc = self.sc
        nbrs = sorted(self.t.adj[st.node])
        fwd = self.outgoing_fwd[st.node]
        attempts = 0
        limit = len(st.output_queue)
        while attempts < limit:
            head = st.output_queue[0]
            native = st.packet_pool[head]
            gated = (sc.coding_enabled
                     and self._needing_min_prob(st, head, nbrs) > sc.prob_gate
                     and native.delay_tolerance > sc.dt_gate)
            if gated:
                cs = obtain_code_set(
                    st, nbrs, sc.guess_threshold,
                    partner_ok=lambda h, r: fwd[r] == fwd[h])
                if len(cs.members) > 1:
                    return self._emit_coded(st, cs, tick)
                if head not in st.timer_expired:
                    # No partner yet: hold the packet back and let the
                    # rest of the queue flow.
                    st.timers.setdefault(head, tick + sc.timeout_ticks)
                    self.log.append(Event(tick, st.node, DEFER, (head,)))
                    st.output_queue.pop(0)
                    st.output_queue.append(head)
                    attempts += 1
                    continue
            return self._emit_native(st, head, tick)
        return None

    def _annotate(self, st: NodeState, pkt: Packet,
                  forward_list: tuple[int, ...]) -> Packet:
        two_hop = (self.views[st.node].two_hop
                   if self.sc.protocol is PruningProtocol.TDP else None)
        return replace(pkt, forward_list=forward_list,
                       sender_two_hop=two_hop,
                       reception_report=frozenset(st.packet_pool))

    def _emit_native(self, st: NodeState, pid: int, tick: int
                     ) -> tuple[int, Packet]:
        st.output_queue.remove(pid)
        st.timers.pop(pid, None)
        st.timer_expired.discard(pid)
        out = self._annotate(st, st.packet_pool[pid],
                             self.outgoing_fwd[st.node][pid])
        self.log.append(Event(tick, st.node, SEND_NATIVE, (pid,),
                              out.forward_list))
        self.counters.count_native(out.size_class)
        self.send_actors.add(st.node)
        return (st.node, out)

    def _emit_coded(self, st: NodeState, cs: coding.CodeSet, tick: int
                    ) -> tuple[int, Packet]:
        head = cs.members[0]
        coded = coding.encode(st.packet_pool, cs.members, self.next_coded_pid,
                              self.sc.small_threshold)
        self.next_coded_pid += 1
        for pid in cs.members:
            st.output_queue.remove(pid)
            st.timers.pop(pid, None)
            st.timer_expired.discard(pid)
        out = self._annotate(st, coded, self.outgoing_fwd[st.node][head])
        self.log.append(Event(tick, st.node, SEND_CODED, cs.members,
                              out.forward_list))
        self.counters.count_coded(
            out.size_class,
            [st.packet_pool[pid].size_class for pid in cs.members])
        self.send_actors.add(st.node)
        return (st.node, out)

    # -- main loop -----------------------------------------------------

    def run(self) -> tuple[list[Event], metrics.RunMetrics]:
        sc = self.sc
        in_flight: list[tuple[int, Packet]] = []
        quiescent = False
        tick = 0
        while tick <= sc.tick_cap:
            deliveries = in_flight
            in_flight = []
            for sender, pkt in deliveries:
                for recv in sorted(self.t.adj[sender]):
                    self.on_receive(self.states[recv], pkt, sender, tick)
            for st in self.states:
                for pid in sorted(st.timers):
                    if (pid in st.output_queue and tick >= st.timers[pid]
                            and pid not in st.timer_expired):
                        self.on_timeout(st, pid, tick)
            sends = []
            for st in self.states:
                if st.output_queue:
                    result = self.on_transmit_opportunity(st, tick)
                    if result is not None:
                        sends.append(result)
            in_flight = sends
            if not deliveries and not sends:
                if any(st.output_queue for st in self.states):
                    # Nothing is in flight and nobody transmitted: no
                    # coding partner can ever arrive, so waiting ends now.
                    for st in self.states:
                        for pid in st.output_queue:
                            self.on_timeout(st, pid, tick)
                else:
                    quiescent = True
                    break
            tick += 1
        return self.log, self._finalize(quiescent)

    def on_timeout(self, st: NodeState, pid: int, tick: int) -> None:
        if pid in st.timer_expired:
            return
        st.timer_expired.add(pid)
        self.log.append(Event(tick, st.node, TIMEOUT, (pid,)))

    def _finalize(self, quiescent: bool) -> metrics.RunMetrics:
        delivered = all(
            all(pid in st.packet_pool for pid in self.natives)
            for st in self.states)
        forwarders = len(self.send_actors - self.origins)
        return metrics.finalize(self.counters, forwarder_count=forwarders,
                                delivery_complete=delivered,
                                quiescent=quiescent,
                                uncovered_total=self.uncovered_total)


def run_broadcast(sc: Scenario) -> tuple[list[Event], metrics.RunMetrics]:
    """Execute one broadcast scenario to quiescence (or the tick cap)."""
    return _Run(sc).run()
