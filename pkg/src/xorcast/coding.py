"""Opportunistic XOR coding: queues, possession tracking, code-set
selection, encoding with zero-padding, and packet-pool decoding.

A node XORs several native packets into one transmission when every
neighbor that still needs one of them already knows all the others
(confirmed by overhearing or reception reports, or guessed from a
possession probability).  Receivers keep undecodable coded packets
aside and retry as their packet pool grows.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable

DEFAULT_SMALL_THRESHOLD = 100
DEFAULT_GUESS_THRESHOLD = 0.8


class PacketKind(Enum):
    NATIVE = "native"
    CODED = "coded"


class SizeClass(Enum):
    SMALL = "small"
    LARGE = "large"


def size_class_for(length: int, small_threshold: int = DEFAULT_SMALL_THRESHOLD) -> SizeClass:
    # Strictly smaller than the threshold counts as small.
    return SizeClass.SMALL if length < small_threshold else SizeClass.LARGE


@dataclass(frozen=True)
class Packet:
    pid: int
    origin: int
    kind: PacketKind
    size_class: SizeClass
    length: int
    payload: bytes
    delay_tolerance: float = 1.0
    coded_ids: frozenset[int] = frozenset()
    # (pid, origin, length, delay_tolerance) per constituent, so padded
    # decodes can restore exact lengths without out-of-band state.
    coded_meta: tuple[tuple[int, int, int, float], ...] = ()
    forward_list: tuple[int, ...] = ()
    sender_two_hop: frozenset[int] | None = None
    reception_report: frozenset[int] = frozenset()


def make_native(pid: int, origin: int, payload: bytes,
                delay_tolerance: float = 1.0,
                small_threshold: int = DEFAULT_SMALL_THRESHOLD) -> Packet:
    return Packet(pid=pid, origin=origin, kind=PacketKind.NATIVE,
                  size_class=size_class_for(len(payload), small_threshold),
                  length=len(payload), payload=payload,
                  delay_tolerance=delay_tolerance)


@dataclass(frozen=True)
class CodeSet:
    members: tuple[int, ...]
    encoded: bytes


@dataclass
class NodeState:
    node: int
    output_queue: list[int] = field(default_factory=list)
    packet_pool: dict[int, Packet] = field(default_factory=dict)
    # (neighbor id, packet id) -> probability; exactly 1.0 once confirmed.
    possession: dict[tuple[int, int], float] = field(default_factory=dict)
    timers: dict[int, int] = field(default_factory=dict)
    timer_expired: set[int] = field(default_factory=set)
    # Coded packets received with >= 2 unknown constituents, kept for retry.
    deferred: dict[int, Packet] = field(default_factory=dict)
    # Native ids this node has received over the air (first-copy tracking).
    seen: set[int] = field(default_factory=set)
    small_threshold: int = DEFAULT_SMALL_THRESHOLD

    def virtual_queue(self, size_class: SizeClass) -> list[int]:
        return [pid for pid in self.output_queue
                if self.packet_pool[pid].size_class is size_class]


def enqueue(s: NodeState, p: Packet) -> None:
    """Append a native packet to the output queue; duplicates are no-ops."""
    if p.kind is not PacketKind.NATIVE:
        raise ValueError("only native packets are queued")
    s.packet_pool.setdefault(p.pid, p)
    if p.pid not in s.output_queue:
        s.output_queue.append(p.pid)


def update_nbr_recv_table(s: NodeState, observed: Packet, sender: int) -> None:
    """Mark everything this transmission proves the sender to possess."""
    confirmed: set[int] = set(observed.reception_report)
    if observed.kind is PacketKind.NATIVE:
        confirmed.add(observed.pid)
    else:
        # Encoding a packet requires possessing every constituent.
        confirmed |= observed.coded_ids
    for pid in confirmed:
        s.possession[(sender, pid)] = 1.0


def all_nbrs_have(s: NodeState, pid: int, neighbors: Iterable[int]) -> bool:
    return all(s.possession.get((v, pid), 0.0) == 1.0 for v in neighbors)


def guess_possession(prob: float, guess_threshold: float) -> bool:
    return prob >= guess_threshold


def known_ids(s: NodeState, neighbor: int, candidate_ids: Iterable[int],
              guess_threshold: float) -> frozenset[int]:
    """Packet ids the neighbor is confirmed or guessed to possess."""
    out = set()
    for pid in candidate_ids:
        prob = s.possession.get((neighbor, pid), 0.0)
        if prob == 1.0 or guess_possession(prob, guess_threshold):
            out.add(pid)
    return frozenset(out)


def can_decode(known: frozenset[int], coded_ids: frozenset[int]) -> bool:
    return len(coded_ids - known) <= 1


def obtain_code_set(s: NodeState, neighbors: Iterable[int],
                    guess_threshold: float = DEFAULT_GUESS_THRESHOLD,
                    partner_ok: Callable[[int, int], bool] | None = None) -> CodeSet:
    """Grow a code set from the queue head.

    Scans the head's own virtual queue first (FIFO), then the other one,
    so same-size coding is preferred and mixed coding falls back to
    zero-padding.  A partner joins only if every neighbor that still
    lacks a member of the enlarged set could decode it.
    """
    if not s.output_queue:
        raise ValueError("output queue is empty")
    head = s.output_queue[0]
    head_class = s.packet_pool[head].size_class
    other = (SizeClass.LARGE if head_class is SizeClass.SMALL
             else SizeClass.SMALL)
    scan = [pid for pid in s.virtual_queue(head_class) if pid != head]
    scan += s.virtual_queue(other)
    nbrs = sorted(neighbors)

    members = [head]
    ids = {head}
    for r in scan:
        if partner_ok is not None and not partner_ok(head, r):
            continue
        trial = frozenset(ids | {r})
        ok = True
        for v in nbrs:
            known = known_ids(s, v, trial, guess_threshold)
            if trial - known and not can_decode(known, trial):
                ok = False
                break
        if ok:
            members.append(r)
            ids.add(r)
    return CodeSet(members=tuple(members),
                   encoded=_xor_payloads(s.packet_pool, members))


def _xor_payloads(pool, members) -> bytes:
    width = max(pool[pid].length for pid in members)
    acc = bytearray(width)
    for pid in members:
        for i, byte in enumerate(pool[pid].payload):
            acc[i] ^= byte
    return bytes(acc)


def encode(pool: dict[int, Packet], members: tuple[int, ...],
           coded_pid: int,
           small_threshold: int = DEFAULT_SMALL_THRESHOLD) -> Packet:
    """XOR the members' payloads, zero-padded to the longest one."""
    if not members:
        raise ValueError("empty member list")
    if len(members) == 1:
        return pool[members[0]]
    payload = _xor_payloads(pool, members)
    meta = tuple((pid, pool[pid].origin, pool[pid].length,
                  pool[pid].delay_tolerance) for pid in members)
    return Packet(pid=coded_pid, origin=-1, kind=PacketKind.CODED,
                  size_class=size_class_for(len(payload), small_threshold),
                  length=len(payload), payload=payload,
                  delay_tolerance=max(pool[pid].delay_tolerance
                                      for pid in members),
                  coded_ids=frozenset(members), coded_meta=meta)


def decode(s: NodeState, c: Packet) -> Packet | None:
    """Recover the single missing constituent, if exactly one is missing.

    Zero missing: redundant, nothing returned.  Two or more missing: the
    coded packet is parked for retry and nothing returned.
    """
    if c.kind is not PacketKind.CODED:
        raise ValueError("decode expects a coded packet")
    missing = [pid for pid in sorted(c.coded_ids) if pid not in s.packet_pool]
    if len(missing) == 0:
        s.deferred.pop(c.pid, None)
        return None
    if len(missing) >= 2:
        s.deferred.setdefault(c.pid, c)
        return None
    target = missing[0]
    acc = bytearray(c.payload)
    for pid in c.coded_ids:
        if pid == target:
            continue
        for i, byte in enumerate(s.packet_pool[pid].payload):
            acc[i] ^= byte
    meta = {m[0]: m for m in c.coded_meta}
    _, origin, length, dt = meta[target]
    native = Packet(pid=target, origin=origin, kind=PacketKind.NATIVE,
                    size_class=size_class_for(length, s.small_threshold),
                    length=length, payload=bytes(acc[:length]),
                    delay_tolerance=dt)
    s.packet_pool[target] = native
    s.deferred.pop(c.pid, None)
    return native


def retry_deferred(s: NodeState) -> list[Packet]:
    """Re-attempt parked coded packets until no further progress."""
    recovered: list[Packet] = []
    progress = True
    while progress:
        progress = False
        for cpid in sorted(s.deferred):
            native = decode(s, s.deferred[cpid])
            if native is not None:
                recovered.append(native)
                progress = True
    return recovered


def strip_annotations(p: Packet) -> Packet:
    """Canonical native form for storage in a packet pool."""
    return replace(p, forward_list=(), sender_two_hop=None,
                   reception_report=frozenset())
