"""Transmission counting and coding-gain computation.

The gain per size class is the ratio of transmissions a run would have
needed without coding to the transmissions it actually used:

    gain = t_p / ((t_p - t_ncp) + coded_sends)

where t_p counts native-transmission equivalents (plain native sends
plus every native carried inside a coded send), t_ncp the natives that
rode inside coded sends, and coded_sends the coded transmissions.  With
a single coded send this reduces to t_p / (t_p - t_ncp + 1); merging k
natives at one relay out of a 9-packet workload therefore yields
exactly 9/(10-k).
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .coding import SizeClass, size_class_for


@dataclass
class SendCounters:
    native_sends_big: int = 0
    native_sends_small: int = 0
    coded_sends_big: int = 0
    coded_sends_small: int = 0
    t_ncp_big: int = 0
    t_ncp_small: int = 0

    def count_native(self, size_class: SizeClass) -> None:
        if size_class is SizeClass.LARGE:
            self.native_sends_big += 1
        else:
            self.native_sends_small += 1

    def count_coded(self, packet_class: SizeClass,
                    member_classes: Iterable[SizeClass]) -> None:
        if packet_class is SizeClass.LARGE:
            self.coded_sends_big += 1
        else:
            self.coded_sends_small += 1
        for mc in member_classes:
            if mc is SizeClass.LARGE:
                self.t_ncp_big += 1
            else:
                self.t_ncp_small += 1


@dataclass(frozen=True)
class RunMetrics:
    t_p_big: int
    t_p_small: int
    t_ncp_big: int
    t_ncp_small: int
    native_sends_big: int
    native_sends_small: int
    coded_sends_big: int
    coded_sends_small: int
    gain_big: float
    gain_small: float
    gain_overall: float
    total_sends: int
    forwarder_count: int
    delivery_complete: bool
    quiescent: bool
    uncovered_total: int

    def count_fields(self) -> tuple:
        """Everything recomputable from an event log alone."""
        return (self.t_p_big, self.t_p_small, self.t_ncp_big,
                self.t_ncp_small, self.native_sends_big,
                self.native_sends_small, self.coded_sends_big,
                self.coded_sends_small, self.gain_big, self.gain_small,
                self.gain_overall, self.total_sends, self.forwarder_count)


def class_gain(t_p: int, t_ncp: int, coded_sends: int) -> float:
    """Gain of one size class; 1 for an empty class."""
    if t_p < 0 or t_ncp < 0 or coded_sends < 0:
        raise ValueError("counts must be nonnegative")
    if t_ncp > t_p:
        raise ValueError("t_ncp cannot exceed t_p")
    if t_p == 0:
        return 1.0
    denom = (t_p - t_ncp) + coded_sends
    if denom <= 0:
        # Every transmission of the class was absorbed into coded sends
        # of the other class (mixed coding); cap at the class total.
        return float(t_p)
    return t_p / denom


def overall_gain(gain_big: float, gain_small: float) -> float:
    if gain_big < 0 or gain_small < 0:
        raise ValueError("gains must be nonnegative")
    return (gain_big + gain_small) / 2


def finalize(counters: SendCounters, forwarder_count: int,
             delivery_complete: bool, quiescent: bool,
             uncovered_total: int) -> RunMetrics:
    t_p_big = counters.native_sends_big + counters.t_ncp_big
    t_p_small = counters.native_sends_small + counters.t_ncp_small
    gain_big = class_gain(t_p_big, counters.t_ncp_big,
                          counters.coded_sends_big)
    gain_small = class_gain(t_p_small, counters.t_ncp_small,
                            counters.coded_sends_small)
    return RunMetrics(
        t_p_big=t_p_big, t_p_small=t_p_small,
        t_ncp_big=counters.t_ncp_big, t_ncp_small=counters.t_ncp_small,
        native_sends_big=counters.native_sends_big,
        native_sends_small=counters.native_sends_small,
        coded_sends_big=counters.coded_sends_big,
        coded_sends_small=counters.coded_sends_small,
        gain_big=gain_big, gain_small=gain_small,
        gain_overall=overall_gain(gain_big, gain_small),
        total_sends=(counters.native_sends_big + counters.native_sends_small
                     + counters.coded_sends_big + counters.coded_sends_small),
        forwarder_count=forwarder_count,
        delivery_complete=delivery_complete,
        quiescent=quiescent,
        uncovered_total=uncovered_total,
    )


def gain_from_log(log: Sequence, workload: Sequence,
                  small_threshold: int = 100,
                  delivery_complete: bool = True,
                  quiescent: bool = True,
                  uncovered_total: int = 0) -> RunMetrics:
    """Recount sends straight from the event log.

    Independent of the engine's incremental counters; the two must
    agree exactly on every recountable field.
    """
    from .engine import SEND_CODED, SEND_NATIVE  # avoid import cycle

    lengths = {wp.pid: wp.length for wp in workload}
    origins = {wp.origin for wp in workload}
    counters = SendCounters()
    actors = set()
    for ev in log:
        if ev.kind == SEND_NATIVE:
            (pid,) = ev.pids
            counters.count_native(size_class_for(lengths[pid],
                                                 small_threshold))
            actors.add(ev.actor)
        elif ev.kind == SEND_CODED:
            member_classes = [size_class_for(lengths[pid], small_threshold)
                              for pid in ev.pids]
            packet_len = max(lengths[pid] for pid in ev.pids)
            counters.count_coded(size_class_for(packet_len, small_threshold),
                                 member_classes)
            actors.add(ev.actor)
    return finalize(counters, forwarder_count=len(actors - origins),
                    delivery_complete=delivery_complete,
                    quiescent=quiescent, uncovered_total=uncovered_total)


_AGG_FIELDS = ("total_sends", "forwarder_count", "gain_big", "gain_small",
               "gain_overall")


def aggregate(runs: Sequence[Mapping], group_keys: Sequence[str]
              ) -> list[dict]:
    """Mean/min/max summary per group, one row per distinct key tuple."""
    if not runs:
        raise ValueError("no runs to aggregate")
    groups: dict[tuple, list[Mapping]] = {}
    for row in runs:
        key = tuple(row[k] for k in group_keys)
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        rows = groups[key]
        summary: dict = dict(zip(group_keys, key))
        summary["runs"] = len(rows)
        for name in _AGG_FIELDS:
            values = [row[name] for row in rows]
            summary[f"mean_{name}"] = statistics.fmean(values)
            summary[f"min_{name}"] = min(values)
            summary[f"max_{name}"] = max(values)
        summary["all_delivered"] = all(row["delivered"] for row in rows)
        out.append(summary)
    return out


def render_table(rows: Sequence[Mapping], columns: Sequence[str]) -> str:
    """Fixed-width text table, one aggregate group per line."""
    def fmt(value) -> str:
        if isinstance(value, bool):
            return "yes" if value else "no"
        if isinstance(value, float):
            return f"{value:.4f}"
        return str(value)

    cells = [[fmt(row.get(c, "")) for c in columns] for row in rows]
    widths = [max(len(c), *(len(line[i]) for line in cells)) if cells else len(c)
              for i, c in enumerate(columns)]
    header = "  ".join(c.ljust(w) for c, w in zip(columns, widths))
    sep = "  ".join("-" * w for w in widths)
    body = ["  ".join(line[i].ljust(widths[i]) for i in range(len(columns)))
            for line in cells]
    return "\n".join([header, sep, *body]) + "\n"
