"""Batch runner: sweeps node counts, seeds, protocols and coding
settings, writes per-run and aggregate CSV reports, and renders the
comparison figures alongside them."""

from __future__ import annotations

import argparse
import csv
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import metrics
from .engine import (DEFAULT_TICK_CAP, DtMode, LoadScenario, Scenario,
                     build_workload, format_event_log, run_broadcast)
from .pruning import PruningProtocol
from .topology import (Topology, TopologyError, generate_connected_topology,
                       load_topology)

RUN_CSV_HEADER = ["protocol", "nodes", "seed", "coding", "load", "dt_mode",
                  "sends", "forwarders", "gain_big", "gain_small",
                  "gain_overall", "delivered"]

_PROTOCOLS = {
    "flood": [PruningProtocol.FLOOD],
    "dp": [PruningProtocol.DP],
    "tdp": [PruningProtocol.TDP],
    "pdp": [PruningProtocol.PDP],
    "all": [PruningProtocol.FLOOD, PruningProtocol.DP,
            PruningProtocol.TDP, PruningProtocol.PDP],
}


@dataclass
class Config:
    nodes: list[int] = field(default_factory=lambda: [40])
    area: float = 1000.0
    radio_range: float = 250.0
    seeds: list[int] = field(default_factory=lambda: list(range(100)))
    source: str = "0"
    protocols: list[PruningProtocol] = field(
        default_factory=lambda: list(_PROTOCOLS["all"]))
    coding: str = "on"
    load: LoadScenario = LoadScenario.LOW_LOAD
    dt_mode: DtMode = DtMode.WITH
    prob_gate: float = 0.4
    dt_gate: float = 0.8
    guess_threshold: float = 0.8
    timeout_ticks: int = 3
    packets: int = 9
    small_threshold: int = 100
    topology_file: str | None = None
    out: str = "out"
    emit_log: bool = False
    plots: bool = True


def _unit_interval(name: str):
    def parse(text: str) -> float:
        value = float(text)
        if not 0.0 <= value <= 1.0:
            raise argparse.ArgumentTypeError(
                f"{name} must be in [0, 1], got {text}")
        return value
    return parse


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _proto_list(text: str) -> list[PruningProtocol]:
    out: list[PruningProtocol] = []
    for name in text.split(","):
        name = name.strip().lower()
        if name not in _PROTOCOLS:
            raise argparse.ArgumentTypeError(f"unknown protocol {name!r}")
        for proto in _PROTOCOLS[name]:
            if proto not in out:
                out.append(proto)
    return out


def parse_args(argv=None) -> Config:
    parser = argparse.ArgumentParser(
        prog="xorcast",
        description="Broadcast simulation with pruning protocols and "
                    "opportunistic XOR coding.")
    parser.add_argument("--nodes", type=_int_list, default=[40],
                        help="comma-separated node counts (default: 40)")
    parser.add_argument("--area", type=float, default=1000.0,
                        help="square side length (default: 1000)")
    parser.add_argument("--range", dest="radio_range", type=float,
                        default=250.0, help="radio range (default: 250)")
    parser.add_argument("--seeds", type=str, default="100",
                        help="seed count N (runs seeds 0..N-1) or explicit "
                             "comma-separated list (default: 100)")
    parser.add_argument("--source", type=str, default="0",
                        help="source node id, or 'random' (default: 0)")
    parser.add_argument("--protocol", type=_proto_list,
                        default=_PROTOCOLS["all"], metavar="{flood|dp|tdp|pdp|all}",
                        help="protocols to run, comma-separated (default: all)")
    parser.add_argument("--coding", choices=["on", "off", "both"],
                        default="on", help="coding setting (default: on)")
    parser.add_argument("--load", choices=["low", "high", "mixed"],
                        default="low", help="load scenario (default: low)")
    parser.add_argument("--dt-mode", choices=["with", "without"],
                        default="with",
                        help="delay-tolerance mode (default: with)")
    parser.add_argument("--prob-gate", type=_unit_interval("--prob-gate"),
                        default=0.4,
                        help="possession-probability gate (default: 0.4)")
    parser.add_argument("--dt-gate", type=_unit_interval("--dt-gate"),
                        default=0.8,
                        help="delay-tolerance gate (default: 0.8)")
    parser.add_argument("--guess", type=_unit_interval("--guess"),
                        default=0.8,
                        help="possession guess threshold (default: 0.8)")
    parser.add_argument("--timeout", type=int, default=3,
                        help="coding wait in ticks (default: 3)")
    parser.add_argument("--packets", type=int, default=9,
                        help="natives originated at the source (default: 9)")
    parser.add_argument("--small-threshold", type=int, default=100,
                        help="small/large boundary in bytes (default: 100)")
    parser.add_argument("--topology-file", type=str, default=None,
                        help="edge-list topology file (overrides --nodes)")
    parser.add_argument("--out", type=str, default="out",
                        help="output directory (default: out)")
    parser.add_argument("--emit-log", action="store_true",
                        help="write per-run event logs")
    parser.add_argument("--no-plots", dest="plots", action="store_false",
                        help="skip figure rendering")
    args = parser.parse_args(argv)

    if "," in args.seeds:
        seeds = _int_list(args.seeds)
    else:
        seeds = list(range(int(args.seeds)))
    if not seeds:
        parser.error("--seeds must name at least one seed")
    if args.timeout < 1:
        parser.error("--timeout must be positive")
    if args.packets < 1:
        parser.error("--packets must be positive")

    return Config(nodes=args.nodes, area=args.area,
                  radio_range=args.radio_range, seeds=seeds,
                  source=args.source, protocols=args.protocol,
                  coding=args.coding, load=LoadScenario(args.load),
                  dt_mode=DtMode(args.dt_mode), prob_gate=args.prob_gate,
                  dt_gate=args.dt_gate, guess_threshold=args.guess,
                  timeout_ticks=args.timeout, packets=args.packets,
                  small_threshold=args.small_threshold,
                  topology_file=args.topology_file, out=args.out,
                  emit_log=args.emit_log, plots=args.plots)


def _pick_source(cfg: Config, n: int, seed: int) -> int:
    if cfg.source == "random":
        return random.Random(f"{seed}:source").randrange(n)
    source = int(cfg.source)
    if not 0 <= source < n:
        raise ValueError(f"source {source} out of range for {n} nodes")
    return source


def build_scenario(cfg: Config, topology: Topology, protocol: PruningProtocol,
                   coding_on: bool, seed: int) -> Scenario:
    source = _pick_source(cfg, topology.node_count, seed)
    timeout = (cfg.timeout_ticks if cfg.dt_mode is DtMode.WITH
               else DEFAULT_TICK_CAP)
    workload = build_workload(cfg.packets, cfg.load, source, cfg.dt_mode,
                              seed, cfg.small_threshold)
    return Scenario(topology=topology, protocol=protocol,
                    coding_enabled=coding_on, source=source,
                    workload=workload, prob_gate=cfg.prob_gate,
                    dt_gate=cfg.dt_gate, guess_threshold=cfg.guess_threshold,
                    timeout_ticks=timeout, possession_seed=seed,
                    load=cfg.load, small_threshold=cfg.small_threshold)


def run_batch(cfg: Config) -> int:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    file_topology = None
    if cfg.topology_file:
        try:
            file_topology = load_topology(
                Path(cfg.topology_file).read_text(encoding="utf-8"))
        except (OSError, TopologyError) as exc:
            print(f"error: cannot load topology: {exc}", file=sys.stderr)
            return 2
        node_counts = [file_topology.node_count]
    else:
        node_counts = cfg.nodes

    coding_settings = {"on": [True], "off": [False],
                       "both": [False, True]}[cfg.coding]
    rows: list[dict] = []
    all_ok = True
    try:
        for n in node_counts:
            for seed in cfg.seeds:
                topology = file_topology or generate_connected_topology(
                    n, cfg.area, cfg.radio_range, seed)
                for protocol in cfg.protocols:
                    for coding_on in coding_settings:
                        sc = build_scenario(cfg, topology, protocol,
                                            coding_on, seed)
                        log, rm = run_broadcast(sc)
                        if not (rm.quiescent and rm.delivery_complete):
                            all_ok = False
                        rows.append({
                            "protocol": protocol.value, "nodes": n,
                            "seed": seed,
                            "coding": "on" if coding_on else "off",
                            "load": cfg.load.value,
                            "dt_mode": cfg.dt_mode.value,
                            "sends": rm.total_sends,
                            "forwarders": rm.forwarder_count,
                            "gain_big": rm.gain_big,
                            "gain_small": rm.gain_small,
                            "gain_overall": rm.gain_overall,
                            "delivered": rm.delivery_complete,
                            "total_sends": rm.total_sends,
                            "forwarder_count": rm.forwarder_count,
                        })
                        if cfg.emit_log:
                            name = (f"log_{protocol.value}_n{n}_s{seed}_"
                                    f"{'on' if coding_on else 'off'}.log")
                            (out_dir / name).write_text(
                                format_event_log(log), encoding="utf-8")
    except (TopologyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        _write_reports(cfg, rows, out_dir)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 2
    return 0 if all_ok else 1


def _write_reports(cfg: Config, rows: list[dict], out_dir: Path) -> None:
    with open(out_dir / "runs.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUN_CSV_HEADER)
        for row in rows:
            writer.writerow([_csv_cell(row[c]) for c in RUN_CSV_HEADER])

    summary = metrics.aggregate(rows, ("protocol", "nodes", "coding"))
    summary_cols = ["protocol", "nodes", "coding", "runs",
                    "mean_total_sends", "mean_forwarder_count",
                    "mean_gain_big", "mean_gain_small", "mean_gain_overall",
                    "min_gain_overall", "max_gain_overall", "all_delivered"]
    with open(out_dir / "summary.csv", "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(summary_cols)
        for row in summary:
            writer.writerow([_csv_cell(row[c]) for c in summary_cols])
    (out_dir / "summary.txt").write_text(
        metrics.render_table(summary, summary_cols), encoding="utf-8")

    if cfg.plots:
        from . import report
        report.render_figures(summary, out_dir)


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def main(argv=None) -> int:
    return run_batch(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
