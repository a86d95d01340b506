"""Command-line front end: ``route``, ``bench`` and ``sweep``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .circuit import LatencyModel
from .mapping import Mapping, identity_mapping
from .qasm import QasmError, SourceCircuit, emit_qasm, parse_qasm
from .scheduler import STRATEGIES, TransformedCircuit, run_scheduler
from .search import SearchAborted, SearchParams
from .topology import CouplingGraph, TopologyError, load_topology
from .verify import check_compliance, check_equivalence, unitary_oracle_equivalence, ORACLE_MAX_QUBITS

log = logging.getLogger("slackq")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_ABORT, EXIT_VERIFY = 0, 1, 2, 3, 4
METRICS_SCHEMA = 1
CATEGORIES = (("mini", 200), ("small", 1_000), ("medium", 10_000), ("large", math.inf))


class UsageError(Exception):
    pass


def category(gate_count: int) -> str:
    for name, limit in CATEGORIES:
        if gate_count < limit:
            return name
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class RunConfig:
    topology: str = "tokyo"
    strategy: str = "slackq"
    lm: LatencyModel = LatencyModel()
    params: SearchParams = SearchParams()
    initial_mapping: str = "identity"
    decompose_swaps: bool = False
    verify: bool = False
    oracle: bool = False


def _strategy(name: str) -> str:
    name = name.replace("-", "_")
    if name not in STRATEGIES:
        raise UsageError(f"unknown strategy {name!r}")
    return name


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise UsageError("range must not be empty")
    return vals


def config_from_args(args) -> RunConfig:
    if args.unit_model:
        lm = LatencyModel.unit()
    else:
        lm = LatencyModel(args.latency_1q, args.latency_cx)
    cap = os.environ.get("SLACKQ_HARD_CAP")
    try:
        params = SearchParams(args.m, args.k, args.expand, args.deeper,
                              int(cap) if cap else SearchParams.max_expansions_hard_cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(args.topology, _strategy(args.strategy), lm, params, args.initial_mapping,
                     args.decompose_swaps, args.verify, args.oracle)


def _load_mapping(spec: str, circuit: SourceCircuit, g: CouplingGraph) -> Mapping:
    if spec == "identity":
        return identity_mapping(g.num_physical)
    try:
        l2p = json.loads(Path(spec).read_text(encoding="utf-8"))
        return Mapping.from_log_to_phys([int(p) for p in l2p][:max(circuit.num_qubits, 1)], g.num_physical)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad initial mapping {spec}: {exc}") from None


@dataclass
class RouteResult:
    circuit: SourceCircuit
    routed: TransformedCircuit
    pi0: Mapping
    wall_ms: float
    compliance: bool | None = None
    equivalence: bool | None = None
    oracle: bool | None = None


def route_circuit(circuit: SourceCircuit, g: CouplingGraph, cfg: RunConfig) -> RouteResult:
    pi0 = _load_mapping(cfg.initial_mapping, circuit, g)
    t0 = time.perf_counter()
    routed = run_scheduler(circuit, g, pi0, cfg.lm, cfg.strategy, cfg.params)
    wall = (time.perf_counter() - t0) * 1000
    routed.metrics = replace(routed.metrics, wall_time_ms=wall)
    res = RouteResult(circuit, routed, pi0, wall)
    if cfg.verify:
        bad = check_compliance(routed, g)
        for v in bad:
            log.error("compliance: %s", v)
        res.compliance = not bad
        eq = check_equivalence(circuit, routed, routed.initial_mapping)
        for p in eq.problems:
            log.error("equivalence: %s", p)
        res.equivalence = eq.ok
    if cfg.oracle:
        if circuit.num_qubits > ORACLE_MAX_QUBITS:
            log.warning("skipping unitary oracle: %d qubits > %d", circuit.num_qubits, ORACLE_MAX_QUBITS)
        else:
            try:
                rep = unitary_oracle_equivalence(circuit, routed, routed.initial_mapping)
            except ValueError as exc:
                log.warning("skipping unitary oracle: %s", exc)
            else:
                for p in rep.problems:
                    log.error("oracle: %s", p)
                res.oracle = rep.ok
    return res


def metrics_document(res: RouteResult, cfg: RunConfig, input_name: str) -> dict:
    m = res.routed.metrics
    p = cfg.params
    n = res.circuit.num_qubits
    verified = {"compliance": res.compliance, "equivalence": res.equivalence}
    if cfg.oracle:
        verified["unitary"] = res.oracle
    return {
        "schema": METRICS_SCHEMA,
        "input": input_name,
        "topology": cfg.topology,
        "strategy": cfg.strategy,
        "params": {"m": p.m_extra_expansions, "k": p.k_gate_ratio, "expand": p.expand_per_step,
                   "deeper": p.deeper_levels},
        "latency": {"single": cfg.lm.single_qubit_cycles, "cnot": cfg.lm.cnot_cycles,
                    "swap": _swap_cycles(cfg)},
        "circuit_time": m.circuit_time,
        "original_circuit_time": m.original_circuit_time,
        "overhead_ratio": round(m.overhead_ratio, 6),
        "gates": {"total": m.gate_count_total, "cx": m.cx_count, "swaps": m.swaps_inserted},
        "final_mapping": list(res.routed.final_mapping.log_to_phys[:n]),
        "verified": verified,
        "wall_time_ms": round(res.wall_ms, 3),
    }


def _swap_cycles(cfg: RunConfig) -> int:
    from .topology import device_latency
    return device_latency(load_topology(cfg.topology), cfg.lm).swap


def _read_circuit(path: Path) -> SourceCircuit:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return parse_qasm(text)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_route(args) -> int:
    cfg = config_from_args(args)
    g = load_topology(cfg.topology)
    circuit = _read_circuit(Path(args.input))
    res = route_circuit(circuit, g, cfg)
    phys = res.routed.to_source_circuit(g)
    qasm = emit_qasm(phys, cfg.decompose_swaps, directed=not g.bidirectional)
    if args.out:
        _write(args.out, qasm)
    doc = metrics_document(res, cfg, Path(args.input).name)
    if args.metrics:
        _write(args.metrics, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if not args.out and not args.metrics:
        sys.stdout.write(qasm)
    m = res.routed.metrics
    log.info("%s: time %d (original %d), %d swaps", args.input, m.circuit_time,
             m.original_circuit_time, m.swaps_inserted)
    if False in (res.compliance, res.equivalence, res.oracle):
        return EXIT_VERIFY
    return EXIT_OK


def _corpus(path: Path) -> list[Path]:
    if path.is_file():
        return [path]
    if not path.is_dir():
        raise UsageError(f"{path} is neither a file nor a directory")
    return sorted(path.glob("*.qasm"), key=lambda p: p.name)


def _geomean(vals: list[float]) -> float | None:
    vals = [v for v in vals if v > 0]
    if not vals:
        return None
    return math.exp(sum(math.log(v) for v in vals) / len(vals))


def bench_rows(files: list[Path], g: CouplingGraph, cfg: RunConfig, strategies: list[str],
               wall: bool = True) -> tuple[list[str], list[dict]]:
    header = ["file", "category", "gates", "qubits"]
    for s in strategies:
        header += [f"{s}_time", f"{s}_swaps"] + ([f"{s}_wall_ms"] if wall else [])
    header += ["ratio_min_swap_over_slackq", "error"]
    rows = []
    for path in files:
        row = {"file": path.name}
        try:
            circuit = _read_circuit(path)
            row.update(category=category(circuit.operation_count), gates=circuit.operation_count,
                       qubits=circuit.num_qubits)
            for s in strategies:
                res = route_circuit(circuit, g, replace(cfg, strategy=s))
                row[f"{s}_time"] = res.routed.metrics.circuit_time
                row[f"{s}_swaps"] = res.routed.metrics.swaps_inserted
                if wall:
                    row[f"{s}_wall_ms"] = f"{res.wall_ms:.1f}"
            if "slackq_time" in row and "min_swap_time" in row and row["slackq_time"]:
                row["ratio_min_swap_over_slackq"] = f"{row['min_swap_time'] / row['slackq_time']:.6f}"
        except (QasmError, UsageError, SearchAborted, ValueError) as exc:
            log.error("%s: %s", path.name, exc)
            row["error"] = str(exc).replace("\n", " ")
        rows.append(row)
    for cat, _ in CATEGORIES:
        ratios = [float(r["ratio_min_swap_over_slackq"]) for r in rows
                  if r.get("category") == cat and r.get("ratio_min_swap_over_slackq")]
        gm = _geomean(ratios)
        rows.append({"file": f"summary:{cat}", "category": cat, "gates": len(ratios),
                     "ratio_min_swap_over_slackq": "" if gm is None else f"{gm:.6f}"})
    return header, rows


def _write_csv(path: str | None, header: list[str], rows: list[dict]) -> None:
    fh = open(path, "w", encoding="utf-8", newline="") if path else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r.get(k, "") for k in header})
    finally:
        if path:
            fh.close()


def cmd_bench(args) -> int:
    cfg = config_from_args(args)
    g = load_topology(cfg.topology)
    strategies = [_strategy(s) for s in args.strategies.split(",")]
    files = _corpus(Path(args.input))
    header, rows = bench_rows(files, g, cfg, strategies, wall=not args.no_wall_time)
    _write_csv(args.csv, header, rows)
    return EXIT_OK


def sweep_rows(files: list[Path], g: CouplingGraph, cfg: RunConfig, expand: list[int],
               deeper: list[int]) -> tuple[list[str], list[dict]]:
    grid = [(e, d) for e in expand for d in deeper]
    header = ["file"] + [f"e{e}_d{d}" for e, d in grid] + ["best", "error"]
    rows = []
    for path in files:
        row = {"file": path.name}
        try:
            circuit = _read_circuit(path)
            times = []
            for e, d in grid:
                c = replace(cfg, params=replace(cfg.params, expand_per_step=e, deeper_levels=d))
                t = route_circuit(circuit, g, c).routed.metrics.circuit_time
                row[f"e{e}_d{d}"] = t
                times.append(t)
            row["best"] = min(times)
        except (QasmError, UsageError, SearchAborted, ValueError) as exc:
            log.error("%s: %s", path.name, exc)
            row["error"] = str(exc).replace("\n", " ")
        rows.append(row)
    return header, rows


def cmd_sweep(args) -> int:
    cfg = config_from_args(args)
    g = load_topology(cfg.topology)
    files = _corpus(Path(args.input))
    header, rows = sweep_rows(files, g, cfg, _int_list(args.expand_range), _int_list(args.deeper_range))
    _write_csv(args.csv, header, rows)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--topology", default="tokyo",
                        help="tokyo, line:<n>, grid:<r>x<c>, fig1, fig8, figflex or a JSON file")
    common.add_argument("--strategy", default="slackq", help="slackq | min-swap | layered")
    common.add_argument("--m", type=int, default=20, help="extra expansions after the first goal")
    common.add_argument("--k", type=float, default=2.0, help="max swap-count ratio to the minimum")
    common.add_argument("--expand", type=int, default=1, help="nodes expanded per search step")
    common.add_argument("--deeper", type=int, default=0, help="extra search levels past the first goal")
    common.add_argument("--latency-1q", type=int, default=1)
    common.add_argument("--latency-cx", type=int, default=2)
    common.add_argument("--unit-model", action="store_true", help="every gate 1 cycle, swap 3")
    common.add_argument("--initial-mapping", default="identity", help="'identity' or JSON list file")
    common.add_argument("--decompose-swaps", action="store_true")
    common.add_argument("--verify", action="store_true", help="check compliance and equivalence")
    common.add_argument("--oracle", action="store_true", help="also compare unitaries (small circuits)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="slackq", description="Slack-aware qubit routing")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("route", parents=[common], help="route one OpenQASM file")
    r.add_argument("input")
    r.add_argument("--out", help="write routed QASM here (default: stdout)")
    r.add_argument("--metrics", help="write metrics JSON here")
    r.set_defaults(func=cmd_route)

    b = sub.add_parser("bench", parents=[common], help="compare strategies over a directory")
    b.add_argument("input")
    b.add_argument("--csv")
    b.add_argument("--strategies", default="slackq,min_swap,layered")
    b.add_argument("--no-wall-time", action="store_true", help="omit timing columns")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("sweep", parents=[common], help="grid over expand/deeper")
    s.add_argument("input")
    s.add_argument("--csv")
    s.add_argument("--expand-range", default="1,2,4")
    s.add_argument("--deeper-range", default="0,1,2")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"slackq: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TopologyError as exc:
        print(f"slackq: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QasmError as exc:
        print(f"slackq: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SearchAborted as exc:
        print(f"slackq: routing aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
