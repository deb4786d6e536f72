"""Command line entry point: ``kout generate | sample | analyze | experiment <name>``.

Exit codes: 0 on success, 2 on a configuration error, 3 on an I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, KoutError
from .graph import Graph, min_degree, write_edge_list
from .harness.experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    build_host,
    records_csv,
    records_jsonl,
    run_experiment,
    summary_json,
)
from .sampler import ColorSpec, KOutSample, Mode, sample, sample_colored, underlying_graph
from .structure import connected_components, isolated_vertices, vertex_connectivity

EXIT_CONFIG = 2
EXIT_IO = 3


def _host_spec(args: argparse.Namespace, base: dict | None = None) -> dict:
    spec = dict(base or {})
    if args.host is not None:
        if Path(args.host).is_file() or "/" in args.host or "." in args.host:
            spec = {"path": args.host}
        else:
            spec = {"name": args.host}
    for key in ("n", "m"):
        val = getattr(args, key, None)
        if val is not None:
            spec[key] = val
    if getattr(args, "host_eps", None) is not None:
        spec["eps"] = args.host_eps
    if getattr(args, "p", None) is not None:
        spec["p"] = args.p
    if getattr(args, "removal_p", None) is not None:
        spec["removal_p"] = args.removal_p
    if not spec:
        raise ConfigError("host", "give --host (generator name or edge-list file)")
    if spec.get("name") == "sdg" and "eps" not in spec and getattr(args, "eps", None) is not None:
        spec["eps"] = args.eps
    return spec


def _load_host(args: argparse.Namespace) -> Graph:
    return build_host(_host_spec(args), np.random.default_rng(args.seed))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args: argparse.Namespace) -> int:
    _emit(write_edge_list(_load_host(args)), args.out)
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    g = _load_host(args)
    rng = np.random.default_rng(args.seed)
    mode = Mode.parse(args.mode)
    if args.colors == "four":
        s = sample_colored(g, ColorSpec.four(args.k), mode, rng)
    else:
        s = sample(g, args.k, mode, rng)
    _emit(json.dumps(s.to_json()) + "\n", args.out)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    g = _load_host(args)
    target = g
    report: dict = {}
    if args.sample:
        s = KOutSample.from_json(g, json.loads(Path(args.sample).read_text()))
        target = underlying_graph(s)
        report["sample"] = {"mode": s.mode.value, "colors": [list(e) for e in s.spec.entries]}
    comps = connected_components(target)
    report.update(
        n=target.n,
        edges=target.m,
        min_degree=min_degree(target) if target.n else 0,
        components=comps.count,
        largest_component=max(comps.sizes, default=0),
        isolated=len(isolated_vertices(target)),
    )
    if target.n <= args.connectivity_limit:
        report["vertex_connectivity"] = vertex_connectivity(target)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    data: dict = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
        if not isinstance(data, dict):
            raise ConfigError("config", "expected a JSON object")
    data["experiment"] = args.name
    if args.host is not None or any(
        getattr(args, key) is not None for key in ("n", "m", "host_eps", "p", "removal_p")
    ):
        data["host"] = _host_spec(args, data.get("host"))
    for flag, key in (("k", "k"), ("eps", "eps"), ("mode", "mode"), ("trials", "trials"), ("seed", "root_seed")):
        val = getattr(args, flag)
        if val is not None:
            data[key] = val
    params = dict(data.get("params", {}))
    for item in args.param or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError("param", f"expected key=value, got {item!r}")
        params[key] = json.loads(raw) if raw else None
    if params:
        data["params"] = params
    cfg = ExperimentConfig.from_dict(data)
    cfg.output = args.out
    summary, records = run_experiment(cfg)
    if args.out:
        sys.stdout.write(summary_json(summary))
    else:
        fmt = args.format or "json"
        text = {"json": summary_json(summary), "jsonl": records_jsonl(records), "csv": records_csv(records)}[fmt]
        sys.stdout.write(text)
    return 0


def _host_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--host", help="generator name or edge-list file")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int, help="minimum degree for the min_degree generator")
    p.add_argument("--host-eps", type=float, dest="host_eps", help="eps of the sdg generator")
    p.add_argument("--p", type=float, help="edge probability for gnp/connected")
    p.add_argument("--removal-p", type=float, dest="removal_p")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kout", description="random k-out subgraph laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a host graph as an edge list")
    _host_flags(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", help="sample G(k-out) on a host and write it as JSON")
    _host_flags(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", default="with", choices=[m.value for m in Mode])
    p.add_argument("--colors", default="single", choices=["single", "four"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("analyze", help="structural report for a host or a saved sample")
    _host_flags(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--sample", help="sample JSON written by 'kout sample'")
    p.add_argument("--connectivity-limit", type=int, default=2000, dest="connectivity_limit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("experiment", help="run a seeded Monte Carlo experiment")
    p.add_argument("name", choices=EXPERIMENTS)
    _host_flags(p)
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--param", action="append", help="experiment knob as key=json-value")
    p.add_argument("--out", help="output stem; writes .jsonl, .csv and .summary.json")
    p.add_argument("--format", choices=["csv", "json", "jsonl"])
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (KoutError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
