"""Seeded Monte Carlo experiments over the k-out model.

Every trial gets its own generator derived from ``(root_seed, trial)``; a
random host is drawn from that generator first, so two configurations that
differ only in ``k`` see the same host in trial ``i`` (paired seeds).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from ..dfs import long_path_trial
from ..epochs import long_cycle
from ..errors import ConfigError, KoutError, RetriesExhausted
from ..graph import (
    Graph,
    complete_graph,
    cycle_graph,
    gnp_graph,
    path_graph,
    petersen_graph,
    random_connected_graph,
    random_min_degree_host,
    random_sdg,
    read_edge_list,
    star_graph,
    two_cliques_plus_matching,
)
from ..posa import hamiltonicity_search, validate_cycle
from ..sampler import Mode, sample, underlying_graph
from ..structure import common_neighbor_cover, expansion_check, is_k_connected, isolated_vertices
from .seeding import trial_rng, trial_seed
from .stats import wilson_interval

# removal probability for sdg hosts when the config does not give one; a pair
# threshold of 5 with cover probability 0.15 is reliably met at n=200 up to here
SDG_REMOVAL_P = 0.3

EXPERIMENTS = ("connectivity", "hamiltonicity", "longpath", "longcycle", "counterexample", "expansion")


# -- hosts -------------------------------------------------------------------


def _need(spec: dict, key: str) -> Any:
    if key not in spec:
        raise ConfigError(f"host.{key}", "missing")
    return spec[key]


HOSTS: dict[str, Callable[[dict, np.random.Generator], Graph]] = {
    "complete": lambda s, r: complete_graph(int(_need(s, "n"))),
    "path": lambda s, r: path_graph(int(_need(s, "n"))),
    "cycle": lambda s, r: cycle_graph(int(_need(s, "n"))),
    "star": lambda s, r: star_graph(int(_need(s, "n")) - 1),
    "petersen": lambda s, r: petersen_graph(),
    "two_cliques": lambda s, r: two_cliques_plus_matching(int(_need(s, "n"))),
    "sdg": lambda s, r: random_sdg(
        int(_need(s, "n")), float(_need(s, "eps")), float(s.get("removal_p", SDG_REMOVAL_P)), r
    ),
    "min_degree": lambda s, r: random_min_degree_host(int(_need(s, "n")), int(_need(s, "m")), r),
    "gnp": lambda s, r: gnp_graph(int(_need(s, "n")), float(_need(s, "p")), r),
    "connected": lambda s, r: random_connected_graph(int(_need(s, "n")), float(_need(s, "p")), r),
}


def build_host(spec: dict, rng: np.random.Generator) -> Graph:
    """``spec`` is ``{"name": <generator>, ...parameters}`` or ``{"path": <edge-list file>}``."""
    if "path" in spec:
        return read_edge_list(Path(spec["path"]).read_text())
    name = spec.get("name")
    if name not in HOSTS:
        raise ConfigError("host.name", f"unknown generator {name!r}; choose from {sorted(HOSTS)}")
    try:
        return HOSTS[name](spec, rng)
    except KoutError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("host", str(exc)) from exc


# -- config ------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    experiment: str
    host: dict
    k: int = 2
    eps: float = 0.1
    mode: str = "without"
    trials: int = 100
    root_seed: int = 0
    output: str | None = None
    # experiment-specific knobs (budget, m, alpha, factor, cover_p, cover_threshold, ...)
    params: dict = field(default_factory=dict)

    def validate(self) -> ExperimentConfig:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}")
        if not isinstance(self.host, dict) or not self.host:
            raise ConfigError("host", "expected a generator spec or an edge-list path")
        if int(self.trials) < 1:
            raise ConfigError("trials", "must be at least 1")
        if int(self.k) < 1:
            raise ConfigError("k", "must be at least 1")
        if not 0 < float(self.eps) < 1:
            raise ConfigError("eps", "must lie in (0, 1)")
        if not 0 <= int(self.root_seed) < 2**64:
            raise ConfigError("root_seed", "must be a 64-bit unsigned integer")
        try:
            Mode.parse(self.mode)
        except ValueError as exc:
            raise ConfigError("mode", str(exc)) from exc
        return self

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(sorted(extra)[0], "unknown config field")
        if "experiment" not in data:
            raise ConfigError("experiment", "missing")
        if "host" not in data:
            raise ConfigError("host", "missing")
        return cls(**data).validate()

    def to_dict(self) -> dict:
        return asdict(self)


# -- trials ------------------------------------------------------------------
# each returns (metrics, success); success must follow from the metrics alone


def _connectivity(cfg: ExperimentConfig, g: Graph, rng: np.random.Generator) -> tuple[dict, bool]:
    k = cfg.k
    gk = underlying_graph(sample(g, k, cfg.mode, rng))
    ok = is_k_connected(gk, k)
    metrics = {"k_connected": int(ok), "isolated": len(isolated_vertices(gk))}
    p = cfg.params.get("cover_p", 0.15)
    if p is not None:
        try:
            L = common_neighbor_cover(
                g, int(cfg.params.get("cover_threshold", 5)), float(p),
                int(cfg.params.get("cover_retries", 10)), rng,
            )
        except RetriesExhausted:
            metrics.update(cover_found=0, cover_size=-1, isolated_outside_cover=-1)
        else:
            rest = gk.induced_subgraph(v for v in range(g.n) if v not in L)
            metrics.update(
                cover_found=1,
                cover_size=len(L),
                isolated_outside_cover=len(isolated_vertices(rest) - L),
            )
    return metrics, ok


def _hamiltonicity(cfg: ExperimentConfig, g: Graph, rng: np.random.Generator) -> tuple[dict, bool]:
    gk = underlying_graph(sample(g, cfg.k, cfg.mode, rng))
    budget = int(cfg.params.get("budget", 100_000))
    cyc = hamiltonicity_search(gk, budget, rng)
    found = cyc is not None and validate_cycle(gk, cyc, spanning=True)
    return {"found": int(found), "cycle_vertices": len(cyc) if cyc else 0}, found


def _longpath(cfg: ExperimentConfig, g: Graph, rng: np.random.Generator) -> tuple[dict, bool]:
    m = cfg.params.get("m")
    res = long_path_trial(g, cfg.k, cfg.eps, rng, m=None if m is None else int(m))
    metrics = res.to_metrics()
    metrics["success"] = int(metrics["achieved"] >= metrics["target"] - 1e-9)
    return metrics, bool(metrics["success"])


def _longcycle(cfg: ExperimentConfig, g: Graph, rng: np.random.Generator) -> tuple[dict, bool]:
    m = cfg.params.get("m")
    res = long_cycle(g, cfg.k, cfg.eps, rng, m=None if m is None else int(m))
    returned = res.cycle is not None
    valid = returned and validate_cycle(g, res.cycle) and all(
        (min(a, b), max(a, b)) in res.revealed
        for a, b in zip(res.cycle, res.cycle[1:] + res.cycle[:1])
    )
    success = valid and res.length >= res.target - 1e-9
    metrics = {
        "length": res.length,
        "target": res.target,
        "returned": int(returned),
        "validated": int(valid),
        "r_bound_ok": int(res.r_bound_ok),
        "interrupted": int(res.interrupt is not None),
        "epochs": len(res.epochs),
        "from_b": int(res.provenance.value == "from_b"),
        "from_c": int(res.provenance.value == "from_c"),
        "success": int(success),
    }
    return metrics, success


def _matching_partner(g: Graph) -> np.ndarray:
    half = g.n // 2
    return np.concatenate([np.arange(half, g.n), np.arange(half)])


def _counterexample(cfg: ExperimentConfig, g: Graph, rng: np.random.Generator) -> tuple[dict, bool]:
    s = sample(g, cfg.k, Mode.WITHOUT_REPLACEMENT, rng)
    partner = _matching_partner(g)
    chose = [v for v in range(g.n) if partner[v] in s.out_choices(v)]
    hits = len(chose)
    present = len({frozenset((v, int(partner[v]))) for v in chose})
    return {"matching_choices": hits, "matching_edges": present}, present == 0


def _expansion(cfg: ExperimentConfig, g: Graph, rng: np.random.Generator) -> tuple[dict, bool]:
    s = sample(g, cfg.k, cfg.mode, rng)
    alpha = float(cfg.params.get("alpha", 3 / g.n))
    factor = float(cfg.params.get("factor", 2.0))
    mode = cfg.params.get("check", "exhaustive")
    rep = expansion_check(s, alpha, factor, mode, rng, int(cfg.params.get("check_trials", 1000)))
    witness_ok = 1
    if rep.witness is not None:
        out = set()
        for v in rep.witness:
            out.update(s.out_choices(v))
        witness_ok = int(len(out - set(rep.witness)) < factor * len(rep.witness))
    metrics = {
        "checked": rep.checked,
        "violations": rep.violations,
        "violated": int(rep.violations > 0),
        "witness_valid": witness_ok,
    }
    return metrics, rep.violations == 0


TRIALS: dict[str, Callable[[ExperimentConfig, Graph, np.random.Generator], tuple[dict, bool]]] = {
    "connectivity": _connectivity,
    "hamiltonicity": _hamiltonicity,
    "longpath": _longpath,
    "longcycle": _longcycle,
    "counterexample": _counterexample,
    "expansion": _expansion,
}


@dataclass
class TrialRecord:
    trial: int
    seed: int
    metrics: dict
    success: bool

    def to_json(self) -> dict:
        return {"trial": self.trial, "seed": self.seed, "success": int(self.success), "metrics": self.metrics}


@dataclass
class SummaryStats:
    experiment: str
    trials: int
    successes: int
    frequency: float
    interval: tuple[float, float]
    means: dict

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "trials": self.trials,
            "successes": self.successes,
            "frequency": self.frequency,
            "wilson95": list(self.interval),
            "means": self.means,
        }


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    rng = trial_rng(cfg.root_seed, trial)
    g = build_host(cfg.host, rng)
    try:
        metrics, ok = TRIALS[cfg.experiment](cfg, g, rng)
    except (ValueError, KoutError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("params", f"trial {trial}: {exc}") from exc
    return TrialRecord(trial, trial_seed(cfg.root_seed, trial), metrics, bool(ok))


def _run_one(args: tuple[ExperimentConfig, int]) -> TrialRecord:
    return run_trial(*args)


def worker_count() -> int:
    raw = os.environ.get("KOUT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError("KOUT_THREADS", f"not an integer: {raw!r}") from None


def summarize(experiment: str, records: list[TrialRecord]) -> SummaryStats:
    n = len(records)
    succ = sum(r.success for r in records)
    keys = sorted({key for r in records for key in r.metrics})
    means = {key: float(np.mean([r.metrics[key] for r in records if key in r.metrics])) for key in keys}
    return SummaryStats(experiment, n, succ, succ / n, wilson_interval(succ, n), means)


def run_experiment(cfg: ExperimentConfig) -> tuple[SummaryStats, list[TrialRecord]]:
    cfg.validate()
    jobs = [(cfg, i) for i in range(cfg.trials)]
    workers = worker_count()
    if workers == 1:
        records = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    records.sort(key=lambda r: r.trial)
    summary = summarize(cfg.experiment, records)
    if cfg.output:
        write_outputs(cfg.output, summary, records)
    return summary, records


# -- serialization -----------------------------------------------------------


def records_jsonl(records: list[TrialRecord]) -> str:
    return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in records)


def records_csv(records: list[TrialRecord]) -> str:
    keys = sorted({key for r in records for key in r.metrics} | {"success"})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trial", "seed"] + keys)
    for r in records:
        row = dict(r.metrics)
        row["success"] = int(r.success)
        w.writerow([r.trial, r.seed] + [row.get(key, "") for key in keys])
    return buf.getvalue()


def summary_json(summary: SummaryStats) -> str:
    return json.dumps(summary.to_json(), indent=2, sort_keys=True) + "\n"


def write_outputs(stem: str, summary: SummaryStats, records: list[TrialRecord]) -> list[Path]:
    """Write ``<stem>.jsonl``, ``<stem>.csv`` and ``<stem>.summary.json``."""
    base = Path(stem)
    if base.suffix in (".jsonl", ".csv", ".json"):
        base = base.with_suffix("")
    paths = [
        base.with_name(base.name + ".jsonl"),
        base.with_name(base.name + ".csv"),
        base.with_name(base.name + ".summary.json"),
    ]
    base.parent.mkdir(parents=True, exist_ok=True)
    paths[0].write_text(records_jsonl(records))
    paths[1].write_text(records_csv(records))
    paths[2].write_text(summary_json(summary))
    return paths


# -- the two-cliques experiment, vectorized ----------------------------------


def exact_no_matching_probability(n: int, k: int) -> float:
    """Each of the n vertices independently avoids its partner: ``(1 - 2k/n)^n``."""
    return (1 - 2 * k / n) ** n


def stated_lower_bound(n: int, k: int) -> float:
    return (1 - 2 * k / n) ** (n / 2)


def counterexample_experiment(
    n: int, k: int, trials: int, seed: int, chunk: int = 2000
) -> tuple[float, float, float, float]:
    """Fraction of sampled G_k on two cliques plus a matching that contain no matching edge.

    Returns ``(empirical, exact, e^{-2k}, e^{-k})``.  Choices are drawn without
    replacement from each vertex's actual host neighbors, ``chunk`` trials at a time.
    """
    g = two_cliques_plus_matching(n)
    if not 1 <= k <= n // 2:
        raise ConfigError("k", f"need 1 <= k <= n/2, got k={k}")
    partner = _matching_partner(g)
    nbrs = np.array([g.adj[v] for v in range(n)], dtype=np.int64)  # every row has n/2 entries
    deg = nbrs.shape[1]
    partner_col = np.array([list(nbrs[v]).index(partner[v]) for v in range(n)])
    rng = np.random.default_rng(seed)
    clean = 0
    done = 0
    while done < trials:
        t = min(chunk, trials - done)
        keys = rng.random((t, n, deg))
        if k < deg:
            picked = np.argpartition(keys, k - 1, axis=2)[:, :, :k]
        else:
            picked = np.broadcast_to(np.arange(deg), (t, n, deg))
        chose_partner = (picked == partner_col[None, :, None]).any(axis=2)
        clean += int((~chose_partner.any(axis=1)).sum())
        done += t
    return clean / trials, exact_no_matching_probability(n, k), math.exp(-2 * k), math.exp(-k)
