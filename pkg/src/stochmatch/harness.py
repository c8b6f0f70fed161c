"""Graph generators and the Monte Carlo experiment harness."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algorithms import (adaptive_run, check_next_is_half, check_superadditivity,
                         default_rounds, max_degree, nonadaptive_matchings)
from .components import _parse_eps
from .errors import BadAxis, BadSpec, BadEpsilon, CertificateFailure, ConfigError
from .graph import WeightedGraph, build_graph, read_edge_list
from .stochastic import (EXACT_LIMIT, MatchingOracle, derive_seed, mean_se,
                         omniscient_opt_exact, omniscient_opt_mc, realize)

CSV_COLUMNS = ["graph", "mode", "p", "eps", "rounds", "trials", "seed", "opt", "opt_se",
               "achieved", "achieved_se", "ratio", "max_pv_queries", "cert_failures", "secs"]

DEFAULT_TRIALS = 10_000
DEFAULT_WMAX = 100
SWEEP_AXES = ("p", "eps", "rounds", "n")

_SPEC_RE = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


# --- generators --------------------------------------------------------------

def _spec_args(spec: str) -> tuple[str, list[str]]:
    m = _SPEC_RE.match(spec)
    if not m:
        raise BadSpec(f"malformed generator spec {spec!r}")
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2).strip() else []
    return m.group(1), args


def _int_arg(args, i, name, default=None):
    if i < len(args):
        try:
            return int(args[i])
        except ValueError:
            raise BadSpec(f"{name} must be an integer, got {args[i]!r}") from None
    if default is None:
        raise BadSpec(f"missing argument {name}")
    return default


def gen_graph(spec: str, seed: int = 0, p: float = 0.5) -> WeightedGraph:
    """Build a graph from a generator spec.

    Specs: ``star(k, w)``, ``complete(n, wmax)``,
    ``bipartite(a, b, density, wmax)``, ``gnm(n, m, wmax)``.  Random weights
    are uniform integers in ``[1, wmax]`` (default wmax 100); every edge gets
    probability ``p``.
    """
    kind, args = _spec_args(spec)
    rng = np.random.default_rng(derive_seed(seed, "graph"))

    def weights(count, wmax):
        if wmax < 1:
            raise BadSpec("wmax must be at least 1")
        return rng.integers(1, wmax + 1, size=count).tolist()

    if kind == "star":
        if len(args) > 2:
            raise BadSpec("star takes (k, w)")
        k, w = _int_arg(args, 0, "k"), _int_arg(args, 1, "w", 1)
        if k < 0 or w < 0:
            raise BadSpec("star needs k >= 0 and w >= 0")
        return build_graph(k + 1, [(0, i, w, p) for i in range(1, k + 1)])
    if kind == "complete":
        if len(args) > 2:
            raise BadSpec("complete takes (n, wmax)")
        n, wmax = _int_arg(args, 0, "n"), _int_arg(args, 1, "wmax", DEFAULT_WMAX)
        if n < 0:
            raise BadSpec("n must be non-negative")
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        return build_graph(n, [(i, j, w, p) for (i, j), w in zip(pairs, weights(len(pairs), wmax))])
    if kind == "bipartite":
        if len(args) not in (3, 4):
            raise BadSpec("bipartite takes (a, b, density, wmax)")
        a, b = _int_arg(args, 0, "a"), _int_arg(args, 1, "b")
        try:
            density = float(args[2])
        except ValueError:
            raise BadSpec(f"density must be a number, got {args[2]!r}") from None
        wmax = _int_arg(args, 3, "wmax", DEFAULT_WMAX)
        if a < 0 or b < 0 or not 0 <= density <= 1:
            raise BadSpec("bipartite needs a, b >= 0 and density in [0, 1]")
        pairs = [(i, a + j) for i in range(a) for j in range(b)]
        keep = rng.random(len(pairs)) < density
        pairs = [pr for pr, k in zip(pairs, keep) if k]
        return build_graph(a + b, [(i, j, w, p) for (i, j), w in zip(pairs, weights(len(pairs), wmax))])
    if kind == "gnm":
        if len(args) not in (2, 3):
            raise BadSpec("gnm takes (n, m, wmax)")
        n, m = _int_arg(args, 0, "n"), _int_arg(args, 1, "m")
        wmax = _int_arg(args, 2, "wmax", DEFAULT_WMAX)
        total = n * (n - 1) // 2
        if n < 0 or m < 0 or m > total:
            raise BadSpec(f"gnm needs 0 <= m <= C(n, 2) = {total}, got m={m}")
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        chosen = sorted(rng.choice(total, size=m, replace=False).tolist()) if m else []
        ws = weights(m, wmax)
        return build_graph(n, [(*pairs[c], w, p) for c, w in zip(chosen, ws)])
    raise BadSpec(f"unknown generator {kind!r}")


# --- configuration -----------------------------------------------------------

def parse_eps(value) -> Fraction:
    try:
        return _parse_eps(value)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, BadEpsilon):
            raise ConfigError(str(exc)) from None
        raise ConfigError(f"cannot parse eps {value!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    graph: str | None = None  # edge-list path
    gen: str | None = None  # generator spec
    p: float | None = 0.5  # None: keep per-edge probabilities from the file
    eps: Fraction = Fraction(1, 2)
    rounds: int | None = None  # None: default_rounds(eps, p_min)
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    graph_seed: int | None = None  # defaults to seed
    mode: str = "both"
    certificates: bool = True
    out: str | None = None
    timing: bool = False  # write wall-clock seconds (breaks byte-identical output)

    def __post_init__(self):
        if (self.graph is None) == (self.gen is None):
            raise ConfigError("give exactly one of graph (file) or gen (generator spec)")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.p is not None and not 0 < self.p <= 1:
            raise ConfigError("p must lie in (0, 1]")
        if not isinstance(self.eps, Fraction) or not 0 < self.eps < 1:
            raise ConfigError("eps must be a Fraction in (0, 1)")
        if self.rounds is not None and self.rounds < 0:
            raise ConfigError("rounds must be non-negative")
        if self.mode not in ("adaptive", "nonadaptive", "both"):
            raise ConfigError(f"unknown mode {self.mode!r}")

    @property
    def label(self) -> str:
        return self.gen if self.gen is not None else os.path.basename(self.graph)

    def load_graph(self) -> WeightedGraph:
        gseed = self.seed if self.graph_seed is None else self.graph_seed
        if self.gen is not None:
            return gen_graph(self.gen, gseed, 1.0 if self.p is None else self.p)
        try:
            g = read_edge_list(self.graph, 1.0 if self.p is None else self.p)
        except OSError as exc:
            raise ConfigError(f"cannot read graph file {self.graph}: {exc}") from exc
        return g if self.p is None else g.with_probability(self.p)


_BOOL = {"on": True, "off": False, "true": True, "false": False, "1": True, "0": False}


def config_from_mapping(values: dict) -> ExperimentConfig:
    """Build a config from string-valued ``key=value`` settings."""
    kw: dict = {}
    try:
        for key, raw in values.items():
            if raw is None:
                continue
            raw = str(raw).strip()
            if key in ("graph", "gen", "out", "mode"):
                kw[key] = raw
            elif key == "p":
                kw["p"] = None if raw == "per-edge" else float(raw)
            elif key == "eps":
                kw["eps"] = parse_eps(raw)
            elif key == "rounds":
                kw["rounds"] = None if raw == "auto" else int(raw)
            elif key in ("trials", "seed", "graph_seed"):
                kw[key] = int(raw)
            elif key in ("certs", "certificates", "timing"):
                if raw.lower() not in _BOOL:
                    raise ConfigError(f"{key} must be on/off, got {raw!r}")
                kw["certificates" if key == "certs" else key] = _BOOL[raw.lower()]
            else:
                raise ConfigError(f"unknown config key {key!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return ExperimentConfig(**kw)


def read_config_file(path) -> dict:
    """Flat ``key=value`` file; ``#`` starts a comment line."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()
    return values


# --- running -----------------------------------------------------------------

@dataclass
class ModeResult:
    mode: str
    rounds: int
    achieved: float
    achieved_se: float
    max_pv_queries: int
    cert_failures: int
    first_failure: tuple | None = None  # (trial, round)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    opt: float
    opt_se: float
    opt_exact: bool
    modes: list[ModeResult]
    secs: float
    trace: list[dict] = field(default_factory=list)

    def ratio(self, mr: ModeResult) -> float:
        if self.opt == 0:
            return 1.0 if mr.achieved == 0 else math.inf
        return mr.achieved / self.opt

    @property
    def cert_failures(self) -> int:
        return sum(m.cert_failures for m in self.modes)

    def csv_rows(self) -> list[dict]:
        cfg = self.config
        rows = []
        for mr in self.modes:
            rows.append({
                "graph": cfg.label, "mode": mr.mode,
                "p": "per-edge" if cfg.p is None else _fmt(cfg.p),
                "eps": str(cfg.eps), "rounds": mr.rounds, "trials": cfg.trials,
                "seed": cfg.seed, "opt": _fmt(self.opt), "opt_se": _fmt(self.opt_se),
                "achieved": _fmt(mr.achieved), "achieved_se": _fmt(mr.achieved_se),
                "ratio": _fmt(self.ratio(mr)), "max_pv_queries": mr.max_pv_queries,
                "cert_failures": mr.cert_failures,
                "secs": f"{self.secs:.3f}" if cfg.timing else "",
            })
        return rows


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _stats(ws: list[int]) -> tuple[float, float]:
    if len(ws) == 1:
        return float(ws[0]), math.nan
    return mean_se(sum(ws), sum(w * w for w in ws), len(ws))


def _adaptive_chunk(g, eps, rounds, seed, start, stop, certs):
    oracle = MatchingOracle(g)
    weights, trace = [], []
    max_pv = failures = 0
    first = None
    for i in range(start, stop):
        real = realize(g, derive_seed(seed, "trial", i))
        run = adaptive_run(g, real, rounds, eps, certificates=certs, oracle=oracle)
        weights.append(run.final.weight)
        max_pv = max(max_pv, run.ledger.max_per_vertex)
        if certs:
            for rec in run.rounds:
                d = rec.to_dict(trial=i)
                d["mode"] = "adaptive"
                trace.append(d)
                if not rec.certificates.ok:
                    failures += 1
                    first = first or (i, rec.r)
    return weights, max_pv, failures, first, trace


def _workers() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("STOCHMATCH_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def _run_adaptive(g, cfg, rounds):
    workers = _workers()
    chunks = max(1, min(workers * 4, cfg.trials // 50 or 1))
    bounds = np.linspace(0, cfg.trials, chunks + 1).astype(int).tolist()
    jobs = [(g, cfg.eps, rounds, cfg.seed, a, b, cfg.certificates)
            for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_adaptive_chunk, *zip(*jobs)))
    else:
        parts = [_adaptive_chunk(*job) for job in jobs]
    weights = [w for part in parts for w in part[0]]
    failures = sum(part[2] for part in parts)
    first = next((part[3] for part in parts if part[3]), None)
    trace = [d for part in parts for d in part[4]]
    mean, se = _stats(weights)
    return ModeResult("adaptive", rounds, mean, se, max((part[1] for part in parts), default=0),
                      failures, first), trace


def _run_nonadaptive(g, cfg, rounds):
    oracle = MatchingOracle(g)
    h: set[int] = set()
    trace, failures, first = [], 0, None
    for r, m_r in enumerate(nonadaptive_matchings(g, rounds), 1):
        if cfg.certificates:
            rec = {"mode": "nonadaptive", "trial": None, "r": r,
                   "m_r": list(m_r.edge_ids), "m_r_weight": m_r.weight}
            sup = check_superadditivity(g, h, g.all_edges - h)
            rec["superadditivity"] = {"w1": sup.w1, "w2": sup.w2, "w_all": sup.w_all,
                                      "ok": sup.ok}
            if g.m <= EXACT_LIMIT:
                nh = check_next_is_half(g, h)
                rec["next_is_half"] = {"expected_all": nh.expected_all,
                                       "expected_prev": nh.expected_prev,
                                       "next_weight": nh.next_weight,
                                       "premise": nh.premise, "ok": nh.ok}
                if not nh.ok:
                    failures += 1
                    first = first or (None, r)
                # the round's matching is the best one outside H_{r-1}
                assert nh.next_weight == m_r.weight
            trace.append(rec)
        h.update(m_r.edge_ids)
    weights = []
    for i in range(cfg.trials):
        real = realize(g, derive_seed(cfg.seed, "trial", i))
        weights.append(oracle.weight(real.realized & h) if h else 0)
    mean, se = _stats(weights)
    return ModeResult("nonadaptive", rounds, mean, se, max_degree(g, h), failures, first), trace


def execute(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one experiment in memory; never writes files or raises on
    certificate failures (they are counted in the result)."""
    t0 = time.perf_counter()
    g = cfg.load_graph()
    rounds = cfg.rounds if cfg.rounds is not None else default_rounds(cfg.eps, g.p_min)
    if g.m <= EXACT_LIMIT:
        opt, opt_se, exact = omniscient_opt_exact(g), 0.0, True
    else:
        opt, opt_se = omniscient_opt_mc(g, max(2, cfg.trials), cfg.seed)
        exact = False
    modes, trace = [], []
    if cfg.mode in ("adaptive", "both"):
        mr, tr = _run_adaptive(g, cfg, rounds)
        modes.append(mr)
        trace += tr
    if cfg.mode in ("nonadaptive", "both"):
        mr, tr = _run_nonadaptive(g, cfg, rounds)
        modes.append(mr)
        trace += tr
    return ExperimentResult(cfg, opt, opt_se, exact, modes, time.perf_counter() - t0, trace)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Estimate opt, run the configured mode(s) and aggregate.

    opt is exact for graphs with at most 20 edges, otherwise a Monte Carlo
    estimate on a stream independent of the algorithm trials.  Outputs go to
    ``cfg.out`` (CSV) and ``<out>.trace.jsonl`` when certificates are on.
    Raises ``CertificateFailure`` after writing if any certificate failed.
    """
    result = execute(cfg)
    if cfg.out:
        write_csv([result], cfg.out)
        if cfg.certificates:
            write_trace(result.trace, trace_path(cfg.out))
    for mr in result.modes:
        if mr.cert_failures:
            trial, r = mr.first_failure
            raise CertificateFailure(
                f"{mr.cert_failures} {mr.mode} certificate failure(s); first at trial {trial}, round {r}",
                trial=trial, round_index=r)
    return result


def trace_path(out) -> str:
    out = str(out)
    base = out[:-4] if out.endswith(".csv") else out
    return base + ".trace.jsonl"


def write_trace(records: list[dict], path) -> None:
    with open(path, "w") as fh:
        for d in records:
            fh.write(json.dumps(d, sort_keys=True) + "\n")


def read_trace(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def format_csv(results: list[ExperimentResult]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for res in results:
        writer.writerows(res.csv_rows())
    return buf.getvalue()


def write_csv(results: list[ExperimentResult], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(results))


def _with_n(spec: str, n) -> str:
    kind, args = _spec_args(spec)
    if not args:
        raise BadAxis(f"generator {kind!r} has no size argument")
    return f"{kind}({', '.join([str(int(n))] + args[1:])})"


def sweep(cfg: ExperimentConfig, axis: str, values) -> list[ExperimentResult]:
    """One experiment per value of ``axis``; the graph seed stays fixed and
    each point draws its trials from its own derived seed.

    Certificate failures are counted in the rows rather than raised.
    """
    if axis not in SWEEP_AXES:
        raise BadAxis(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    base_graph_seed = cfg.seed if cfg.graph_seed is None else cfg.graph_seed
    results = []
    for k, value in enumerate(values):
        point = replace(cfg, out=None, graph_seed=base_graph_seed,
                        seed=derive_seed(cfg.seed, "sweep", k))
        if axis == "p":
            point = replace(point, p=float(value))
        elif axis == "eps":
            point = replace(point, eps=parse_eps(value))
        elif axis == "rounds":
            point = replace(point, rounds=int(value))
        else:
            if point.gen is None:
                raise BadAxis("axis 'n' needs a generator spec, not a graph file")
            point = replace(point, gen=_with_n(point.gen, value))
        results.append(execute(point))
    if cfg.out:
        write_csv(results, cfg.out)
    return results
