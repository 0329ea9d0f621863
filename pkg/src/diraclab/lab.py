"""Seeded experiments on random hosts.

This module covers the measurement side of the package: sampling binomial
random hypergraphs, grinding a host down to a degree floor edge by edge,
and three batch experiments (threshold resilience, degree inheritance under
subset sampling, neighbourhood load).  Every trial draws its randomness from
a seed derived by hashing ``master_seed`` with the trial index, so reports
are byte-identical regardless of how the trial loop is scheduled.

Reports are written as a small versioned CSV dialect whose first line is
``#diraclab-csv <name> v1``; readers refuse versions they do not know.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from hashlib import sha256
from itertools import combinations
from math import ceil, comb, sqrt
from pathlib import Path
from random import Random
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import FormatError, SizeError, TargetInfeasible
from .hypercore import Hypergraph, induced, min_d_degree
from .matchpower import find_perfect_matching
from .thresholds import conjectured_density, parity_barrier, space_barrier

__all__ = [
    "WILSON_Z",
    "CSV_VERSION",
    "RESILIENCE_COLUMNS",
    "INHERITANCE_COLUMNS",
    "LOAD_COLUMNS",
    "INHERITANCE_BOUND_FORM",
    "EXPERIMENTS",
    "ExperimentConfig",
    "TrialRecord",
    "ExperimentResult",
    "CsvTable",
    "DegradeResult",
    "LoadReport",
    "derived_seed",
    "sample_hk",
    "degrade_to_degree",
    "wilson_interval",
    "resilience_threshold",
    "resilience_experiment",
    "inheritance_experiment",
    "neighborhood_load_check",
    "load_experiment",
    "run_experiment",
    "parse_config",
    "dumps_config",
    "read_config",
    "write_config",
    "dumps_table",
    "parse_table",
    "read_table",
    "write_table",
    "experiment_csv",
    "write_experiment",
    "summary_lines",
]

# 97.5% normal quantile, pinned so Wilson intervals never drift with the
# platform's math library.
WILSON_Z = 1.959963984540054


def _frac(x) -> Fraction:
    """Floats go through their decimal literal, everything else directly."""
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def derived_seed(master_seed: int, index: int) -> int:
    """Per-trial seed: first 8 bytes of sha256("<master>:<index>"), big-endian.

    Deriving seeds this way makes trial i's randomness independent of
    whether trials 0..i-1 ran at all, which is what keeps reports stable
    under any scheduling of the trial loop.
    """
    digest = sha256(f"{master_seed}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def sample_hk(n: int, k: int, p: float, seed: int = 0) -> Hypergraph:
    """Sample the binomial random k-graph: each k-set kept with probability p.

    Candidate k-sets are visited in lexicographic order and every one of them
    consumes exactly one ``random()`` draw, so a fixed seed pins the outcome
    with no short-circuiting at p = 0 or p = 1.
    """
    if not 1 <= k <= n:
        raise SizeError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise SizeError(f"inclusion probability must be in [0, 1], got {p}")
    rng = Random(seed)
    edges = tuple(c for c in combinations(range(n), k) if rng.random() < p)
    return Hypergraph(n, k, edges)


# ---------------------------------------------------------------------------
# degradation schedules


@dataclass(frozen=True)
class DegradeResult:
    graph: Hypergraph
    deleted: tuple[tuple[int, ...], ...]
    min_degree: int


def degrade_to_degree(
    G: Hypergraph,
    d: int,
    target: int,
    policy: str = "random",
    seed: int = 0,
    budget: int | None = None,
) -> DegradeResult:
    """Delete edges one at a time while every d-degree stays >= target.

    An edge is deletable when all of its d-subsets currently have degree at
    least target + 1, so no single deletion can break the floor.  Policy
    "random" removes a uniformly random deletable edge each step; "greedy"
    removes the deletable edge whose loss leaves the smallest d-degree
    anywhere (the adversarial schedule), breaking ties by lexicographic edge
    order.  Stops when nothing is deletable or after ``budget`` deletions.

    Raises TargetInfeasible when the host already sits below the target.
    The returned minimum degree is recomputed from scratch on the survivor.
    """
    if not 1 <= d < G.k:
        raise SizeError(f"need 1 <= d < k, got d={d}, k={G.k}")
    if target < 0:
        raise SizeError(f"degree target must be nonnegative, got {target}")
    if policy not in ("random", "greedy"):
        raise SizeError(f"unknown policy {policy!r}")
    if budget is not None and budget < 0:
        raise SizeError(f"budget must be nonnegative, got {budget}")
    start, _ = min_d_degree(G, d)
    if start < target:
        raise TargetInfeasible(
            f"minimum {d}-degree is {start}, already below target {target}"
        )

    deg: dict[tuple[int, ...], int] = {}
    for e in G.edges:
        for S in combinations(e, d):
            deg[S] = deg.get(S, 0) + 1

    rng = Random(seed)
    remaining = list(G.edges)
    deleted: list[tuple[int, ...]] = []
    while budget is None or len(deleted) < budget:
        deletable = [
            e
            for e in remaining
            if all(deg[S] >= target + 1 for S in combinations(e, d))
        ]
        if not deletable:
            break
        if policy == "random":
            e = deletable[rng.randrange(len(deletable))]
        else:
            e = min(
                deletable,
                key=lambda f: (min(deg[S] for S in combinations(f, d)), f),
            )
        remaining.remove(e)
        deleted.append(e)
        for S in combinations(e, d):
            deg[S] -= 1

    out = Hypergraph(G.n, G.k, tuple(remaining))
    final, _ = min_d_degree(out, d)
    assert final >= target, "degradation broke the degree floor"
    return DegradeResult(out, tuple(deleted), final)


def wilson_interval(
    successes: int, total: int, z: float = WILSON_Z
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if total <= 0:
        raise SizeError("interval needs at least one observation")
    if not 0 <= successes <= total:
        raise SizeError(f"successes {successes} out of range for total {total}")
    phat = successes / total
    denom = 1.0 + z * z / total
    centre = phat + z * z / (2 * total)
    half = z * sqrt(phat * (1.0 - phat) / total + z * z / (4 * total * total))
    return ((centre - half) / denom, (centre + half) / denom)


# ---------------------------------------------------------------------------
# experiment configuration


_POLICIES = ("random", "greedy")
_PHAT_MODES = ("nominal", "empirical")
_HOSTS = ("complete", "space", "parity", "random")


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs for one experiment batch, loadable from a key = value file.

    ``name`` labels the CSV report header.  Unused knobs are harmless: the
    resilience run ignores Q and eta, the inheritance run ignores gamma and
    the policy, and so on.  ``budget`` of 0 means unlimited search nodes.
    """

    name: str
    n: int
    k: int
    d: int = 1
    p: float = 1.0
    gamma: float = 0.0
    eps: float = 0.0
    eta: float = 0.0
    delta: float = 0.0
    sigma: float = 0.0
    Q: int = 0
    rho: float = 0.0
    lam: float = 0.0
    trials: int = 1
    master_seed: int = 0
    out: str = ""
    policy: str = "random"
    phat: str = "nominal"
    host: str = "random"
    timing: bool = False
    budget: int = 0

    def __post_init__(self):
        if not self.name or any(ch.isspace() for ch in self.name):
            raise SizeError("name must be nonempty with no whitespace")
        if self.n < 0 or self.k < 1 or self.d < 0:
            raise SizeError(f"bad dimensions n={self.n}, k={self.k}, d={self.d}")
        for field in ("p", "eps", "eta", "delta", "sigma", "rho", "lam"):
            value = getattr(self, field)
            if not 0.0 <= value <= 1.0:
                raise SizeError(f"{field} must be in [0, 1], got {value}")
        if self.gamma < 0:
            raise SizeError(f"gamma must be nonnegative, got {self.gamma}")
        if self.Q < 0:
            raise SizeError(f"Q must be nonnegative, got {self.Q}")
        if self.trials < 1:
            raise SizeError(f"need at least one trial, got {self.trials}")
        if self.policy not in _POLICIES:
            raise SizeError(f"policy must be one of {_POLICIES}, got {self.policy!r}")
        if self.phat not in _PHAT_MODES:
            raise SizeError(f"phat must be one of {_PHAT_MODES}, got {self.phat!r}")
        if self.host not in _HOSTS:
            raise SizeError(f"host must be one of {_HOSTS}, got {self.host!r}")
        if self.budget < 0:
            raise SizeError(f"budget must be nonnegative, got {self.budget}")

    def search_budget(self) -> int | None:
        return self.budget or None


_CONFIG_TYPES: dict[str, type] = {
    "name": str,
    "n": int,
    "k": int,
    "d": int,
    "p": float,
    "gamma": float,
    "eps": float,
    "eta": float,
    "delta": float,
    "sigma": float,
    "Q": int,
    "rho": float,
    "lam": float,
    "trials": int,
    "master_seed": int,
    "out": str,
    "policy": str,
    "phat": str,
    "host": str,
    "timing": bool,
    "budget": int,
}

_REQUIRED_KEYS = ("name", "n", "k")


def dumps_config(cfg: ExperimentConfig) -> str:
    """Flat key = value text; ``parse_config`` round-trips it losslessly."""
    lines = []
    for key in _CONFIG_TYPES:
        value = getattr(cfg, key)
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> ExperimentConfig:
    """Parse key = value lines.  Blank lines and # comments are skipped."""
    values: dict[str, object] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"expected 'key = value', got {raw!r}")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_TYPES:
            raise FormatError(f"unknown config key {key!r}")
        if key in values:
            raise FormatError(f"duplicate config key {key!r}")
        typ = _CONFIG_TYPES[key]
        if typ is bool:
            if value not in ("true", "false"):
                raise FormatError(f"{key} must be true or false, got {value!r}")
            values[key] = value == "true"
        elif typ is int:
            try:
                values[key] = int(value)
            except ValueError:
                raise FormatError(f"{key} wants an integer, got {value!r}") from None
        elif typ is float:
            try:
                values[key] = float(value)
            except ValueError:
                raise FormatError(f"{key} wants a number, got {value!r}") from None
        else:
            values[key] = value
    for key in _REQUIRED_KEYS:
        if key not in values:
            raise FormatError(f"missing required config key {key!r}")
    return ExperimentConfig(**values)  # type: ignore[arg-type]


def read_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="ascii"))


def write_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(dumps_config(cfg), encoding="ascii")


# ---------------------------------------------------------------------------
# trial records and the CSV report dialect


@dataclass(frozen=True)
class TrialRecord:
    """One report row; ``data`` maps the columns beyond trial and seed."""

    index: int
    seed: int
    data: Mapping[str, object]


@dataclass(frozen=True)
class ExperimentResult:
    """Batch outcome: per-trial records plus one summary row.

    ``summary_row`` is aligned to ``columns`` and closes the CSV report;
    ``summary`` is the richer mapping behind it (printed by the CLI and
    embedded in JSON output).
    """

    config: ExperimentConfig
    columns: tuple[str, ...]
    records: tuple[TrialRecord, ...]
    summary: Mapping[str, object]
    summary_row: tuple[object, ...]


CSV_VERSION = "v1"
_CSV_MAGIC = "#diraclab-csv"


@dataclass(frozen=True)
class CsvTable:
    name: str
    version: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return " ".join(str(v) for v in value)
    if isinstance(value, (set, frozenset)):
        return " ".join(str(v) for v in sorted(value))
    text = str(value)
    if "," in text or "\n" in text:
        raise FormatError(f"cell value {text!r} would break the row format")
    return text


def dumps_table(name: str, columns: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    lines = [f"{_CSV_MAGIC} {name} {CSV_VERSION}", ",".join(columns)]
    width = len(columns)
    for row in rows:
        cells = [_cell(v) for v in row]
        if len(cells) != width:
            raise FormatError(f"row has {len(cells)} cells, header has {width}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> CsvTable:
    """Parse the report dialect; rejects headers from unknown versions."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_CSV_MAGIC + " "):
        raise FormatError(f"missing '{_CSV_MAGIC}' header line")
    parts = lines[0].split(" ")
    if len(parts) != 3:
        raise FormatError(f"malformed header {lines[0]!r}")
    _, name, version = parts
    if version != CSV_VERSION:
        raise FormatError(
            f"unsupported report version {version!r}; this reader understands {CSV_VERSION}"
        )
    if len(lines) < 2:
        raise FormatError("missing column row")
    columns = tuple(lines[1].split(","))
    rows = []
    for line in lines[2:]:
        if not line:
            continue
        cells = tuple(line.split(","))
        if len(cells) != len(columns):
            raise FormatError(f"row {line!r} does not match the column row")
        rows.append(cells)
    return CsvTable(name, version, columns, tuple(rows))


def read_table(path) -> CsvTable:
    return parse_table(Path(path).read_text(encoding="ascii"))


def write_table(path, name: str, columns: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    Path(path).write_text(dumps_table(name, columns, rows), encoding="ascii")


def experiment_csv(result: ExperimentResult) -> str:
    rows = [
        (rec.index, rec.seed) + tuple(rec.data.get(c) for c in result.columns[2:])
        for rec in result.records
    ]
    rows.append(result.summary_row)
    return dumps_table(result.config.name, result.columns, rows)


def write_experiment(result: ExperimentResult, path) -> None:
    Path(path).write_text(experiment_csv(result), encoding="ascii")


def summary_lines(result: ExperimentResult) -> list[str]:
    """Key: value lines for terminal output, in insertion order."""
    out = []
    for key, value in result.summary.items():
        if isinstance(value, float):
            out.append(f"{key}: {value!r}")
        else:
            out.append(f"{key}: {value}")
    return out


# ---------------------------------------------------------------------------
# resilience: degrade random hosts to the threshold, count surviving matchings


RESILIENCE_COLUMNS = (
    "trial",
    "seed",
    "n",
    "k",
    "d",
    "p",
    "gamma",
    "threshold",
    "min_deg",
    "pm_found",
    "nodes",
    "seconds",
)


def resilience_threshold(d: int, k: int, gamma: float, p_hat, n: int) -> int:
    """ceil((conjectured density + gamma) * p_hat * C(n-d, k-d)), exactly."""
    bound = (conjectured_density(d, k) + _frac(gamma)) * _frac(p_hat) * comb(n - d, k - d)
    return ceil(bound)


def resilience_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Sample hosts, degrade them to the degree threshold, test for matchings.

    Each trial samples the binomial k-graph under its own derived seed,
    computes the threshold from the configured gamma and p-hat convention,
    deletes edges by the configured policy while every d-degree stays at or
    above the threshold, then runs the exact matching search on the
    survivor.  Hosts that start below the threshold are recorded as
    infeasible rows (blank pm_found) and excluded from the frequency; a
    failed search is recorded, never raised.
    """
    if not 1 <= cfg.d < cfg.k <= cfg.n:
        raise SizeError(f"need 1 <= d < k <= n, got d={cfg.d}, k={cfg.k}, n={cfg.n}")
    records: list[TrialRecord] = []
    thresholds_seen: set[int] = set()
    feasible = 0
    successes = 0
    batch_tick = time.perf_counter() if cfg.timing else None
    for t in range(cfg.trials):
        seed = derived_seed(cfg.master_seed, t)
        tick = time.perf_counter() if cfg.timing else None
        G = sample_hk(cfg.n, cfg.k, cfg.p, seed)
        if cfg.phat == "nominal":
            p_hat = _frac(cfg.p)
        else:
            p_hat = Fraction(len(G.edges), comb(cfg.n, cfg.k))
        # A host with a perfect matching needs positive degrees everywhere,
        # so the enforced floor never drops below 1 even when the density
        # formula bottoms out at p = 0.
        threshold = max(resilience_threshold(cfg.d, cfg.k, cfg.gamma, p_hat, cfg.n), 1)
        thresholds_seen.add(threshold)
        host_min, _ = min_d_degree(G, cfg.d)
        data: dict[str, object] = {
            "n": cfg.n,
            "k": cfg.k,
            "d": cfg.d,
            "p": cfg.p,
            "gamma": cfg.gamma,
            "threshold": threshold,
        }
        if host_min < threshold:
            data.update({"min_deg": host_min, "pm_found": None, "nodes": None})
        else:
            worn = degrade_to_degree(G, cfg.d, threshold, policy=cfg.policy, seed=seed)
            res = find_perfect_matching(worn.graph, budget=cfg.search_budget())
            found = res.status == "perfect"
            feasible += 1
            successes += int(found)
            data.update(
                {
                    "min_deg": worn.min_degree,
                    "pm_found": found,
                    "nodes": res.nodes_explored,
                }
            )
        data["seconds"] = f"{time.perf_counter() - tick:.3f}" if cfg.timing else None
        records.append(TrialRecord(t, seed, data))

    frequency = successes / feasible if feasible else None
    common_threshold = thresholds_seen.pop() if len(thresholds_seen) == 1 else None
    summary: dict[str, object] = {
        "trials": cfg.trials,
        "feasible": feasible,
        "infeasible": cfg.trials - feasible,
        "pm_successes": successes,
        "pm_frequency": frequency,
        "threshold": common_threshold,
        "policy": cfg.policy,
        "phat": cfg.phat,
        "density_proxy": "conjectured_density",
        "density": str(conjectured_density(cfg.d, cfg.k)),
    }
    if feasible:
        low, high = wilson_interval(successes, feasible)
        summary["wilson_low"] = low
        summary["wilson_high"] = high
    else:
        summary["wilson_low"] = None
        summary["wilson_high"] = None
    summary_row = (
        "summary",
        cfg.master_seed,
        cfg.n,
        cfg.k,
        cfg.d,
        cfg.p,
        cfg.gamma,
        common_threshold,
        None,
        frequency,
        None,
        f"{time.perf_counter() - batch_tick:.3f}" if cfg.timing else None,
    )
    return ExperimentResult(cfg, RESILIENCE_COLUMNS, tuple(records), summary, summary_row)


# ---------------------------------------------------------------------------
# inheritance: do random subsets keep the host's degree profile?


INHERITANCE_COLUMNS = ("trial", "seed", "subset", "min_deg", "target", "ok")

# The failure probability this experiment estimates is bounded by a term of
# this shape; c is an absolute constant the measurement does not pin down,
# so only the observed frequency is reported.
INHERITANCE_BOUND_FORM = "C(Q,d) * (delta + exp(-c * eta^2 * Q))"

_INHERIT_EXHAUSTIVE_CAP = 2000


def _host_from_config(cfg: ExperimentConfig) -> Hypergraph:
    if cfg.host == "complete":
        return Hypergraph.complete(cfg.n, cfg.k)
    if cfg.host == "space":
        return space_barrier(cfg.n, cfg.k, cfg.d)
    if cfg.host == "parity":
        return parity_barrier(cfg.n, cfg.k, cfg.d)
    return sample_hk(cfg.n, cfg.k, cfg.p, cfg.master_seed)


def inheritance_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Measure how often a Q-subset inherits the host's relative min degree.

    The host's profile is mu = min d-degree / C(n-d, k-d); a subset S of size
    Q passes when its induced graph has minimum d-degree at least
    (mu - eta/2) * C(Q-d, k-d), compared exactly.  All C(n, Q) subsets are
    checked when that count is small; otherwise cfg.trials subsets are drawn,
    one derived seed each.
    """
    if not 1 <= cfg.d < cfg.k:
        raise SizeError(f"need 1 <= d < k, got d={cfg.d}, k={cfg.k}")
    Q = cfg.Q
    if not cfg.k <= Q <= cfg.n:
        raise SizeError(f"need k <= Q <= n, got Q={Q}, k={cfg.k}, n={cfg.n}")
    host = _host_from_config(cfg)
    mu = Fraction(min_d_degree(host, cfg.d)[0], comb(cfg.n - cfg.d, cfg.k - cfg.d))
    target = (mu - _frac(cfg.eta) / 2) * comb(Q - cfg.d, cfg.k - cfg.d)
    total = comb(cfg.n, Q)
    exhaustive = total <= _INHERIT_EXHAUSTIVE_CAP

    def check(t: int, S: tuple[int, ...]) -> TrialRecord:
        sub, _ = induced(host, S)
        md, _ = min_d_degree(sub, cfg.d)
        return TrialRecord(
            t,
            derived_seed(cfg.master_seed, t),
            {"subset": S, "min_deg": md, "target": target, "ok": md >= target},
        )

    records: list[TrialRecord] = []
    if exhaustive:
        for t, S in enumerate(combinations(range(cfg.n), Q)):
            records.append(check(t, S))
    else:
        for t in range(cfg.trials):
            rng = Random(derived_seed(cfg.master_seed, t))
            records.append(check(t, tuple(sorted(rng.sample(range(cfg.n), Q)))))

    ok_count = sum(1 for rec in records if rec.data["ok"])
    checked = len(records)
    frequency = ok_count / checked
    summary = {
        "mode": "exhaustive" if exhaustive else "sampled",
        "subsets": checked,
        "ok": ok_count,
        "frequency": frequency,
        "mu_host": str(mu),
        "target": str(target),
        "eta": cfg.eta,
        "bound_form": INHERITANCE_BOUND_FORM,
    }
    summary_row = ("summary", cfg.master_seed, None, None, target, frequency)
    return ExperimentResult(cfg, INHERITANCE_COLUMNS, tuple(records), summary, summary_row)


# ---------------------------------------------------------------------------
# neighbourhood load: edges through one vertex that touch a small set


LOAD_COLUMNS = ("trial", "seed", "vertex", "set", "count", "bound", "ratio")


@dataclass(frozen=True)
class LoadReport:
    """Worst observed load against the 2|X| p-hat C(n-2, k-2) reference line."""

    max_ratio: float
    max_count: int
    bound: Fraction
    set_size: int
    pairs_checked: int
    worst_vertex: int
    worst_set: tuple[int, ...]


def _sampled_load_pairs(
    G: Hypergraph, x_size: int, samples: int, seed: int
) -> Iterator[tuple[int, int, int, tuple[int, ...], int]]:
    masks = G.edge_masks
    for i in range(samples):
        s = derived_seed(seed, i)
        rng = Random(s)
        w = rng.randrange(G.n)
        pool = [v for v in range(G.n) if v != w]
        X = tuple(sorted(rng.sample(pool, x_size)))
        wbit = 1 << w
        xmask = 0
        for v in X:
            xmask |= 1 << v
        count = sum(1 for m in masks if m & wbit and m & xmask)
        yield i, s, w, X, count


def _load_bound(G: Hypergraph, x_size: int) -> Fraction:
    total = comb(G.n, G.k)
    p_hat = Fraction(len(G.edges), total) if total else Fraction(0)
    return 2 * x_size * p_hat * comb(G.n - 2, G.k - 2)


def neighborhood_load_check(
    G: Hypergraph, lam: float, samples: int = 200, seed: int = 0
) -> LoadReport:
    """Sample vertex/set pairs and compare each load to the reference line.

    A pair is a vertex w and a set X of floor(lam * n) other vertices; its
    load is the number of edges containing w and meeting X.  The reference
    is 2 |X| p-hat C(n-2, k-2) with the empirical density p-hat; the report
    carries the worst ratio seen.  An edgeless host scores 0.
    """
    if G.k < 2:
        raise SizeError(f"needs uniformity at least 2, got k={G.k}")
    if not 0.0 <= lam <= 1.0:
        raise SizeError(f"lam must be in [0, 1], got {lam}")
    if samples < 1:
        raise SizeError(f"need at least one sample, got {samples}")
    x_size = min(int(_frac(lam) * G.n), G.n - 1)
    bound = _load_bound(G, x_size)
    max_count = -1
    worst_vertex = 0
    worst_set: tuple[int, ...] = ()
    for _, _, w, X, count in _sampled_load_pairs(G, x_size, samples, seed):
        if count > max_count:
            max_count = count
            worst_vertex = w
            worst_set = X
    ratio = float(Fraction(max_count) / bound) if bound > 0 else 0.0
    return LoadReport(ratio, max_count, bound, x_size, samples, worst_vertex, worst_set)


def load_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Per-pair report for the neighbourhood load check on the config's host."""
    host = _host_from_config(cfg)
    if host.k < 2:
        raise SizeError(f"needs uniformity at least 2, got k={host.k}")
    x_size = min(int(_frac(cfg.lam) * host.n), host.n - 1)
    bound = _load_bound(host, x_size)
    records: list[TrialRecord] = []
    max_count = -1
    for i, s, w, X, count in _sampled_load_pairs(host, x_size, cfg.trials, cfg.master_seed):
        ratio = float(Fraction(count) / bound) if bound > 0 else 0.0
        max_count = max(max_count, count)
        records.append(
            TrialRecord(
                i,
                s,
                {"vertex": w, "set": X, "count": count, "bound": bound, "ratio": ratio},
            )
        )
    max_ratio = float(Fraction(max_count) / bound) if bound > 0 else 0.0
    summary = {
        "pairs": cfg.trials,
        "set_size": x_size,
        "bound": str(bound),
        "max_count": max_count,
        "max_ratio": max_ratio,
    }
    summary_row = ("summary", cfg.master_seed, None, None, max_count, bound, max_ratio)
    return ExperimentResult(cfg, LOAD_COLUMNS, tuple(records), summary, summary_row)


EXPERIMENTS = ("resilience", "inheritance", "load")


def run_experiment(kind: str, cfg: ExperimentConfig) -> ExperimentResult:
    if kind == "resilience":
        return resilience_experiment(cfg)
    if kind == "inheritance":
        return inheritance_experiment(cfg)
    if kind == "load":
        return load_experiment(cfg)
    raise SizeError(f"unknown experiment {kind!r}; expected one of {EXPERIMENTS}")
