"""The absorbing-method perfect-matching pipeline.

Four stages run in sequence: pick a rich flexible set Z (every outside
vertex sees many edges into it), build a resilient template on Z and plant
it as an absorbing structure X, cover G - X blockwise leaving a small
leftover W, then absorb W by matching it into Z and re-matching the
structure without the used flexible vertices. Every success is gated by an
independent matching verifier; failures come back as a staged report, not
an exception.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, comb
from typing import Iterable, Mapping

from .errors import (
    NotFound,
    PlacementFailed,
    SizeError,
    StageFailure,
    TemplateMatchingFailed,
)
from .hypercore import Hypergraph, induced, min_d_degree
from .matchpower import (
    Matching,
    blockwise_almost_perfect,
    find_perfect_matching,
    match_into_flexible,
    verify_matching,
)
from .templates import (
    AbsorbingStructure,
    FinderConfig,
    build_absorbing_structure,
    build_resilient_template,
    compact_template,
    structure_matching_after_removal,
)
from .thresholds import conjectured_density

__all__ = [
    "PipelineParams",
    "RichSet",
    "AbsorbingSet",
    "PipelineReport",
    "choose_rich_set",
    "build_absorbing_set",
    "absorb_and_complete",
    "dirac_perfect_matching",
]

STAGES = ("precheck", "rich_set", "template", "structure", "almost_perfect", "absorb", "verify")


def _as_fraction(x) -> Fraction:
    """Floats come in through configs and CLIs; str() keeps 0.2 meaning 1/5."""
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class PipelineParams:
    """Run parameters with desk-scale defaults.

    The asymptotic constants behind rho and lam are not instantiated from
    any limit argument; these are workable defaults for graphs with tens of
    vertices. min_r floors the flexible set so a template exists at all.
    """

    rho: float = 0.2
    lam: float = 0.1
    min_r: int = 6
    trials: int = 64
    template_mode: str = "auto"
    template_trials: int = 200
    Q: int | None = None
    partition_attempts: int = 2
    finder_Q: int | None = None
    finder_budget: int | None = None

    def __post_init__(self):
        if self.template_mode not in ("auto", "montgomery", "compact"):
            raise SizeError(f"unknown template_mode {self.template_mode!r}")
        if self.partition_attempts < 1:
            raise SizeError("need at least one partition attempt")

    @classmethod
    def from_mapping(cls, m: Mapping[str, str]) -> "PipelineParams":
        """Build from flat key=value text config; 'lambda' aliases lam."""
        kwargs: dict[str, object] = {}
        casts = {
            "rho": float,
            "lam": float,
            "lambda": float,
            "min_r": int,
            "trials": int,
            "template_mode": str,
            "template_trials": int,
            "Q": int,
            "partition_attempts": int,
            "finder_Q": int,
            "finder_budget": int,
        }
        for key, raw in m.items():
            if key not in casts:
                raise SizeError(f"unknown pipeline parameter {key!r}")
            name = "lam" if key == "lambda" else key
            kwargs[name] = casts[key](raw)
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "lam": self.lam,
            "min_r": self.min_r,
            "trials": self.trials,
            "template_mode": self.template_mode,
            "template_trials": self.template_trials,
            "Q": self.Q,
            "partition_attempts": self.partition_attempts,
            "finder_Q": self.finder_Q,
            "finder_budget": self.finder_budget,
        }

    def block_size(self, k: int) -> int:
        """Default block size: the smallest multiple of k from 2k up."""
        return self.Q if self.Q is not None else 2 * k


@dataclass(frozen=True)
class RichSet:
    """A flexible-set candidate plus the numbers that admitted it."""

    Z: tuple[int, ...]
    min_outside_degree: int | None
    threshold: Fraction
    trials_used: int


@dataclass(frozen=True)
class AbsorbingSet:
    """Vertices X the structure controls; Z within X stays flexible.

    lambda_cap bounds how many outside vertices one absorption can swallow:
    the host allowance floor(lam*n) intersected with what the template can
    lose, (k-1)|W| < r/2 flexible vertices.
    """

    X: frozenset[int]
    structure: AbsorbingStructure
    Z: tuple[int, ...]
    lambda_cap: int


def _degree_into(G: Hypergraph, v: int, Z: frozenset[int]) -> int:
    return sum(
        1 for i in G.incident[v] if all(u in Z for u in G.edges[i] if u != v)
    )


def choose_rich_set(
    G: Hypergraph,
    rho,
    lam,
    trials: int = 64,
    seed: int = 0,
) -> RichSet:
    """Sample ceil(rho*n)-subsets until every outside vertex has degree at
    least (delta_hat/2)*C(|Z|-1, k-1) into the sample, where delta_hat is
    the graph's relative minimum 1-degree. The comparison is exact (no
    floats), with a floor of one edge so an empty graph never qualifies.

    Raises NotFound("trials") carrying the best candidate's deficit.
    """
    n, k = G.n, G.k
    r = ceil(_as_fraction(rho) * n)
    if not 0 < r <= n:
        raise SizeError(f"rho={rho} asks for {r} of {n} vertices")
    delta_hat = Fraction(min_d_degree(G, 1)[0], comb(n - 1, k - 1))
    threshold = max(delta_hat / 2 * comb(r - 1, k - 1), Fraction(1))
    rng = random.Random(seed)
    best_deficit: Fraction | None = None
    best_min: int | None = None
    for t in range(trials):
        Z = tuple(sorted(rng.sample(range(n), r)))
        zset = frozenset(Z)
        outside = [v for v in range(n) if v not in zset]
        if not outside:
            return RichSet(Z, None, threshold, t + 1)
        worst = min(_degree_into(G, v, zset) for v in outside)
        if worst >= threshold:
            return RichSet(Z, worst, threshold, t + 1)
        deficit = threshold - worst
        if best_deficit is None or deficit < best_deficit:
            best_deficit, best_min = deficit, worst
    raise NotFound(
        f"no rich {r}-set in {trials} trials (best min outside degree "
        f"{best_min} vs threshold {threshold})",
        "trials",
        details={"best_min_degree": best_min, "threshold": str(threshold)},
    )


def _montgomery_size(r: int, k: int) -> int:
    """Vertex count of the layered template at flexible-set size r."""
    s = ceil(r / 2)
    return 3 * k * s - s + r


def _removal_cap(r: int, k: int) -> int:
    """Largest |W| with (k-1)|W| < r/2."""
    return ceil(Fraction(r, 2 * (k - 1))) - 1


def build_absorbing_set(
    G: Hypergraph,
    gamma,
    params: PipelineParams = PipelineParams(),
    seed: int = 0,
) -> AbsorbingSet:
    """Rich set, then template, then planted structure.

    template_mode "auto" uses the layered template when the host has room
    for it plus a block of slack, and the complete template on Z otherwise
    (small hosts cannot fit the lift). In the auto-compact case r is also
    nudged up so the blockwise stage on the remaining n-r vertices has no
    remainder; an explicit mode keeps r exactly as rho asks. Failures
    carry the stage name.
    """
    n, k = G.n, G.k
    r = max(params.min_r, ceil(_as_fraction(params.rho) * n))
    mode = params.template_mode
    if mode == "auto":
        roomy = n >= _montgomery_size(r, k) + params.block_size(k)
        mode = "montgomery" if roomy else "compact"
        if mode == "compact":
            r = k * ceil(r / k)
            Q = params.block_size(k)
            while (n - r) % Q != 0 and r + k <= n:
                r += k
    elif mode == "compact":
        r = k * ceil(r / k)

    try:
        rich = choose_rich_set(G, Fraction(r, n), params.lam, params.trials, seed)
    except (NotFound, SizeError) as exc:
        raise StageFailure("rich_set", str(exc)) from exc

    try:
        if mode == "montgomery":
            T = build_resilient_template(
                r, k, seed=seed, trials=params.template_trials
            )
        else:
            T = compact_template(r, k)
    except (NotFound, SizeError) as exc:
        raise StageFailure("template", str(exc)) from exc

    finder = FinderConfig(
        Q=params.finder_Q if params.finder_Q is not None else 2 * k,
        budget=params.finder_budget,
    )
    try:
        S = build_absorbing_structure(G, T, embed_Z=rich.Z, finder=finder)
    except (PlacementFailed, SizeError) as exc:
        raise StageFailure("structure", str(exc)) from exc

    cap = min(int(_as_fraction(params.lam) * n), _removal_cap(r, k))
    return AbsorbingSet(X=S.X, structure=S, Z=S.Z_host, lambda_cap=cap)


def absorb_and_complete(
    G: Hypergraph, A: AbsorbingSet, W: Iterable[int]
) -> Matching:
    """Swallow the leftover W: match each of its vertices with k-1 flexible
    partners, then re-match the structure without the partners used. The
    result covers exactly X union W.
    """
    W = frozenset(W)
    if W & A.X:
        raise SizeError("leftover vertices must lie outside the absorbing set")
    if len(W) > A.lambda_cap:
        raise SizeError(
            f"leftover of {len(W)} exceeds the absorbing capacity {A.lambda_cap}"
        )
    if (len(A.X) + len(W)) % G.k != 0:
        raise SizeError("X plus leftover is not divisible by the uniformity")

    try:
        M1 = match_into_flexible(G, W, A.Z)
    except NotFound as exc:
        raise StageFailure(
            "absorb-m1", f"no flexible matching for the leftover: {exc}"
        ) from exc
    used_Z = sorted(set(A.Z) & M1.covered)
    try:
        M2 = structure_matching_after_removal(A.structure, used_Z)
    except TemplateMatchingFailed as exc:
        raise StageFailure("absorb-m2", str(exc)) from exc
    out = Matching.from_edges(M1.edges + M2.edges)
    assert out.covered == A.X | W, "absorption missed its target set"
    return out


@dataclass(frozen=True)
class PipelineReport:
    """Staged outcome of one pipeline run; JSON form is byte-stable."""

    status: str
    failure_stage: str | None
    n: int
    k: int
    d: int
    gamma: float
    seed: int
    params: dict
    degree_measured: int
    degree_target: str
    degree_ok: bool
    stages: dict
    counters: dict
    matching: tuple[tuple[int, ...], ...] | None = None

    def to_json(self) -> str:
        payload = {
            "status": self.status,
            "failure_stage": self.failure_stage,
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "gamma": self.gamma,
            "seed": self.seed,
            "params": self.params,
            "degree_measured": self.degree_measured,
            "degree_target": self.degree_target,
            "degree_ok": self.degree_ok,
            "stages": self.stages,
            "counters": self.counters,
            "matching": (
                [list(e) for e in self.matching] if self.matching is not None else None
            ),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def dirac_perfect_matching(
    G: Hypergraph,
    d: int,
    gamma,
    params: PipelineParams = PipelineParams(),
    seed: int = 0,
) -> PipelineReport:
    """Run the full pipeline on G and report staged outcomes.

    Never raises for a failed run and never fabricates success: a returned
    perfect matching has always passed the independent verifier. The
    minimum d-degree is compared against the conjectured density plus
    gamma and recorded, but a short graph is still attempted.
    """
    n, k = G.n, G.k
    gamma_f = _as_fraction(gamma)
    stages = {name: "skipped" for name in STAGES}
    counters: dict[str, object] = {}

    if 1 <= d < k and n >= d:
        target = (conjectured_density(d, k) + gamma_f) * comb(n - d, k - d)
        degree_measured = min_d_degree(G, d)[0]
    else:
        target = Fraction(0)
        degree_measured = -1
    degree_ok = 1 <= d < k and Fraction(degree_measured) >= target

    def report(status, failure_stage, matching=None):
        return PipelineReport(
            status=status,
            failure_stage=failure_stage,
            n=n,
            k=k,
            d=d,
            gamma=float(gamma),
            seed=seed,
            params=params.to_dict(),
            degree_measured=degree_measured,
            degree_target=str(target),
            degree_ok=degree_ok,
            stages=stages,
            counters=counters,
            matching=matching,
        )

    if n == 0 or n % k != 0:
        stages["precheck"] = f"failed: {k} does not divide {n}"
        return report("failure", "precheck")
    stages["precheck"] = "ok"

    try:
        A = build_absorbing_set(G, gamma, params, seed)
    except StageFailure as exc:
        for name in ("rich_set", "template", "structure"):
            stages[name] = "ok" if _stage_index(name) < _stage_index(exc.stage) else stages[name]
        stages[exc.stage] = f"failed: {exc}"
        return report("failure", exc.stage)
    stages["rich_set"] = stages["template"] = stages["structure"] = "ok"
    counters["r"] = len(A.Z)
    counters["x_size"] = len(A.X)
    counters["lambda_cap"] = A.lambda_cap
    counters["template_mode"] = A.structure.template.provenance.get("layers")
    counters["template_v"] = A.structure.template.T.n
    counters["template_e"] = A.structure.template.T.edge_count()
    advisory = (gamma_f / 2) ** k * n
    counters["advisory_x_bound"] = str(advisory)
    counters["advisory_x_ok"] = Fraction(len(A.X)) <= advisory

    rest = sorted(set(range(n)) - A.X)
    sub, old = induced(G, rest)
    Q = params.block_size(k)
    block_edges: list[tuple[int, ...]] = []
    W: list[int] = []
    attempts_used = 1
    for attempt in range(params.partition_attempts):
        attempts_used = attempt + 1
        reshuffle_helps = True
        if sub.n < Q:
            # too few vertices for even one block: everything is leftover,
            # and reshuffling cannot change that
            block_edges, W = [], [old[v] for v in range(sub.n)]
            counters["blocks_total"] = 0
            counters["failed_blocks"] = 0
            reshuffle_helps = False
        else:
            rep = blockwise_almost_perfect(sub, Q, seed=seed + attempt)
            block_edges = [
                tuple(sorted(old[v] for v in e)) for e in rep.matching.edges
            ]
            W = sorted(old[v] for v in rep.uncovered)
            counters["blocks_total"] = rep.blocks_total
            counters["failed_blocks"] = len(rep.failed_blocks)
        # partition remainders and failed blocks together form a k-divisible
        # set; one exact attempt on it often clears the leftover outright
        if 0 < len(W) <= 3 * Q and len(W) % k == 0:
            scrap, scrap_old = induced(G, W)
            res = find_perfect_matching(scrap, budget=50_000)
            if res.status == "perfect":
                block_edges.extend(
                    tuple(sorted(scrap_old[v] for v in e))
                    for e in res.matching.edges
                )
                W = []
        if len(W) <= A.lambda_cap or not reshuffle_helps:
            break
    counters["retries"] = attempts_used - 1
    counters["leftover"] = len(W)
    if len(W) > A.lambda_cap:
        stages["almost_perfect"] = (
            f"failed: leftover {len(W)} exceeds capacity {A.lambda_cap}"
        )
        return report("failure", "almost_perfect")
    stages["almost_perfect"] = "ok"

    try:
        absorbed = absorb_and_complete(G, A, W)
    except (StageFailure, SizeError) as exc:
        stages["absorb"] = f"failed: {exc}"
        return report("failure", "absorb")
    stages["absorb"] = "ok"

    total = Matching.from_edges(tuple(block_edges) + absorbed.edges)
    ok, why = verify_matching(G, total, require_perfect=True)
    if not ok:
        stages["verify"] = f"failed: {why}"
        return report("failure", "verify")
    stages["verify"] = "ok"
    return report("success", None, matching=total.edges)


def _stage_index(name: str) -> int:
    return STAGES.index(name)
