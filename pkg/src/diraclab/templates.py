"""Resilient templates and absorbing structures.

A resilient template is a small k-graph T with a flexible vertex set Z: for
any removal of fewer than |Z|/2 flexible vertices that keeps the count
divisible by k, the rest still has a perfect matching. It is assembled from
three searched-and-verified parts: a bipartite graph whose X side survives
any half-removal from its Z side, a k-partite lift turning its edges into
k-sets, and an overlay on Z with no large independent set. An absorbing
structure then plants one absorber on every template edge inside a host
graph, which lets the host toggle flexible vertices in and out of a
perfect matching.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import combinations
from math import ceil, comb
from typing import Iterable, Mapping, Sequence

from .absorbing import Absorber, find_rooted_absorber
from .errors import (
    FormatError,
    NotFound,
    PlacementFailed,
    ShapeError,
    SizeError,
    TemplateMatchingFailed,
)
from .hypercore import Hypergraph, induced, read_khg, write_khg
from .matchpower import Matching, find_perfect_matching

__all__ = [
    "BipartiteTemplate",
    "MontgomeryReport",
    "LiftResult",
    "ResilientTemplate",
    "TemplateReport",
    "FinderConfig",
    "AbsorbingStructure",
    "search_montgomery",
    "verify_montgomery",
    "lift_k_partite",
    "independent_free_overlay",
    "find_independent_set",
    "build_resilient_template",
    "compact_template",
    "feasible_removals",
    "verify_resilient_template",
    "build_absorbing_structure",
    "structure_matching_after_removal",
    "write_template",
    "read_template",
]


# ---------------------------------------------------------------------------
# Bipartite template with the half-removal property
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BipartiteTemplate:
    """Bipartite graph on X (3s ids, 0..3s-1) versus Y+Z (2s ids each,
    3s..5s-1 and 5s..7s-1). The property of interest: removing any s
    vertices of Z leaves an X-saturating (hence perfect) matching."""

    s: int
    edges: tuple[tuple[int, int], ...]
    max_degree: int

    def __post_init__(self):
        s = self.s
        if s < 1:
            raise ShapeError("scale must be positive")
        deg: dict[int, int] = {}
        prev = None
        for x, w in self.edges:
            if not (0 <= x < 3 * s and 3 * s <= w < 7 * s):
                raise ShapeError(f"edge ({x},{w}) violates the side ranges")
            if prev is not None and (x, w) <= prev:
                raise ShapeError("edges must be strictly increasing")
            prev = (x, w)
            deg[x] = deg.get(x, 0) + 1
            deg[w] = deg.get(w, 0) + 1
        if deg and max(deg.values()) != self.max_degree:
            raise ShapeError("max_degree does not match the edge list")

    @property
    def X(self) -> tuple[int, ...]:
        return tuple(range(3 * self.s))

    @property
    def Y(self) -> tuple[int, ...]:
        return tuple(range(3 * self.s, 5 * self.s))

    @property
    def Z(self) -> tuple[int, ...]:
        return tuple(range(5 * self.s, 7 * self.s))


@dataclass(frozen=True)
class MontgomeryReport:
    ok: bool
    violating: tuple[int, ...] | None
    checked: int
    mode: str


def _adjacency(R: BipartiteTemplate) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(3 * R.s)]
    for x, w in R.edges:
        adj[x].append(w)
    return adj


def _x_saturating(adj: Sequence[Sequence[int]], banned: frozenset[int]) -> bool:
    """Augmenting-path matching of all X vertices into Y+Z minus `banned`."""
    partner: dict[int, int] = {}

    def augment(x: int, seen: set[int]) -> bool:
        for w in adj[x]:
            if w in banned or w in seen:
                continue
            seen.add(w)
            if w not in partner or augment(partner[w], seen):
                partner[w] = x
                return True
        return False

    return all(augment(x, set()) for x in range(len(adj)))


_MONTGOMERY_EXHAUSTIVE_CAP = 10 ** 6


def verify_montgomery(
    R: BipartiteTemplate, mode: str = "auto", samples: int = 2000, seed: int = 0
) -> MontgomeryReport:
    """Check that every s-removal from Z leaves an X-saturating matching.

    Exhaustive over all C(2s, s) removals while that count stays under a
    million; beyond that a seeded sample is used and the report says so.
    mode "exhaustive" or "sampled" overrides the size-based choice.
    """
    s = R.s
    adj = _adjacency(R)
    total = comb(2 * s, s)
    if mode == "auto":
        mode = "exhaustive" if total <= _MONTGOMERY_EXHAUSTIVE_CAP else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise SizeError(f"unknown mode {mode!r}")
    if mode == "exhaustive":
        checked = 0
        for D in combinations(R.Z, s):
            checked += 1
            if not _x_saturating(adj, frozenset(D)):
                return MontgomeryReport(False, D, checked, "exhaustive")
        return MontgomeryReport(True, None, checked, "exhaustive")
    rng = random.Random(seed)
    Z = list(R.Z)
    for i in range(samples):
        D = tuple(sorted(rng.sample(Z, s)))
        if not _x_saturating(adj, frozenset(D)):
            return MontgomeryReport(False, D, i + 1, "sampled")
    return MontgomeryReport(True, None, samples, "sampled")


def search_montgomery(
    s: int, max_degree: int, trials: int = 200, seed: int = 0
) -> BipartiteTemplate:
    """Randomized search for a bipartite template with the half-removal
    property: each candidate is a union of max_degree random injections of
    X into Y+Z (so both sides respect the degree cap), kept only if it
    passes the exhaustive verifier."""
    if s < 2:
        raise SizeError("scale must be at least 2")
    if max_degree < 1:
        raise SizeError("degree cap must be positive")
    right = list(range(3 * s, 7 * s))
    for t in range(trials):
        rng = random.Random(seed * 1_000_003 + t)
        edges: set[tuple[int, int]] = set()
        for _ in range(max_degree):
            targets = rng.sample(right, 3 * s)
            edges.update((x, targets[x]) for x in range(3 * s))
        cand = BipartiteTemplate(
            s, tuple(sorted(edges)), max(_degree_profile(s, edges))
        )
        if verify_montgomery(cand).ok:
            return cand
    raise NotFound(
        f"no degree-{max_degree} template at scale {s} in {trials} trials", "trials"
    )


def _degree_profile(s: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    deg = [0] * (7 * s)
    for x, w in edges:
        deg[x] += 1
        deg[w] += 1
    return deg


# ---------------------------------------------------------------------------
# k-partite lift
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftResult:
    """The lifted k-graph plus the bookkeeping to move between levels.

    Fresh parts sit at the bottom of the id range; every original id is
    shifted up by (k-2)*3s. edge_map pairs each lifted edge with the
    bipartite edge it came from (a bijection).
    """

    graph: Hypergraph
    parts: tuple[tuple[int, ...], ...]
    X: tuple[int, ...]
    Y: tuple[int, ...]
    Z: tuple[int, ...]
    edge_map: tuple[tuple[tuple[int, ...], tuple[int, int]], ...]


def lift_k_partite(R: BipartiteTemplate, k: int) -> LiftResult:
    """Turn bipartite edges into k-sets by threading each one through k-2
    fresh parts: the edge (x, w) picks up the copy of x in every fresh
    part. Matchings transfer both ways, one lifted edge per bipartite edge.
    """
    if k < 2:
        raise SizeError("uniformity must be at least 2")
    s = R.s
    shift = (k - 2) * 3 * s

    def lifted(x: int, w: int) -> tuple[int, ...]:
        path = [i * 3 * s + x for i in range(k - 2)]
        return tuple(sorted(path + [shift + x, shift + w]))

    pairs = tuple((lifted(x, w), (x, w)) for x, w in R.edges)
    graph = Hypergraph.from_edges(shift + 7 * s, k, [e for e, _ in pairs])
    parts = tuple(
        tuple(range(i * 3 * s, (i + 1) * 3 * s)) for i in range(k - 2)
    )
    return LiftResult(
        graph=graph,
        parts=parts,
        X=tuple(shift + v for v in R.X),
        Y=tuple(shift + v for v in R.Y),
        Z=tuple(shift + v for v in R.Z),
        edge_map=pairs,
    )


# ---------------------------------------------------------------------------
# Independent-set-free overlay
# ---------------------------------------------------------------------------

def find_independent_set(H: Hypergraph, t: int) -> tuple[int, ...] | None:
    """Exact search for t vertices spanning no edge of H; None if there is
    no such set. Straight include/exclude branching with a count prune."""
    masks = H.edge_masks

    def rec(v: int, chosen: list[int], cmask: int) -> tuple[int, ...] | None:
        if len(chosen) == t:
            return tuple(chosen)
        if len(chosen) + (H.n - v) < t:
            return None
        if v == H.n:
            return None
        take = cmask | (1 << v)
        if all(m & take != m for m in masks):
            chosen.append(v)
            got = rec(v + 1, chosen, take)
            if got is not None:
                return got
            chosen.pop()
        return rec(v + 1, chosen, cmask)

    return rec(0, [], 0)


_OVERLAY_EXACT_CAP = 24


def independent_free_overlay(
    r: int,
    k: int,
    edge_budget: int | None = None,
    trials: int = 200,
    seed: int = 0,
) -> tuple[Hypergraph, str]:
    """A k-graph on r vertices in which every ceil(r/2) vertices span an
    edge. Returns (graph, mode) where mode says how that was verified.

    When ceil(r/2) == k the only such graph is the complete one, which is
    returned outright. Otherwise sparse random graphs are sampled until one
    passes; exact verification for r <= 24, sampled above.
    """
    if k < 2:
        raise SizeError("uniformity must be at least 2")
    t = ceil(r / 2)
    if t < k:
        raise SizeError(f"no {k}-graph on {r} vertices can hit every {t}-set")
    if t == k:
        return Hypergraph.complete(r, k), "forced-complete"
    all_sets = list(combinations(range(r), k))
    budget = min(edge_budget if edge_budget is not None else 8 * r, len(all_sets))
    exact = r <= _OVERLAY_EXACT_CAP
    for trial in range(trials):
        rng = random.Random(seed * 1_000_003 + trial)
        H = Hypergraph(r, k, tuple(sorted(rng.sample(all_sets, budget))))
        if exact:
            if find_independent_set(H, t) is None:
                return H, "exact"
        else:
            ok = True
            for _ in range(20000):
                sub_mask = sum(1 << v for v in rng.sample(range(r), t))
                if not any(em & sub_mask == em for em in H.edge_masks):
                    ok = False
                    break
            if ok:
                return H, "sampled"
    raise NotFound(
        f"no independent-set-free overlay on {r} vertices in {trials} trials",
        "trials",
    )


# ---------------------------------------------------------------------------
# Resilient template
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResilientTemplate:
    """k-graph T with flexible set Z of size r; survives any small
    divisibility-respecting removal from Z. provenance records how each
    layer was built and the achieved size constant L."""

    k: int
    T: Hypergraph
    Z: tuple[int, ...]
    provenance: Mapping[str, object]

    @property
    def r(self) -> int:
        return len(self.Z)


def build_resilient_template(
    r: int,
    k: int,
    seed: int = 0,
    max_degree: int | None = None,
    trials: int = 200,
    overlay_budget: int | None = None,
) -> ResilientTemplate:
    """Compose the three layers into a resilient template.

    The bipartite scale is s = ceil(r/2); when r is odd the highest Z id of
    the lift is dropped (it sits at the top of the id range, so no other id
    moves). The overlay lands on the surviving Z ids. max_degree=None
    escalates the cap from 4 to 10 until the bipartite search succeeds.
    """
    if r < 6:
        raise SizeError("template needs r >= 6")
    if k < 2:
        raise SizeError("uniformity must be at least 2")
    s = ceil(r / 2)
    caps = [max_degree] if max_degree is not None else list(range(4, 11))
    R = None
    used_cap = None
    for cap in caps:
        try:
            R = search_montgomery(s, cap, trials=trials, seed=seed)
            used_cap = cap
            break
        except NotFound:
            continue
    if R is None:
        raise NotFound(
            f"no bipartite template at scale {s} for caps {caps}", "trials"
        )
    lift = lift_k_partite(R, k)
    trim = 2 * s - r
    n_T = lift.graph.n - trim
    kept = [e for e in lift.graph.edges if all(v < n_T for v in e)]
    Z_ids = tuple(lift.Z[:r])
    overlay, overlay_mode = independent_free_overlay(
        r, k, edge_budget=overlay_budget, trials=trials, seed=seed
    )
    overlay_edges = [
        tuple(sorted(Z_ids[v] for v in e)) for e in overlay.edges
    ]
    T = Hypergraph.from_edges(n_T, k, kept + overlay_edges)
    L = ceil(max(T.n, T.edge_count()) / r)
    provenance = {
        "layers": "bipartite+lift+overlay",
        "s": s,
        "degree_cap": used_cap,
        "trimmed": trim,
        "overlay_mode": overlay_mode,
        "overlay_edges": len(overlay_edges),
        "v": T.n,
        "e": T.edge_count(),
        "L": L,
        "seed": seed,
    }
    return ResilientTemplate(k=k, T=T, Z=Z_ids, provenance=provenance)


def compact_template(r: int, k: int) -> ResilientTemplate:
    """The complete k-graph on r vertices viewed as a template. Every
    divisibility-respecting removal leaves a complete graph, so resilience
    is immediate; used when a host is too small to hold the lifted build."""
    if r < k or r % k:
        raise SizeError(f"compact template needs k | r, got r={r}, k={k}")
    T = Hypergraph.complete(r, k)
    provenance = {
        "layers": "complete",
        "v": T.n,
        "e": T.edge_count(),
        "L": ceil(max(T.n, T.edge_count()) / r),
    }
    return ResilientTemplate(k=k, T=T, Z=tuple(range(r)), provenance=provenance)


@dataclass(frozen=True)
class TemplateReport:
    ok: bool
    violating: tuple[int, ...] | None
    checked: int
    mode: str


_TEMPLATE_EXHAUSTIVE_CAP = 10 ** 5


def feasible_removals(T: ResilientTemplate) -> list[int]:
    """Removal sizes the resilience guarantee covers: |W| < r/2 with the
    vertex count staying divisible by k."""
    r = T.r
    return [j for j in range(r) if 2 * j < r and (T.T.n - j) % T.k == 0]


def verify_resilient_template(
    T: ResilientTemplate, mode: str = "auto", samples: int = 500, seed: int = 0
) -> TemplateReport:
    """Sweep removals W from Z and demand a perfect matching every time.

    mode "exhaustive" forces the full sweep, "sampled" forces sampling,
    "auto" goes exhaustive while the sweep size stays under 10^5.
    """
    sizes = feasible_removals(T)
    total = sum(comb(T.r, j) for j in sizes)
    if mode == "auto":
        mode = "exhaustive" if total <= _TEMPLATE_EXHAUSTIVE_CAP else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise SizeError(f"unknown mode {mode!r}")

    def survives(W: tuple[int, ...]) -> bool:
        rest = [v for v in range(T.T.n) if v not in set(W)]
        sub, _ = induced(T.T, rest)
        return find_perfect_matching(sub).status == "perfect"

    if mode == "exhaustive":
        checked = 0
        for j in sizes:
            for W in combinations(T.Z, j):
                checked += 1
                if not survives(W):
                    return TemplateReport(False, W, checked, "exhaustive")
        return TemplateReport(True, None, checked, "exhaustive")
    rng = random.Random(seed)
    for i in range(samples):
        j = rng.choice(sizes)
        W = tuple(sorted(rng.sample(list(T.Z), j)))
        if not survives(W):
            return TemplateReport(False, W, i + 1, "sampled")
    return TemplateReport(True, None, samples, "sampled")


# ---------------------------------------------------------------------------
# Absorbing structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FinderConfig:
    """Knobs passed through to the per-edge rooted-absorber search."""

    Q: int = 6
    budget: int | None = None
    require_sparse: int | None = None
    min_order: int = 0


@dataclass(frozen=True)
class AbsorbingStructure:
    """One absorber per template edge, planted inside a host graph.

    vertex_map sends template ids to host ids; placements are keyed by the
    template edge (template ids). Absorbers share host vertices only where
    their template edges share vertices.
    """

    template: ResilientTemplate
    placements: tuple[tuple[tuple[int, ...], Absorber], ...]
    host: Hypergraph
    X: frozenset[int]
    vertex_map: tuple[tuple[int, int], ...]

    @property
    def Z_host(self) -> tuple[int, ...]:
        vmap = dict(self.vertex_map)
        return tuple(sorted(vmap[z] for z in self.template.Z))

    def placement_for(self, template_edge: tuple[int, ...]) -> Absorber:
        for e, A in self.placements:
            if e == template_edge:
                return A
        raise KeyError(template_edge)


def build_absorbing_structure(
    host: Hypergraph,
    T: ResilientTemplate,
    embed_Z: Sequence[int],
    finder: FinderConfig = FinderConfig(),
) -> AbsorbingStructure:
    """Embed the template into the host and put an absorber on every edge.

    Z lands on the caller's rich set (sorted template Z to sorted embed_Z);
    the other template vertices take the lowest unused host ids. Template
    edges are processed in lexicographic order, each absorber forbidden
    from touching anything already used except its own roots.
    """
    embed_Z = tuple(sorted(embed_Z))
    if len(embed_Z) != T.r:
        raise SizeError(f"need {T.r} rich vertices, got {len(embed_Z)}")
    if len(set(embed_Z)) != len(embed_Z):
        raise SizeError("rich set has repeats")
    if any(not 0 <= v < host.n for v in embed_Z):
        raise SizeError("rich vertex outside the host")

    vmap: dict[int, int] = dict(zip(sorted(T.Z), embed_Z))
    fresh = (v for v in range(host.n) if v not in set(embed_Z))
    for v in range(T.T.n):
        if v not in vmap:
            try:
                vmap[v] = next(fresh)
            except StopIteration:
                raise SizeError("host too small for the template") from None

    used: set[int] = set(vmap.values())
    placements: list[tuple[tuple[int, ...], Absorber]] = []
    for edge in T.T.edges:
        roots = tuple(sorted(vmap[v] for v in edge))
        try:
            A = find_rooted_absorber(
                host,
                roots,
                Q=finder.Q,
                forbidden=used - set(roots),
                require_sparse=finder.require_sparse,
                budget=finder.budget,
                min_order=finder.min_order,
            )
        except NotFound as exc:
            raise PlacementFailed(
                f"no absorber for template edge {edge} on roots {roots}: {exc}",
                template_edge=edge,
            ) from None
        used.update(A.vertices)
        placements.append((edge, A))
    return AbsorbingStructure(
        template=T,
        placements=tuple(placements),
        host=host,
        X=frozenset(used),
        vertex_map=tuple(sorted(vmap.items())),
    )


def structure_matching_after_removal(
    S: AbsorbingStructure, W_removed: Iterable[int]
) -> Matching:
    """Matching covering exactly the structure minus the removed flexible
    vertices: find a perfect matching of the template without them, then
    take covering matchings on its edges and noncovering matchings on the
    rest.
    """
    W = frozenset(W_removed)
    vmap = dict(S.vertex_map)
    back = {h: t for t, h in vmap.items()}
    Zh = set(S.Z_host)
    if not W <= Zh:
        raise SizeError("removed vertices must come from the flexible set")
    T = S.template
    if 2 * len(W) >= T.r:
        raise SizeError(f"can remove at most {(T.r - 1) // 2} flexible vertices")
    if (T.T.n - len(W)) % T.k != 0:
        raise SizeError("removal breaks divisibility")

    W_T = {back[h] for h in W}
    rest = [v for v in range(T.T.n) if v not in W_T]
    sub, old_ids = induced(T.T, rest)
    res = find_perfect_matching(sub)
    if res.status != "perfect":
        raise TemplateMatchingFailed(
            f"template lost its matching after removing {tuple(sorted(W))}"
        )
    in_matching = {
        tuple(sorted(old_ids[v] for v in e)) for e in res.matching.edges
    }
    pieces: list[tuple[int, ...]] = []
    for edge, A in S.placements:
        chosen = A.covering if edge in in_matching else A.noncovering
        pieces.extend(chosen.edges)
    out = Matching.from_edges(pieces)
    assert out.covered == S.X - W, "structure matching missed its target set"
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def write_template(T: ResilientTemplate, path) -> None:
    """The k-graph goes to `path` in the text format; Z, provenance and the
    uniformity go to a JSON sidecar at `path`.json."""
    write_khg(T.T, path, comment="resilient template")
    sidecar = {
        "k": T.k,
        "Z": list(T.Z),
        "provenance": dict(T.provenance),
    }
    with open(f"{path}.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_template(path) -> ResilientTemplate:
    graph = read_khg(path)
    try:
        with open(f"{path}.json", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        k = int(sidecar["k"])
        Z = tuple(int(v) for v in sidecar["Z"])
        provenance = dict(sidecar["provenance"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad template sidecar for {path}: {exc!r}") from None
    if k != graph.k:
        raise FormatError(f"sidecar says k={k} but graph is {graph.k}-uniform")
    if any(not 0 <= z < graph.n for z in Z):
        raise FormatError("sidecar Z outside the graph")
    return ResilientTemplate(k=k, T=graph, Z=Z, provenance=provenance)
