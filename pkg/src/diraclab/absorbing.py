"""Absorbers and the machinery that mass-produces sparse ones.

An absorber is a small gadget whose edge set splits into two matchings: the
covering matching hits every vertex, the noncovering matching hits every
vertex except a designated root tuple. Swapping one matching for the other
toggles the roots in or out, which is how a near-perfect matching gets
finished off. This module provides the verifier, a bounded exact search,
the contractible composition with its contraction, a girth-based sparsity
test, and a pattern-driven construction that builds sparse r-absorbers from
high-girth biregular bipartite graphs.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (
    CapacityError,
    FormatError,
    NotFound,
    ShapeError,
    SizeError,
)
from .hypercore import Hypergraph, berge_girth_of
from .matchpower import Matching

__all__ = [
    "BipartitePattern",
    "complete_bipartite_pattern",
    "projective_plane_pattern",
    "generalized_quadrangle_pattern",
    "peel_matchings",
    "random_regular_pattern",
    "pattern_for",
    "Absorber",
    "RAbsorber",
    "verify_absorber",
    "verify_r_absorber",
    "is_k_sparse",
    "find_rooted_absorber",
    "ContractibleAbsorber",
    "ContractedAbsorber",
    "assemble_contractible",
    "contract_absorber",
    "admits_absorber_partition",
    "find_sparse_r_absorber",
    "absorber_record",
    "dumps_absorber",
    "parse_absorber",
]


# ---------------------------------------------------------------------------
# High-girth biregular bipartite patterns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BipartitePattern:
    """A q-regular bipartite graph with its exact girth attached.

    The two sides are indexed independently: left ids run 0..left-1, right
    ids 0..right-1, and edges are (left, right) pairs in lexicographic
    order. The girth is recomputed at construction, so a pattern object can
    never carry a stale girth claim.
    """

    left: int
    right: int
    edges: tuple[tuple[int, int], ...]
    degree: int
    girth: int | float
    provenance: str

    def __post_init__(self):
        if self.left < 1 or self.right < 1:
            raise ShapeError("pattern sides must be nonempty")
        prev = None
        ldeg = [0] * self.left
        rdeg = [0] * self.right
        for a, b in self.edges:
            if not (0 <= a < self.left and 0 <= b < self.right):
                raise ShapeError(f"edge ({a},{b}) out of range")
            if prev is not None and (a, b) <= prev:
                raise ShapeError("pattern edges must be strictly increasing")
            prev = (a, b)
            ldeg[a] += 1
            rdeg[b] += 1
        if any(d != self.degree for d in ldeg) or any(d != self.degree for d in rdeg):
            raise ShapeError(f"pattern is not {self.degree}-regular")
        actual = berge_girth_of([(a, self.left + b) for a, b in self.edges])
        if actual != self.girth:
            raise ShapeError(f"declared girth {self.girth} but actual is {actual}")

    @classmethod
    def build(cls, left: int, right: int, edges: Iterable[tuple[int, int]], provenance: str) -> "BipartitePattern":
        es = tuple(sorted(set((a, b) for a, b in edges)))
        if not es:
            raise ShapeError("pattern needs at least one edge")
        deg = sum(1 for a, _ in es if a == es[0][0])
        girth = berge_girth_of([(a, left + b) for a, b in es])
        return cls(left, right, es, deg, girth, provenance)


def complete_bipartite_pattern(q: int) -> BipartitePattern:
    """The complete bipartite graph on q+q vertices: q-regular, girth 4."""
    if q < 2:
        raise SizeError("complete bipartite pattern needs q >= 2")
    edges = [(a, b) for a in range(q) for b in range(q)]
    return BipartitePattern.build(q, q, edges, f"complete({q})")


def _inv_mod(a: int, p: int) -> int:
    return pow(a, p - 2, p)


def _proj_points(dim: int, p: int) -> list[tuple[int, ...]]:
    """Canonical representatives of projective points over GF(p): first
    nonzero coordinate scaled to 1, enumerated in lexicographic order."""
    pts = []
    for lead in range(dim):
        head = (0,) * lead + (1,)
        for tail in _tuples(dim - lead - 1, p):
            pts.append(head + tail)
    return sorted(pts)


def _tuples(length: int, p: int) -> list[tuple[int, ...]]:
    if length == 0:
        return [()]
    shorter = _tuples(length - 1, p)
    return [(x,) + t for x in range(p) for t in shorter]


_PATTERN_PRIMES = (2, 3, 5, 7, 11, 13)


def _trial_seed(seed: int, trial: int) -> int:
    """Stable per-trial RNG seed; plain arithmetic, no hashing involved."""
    return seed * 1_000_003 + trial


def projective_plane_pattern(p: int) -> BipartitePattern:
    """Point-line incidence of the projective plane of prime order p.

    (p+1)-regular on p^2+p+1 points and as many lines; the incidence graph
    has girth 6 because two points span a unique line.
    """
    if p not in _PATTERN_PRIMES:
        raise SizeError(f"plane order must be a small prime, got {p}")
    pts = _proj_points(3, p)
    index = {v: i for i, v in enumerate(pts)}
    edges = []
    for li, line in enumerate(pts):
        for v, pi in index.items():
            if (line[0] * v[0] + line[1] * v[1] + line[2] * v[2]) % p == 0:
                edges.append((pi, li))
    P = BipartitePattern.build(len(pts), len(pts), edges, f"plane({p})")
    assert P.degree == p + 1 and P.girth == 6
    return P


def generalized_quadrangle_pattern(p: int) -> BipartitePattern:
    """Point-line incidence of the symplectic quadrangle over GF(p).

    Points are the projective points of 4-space; lines are the projective
    lines on which the alternating form x1*y2 - x2*y1 + x3*y4 - x4*y3
    vanishes identically. The incidence graph is (p+1)-regular with girth 8
    (for p=2 this is the 30-vertex cage).
    """
    if p not in _PATTERN_PRIMES:
        raise SizeError(f"quadrangle order must be a small prime, got {p}")
    pts = _proj_points(4, p)
    index = {v: i for i, v in enumerate(pts)}

    def form(u, v):
        return (u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2]) % p

    def normalize(vec):
        for c in vec:
            if c % p:
                inv = _inv_mod(c % p, p)
                return tuple(x * inv % p for x in vec)
        return None

    lines: set[frozenset[int]] = set()
    for i, u in enumerate(pts):
        for v in pts[i + 1:]:
            if form(u, v) != 0:
                continue
            members = {index[u], index[v]}
            for t in range(1, p):
                w = normalize(tuple(u[c] + t * v[c] for c in range(4)))
                members.add(index[w])
            lines.add(frozenset(members))
    ordered = sorted(lines, key=sorted)
    edges = [(pi, li) for li, line in enumerate(ordered) for pi in line]
    P = BipartitePattern.build(len(pts), len(ordered), edges, f"quadrangle({p})")
    assert P.degree == p + 1 and P.girth == 8
    return P


def _kuhn_matching(left: int, adj: Sequence[Sequence[int]], order: Sequence[int]) -> list[int] | None:
    """Left-perfect bipartite matching by augmenting paths; returns the
    right partner of each left vertex, or None if some left vertex fails."""
    match_right: dict[int, int] = {}

    def try_assign(a: int, seen: set[int]) -> bool:
        for b in adj[a]:
            if b in seen:
                continue
            seen.add(b)
            if b not in match_right or try_assign(match_right[b], seen):
                match_right[b] = a
                return True
        return False

    for a in order:
        if not try_assign(a, set()):
            return None
    out = [-1] * left
    for b, a in match_right.items():
        out[a] = b
    return out


def peel_matchings(P: BipartitePattern, count: int, seed: int = 0) -> BipartitePattern:
    """Delete `count` perfect matchings from a regular pattern, lowering its
    degree without lowering its girth. The matchings are found by augmenting
    paths over a seeded vertex order, so the result is reproducible."""
    if count == 0:
        return P
    if not 0 < count < P.degree:
        raise SizeError(f"can peel 1..{P.degree - 1} matchings, asked for {count}")
    if P.left != P.right:
        raise ShapeError("peeling needs equal sides")
    rng = random.Random(seed)
    remaining = set(P.edges)
    for _ in range(count):
        adj = [[] for _ in range(P.left)]
        for a, b in sorted(remaining):
            adj[a].append(b)
        for row in adj:
            rng.shuffle(row)
        order = list(range(P.left))
        rng.shuffle(order)
        partner = _kuhn_matching(P.left, adj, order)
        assert partner is not None, "regular bipartite graph lost its matching"
        for a, b in enumerate(partner):
            remaining.remove((a, b))
    out = BipartitePattern.build(P.left, P.right, remaining, P.provenance + f"-peel{count}")
    assert out.degree == P.degree - count
    assert out.girth >= P.girth
    return out


def random_regular_pattern(m: int, q: int, min_girth: int, trials: int = 200, seed: int = 0) -> BipartitePattern:
    """Random q-regular bipartite graph on m+m vertices as a union of q
    random permutations, rejected until simple with girth >= min_girth."""
    if q < 2 or m < q:
        raise SizeError("need m >= q >= 2")
    for t in range(trials):
        rng = random.Random(_trial_seed(seed, t))
        edges = set()
        for _ in range(q):
            perm = list(range(m))
            rng.shuffle(perm)
            edges.update((a, perm[a]) for a in range(m))
        if len(edges) < q * m:
            continue
        P = BipartitePattern.build(m, m, edges, f"random({m},{q},{seed},{t})")
        if P.girth >= min_girth:
            return P
    raise NotFound(
        f"no girth-{min_girth} {q}-regular pattern on {m}+{m} in {trials} trials",
        "trials",
    )


def pattern_for(K: int, q: int, seed: int = 0) -> BipartitePattern:
    """A q-regular bipartite pattern of girth at least K from the stock
    catalog, peeled down to the requested degree when the base is bigger.

    Bipartite girths are even, so an odd K is served by the next even one.
    """
    if q < 2:
        raise SizeError("pattern degree must be at least 2")
    need = K + (K % 2)
    if need <= 4:
        return complete_bipartite_pattern(q)
    if need == 6:
        base_of = projective_plane_pattern
    elif need == 8:
        base_of = generalized_quadrangle_pattern
    else:
        raise SizeError(f"no stock pattern with girth {need}")
    p = next((p for p in _PATTERN_PRIMES if p + 1 >= q), None)
    if p is None:
        raise SizeError(f"no stock pattern of degree {q}")
    base = base_of(p)
    return peel_matchings(base, base.degree - q, seed=seed)


# ---------------------------------------------------------------------------
# Absorber types and verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Absorber:
    """Root tuple plus the two matchings whose union is the edge set."""

    roots: tuple[int, ...]
    covering: Matching
    noncovering: Matching

    @cached_property
    def vertices(self) -> frozenset[int]:
        return self.covering.covered | self.noncovering.covered

    @property
    def order(self) -> int:
        return len(self.vertices) - len(self.roots)

    @property
    def k(self) -> int:
        return len(self.covering.edges[0]) if self.covering.edges else 0

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.covering.edges) + tuple(self.noncovering.edges)


@dataclass(frozen=True)
class RAbsorber(Absorber):
    """An absorber whose root tuple has r*k entries instead of k."""

    r: int = 1


def _absorber_check(A: Absorber, host: Hypergraph | None, want_roots: int | None) -> tuple[bool, str | None]:
    if not A.covering.edges:
        return False, "covering matching is empty"
    k = host.k if host is not None else len(A.covering.edges[0])
    for e in A.edges:
        if len(e) != k:
            return False, f"edge {e} is not a {k}-set"
        if host is not None and e not in host.edge_set:
            return False, f"edge {e} is not a host edge"
    if len(set(A.roots)) != len(A.roots):
        return False, "repeated root"
    if want_roots is not None and len(A.roots) != want_roots:
        return False, f"expected {want_roots} roots, got {len(A.roots)}"
    if set(A.covering.edges) & set(A.noncovering.edges):
        return False, "an edge appears in both matchings"
    V = A.covering.covered
    if not set(A.roots) <= V:
        return False, "some root is not covered by the covering matching"
    if A.noncovering.covered != V - set(A.roots):
        return False, "noncovering matching does not cover exactly the non-roots"
    return True, None


def verify_absorber(A: Absorber, host: Hypergraph | None = None) -> tuple[bool, str | None]:
    """Check the absorber invariants, and host membership when a host is
    given. Returns (ok, reason); reason is None on success."""
    want = host.k if host is not None else (len(A.covering.edges[0]) if A.covering.edges else None)
    return _absorber_check(A, host, want)


def verify_r_absorber(A: Absorber, host: Hypergraph | None = None) -> tuple[bool, str | None]:
    """Like verify_absorber but with an r*k root tuple; r is taken from the
    object when present, otherwise inferred from the root count."""
    if not A.covering.edges:
        return False, "covering matching is empty"
    k = host.k if host is not None else len(A.covering.edges[0])
    if len(A.roots) == 0 or len(A.roots) % k != 0:
        return False, f"root count {len(A.roots)} is not a positive multiple of {k}"
    r = getattr(A, "r", len(A.roots) // k)
    if r * k != len(A.roots):
        return False, f"r={r} disagrees with {len(A.roots)} roots"
    return _absorber_check(A, host, r * k)


def is_k_sparse(A: Absorber, K: int) -> bool:
    """Whether the absorber keeps girth at least K even after the root tuple
    is added as one extra edge. A root tuple duplicating an existing edge
    counts as a 2-cycle, so the trivial absorber is never sparse for K >= 3."""
    if len(set(A.roots)) != len(A.roots):
        raise SizeError("roots must be distinct")
    extra = tuple(sorted(A.roots))
    return berge_girth_of(list(A.edges) + [extra]) >= K


# ---------------------------------------------------------------------------
# Bounded exact search for rooted absorbers
# ---------------------------------------------------------------------------

class _BudgetStop(Exception):
    pass


def _pm_on_subset(
    G: Hypergraph,
    verts: Sequence[int],
    banned: frozenset[tuple[int, ...]],
    spend,
) -> list[tuple[int, ...]] | None:
    """Perfect matching on an exact vertex subset using only edges of G that
    lie inside it, skipping `banned` edges. Returns None when impossible."""
    vset = frozenset(verts)
    if len(vset) % G.k != 0:
        return None
    if not vset:
        return []
    inside: dict[int, list[tuple[int, ...]]] = {v: [] for v in verts}
    seen = set()
    for v in verts:
        for i in G.incident[v]:
            e = G.edges[i]
            if e in seen or e in banned:
                continue
            seen.add(e)
            if vset.issuperset(e):
                for u in e:
                    inside[u].append(e)

    chosen: list[tuple[int, ...]] = []
    covered: set[int] = set()

    def rec() -> bool:
        if len(covered) == len(vset):
            return True
        pivot = min(v for v in vset if v not in covered)
        for e in inside[pivot]:
            if covered.isdisjoint(e):
                spend()
                chosen.append(e)
                covered.update(e)
                if rec():
                    return True
                chosen.pop()
                covered.difference_update(e)
        return False

    return chosen if rec() else None


def find_rooted_absorber(
    G: Hypergraph,
    roots: Sequence[int],
    Q: int,
    forbidden: Iterable[int] = (),
    require_sparse: int | None = None,
    budget: int | None = None,
    min_order: int = 0,
) -> Absorber:
    """Exact search for an absorber of order at most Q on the given roots.

    Orders are tried from small to large (so the first hit has minimum
    order; pass min_order to skip the degenerate low orders). Within an
    order, covering matchings extending the roots are enumerated first,
    since the roots are the tight constraint, and each complete covering
    candidate is finished by a perfect-matching search on its non-root
    vertices. All candidate edges avoid `forbidden`.

    Raises NotFound("exhausted") when the whole space is empty and
    NotFound("budget") when the node budget runs out first.
    """
    k = G.k
    roots = tuple(roots)
    if len(roots) != k or len(set(roots)) != k:
        raise SizeError(f"roots must be {k} distinct vertices")
    if any(not 0 <= x < G.n for x in roots):
        raise SizeError("root out of range")
    forb = frozenset(forbidden)
    if forb.intersection(roots):
        raise SizeError("roots overlap the forbidden set")
    root_set = frozenset(roots)

    nodes = 0

    def spend():
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise _BudgetStop

    ok_idx = [i for i, e in enumerate(G.edges) if forb.isdisjoint(e)]
    ok_pos = {i: pos for pos, i in enumerate(ok_idx)}

    def covering_candidates(chosen: list[int], covered: set[int]):
        """Yield indices (into G.edges) extending the partial covering."""
        missing = [x for x in roots if x not in covered]
        if missing:
            pivot = min(missing)
            for i in G.incident[pivot]:
                if i in ok_pos and covered.isdisjoint(G.edges[i]):
                    yield i
        else:
            start = 0
            for j in reversed(chosen):
                if root_set.isdisjoint(G.edges[j]):
                    start = ok_pos[j] + 1
                    break
            for pos in range(start, len(ok_idx)):
                i = ok_idx[pos]
                if covered.isdisjoint(G.edges[i]):
                    yield i

    def search(order: int) -> Absorber | None:
        a = order // k + 1

        def rec(chosen: list[int], covered: set[int]) -> Absorber | None:
            if len(chosen) == a:
                if not root_set <= covered:
                    return None
                cov_edges = [G.edges[i] for i in chosen]
                nonroots = sorted(covered - root_set)
                pm = _pm_on_subset(G, nonroots, frozenset(cov_edges), spend)
                if pm is None:
                    return None
                A = Absorber(roots, Matching.from_edges(cov_edges), Matching.from_edges(pm))
                ok, reason = verify_absorber(A, G)
                assert ok, reason
                if require_sparse is not None and not is_k_sparse(A, require_sparse):
                    return None
                return A
            for i in covering_candidates(chosen, covered):
                spend()
                e = G.edges[i]
                chosen.append(i)
                covered.update(e)
                got = rec(chosen, covered)
                if got is not None:
                    return got
                chosen.pop()
                covered.difference_update(e)
            return None

        return rec([], set())

    lo = max(0, min_order)
    try:
        for order in range(lo, Q + 1):
            if order % k:
                continue
            found = search(order)
            if found is not None:
                return found
    except _BudgetStop:
        raise NotFound(
            f"budget of {budget} nodes exhausted searching order <= {Q}", "budget"
        ) from None
    raise NotFound(
        f"no absorber of order <= {Q} rooted at {roots}", "exhausted"
    )


# ---------------------------------------------------------------------------
# Contractible absorbers and contraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContractibleAbsorber:
    """k disjoint rooted edges glued to k-1 interior absorbers.

    rooted_edges are ordered tuples whose first entry is the root; the j-th
    interior absorber is rooted on the j-th tails of all k rooted edges (the
    j-th "column"). `assembled` is the whole thing viewed as one absorber.
    """

    roots: tuple[int, ...]
    rooted_edges: tuple[tuple[int, ...], ...]
    subabsorbers: tuple[Absorber, ...]
    assembled: Absorber


@dataclass(frozen=True)
class ContractedAbsorber:
    """Result of collapsing each rooted edge to a single vertex.

    The new graph lives on compact ids: interior vertices first (in sorted
    original order), then the k merged root vertices in rooted-edge order.
    sub_images are the k-1 interior absorbers transported to the new ids;
    each is an absorber rooted on the merged vertices, and the graph is
    exactly their union.
    """

    graph: Hypergraph
    roots: tuple[int, ...]
    vertex_map: tuple[tuple[int, int], ...]
    sub_images: tuple[Absorber, ...]


def assemble_contractible(
    roots: Sequence[int],
    rooted_edges: Sequence[Sequence[int]],
    subabsorbers: Sequence[Absorber],
    host: Hypergraph | None = None,
) -> ContractibleAbsorber:
    """Glue rooted edges and interior absorbers into one verified absorber.

    The covering matching of the assembly is the rooted edges plus the
    noncovering matchings of the interior absorbers; the noncovering
    matching is the union of their covering matchings. Shape violations
    raise ShapeError naming the broken constraint.
    """
    roots = tuple(roots)
    k = len(roots)
    if k < 2 or len(set(roots)) != k:
        raise ShapeError("roots must be at least 2 distinct vertices")
    redges = tuple(tuple(e) for e in rooted_edges)
    if len(redges) != k:
        raise ShapeError(f"need {k} rooted edges, got {len(redges)}")
    for i, e in enumerate(redges):
        if len(e) != k or len(set(e)) != k:
            raise ShapeError(f"rooted edge {i} is not a {k}-set")
        if e[0] != roots[i]:
            raise ShapeError(f"rooted edge {i} must start with root {roots[i]}")
    rooted_verts = [v for e in redges for v in e]
    if len(set(rooted_verts)) != k * k:
        raise ShapeError("rooted edges overlap")

    subs = tuple(subabsorbers)
    if len(subs) != k - 1:
        raise ShapeError(f"need {k - 1} interior absorbers, got {len(subs)}")
    claimed: set[int] = set(rooted_verts)
    for j, sub in enumerate(subs):
        column = tuple(redges[i][j + 1] for i in range(k))
        if sub.roots != column:
            raise ShapeError(
                f"interior absorber {j} must be rooted on column {column}, "
                f"got {sub.roots}"
            )
        ok, reason = verify_absorber(sub, host)
        if not ok:
            raise ShapeError(f"interior absorber {j} is invalid: {reason}")
        interior = sub.vertices - set(sub.roots)
        if claimed.intersection(interior):
            raise ShapeError(f"interior absorber {j} reuses vertices of another part")
        claimed.update(interior)

    cov = Matching.from_edges(
        list(redges) + [e for sub in subs for e in sub.noncovering.edges]
    )
    non = Matching.from_edges([e for sub in subs for e in sub.covering.edges])
    assembled = Absorber(roots, cov, non)
    ok, reason = verify_absorber(assembled, host)
    if not ok:
        raise ShapeError(f"assembly is not an absorber: {reason}")
    return ContractibleAbsorber(roots, redges, subs, assembled)


def contract_absorber(CA: ContractibleAbsorber) -> ContractedAbsorber:
    """Collapse each rooted edge to one vertex and transport the interior
    absorbers' edges to the new ids.

    Two interior edges that become identical after the collapse (possible
    only when two interior absorbers are single edges) raise ShapeError.
    """
    k = len(CA.roots)
    interiors = sorted(
        v for sub in CA.subabsorbers for v in sub.vertices - set(sub.roots)
    )
    vmap: dict[int, int] = {v: i for i, v in enumerate(interiors)}
    m = len(interiors)
    for i, e in enumerate(CA.rooted_edges):
        for v in e:
            vmap[v] = m + i
    new_roots = tuple(range(m, m + k))

    def image(edge: tuple[int, ...]) -> tuple[int, ...]:
        out = tuple(sorted(vmap[v] for v in edge))
        if len(set(out)) != len(edge):
            raise ShapeError(f"edge {edge} collapses onto itself")
        return out

    all_images: list[tuple[int, ...]] = []
    sub_images: list[Absorber] = []
    for sub in CA.subabsorbers:
        cov = Matching.from_edges(image(e) for e in sub.covering.edges)
        non = Matching.from_edges(image(e) for e in sub.noncovering.edges)
        sub_images.append(Absorber(new_roots, cov, non))
        all_images.extend(cov.edges)
        all_images.extend(non.edges)
    if len(set(all_images)) != len(all_images):
        raise ShapeError("contraction identifies two interior edges")

    graph = Hypergraph.from_edges(m + k, k, all_images)
    for A in sub_images:
        ok, reason = verify_absorber(A, graph)
        assert ok, f"contracted interior lost the absorber property: {reason}"
    return ContractedAbsorber(
        graph=graph,
        roots=new_roots,
        vertex_map=tuple(sorted(vmap.items())),
        sub_images=tuple(sub_images),
    )


_PARTITION_CAP = 20


def admits_absorber_partition(H: Hypergraph, roots: Sequence[int]) -> bool:
    """Whether the whole edge set of H splits into a matching covering every
    supported vertex and a matching covering everything except `roots`.

    This is the empirical probe applied to contracted absorbers. Edge
    counting settles most cases: a split needs exactly (2v - |roots|)/k
    edges, and a contracted absorber carries k-2 more than that, so the
    probe reports True for k=2 and False for k >= 3.
    """
    roots = tuple(roots)
    V = H.support()
    if not set(roots) <= V:
        return False
    v = len(V)
    rk = len(roots)
    if v % H.k or (v - rk) % H.k:
        return False
    if H.edge_count() != (2 * v - rk) // H.k:
        return False
    if H.edge_count() > _PARTITION_CAP:
        raise CapacityError(
            f"partition probe limited to {_PARTITION_CAP} edges, got {H.edge_count()}"
        )
    need_cov = v // H.k
    nonroots = V - set(roots)
    for cov in combinations(H.edges, need_cov):
        cv = [u for e in cov for u in e]
        if len(set(cv)) != len(cv) or set(cv) != V:
            continue
        rest = [e for e in H.edges if e not in set(cov)]
        rv = [u for e in rest for u in e]
        if len(set(rv)) == len(rv) and set(rv) == nonroots:
            return True
    return False


# ---------------------------------------------------------------------------
# Pattern-driven sparse r-absorbers
# ---------------------------------------------------------------------------

def find_sparse_r_absorber(
    G: Hypergraph,
    roots: Sequence[int],
    K: int,
    q: int,
    trials: int = 40,
    seed: int = 0,
    forbidden: Iterable[int] = (),
) -> RAbsorber:
    """Build a K-sparse r-absorber on the given r*k roots from a high-girth
    pattern.

    The pattern's edge set splits into left-vertex stars and right-vertex
    stars (two perfect matchings of the star hypergraph). Pattern edges
    become host vertices through a random injection, except that r*k edges
    of one fixed right star map to the roots. Each left star then yields a
    block of the covering matching via a perfect matching inside its image,
    and each right star (the root-carrying one shrunk) yields a block of
    the noncovering matching. Girth transfers from the pattern because the
    injection is injective; the result is re-verified and re-checked for
    sparsity anyway.

    Trials are independent injections with per-trial derived seeds; the
    first success (lowest trial index) wins. NotFound("trials") carries
    per-trial diagnostics naming the star that failed.
    """
    k = G.k
    roots = tuple(roots)
    if q % k != 0:
        raise SizeError(f"pattern degree q={q} must be divisible by k={k}")
    rk = len(roots)
    if rk == 0 or rk % k != 0:
        raise SizeError(f"root count must be a positive multiple of {k}")
    if len(set(roots)) != rk:
        raise SizeError("roots must be distinct")
    if any(not 0 <= x < G.n for x in roots):
        raise SizeError("root out of range")
    if rk > q:
        raise SizeError(f"need at most q={q} roots, got {rk}")
    forb = frozenset(forbidden)
    if forb.intersection(roots):
        raise SizeError("roots overlap the forbidden set")
    r = rk // k

    F = pattern_for(K, q, seed=seed)
    left_star = [[] for _ in range(F.left)]
    right_star = [[] for _ in range(F.right)]
    for ei, (a, b) in enumerate(F.edges):
        left_star[a].append(ei)
        right_star[b].append(ei)
    deleted = tuple(right_star[0][:rk])
    kept = [ei for ei in range(len(F.edges)) if ei not in set(deleted)]
    pool = sorted(set(range(G.n)) - set(roots) - forb)
    if len(kept) > len(pool):
        raise SizeError(
            f"host offers {len(pool)} usable vertices but the pattern needs {len(kept)}"
        )

    def no_spend():
        pass

    failures: list[dict] = []
    for t in range(trials):
        rng = random.Random(_trial_seed(seed, t))
        placed = rng.sample(pool, len(kept))
        phi = dict(zip(kept, placed))
        for i, ei in enumerate(deleted):
            phi[ei] = roots[i]

        def star_matching(ids: Sequence[int]) -> list[tuple[int, ...]] | None:
            img = sorted(phi[ei] for ei in ids)
            if len(img) == k:
                return [tuple(img)] if G.has_edge(img) else None
            return _pm_on_subset(G, img, frozenset(), no_spend)

        cov_edges: list[tuple[int, ...]] = []
        non_edges: list[tuple[int, ...]] = []
        bad = None
        for a in range(F.left):
            got = star_matching(left_star[a])
            if got is None:
                bad = ("left", a)
                break
            cov_edges.extend(got)
        if bad is None:
            for b in range(F.right):
                ids = [ei for ei in right_star[b] if ei not in set(deleted)]
                if not ids:
                    continue
                got = star_matching(ids)
                if got is None:
                    bad = ("right", b)
                    break
                non_edges.extend(got)
        if bad is not None:
            failures.append({"trial": t, "star": bad})
            continue

        A = RAbsorber(
            roots=roots,
            covering=Matching.from_edges(cov_edges),
            noncovering=Matching.from_edges(non_edges),
            r=r,
        )
        ok, reason = verify_r_absorber(A, G)
        if ok and is_k_sparse(A, K):
            return A
        failures.append({"trial": t, "star": None, "reason": reason or "not sparse"})

    raise NotFound(
        f"no {K}-sparse {r}-absorber found in {trials} trials",
        "trials",
        details=tuple(failures),
    )


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

def absorber_record(A: Absorber, sparsity_k: int | None = None) -> dict:
    rec = {
        "roots": list(A.roots),
        "covering": [list(e) for e in A.covering.edges],
        "noncovering": [list(e) for e in A.noncovering.edges],
        "order": A.order,
        "sparsity_k": sparsity_k,
    }
    r = getattr(A, "r", None)
    if r is not None:
        rec["r"] = r
    return rec


def dumps_absorber(A: Absorber, sparsity_k: int | None = None) -> str:
    """One JSON line per absorber; keys sorted for byte-stable output."""
    return json.dumps(absorber_record(A, sparsity_k), sort_keys=True)


def parse_absorber(line: str) -> Absorber:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad absorber record: {exc}") from None
    try:
        roots = tuple(int(x) for x in rec["roots"])
        cov = Matching.from_edges(rec["covering"])
        non = Matching.from_edges(rec["noncovering"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad absorber record: {exc!r}") from None
    if "r" in rec and rec["r"] is not None:
        A: Absorber = RAbsorber(roots, cov, non, r=int(rec["r"]))
    else:
        A = Absorber(roots, cov, non)
    if "order" in rec and rec["order"] != A.order:
        raise FormatError(f"recorded order {rec['order']} but edges give {A.order}")
    return A
