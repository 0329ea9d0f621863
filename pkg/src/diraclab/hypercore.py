"""Core k-uniform hypergraph type and exact structural computations.

Vertices are integers ``0..n-1``. Edges are k-element subsets stored as sorted
tuples; the edge list itself is kept in lexicographic order, so equal
hypergraphs compare equal structurally. Performance-sensitive operations work
on per-edge integer bitmasks.

The module also provides the ``.khg`` text format (one header line, one edge
per line) used by every command-line surface in the package.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import CapacityError, FormatError, SizeError, SpecError

__all__ = [
    "Hypergraph",
    "ContractionSpec",
    "ContractionResult",
    "DensityResult",
    "degree",
    "min_d_degree",
    "induced",
    "link",
    "girth",
    "berge_girth_of",
    "is_linear",
    "k_density",
    "contract",
    "mask_of",
    "bits_of",
    "parse_khg",
    "dumps_khg",
    "read_khg",
    "write_khg",
]


def mask_of(vertices: Iterable[int]) -> int:
    """Pack an iterable of vertex ids into an integer bitmask."""
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits_of(mask: int) -> tuple[int, ...]:
    """Unpack a bitmask into a sorted tuple of vertex ids."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _canonical_edges(edges: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(e)) for e in edges))


@dataclass(frozen=True)
class Hypergraph:
    """A k-uniform hypergraph on vertices ``0..n-1``.

    Parameters
    ----------
    n : number of vertices (isolated vertices are allowed).
    k : uniformity, at least 1.
    edges : tuple of sorted k-tuples, lexicographically ordered, no duplicates.

    Use :meth:`from_edges` to build from unordered input; the raw constructor
    expects already-canonical data and validates it.
    """

    n: int
    k: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0:
            raise SizeError(f"vertex count must be nonnegative, got {self.n}")
        if self.k < 1:
            raise SizeError(f"uniformity must be at least 1, got {self.k}")
        seen = set()
        prev = None
        for e in self.edges:
            if len(e) != self.k:
                raise SizeError(f"edge {e} has size {len(e)}, expected {self.k}")
            if any(v < 0 or v >= self.n for v in e):
                raise SizeError(f"edge {e} out of range for n={self.n}")
            if any(e[i] >= e[i + 1] for i in range(len(e) - 1)):
                raise SpecError(f"edge {e} is not strictly ascending")
            if e in seen:
                raise SpecError(f"duplicate edge {e}")
            if prev is not None and e < prev:
                raise SpecError("edge list is not in lexicographic order")
            seen.add(e)
            prev = e

    @classmethod
    def from_edges(cls, n: int, k: int, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        """Canonicalize arbitrary edge input (dedup, sort) and validate."""
        canon = tuple(sorted(set(_canonical_edges(edges))))
        return cls(n, k, canon)

    @classmethod
    def complete(cls, n: int, k: int) -> "Hypergraph":
        """Every k-subset of ``0..n-1`` is an edge."""
        if k > n:
            return cls(n, k, ())
        return cls(n, k, tuple(combinations(range(n), k)))

    @classmethod
    def empty(cls, n: int, k: int) -> "Hypergraph":
        return cls(n, k, ())

    @cached_property
    def edge_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(e) for e in self.edges)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.edges)

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        """For each vertex, the indices of edges containing it."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return tuple(tuple(lst) for lst in inc)

    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, vertices: Iterable[int]) -> bool:
        return tuple(sorted(vertices)) in self.edge_set

    def support(self) -> frozenset[int]:
        """Vertices that appear in at least one edge."""
        return frozenset(v for e in self.edges for v in e)

    def add_edges(self, extra: Iterable[Iterable[int]]) -> "Hypergraph":
        return Hypergraph.from_edges(self.n, self.k, list(self.edges) + list(extra))

    def remove_vertices(self, gone: Iterable[int]) -> "Hypergraph":
        """Same vertex universe, minus every edge meeting ``gone``."""
        g = set(gone)
        kept = [e for e in self.edges if not g.intersection(e)]
        return Hypergraph(self.n, self.k, tuple(kept))


def degree(H: Hypergraph, S: Iterable[int]) -> int:
    """Number of edges containing every vertex of ``S`` (|S| <= k-1; S may be empty)."""
    s = frozenset(S)
    if len(s) > H.k - 1:
        raise SizeError(f"degree set has size {len(s)}, must be at most k-1 = {H.k - 1}")
    if any(v < 0 or v >= H.n for v in s):
        raise SizeError("degree set out of range")
    if not s:
        return len(H.edges)
    sm = mask_of(s)
    return sum(1 for em in H.edge_masks if em & sm == sm)


def min_d_degree(H: Hypergraph, d: int) -> tuple[int, tuple[int, ...]]:
    """Minimum degree over all d-subsets of the vertex set, with one argmin.

    Returns ``(value, witness)`` where ``witness`` is the lexicographically
    first d-set attaining the minimum.
    """
    if d < 1 or d > H.k - 1:
        raise SizeError(f"d must satisfy 1 <= d <= k-1, got d={d}, k={H.k}")
    if H.n < d:
        raise SizeError(f"need at least d={d} vertices, have {H.n}")
    best = None
    best_set: tuple[int, ...] = ()
    for S in combinations(range(H.n), d):
        sm = mask_of(S)
        deg = sum(1 for em in H.edge_masks if em & sm == sm)
        if best is None or deg < best:
            best, best_set = deg, S
            if best == 0:
                break
    return best, best_set


def induced(H: Hypergraph, S: Iterable[int]) -> tuple[Hypergraph, tuple[int, ...]]:
    """Subgraph induced on ``S``, relabeled to ``0..|S|-1``.

    Returns ``(graph, old_ids)`` where ``old_ids[new] = old``; the map is the
    ascending enumeration of ``S``.
    """
    old_ids = tuple(sorted(set(S)))
    if any(v < 0 or v >= H.n for v in old_ids):
        raise SizeError("induced set out of range")
    pos = {v: i for i, v in enumerate(old_ids)}
    keep = frozenset(old_ids)
    edges = [tuple(pos[v] for v in e) for e in H.edges if keep.issuperset(e)]
    return Hypergraph(len(old_ids), H.k, tuple(sorted(edges))), old_ids


def link(H: Hypergraph, S: Iterable[int]) -> Hypergraph:
    """The (k-|S|)-uniform link of ``S``: residues of edges containing S.

    Keeps the host's vertex universe, so vertices of ``S`` become isolated.
    """
    s = frozenset(S)
    if not s or len(s) > H.k - 1:
        raise SizeError(f"link set must have size 1..k-1, got {len(s)}")
    if any(v < 0 or v >= H.n for v in s):
        raise SizeError("link set out of range")
    residues = [tuple(v for v in e if v not in s) for e in H.edges if s.issubset(e)]
    return Hypergraph.from_edges(H.n, H.k - len(s), residues)


# ---------------------------------------------------------------------------
# Berge girth
# ---------------------------------------------------------------------------

def berge_girth_of(edge_sets: Sequence[Iterable[int]]) -> int | float:
    """Length of a shortest Berge cycle in an arbitrary set system.

    A Berge cycle of length l >= 2 is a sequence of l distinct edges with
    distinct connector vertices v_i in e_i ∩ e_{i+1} (cyclically). Duplicate
    members of ``edge_sets`` count as distinct edges, so any repeated edge of
    size >= 2 yields girth 2. Returns ``math.inf`` when acyclic.

    Berge cycles of length l correspond exactly to simple cycles of length 2l
    in the vertex-edge incidence graph, so this runs the textbook BFS girth
    computation on that bipartite graph and halves the result.
    """
    edges = [tuple(sorted(set(e))) for e in edge_sets]
    verts = sorted({v for e in edges for v in e})
    vid = {v: i for i, v in enumerate(verts)}
    nv, ne = len(verts), len(edges)
    total = nv + ne
    adj: list[list[int]] = [[] for _ in range(total)]
    for j, e in enumerate(edges):
        for v in e:
            adj[vid[v]].append(nv + j)
            adj[nv + j].append(vid[v])

    best = math.inf
    # Every cycle in the incidence graph passes through an edge-node, so
    # rooting BFS at edge-nodes only is enough for exactness.
    dist = [0] * total
    parent = [0] * total
    for root in range(nv, total):
        if best == 4:
            break
        for i in range(total):
            dist[i] = -1
        dist[root] = 0
        parent[root] = -1
        queue = [root]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            if 2 * dist[u] >= best:
                break
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    cand = dist[u] + dist[w] + 1
                    if cand < best:
                        best = cand
    return math.inf if best == math.inf else best // 2


def girth(H: Hypergraph) -> int | float:
    """Berge girth of the hypergraph (``math.inf`` when Berge-acyclic)."""
    return berge_girth_of(H.edges)


def is_linear(H: Hypergraph) -> bool:
    """True when no two edges share two or more vertices (girth > 2)."""
    masks = H.edge_masks
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if (masks[i] & masks[j]).bit_count() >= 2:
                return False
    return True


# ---------------------------------------------------------------------------
# k-density: max over edge subsets with >k vertices of (e'-1)/(v'-k)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityResult:
    """Exact k-density value with one maximizing edge subset."""

    value: Fraction
    witness: tuple[tuple[int, ...], ...] | None
    method: str


_ENUM_BUDGET = 24


class _Dinic:
    """Small integer max-flow solver (enough for the density networks).

    The project-selection networks built below have every s-t path of length
    three (source, edge-node, vertex-node, sink), so the recursive blocking
    flow never goes deep.
    """

    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, c: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def _bfs(self, s: int, t: int) -> bool:
        self._level = [-1] * self.n
        self._level[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for a in self.adj[u]:
                v = self.to[a]
                if self.cap[a] > 0 and self._level[v] < 0:
                    self._level[v] = self._level[u] + 1
                    queue.append(v)
        return self._level[t] >= 0

    def _dfs(self, u: int, t: int, f: int) -> int:
        if u == t:
            return f
        while self._it[u] < len(self.adj[u]):
            a = self.adj[u][self._it[u]]
            v = self.to[a]
            if self.cap[a] > 0 and self._level[v] == self._level[u] + 1:
                d = self._dfs(v, t, min(f, self.cap[a]))
                if d > 0:
                    self.cap[a] -= d
                    self.cap[a ^ 1] += d
                    return d
            self._it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while self._bfs(s, t):
            self._it = [0] * self.n
            while True:
                f = self._dfs(s, t, 1 << 62)
                if f == 0:
                    break
                flow += f
        return flow

    def source_side(self, s: int) -> set[int]:
        """Nodes reachable from ``s`` in the residual graph (call after max_flow)."""
        seen = {s}
        queue = [s]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for a in self.adj[u]:
                v = self.to[a]
                if self.cap[a] > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def _density_enumerate(H: Hypergraph) -> DensityResult:
    masks = H.edge_masks
    m = len(masks)
    if m > _ENUM_BUDGET:
        raise CapacityError(
            f"exhaustive k-density enumeration limited to {_ENUM_BUDGET} edges, got {m}"
        )
    k = H.k
    best = Fraction(0)
    best_edges: tuple[int, ...] = ()

    chosen: list[int] = []

    def rec(i: int, cnt: int, um: int) -> None:
        nonlocal best, best_edges
        if cnt >= 2:
            val = Fraction(cnt - 1, um.bit_count() - k)
            if val > best:
                best = val
                best_edges = tuple(chosen)
        if i == m:
            return
        chosen.append(i)
        rec(i + 1, cnt + 1, um | masks[i])
        chosen.pop()
        rec(i + 1, cnt, um)

    rec(0, 0, 0)
    witness = tuple(H.edges[i] for i in best_edges) if best_edges else None
    return DensityResult(best, witness, "enumerate")


def _density_parametric(H: Hypergraph) -> DensityResult:
    k = H.k
    edges = H.edges
    m = len(edges)
    support = sorted(H.support())
    vpos = {v: i for i, v in enumerate(support)}
    nv = len(support)

    def solve(lam: Fraction, anchor: int) -> tuple[int, list[int]]:
        """Max of q*e' - p*v' over edge subsets containing ``anchor``.

        Project-selection cut: rejecting a non-anchor edge cuts its q-arc,
        keeping an edge forces its vertices' p-arcs into the cut, and the
        anchor's infinite arc keeps it selected. The cut value is therefore
        q*(m - e') + p*v', so the maximum equals q*m - mincut. Returns the
        scaled value and the selected edge indices (residual source side,
        which is the minimal maximizer).
        """
        p, q = lam.numerator, lam.denominator
        inf = q * m + p * nv + 1
        s, t = m + nv, m + nv + 1
        net = _Dinic(m + nv + 2)
        for i in range(m):
            net.add(s, i, inf if i == anchor else q)
            for v in edges[i]:
                net.add(i, m + vpos[v], inf)
        for j in range(nv):
            net.add(m + j, t, p)
        cut = net.max_flow(s, t)
        side = net.source_side(s)
        sel = [i for i in range(m) if i in side]
        return q * m - cut, sel

    if m < 2:
        return DensityResult(Fraction(0), None, "parametric")

    full_union = mask_of(v for e in edges for v in e)
    lam = Fraction(m - 1, full_union.bit_count() - k)
    witness_idx = list(range(m))
    while True:
        improved = False
        for a in range(m):
            p, q = lam.numerator, lam.denominator
            value, sel = solve(lam, a)
            # improving iff (e'-1) - lam*(v'-k) > 0, scaled by q:
            if value > q - p * k:
                um = 0
                for i in sel:
                    um |= H.edge_masks[i]
                new = Fraction(len(sel) - 1, um.bit_count() - k)
                if new <= lam:
                    raise AssertionError("parametric density step failed to improve")
                lam = new
                witness_idx = sel
                improved = True
                break
        if not improved:
            break
    witness = tuple(edges[i] for i in sorted(witness_idx))
    return DensityResult(lam, witness, "parametric")


def k_density(H: Hypergraph, method: str = "auto") -> DensityResult:
    """Exact maximum of ``(e(H')-1)/(v(H')-k)`` over subgraphs with v(H') > k.

    Returns 0 (witness ``None``) when no qualifying subgraph exists, which
    happens exactly when the hypergraph has fewer than two edges. The value is
    an exact :class:`~fractions.Fraction`.

    ``method="enumerate"`` checks every edge subset (independent oracle,
    capped at 24 edges, :class:`CapacityError` above). ``method="parametric"``
    solves the same maximization by ratio iteration over min-cuts and has no
    size cap. ``"auto"`` uses the parametric route.
    """
    if method not in ("auto", "enumerate", "parametric"):
        raise SpecError(f"unknown k_density method {method!r}")
    if len(H.edges) < 2:
        return DensityResult(Fraction(0), None, method if method != "auto" else "parametric")
    if method == "enumerate":
        return _density_enumerate(H)
    return _density_parametric(H)


# ---------------------------------------------------------------------------
# Contraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContractionSpec:
    """Disjoint ordered (k-1)-tuples plus k-1 disjoint vertex parts.

    ``tuples[t][j-1]`` is the j-th coordinate of tuple t; coordinate j pairs
    with part ``parts[j-1]``. Tuples, parts, and their unions must be pairwise
    disjoint vertex sets.
    """

    tuples: tuple[tuple[int, ...], ...]
    parts: tuple[tuple[int, ...], ...]

    def validate(self, H: Hypergraph) -> None:
        km1 = H.k - 1
        if len(self.parts) != km1:
            raise SpecError(f"need k-1={km1} parts, got {len(self.parts)}")
        seen: set[int] = set()
        for tup in self.tuples:
            if len(tup) != km1:
                raise SpecError(f"tuple {tup} must have k-1={km1} coordinates")
            for v in tup:
                if v < 0 or v >= H.n:
                    raise SpecError(f"tuple vertex {v} out of range")
                if v in seen:
                    raise SpecError(f"vertex {v} used twice in the contraction spec")
                seen.add(v)
        for part in self.parts:
            for v in part:
                if v < 0 or v >= H.n:
                    raise SpecError(f"part vertex {v} out of range")
                if v in seen:
                    raise SpecError(f"vertex {v} used twice in the contraction spec")
                seen.add(v)


@dataclass(frozen=True)
class ContractionResult:
    """Contracted hypergraph with the maps needed to trace edges back."""

    graph: Hypergraph
    vertex_map: dict[int, int]
    merged: tuple[int, ...]
    edge_preimage: dict[tuple[int, ...], tuple[int, ...]]


def contract(H: Hypergraph, spec: ContractionSpec) -> ContractionResult:
    """Contract each spec tuple to a single new vertex over the given parts.

    The result contains (a) every edge of ``H`` lying inside the union of the
    parts, and (b) for each tuple t with new vertex w_t, each coordinate j and
    each f with f ∪ {tuples[t][j-1]} an edge of ``H`` and f inside part j, the
    edge f ∪ {w_t}. Each contracted edge has exactly one preimage edge in
    ``H``; the returned ``edge_preimage`` is that bijection onto its image.
    """
    spec.validate(H)
    U_all: list[int] = sorted(v for part in spec.parts for v in part)
    newid = {v: i for i, v in enumerate(U_all)}
    merged = tuple(range(len(U_all), len(U_all) + len(spec.tuples)))
    part_sets = [frozenset(p) for p in spec.parts]

    edges: dict[tuple[int, ...], tuple[int, ...]] = {}
    u_union = frozenset(U_all)
    for e in H.edges:
        if u_union.issuperset(e):
            new_e = tuple(sorted(newid[v] for v in e))
            edges[new_e] = e
    for t, tup in enumerate(spec.tuples):
        w = merged[t]
        for j in range(H.k - 1):
            vj = tup[j]
            pj = part_sets[j]
            for e in H.edges:
                if vj in e:
                    rest = [v for v in e if v != vj]
                    if pj.issuperset(rest):
                        new_e = tuple(sorted([newid[v] for v in rest] + [w]))
                        if new_e in edges:
                            raise SpecError(
                                f"contracted edge {new_e} arises twice; spec parts overlap"
                            )
                        edges[new_e] = e

    graph = Hypergraph(len(U_all) + len(spec.tuples), H.k, tuple(sorted(edges)))
    return ContractionResult(
        graph=graph,
        vertex_map={v: newid[v] for v in U_all},
        merged=merged,
        edge_preimage=dict(sorted(edges.items())),
    )


# ---------------------------------------------------------------------------
# .khg text format
# ---------------------------------------------------------------------------

def parse_khg(text: str) -> Hypergraph:
    """Parse the ``khg 1 <k> <n> <m>`` text format.

    Blank lines and ``#`` comments are ignored. Edge lines must hold k
    strictly ascending vertex ids; the edge list must be lexicographically
    sorted with no duplicates. Raises :class:`FormatError` with a line number
    otherwise.
    """
    header: tuple[int, int, int] | None = None
    edges: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 5 or parts[0] != "khg" or parts[1] != "1":
                raise FormatError(f"line {lineno}: expected header 'khg 1 <k> <n> <m>'")
            try:
                k, n, m = int(parts[2]), int(parts[3]), int(parts[4])
            except ValueError:
                raise FormatError(f"line {lineno}: non-integer header field") from None
            if k < 2:
                raise FormatError(f"line {lineno}: uniformity must be at least 2")
            header = (k, n, m)
            continue
        k, n, m = header
        try:
            ids = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer vertex id") from None
        if len(ids) != k:
            raise FormatError(f"line {lineno}: expected {k} vertex ids, got {len(ids)}")
        if any(ids[i] >= ids[i + 1] for i in range(len(ids) - 1)):
            raise FormatError(f"line {lineno}: vertex ids must be strictly ascending")
        if any(v < 0 or v >= n for v in ids):
            raise FormatError(f"line {lineno}: vertex id out of range 0..{n - 1}")
        if edges:
            if ids == edges[-1]:
                raise FormatError(f"line {lineno}: duplicate edge")
            if ids < edges[-1]:
                raise FormatError(f"line {lineno}: edges not in lexicographic order")
        edges.append(ids)
    if header is None:
        raise FormatError("missing header line")
    k, n, m = header
    if len(edges) != m:
        raise FormatError(f"header declares {m} edges, file has {len(edges)}")
    return Hypergraph(n, k, tuple(edges))


def dumps_khg(H: Hypergraph, comment: str | None = None) -> str:
    """Serialize to canonical ``.khg`` text (sorted edges, one per line)."""
    if H.k < 2:
        raise FormatError("khg files require uniformity at least 2")
    out = []
    if comment:
        for line in comment.splitlines():
            out.append(f"# {line}")
    out.append(f"khg 1 {H.k} {H.n} {len(H.edges)}")
    for e in H.edges:
        out.append(" ".join(str(v) for v in e))
    return "\n".join(out) + "\n"


def read_khg(path) -> Hypergraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_khg(fh.read())


def write_khg(H: Hypergraph, path, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_khg(H, comment=comment))
