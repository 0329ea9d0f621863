"""Matching engines: exact perfect-matching search, maximum matchings, the
set-family matching condition with disjoint representatives, matching a small
set into a flexible set, and the block-partition almost-perfect procedure.

All searches are deterministic: branching follows canonical (lexicographic)
orders, and randomness only enters through explicit seeds. Budgets count
search nodes, never wall-clock time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import CapacityError, NotFound, ShapeError, SizeError, SpecError
from .hypercore import Hypergraph, induced, mask_of

__all__ = [
    "Matching",
    "MatchResult",
    "MaxMatchingResult",
    "AHResult",
    "BlockReport",
    "find_perfect_matching",
    "max_matching",
    "aharoni_haxell_holds",
    "find_disjoint_representatives",
    "match_into_flexible",
    "blockwise_almost_perfect",
    "verify_matching",
    "parse_matching",
    "dumps_matching",
    "read_matching",
    "write_matching",
]


@dataclass(frozen=True)
class Matching:
    """A set of pairwise vertex-disjoint edges, stored in lexicographic order."""

    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        prev = None
        for e in self.edges:
            if prev is not None and e < prev:
                raise ShapeError("matching edges not in lexicographic order")
            prev = e
            for v in e:
                if v in seen:
                    raise ShapeError(f"vertex {v} covered by two matching edges")
                seen.add(v)

    @classmethod
    def from_edges(cls, edges: Iterable[Iterable[int]]) -> "Matching":
        return cls(tuple(sorted(tuple(sorted(e)) for e in edges)))

    @cached_property
    def covered(self) -> frozenset[int]:
        return frozenset(v for e in self.edges for v in e)

    @property
    def size(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class MatchResult:
    """Outcome of a perfect-matching search.

    ``matching`` is the best matching found regardless of status; ``status``
    says how to read it: "perfect" covers everything, "none" means the whole
    search space was exhausted (a proof that no perfect matching exists), and
    "partial" means the node budget ran out first.
    """

    status: str
    matching: Matching
    uncovered: tuple[int, ...]
    nodes_explored: int


@dataclass(frozen=True)
class MaxMatchingResult:
    matching: Matching
    optimal: bool
    nodes_explored: int


@dataclass(frozen=True)
class AHResult:
    """Outcome of the set-family matching condition check.

    ``holds`` is the verdict; ``violating`` names the first index set whose
    union lacks the required matching (None when the condition holds).
    ``mode`` records whether every subset was checked or only a sample.
    """

    holds: bool
    violating: tuple[int, ...] | None
    mode: str
    subsets_checked: int


@dataclass(frozen=True)
class BlockReport:
    matching: Matching
    uncovered: tuple[int, ...]
    failed_blocks: tuple[tuple[int, ...], ...]
    blocks_total: int


class _BudgetHit(Exception):
    pass


def find_perfect_matching(H: Hypergraph, budget: int | None = None) -> MatchResult:
    """Exact perfect-matching search with fail-first branching.

    Branches on the uncovered vertex with the fewest available edges (ties
    broken by lowest id), trying its edges in canonical order. With no budget
    the search is exhaustive, so status "none" is a proof of non-existence.
    """
    n, k = H.n, H.k
    if n == 0:
        return MatchResult("perfect", Matching(()), (), 0)
    if n % k != 0:
        return MatchResult("none", Matching(()), tuple(range(n)), 0)

    masks = H.edge_masks
    incident = H.incident
    full = (1 << n) - 1
    nodes = 0
    chosen: list[int] = []
    best: list[int] = []

    def rec(covered: int) -> bool:
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise _BudgetHit
        if covered == full:
            return True
        pick: Sequence[int] | None = None
        for v in range(n):
            if covered >> v & 1:
                continue
            avail = [i for i in incident[v] if not masks[i] & covered]
            if pick is None or len(avail) < len(pick):
                pick = avail
                if not avail:
                    return False
        for i in pick:
            chosen.append(i)
            if len(chosen) > len(best):
                best[:] = chosen
            if rec(covered | masks[i]):
                return True
            chosen.pop()
        return False

    try:
        found = rec(0)
    except _BudgetHit:
        m = Matching.from_edges(H.edges[i] for i in best)
        unc = tuple(sorted(set(range(n)) - m.covered))
        return MatchResult("partial", m, unc, nodes)
    if found:
        m = Matching.from_edges(H.edges[i] for i in chosen)
        return MatchResult("perfect", m, (), nodes)
    m = Matching.from_edges(H.edges[i] for i in best)
    unc = tuple(sorted(set(range(n)) - m.covered))
    return MatchResult("none", m, unc, nodes)


def _max_matching_masks(
    masks: Sequence[int],
    nv: int,
    target: int | None = None,
    budget: int | None = None,
) -> tuple[list[int], bool, int]:
    """Branch-and-bound maximum matching over bitmask edges.

    Branches on the lowest coverable vertex: either one of its available
    edges is used, or the vertex is banned (left uncovered for good). Returns
    (best edge-index list, optimal flag, nodes). With ``target`` set, stops as
    soon as a matching of that size appears (the flag then only means the
    search was not cut short by ``budget``).
    """
    if not masks:
        return [], True, 0
    k = masks[0].bit_count()
    incident: list[list[int]] = [[] for _ in range(nv)]
    for i, mk in enumerate(masks):
        m = mk
        while m:
            low = m & -m
            incident[low.bit_length() - 1].append(i)
            m ^= low
    idle = mask_of(v for v in range(nv) if not incident[v])

    best: list[int] = []
    chosen: list[int] = []
    nodes = 0
    hit = False

    def rec(covered: int, banned: int) -> bool:
        nonlocal nodes, hit
        nodes += 1
        if budget is not None and nodes > budget:
            hit = True
            return True
        if len(chosen) > len(best):
            best[:] = chosen
            if target is not None and len(best) >= target:
                return True
        blocked = covered | banned
        active = nv - blocked.bit_count()
        want = len(best) + 1 if target is None else min(target, len(best) + 1)
        if len(chosen) + active // k < want:
            return False
        free = ~blocked & ((1 << nv) - 1)
        if not free:
            return False
        v = (free & -free).bit_length() - 1
        for i in incident[v]:
            if not masks[i] & blocked:
                chosen.append(i)
                if rec(covered | masks[i], banned):
                    return True
                chosen.pop()
        return rec(covered, banned | (1 << v))

    rec(0, idle)
    return best, not hit, nodes


def max_matching(H: Hypergraph, mode: str = "exact", budget: int | None = None) -> MaxMatchingResult:
    """Maximum (exact) or maximal (greedy) matching.

    Greedy scans edges in canonical order and keeps whatever fits, so the
    result is maximal but not necessarily maximum. Exact mode is
    branch-and-bound; if the budget runs out it returns the best matching
    found with ``optimal`` False.
    """
    if mode not in ("exact", "greedy"):
        raise SpecError(f"unknown max_matching mode {mode!r}")
    if mode == "greedy":
        covered = 0
        out = []
        for i, mk in enumerate(H.edge_masks):
            if not mk & covered:
                covered |= mk
                out.append(H.edges[i])
        return MaxMatchingResult(Matching.from_edges(out), True, len(H.edges))
    sel, optimal, nodes = _max_matching_masks(H.edge_masks, H.n, budget=budget)
    return MaxMatchingResult(
        Matching.from_edges(H.edges[i] for i in sel), optimal, nodes
    )


_AH_EXACT_CAP = 12


def aharoni_haxell_holds(
    links: Sequence[Hypergraph],
    kprime: int | None = None,
    mode: str = "exact",
    samples: int = 200,
    seed: int = 0,
    budget: int | None = None,
) -> AHResult:
    """Check the matching condition that guarantees disjoint representatives.

    The condition: for every nonempty index set I, the union of the chosen
    link graphs must contain a matching larger than k' * (|I| - 1). Exact mode
    sweeps all nonempty subsets in (size, lex) order and reports the first
    violator; it is capped at 12 families. Sampled mode checks ``samples``
    random nonempty subsets and is evidence, not proof.
    """
    t = len(links)
    if t == 0:
        return AHResult(True, None, mode, 0)
    k = links[0].k if kprime is None else kprime
    n = max(L.n for L in links)
    for L in links:
        if L.k != k:
            raise SizeError(f"family uniformity mismatch: {L.k} != {k}")

    def union_masks(I: Sequence[int]) -> list[int]:
        edge_set = set()
        for i in I:
            edge_set.update(links[i].edges)
        return [mask_of(e) for e in sorted(edge_set)]

    def satisfied(I: Sequence[int]) -> bool:
        need = k * (len(I) - 1) + 1
        masks = union_masks(I)
        if len(masks) < need:
            return False
        sel, _, _ = _max_matching_masks(masks, n, target=need, budget=budget)
        return len(sel) >= need

    if mode == "exact":
        if t > _AH_EXACT_CAP:
            raise CapacityError(
                f"exact subset sweep limited to {_AH_EXACT_CAP} families, got {t}"
            )
        checked = 0
        for size in range(1, t + 1):
            for I in combinations(range(t), size):
                checked += 1
                if not satisfied(I):
                    return AHResult(False, I, "exact", checked)
        return AHResult(True, None, "exact", checked)
    if mode == "sampled":
        rng = random.Random(seed)
        for j in range(samples):
            I = tuple(sorted(rng.sample(range(t), rng.randint(1, t))))
            if not satisfied(I):
                return AHResult(False, I, "sampled", j + 1)
        return AHResult(True, None, "sampled", samples)
    raise SpecError(f"unknown mode {mode!r}")


def find_disjoint_representatives(
    links: Sequence[Hypergraph], budget: int | None = None
) -> tuple[tuple[int, ...], ...]:
    """One edge per family, pairwise vertex-disjoint, by backtracking.

    Families are processed in order; candidate edges in canonical order, so
    the result is deterministic. Raises NotFound("exhausted") when the full
    search space has no system, NotFound("budget") when cut short.
    """
    t = len(links)
    per_family = [[(e, mask_of(e)) for e in L.edges] for L in links]
    chosen: list[tuple[int, ...]] = []
    nodes = 0

    def rec(i: int, covered: int) -> bool:
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise _BudgetHit
        if i == t:
            return True
        for e, mk in per_family[i]:
            if not mk & covered:
                chosen.append(e)
                if rec(i + 1, covered | mk):
                    return True
                chosen.pop()
        return False

    try:
        if rec(0, 0):
            return tuple(chosen)
    except _BudgetHit:
        raise NotFound(
            f"representative search stopped by budget after {nodes} nodes",
            reason="budget",
        ) from None
    raise NotFound("no system of disjoint representatives exists", reason="exhausted")


def match_into_flexible(
    G: Hypergraph, W: Iterable[int], Z: Iterable[int], budget: int | None = None
) -> Matching:
    """Match every vertex of W along edges whose other k-1 vertices lie in Z.

    Builds, for each w, the family of (k-1)-sets f with f ∪ {w} an edge of G
    and f ⊆ Z, then searches for pairwise-disjoint representatives. The
    resulting matching has exactly |W| edges, each with one vertex in W.
    """
    ws = sorted(set(W))
    zs = frozenset(Z)
    if zs.intersection(ws):
        raise SizeError("W and Z must be disjoint")
    links = []
    for w in ws:
        residues = [
            tuple(v for v in e if v != w)
            for e in G.edges
            if w in e and zs.issuperset(v for v in e if v != w)
        ]
        links.append(Hypergraph.from_edges(G.n, G.k - 1, residues))
    reps = find_disjoint_representatives(links, budget=budget)
    return Matching.from_edges(
        tuple(sorted((w,) + f)) for w, f in zip(ws, reps)
    )


def blockwise_almost_perfect(
    H: Hypergraph, Q: int, seed: int, budget_per_block: int | None = None
) -> BlockReport:
    """Random block partition, one exact PM attempt per block.

    Shuffles the vertices with the given seed, cuts off floor(n/Q) blocks of
    size Q (the remainder stays uncovered), and solves each block
    independently. Blocks whose search fails are reported, never raised.
    """
    if Q % H.k != 0:
        raise SizeError(f"block size {Q} must be divisible by k={H.k}")
    if Q > H.n:
        raise SizeError(f"block size {Q} exceeds vertex count {H.n}")
    rng = random.Random(seed)
    order = list(range(H.n))
    rng.shuffle(order)
    nblocks = H.n // Q
    uncovered = set(order[nblocks * Q :])
    failed: list[tuple[int, ...]] = []
    edges: list[tuple[int, ...]] = []
    for b in range(nblocks):
        block = sorted(order[b * Q : (b + 1) * Q])
        sub, old = induced(H, block)
        res = find_perfect_matching(sub, budget=budget_per_block)
        if res.status == "perfect":
            edges.extend(tuple(sorted(old[v] for v in e)) for e in res.matching.edges)
        else:
            failed.append(tuple(block))
            uncovered.update(block)
    return BlockReport(
        matching=Matching.from_edges(edges),
        uncovered=tuple(sorted(uncovered)),
        failed_blocks=tuple(failed),
        blocks_total=nblocks,
    )


def verify_matching(
    H: Hypergraph, matching, require_perfect: bool = False
) -> tuple[bool, str | None]:
    """Independent matching checker, deliberately free of bitmask machinery.

    Accepts a Matching or any iterable of edges. Checks edge membership in
    the host, pairwise disjointness, and (optionally) full coverage.
    """
    edges = list(matching.edges) if isinstance(matching, Matching) else [
        tuple(sorted(e)) for e in matching
    ]
    host_edges = set(H.edges)
    seen: set[int] = set()
    for e in edges:
        if e not in host_edges:
            return False, f"edge {e} is not an edge of the host"
        for v in e:
            if v in seen:
                return False, f"vertex {v} covered twice"
            seen.add(v)
    if require_perfect and seen != set(range(H.n)):
        missing = sorted(set(range(H.n)) - seen)
        return False, f"vertices not covered: {missing[:8]}"
    return True, None


# ---------------------------------------------------------------------------
# matching text format: one edge per line, ascending ids
# ---------------------------------------------------------------------------

def parse_matching(text: str) -> Matching:
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            ids = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise ShapeError(f"line {lineno}: non-integer vertex id") from None
        if any(ids[i] >= ids[i + 1] for i in range(len(ids) - 1)):
            raise ShapeError(f"line {lineno}: vertex ids must be strictly ascending")
        edges.append(ids)
    return Matching.from_edges(edges)


def dumps_matching(m: Matching) -> str:
    return "".join(" ".join(str(v) for v in e) + "\n" for e in m.edges)


def read_matching(path) -> Matching:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matching(fh.read())


def write_matching(m: Matching, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_matching(m))
