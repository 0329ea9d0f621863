from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diraclab.errors import CapacityError, FormatError, SizeError, SpecError
from diraclab.hypercore import (
    ContractionSpec,
    Hypergraph,
    berge_girth_of,
    contract,
    degree,
    dumps_khg,
    girth,
    induced,
    is_linear,
    k_density,
    link,
    min_d_degree,
    parse_khg,
)

from conftest import small_hypergraph

# ---------------------------------------------------------------------------
# Oracles. Deliberately dumb and independent of the implementations they check.
# ---------------------------------------------------------------------------


def oracle_degree(H: Hypergraph, S) -> int:
    s = set(S)
    return sum(1 for e in H.edges if s.issubset(e))


def oracle_berge_girth(edge_sets):
    """Shortest Berge cycle by exhaustive edge-sequence search."""
    edges = [frozenset(e) for e in edge_sets]
    m = len(edges)
    best = [math.inf]

    def extend(seq, used_verts, first):
        length = len(seq)
        if length >= best[0]:
            return
        if length >= 2:
            for v in edges[seq[-1]] & edges[first]:
                if v not in used_verts:
                    best[0] = length
                    return
        for j in range(first + 1, m):
            if j in seq:
                continue
            for v in edges[seq[-1]] & edges[j]:
                if v not in used_verts:
                    extend(seq + [j], used_verts | {v}, first)

    # rotate every cycle so its minimum-index edge comes first
    for i in range(m):
        extend([i], set(), i)
    return best[0]


def oracle_k_density(H: Hypergraph) -> Fraction:
    best = Fraction(0)
    m = len(H.edges)
    for r in range(2, m + 1):
        for sub in combinations(range(m), r):
            verts = set()
            for i in sub:
                verts.update(H.edges[i])
            best = max(best, Fraction(r - 1, len(verts) - H.k))
    return best


# ---------------------------------------------------------------------------
# Construction and degrees
# ---------------------------------------------------------------------------


def test_from_edges_canonicalizes():
    H = Hypergraph.from_edges(5, 3, [(2, 1, 0), (0, 1, 2), (4, 3, 2)])
    assert H.edges == ((0, 1, 2), (2, 3, 4))


def test_raw_constructor_rejects_disorder():
    with pytest.raises(SpecError):
        Hypergraph(5, 3, ((2, 3, 4), (0, 1, 2)))
    with pytest.raises(SpecError):
        Hypergraph(5, 3, ((0, 2, 1),))
    with pytest.raises(SpecError):
        Hypergraph(5, 3, ((0, 1, 2), (0, 1, 2)))
    with pytest.raises(SizeError):
        Hypergraph(3, 3, ((0, 1, 3),))
    with pytest.raises(SizeError):
        Hypergraph(5, 0, ())


def test_complete_graph_sizes():
    assert Hypergraph.complete(6, 3).edge_count() == 20
    assert Hypergraph.complete(2, 3).edges == ()


def test_degree_pair_example():
    H = Hypergraph.from_edges(6, 3, [(0, 1, 2), (0, 1, 3), (0, 4, 5)])
    assert degree(H, [0, 1]) == 2
    assert degree(H, [0]) == 3
    assert degree(H, [5]) == 1
    assert degree(H, []) == 3
    with pytest.raises(SizeError):
        degree(H, [0, 1, 2])


@given(small_hypergraph())
def test_degree_matches_recount(H):
    for d in range(1, H.k):
        for S in combinations(range(H.n), d):
            assert degree(H, S) == oracle_degree(H, S)
            break  # one subset per size keeps the example count sane


@given(small_hypergraph())
def test_min_d_degree_is_minimum_with_lex_first_witness(H):
    for d in range(1, H.k):
        if H.n < d:
            continue
        val, witness = min_d_degree(H, d)
        all_degrees = {S: oracle_degree(H, S) for S in combinations(range(H.n), d)}
        assert val == min(all_degrees.values())
        assert all_degrees[witness] == val
        assert witness == min(S for S, v in all_degrees.items() if v == val)


def test_min_d_degree_rejects_bad_d():
    H = Hypergraph.complete(5, 3)
    with pytest.raises(SizeError):
        min_d_degree(H, 0)
    with pytest.raises(SizeError):
        min_d_degree(H, 3)


def test_link_example():
    H = Hypergraph.from_edges(5, 3, [(0, 1, 2), (0, 3, 4), (1, 3, 4)])
    L = link(H, [0])
    assert L.k == 2
    assert L.n == 5
    assert L.edges == ((1, 2), (3, 4))
    L2 = link(H, [3, 4])
    assert L2.k == 1
    assert L2.edges == ((0,), (1,))


def test_induced_keeps_ids_traceable():
    H = Hypergraph.from_edges(6, 3, [(0, 1, 2), (1, 2, 5), (3, 4, 5)])
    sub, old = induced(H, [1, 2, 5])
    assert old == (1, 2, 5)
    assert sub.edges == ((0, 1, 2),)
    assert tuple(old[v] for v in sub.edges[0]) == (1, 2, 5)


# ---------------------------------------------------------------------------
# Girth
# ---------------------------------------------------------------------------


def test_girth_known_shapes():
    # two triples sharing a pair
    assert girth(Hypergraph.from_edges(4, 3, [(0, 1, 2), (1, 2, 3)])) == 2
    # loose triangle
    assert girth(Hypergraph.from_edges(6, 3, [(0, 1, 2), (2, 3, 4), (0, 4, 5)])) == 3
    # loose path: acyclic
    assert girth(Hypergraph.from_edges(5, 3, [(0, 1, 2), (2, 3, 4)])) == math.inf
    # single edge and empty graph: acyclic
    assert girth(Hypergraph.from_edges(3, 3, [(0, 1, 2)])) == math.inf
    assert girth(Hypergraph.empty(4, 3)) == math.inf


def test_girth_duplicate_edge_multiset():
    # duplicate edges are legal input for the raw routine and force girth 2
    assert berge_girth_of([(0, 1, 2), (0, 1, 2)]) == 2
    assert berge_girth_of([(0, 1), (0, 1)]) == 2


def test_girth_theta_shape_is_four():
    edges = [
        (0, 3, 4),
        (1, 5, 6),
        (2, 7, 8),
        (3, 5, 7),
        (4, 6, 8),
    ]
    assert girth(Hypergraph.from_edges(9, 3, edges)) == 4
    # appending the set of degree-one vertices keeps it at 4
    assert berge_girth_of(edges + [(0, 1, 2)]) == 4


@settings(max_examples=60)
@given(small_hypergraph(max_n=7, max_k=3))
def test_girth_matches_oracle(H):
    if len(H.edges) > 7:
        H = Hypergraph(H.n, H.k, H.edges[:7])
    assert girth(H) == oracle_berge_girth(H.edges)


@given(small_hypergraph())
def test_linear_iff_girth_above_two(H):
    assert is_linear(H) == (girth(H) != 2)


@given(small_hypergraph(max_n=7, max_k=3))
def test_acyclic_graphs_are_vertex_rich(H):
    if girth(H) == math.inf and H.edges:
        assert len(H.support()) >= (H.k - 1) * len(H.edges) + 1


# ---------------------------------------------------------------------------
# k-density
# ---------------------------------------------------------------------------


def test_k_density_few_edges_is_zero():
    assert k_density(Hypergraph.empty(5, 3)).value == 0
    one = Hypergraph.from_edges(5, 3, [(0, 1, 2)])
    res = k_density(one)
    assert res.value == 0 and res.witness is None


def test_k_density_known_values():
    pair = Hypergraph.from_edges(4, 3, [(0, 1, 2), (1, 2, 3)])
    res = k_density(pair)
    assert res.value == 1
    assert res.witness == ((0, 1, 2), (1, 2, 3))

    loose = Hypergraph.from_edges(5, 3, [(0, 1, 2), (2, 3, 4)])
    assert k_density(loose).value == Fraction(1, 2)

    k4 = Hypergraph.complete(4, 3)
    assert k_density(k4).value == 3

    theta = Hypergraph.from_edges(
        9, 3, [(0, 3, 4), (1, 5, 6), (2, 7, 8), (3, 5, 7), (4, 6, 8)]
    )
    res = k_density(theta)
    assert res.value == Fraction(2, 3)
    assert res.witness is not None and len(res.witness) == 5


def test_k_density_methods_agree_on_named_cases():
    for H in (
        Hypergraph.complete(5, 3),
        Hypergraph.from_edges(6, 2, [(0, 1), (1, 2), (2, 0), (3, 4)]),
        Hypergraph.from_edges(7, 3, [(0, 1, 2), (0, 1, 3), (0, 4, 5), (2, 3, 6)]),
    ):
        a = k_density(H, method="enumerate")
        b = k_density(H, method="parametric")
        assert a.value == b.value


def test_k_density_enumerate_budget():
    big = Hypergraph.complete(7, 3)  # 35 edges
    with pytest.raises(CapacityError):
        k_density(big, method="enumerate")
    # parametric route has no cap and knows the complete-graph value
    assert k_density(big).value == Fraction(34, 4)


@settings(max_examples=60)
@given(small_hypergraph(max_n=7))
def test_k_density_routes_and_oracle_agree(H):
    if len(H.edges) > 10:
        H = Hypergraph(H.n, H.k, H.edges[:10])
    enum = k_density(H, method="enumerate")
    para = k_density(H, method="parametric")
    assert enum.value == oracle_k_density(H)
    assert para.value == enum.value


@given(small_hypergraph(max_n=7))
def test_k_density_witness_attains_value(H):
    res = k_density(H, method="parametric")
    if res.witness is not None:
        cnt = len(res.witness)
        verts = set()
        for e in res.witness:
            verts.update(e)
        assert cnt >= 2
        assert Fraction(cnt - 1, len(verts) - H.k) == res.value
        assert all(e in H.edge_set for e in res.witness)


@given(small_hypergraph(max_n=7, max_k=3), st.integers(0, 10**6))
def test_k_density_monotone_under_edge_addition(H, pick):
    missing = [e for e in combinations(range(H.n), H.k) if e not in H.edge_set]
    if not missing:
        return
    extra = missing[pick % len(missing)]
    bigger = H.add_edges([extra])
    assert k_density(bigger).value >= k_density(H).value


@given(small_hypergraph(max_n=7, max_k=3), st.randoms(use_true_random=False))
def test_girth_and_density_are_relabeling_invariant(H, rng):
    perm = list(range(H.n))
    rng.shuffle(perm)
    relabeled = Hypergraph.from_edges(
        H.n, H.k, [tuple(perm[v] for v in e) for e in H.edges]
    )
    assert girth(relabeled) == girth(H)
    assert k_density(relabeled).value == k_density(H).value


# ---------------------------------------------------------------------------
# Contraction
# ---------------------------------------------------------------------------


def test_contract_two_pendant_edges():
    H = Hypergraph.from_edges(7, 3, [(0, 1, 2), (0, 3, 4), (1, 5, 6)])
    spec = ContractionSpec(tuples=((0, 1),), parts=((3, 4), (5, 6)))
    res = contract(H, spec)
    assert res.graph.n == 5
    assert res.merged == (4,)
    assert res.graph.edges == ((0, 1, 4), (2, 3, 4))
    assert res.vertex_map == {3: 0, 4: 1, 5: 2, 6: 3}
    assert res.edge_preimage == {(0, 1, 4): (0, 3, 4), (2, 3, 4): (1, 5, 6)}


def test_contract_keeps_edges_inside_parts():
    H = Hypergraph.from_edges(8, 3, [(0, 2, 3), (1, 4, 5), (2, 4, 6), (3, 5, 7)])
    spec = ContractionSpec(tuples=((0,), (1,)), parts=((2, 3, 4, 5, 6, 7),))
    # k=3 needs two coordinates per tuple; this spec is malformed
    with pytest.raises(SpecError):
        contract(H, spec)


def test_contract_validates_disjointness():
    H = Hypergraph.complete(6, 3)
    with pytest.raises(SpecError):
        ContractionSpec(tuples=((0, 1),), parts=((1, 2), (3, 4))).validate(H)
    with pytest.raises(SpecError):
        ContractionSpec(tuples=((0, 1),), parts=((2, 3),)).validate(H)


@given(small_hypergraph(max_n=8, min_k=3, max_k=3))
def test_contract_preimages_are_distinct_host_edges(H):
    if H.n < 6:
        return
    spec = ContractionSpec(tuples=((0, 1),), parts=((2, 3), (4, 5)))
    res = contract(H, spec)
    values = list(res.edge_preimage.values())
    assert len(set(values)) == len(values)
    for src in values:
        assert src in H.edge_set
    assert set(res.edge_preimage) == set(res.graph.edges)


# ---------------------------------------------------------------------------
# khg format
# ---------------------------------------------------------------------------


@given(small_hypergraph())
def test_khg_round_trip(H):
    assert parse_khg(dumps_khg(H)) == H


def test_khg_comments_and_blanks():
    text = "# a comment\n\nkhg 1 3 5 2  # inline\n0 1 2\n2 3 4\n"
    H = parse_khg(text)
    assert H.n == 5 and H.k == 3
    assert H.edges == ((0, 1, 2), (2, 3, 4))


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("", "missing header"),
        ("khg 2 3 5 0\n", "line 1"),
        ("khg 1 3 5 1\n0 1\n", "line 2"),
        ("khg 1 3 5 1\n0 2 1\n", "ascending"),
        ("khg 1 3 5 1\n0 1 9\n", "range"),
        ("khg 1 3 5 2\n0 1 2\n0 1 2\n", "duplicate"),
        ("khg 1 3 5 2\n2 3 4\n0 1 2\n", "lexicographic"),
        ("khg 1 3 5 3\n0 1 2\n", "declares 3"),
        ("khg 1 1 5 0\n", "uniformity"),
        ("khg 1 3 5 1\n0 x 2\n", "non-integer"),
    ],
)
def test_khg_rejects_malformed(text, fragment):
    with pytest.raises(FormatError, match=fragment):
        parse_khg(text)


def test_khg_write_read_file(tmp_path):
    from diraclab.hypercore import read_khg, write_khg

    H = Hypergraph.complete(5, 3)
    path = tmp_path / "c53.khg"
    write_khg(H, path, comment="complete graph")
    assert read_khg(path) == H
    assert path.read_text().startswith("# complete graph\nkhg 1 3 5 10\n")
