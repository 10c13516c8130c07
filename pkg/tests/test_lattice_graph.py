import random
import xml.etree.ElementTree as ET
from collections import Counter

import pytest

from dimermahler.kasteleyn import EdgeWeighting, example_weighting
from dimermahler.lattice_graph import (
    Matching,
    WorkBoundExceeded,
    build_torus_graph,
    enumerate_matchings,
    matching_monomial,
    positive_edges,
    render_tiling_svg,
    tiling_respects_forced,
    to_rhombus_tiling,
)

LABEL_ORDER = ("Aa Ba Ga Bb Cb Hb Ac Cc Ic Ad Dd Ed Be Ee Fe Cf Df Ff "
                       "Dg Gg Hg Eh Hh Ih Fi Gi Ii").split()


def test_fundamental_domain_matches_the_matrix(g1):
    assert [e.label for e in g1.edges] == LABEL_ORDER
    assert sorted(e.label for e in g1.edges if e.crossing == "x") == ["Ga", "Hb", "Ic"]
    assert sorted(e.label for e in g1.edges if e.crossing == "y") == ["Ac", "Df", "Gi"]
    assert len(g1.black_vertices) == len(g1.white_vertices) == 9


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bipartite_three_regular(n):
    g = build_torus_graph(n)
    assert len(g.white_vertices) == len(g.black_vertices) == 9 * n * n
    assert len(g.edges) == 27 * n * n
    degree = Counter()
    for e in g.edges:
        assert e.white in g.white_vertices and e.black in g.black_vertices
        degree[e.white] += 1
        degree[e.black] += 1
    assert set(degree.values()) == {3}


def test_lift_is_four_copies_with_boundary_crossings(g1, g2):
    assert Counter(e.base for e in g2.edges) == Counter({e.label: 4 for e in g1.edges})
    crossings = Counter(e.crossing for e in g2.edges)
    assert crossings["x"] == 6 and crossings["y"] == 6


def test_rejects_bad_n():
    for n in (0, -1, 1.5):
        with pytest.raises(ValueError):
            build_torus_graph(n)


def test_forty_two_matchings_in_lexicographic_order(g1):
    ms = enumerate_matchings(g1)
    assert len(ms) == 42
    keys = [m.sorted_edges() for m in ms]
    assert keys == sorted(keys) and len(set(keys)) == 42
    for m in ms:
        covered_w = {g1.edges[i].white for i in m.edges}
        covered_b = {g1.edges[i].black for i in m.edges}
        assert len(covered_w) == len(covered_b) == 9


def test_crossing_multiset_matches_golden_terms(g1):
    W = EdgeWeighting.uniform(1)
    counts = Counter(matching_monomial(g1, m, W)[1:] for m in enumerate_matchings(g1))
    assert counts[(3, 0)] == counts[(0, 3)] == counts[(0, 0)] == 1
    assert counts[(1, 1)] == 21
    for ab in [(2, 1), (1, 2), (1, 0), (0, 1), (2, 0), (0, 2)]:
        assert counts[ab] == 3


def test_restricted_enumeration(g1):
    W, _ = example_weighting(3, 1, 1)
    assert len(enumerate_matchings(g1, positive_edges(g1, W))) == 6
    no_a = [e.index for e in g1.edges if e.white != "a"]
    assert enumerate_matchings(g1, no_a) == []


def test_work_bound(g2):
    with pytest.raises(WorkBoundExceeded):
        enumerate_matchings(g2)


def test_matching_monomials(g1):
    # distinct primes as weights make the coefficient identify the edge word
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103]
    W = EdgeWeighting(dict(zip((e.label for e in g1.edges), primes)))

    def monomial(labels):
        m = Matching(frozenset(g1.edge_index(x) for x in labels))
        coeff, a, b = matching_monomial(g1, m, W)
        expected = 1
        for x in labels:
            expected *= W[x]
        assert coeff == expected
        return sorted(m.labels(g1)), a, b

    diag = "Ii Hh Gg Ff Ee Dd Cc Bb Aa".split()
    assert monomial(diag) == (sorted(diag), 0, 0)
    x3 = "Fi Eh Dg Cf Be Ad Ic Hb Ga".split()
    assert monomial(x3) == (sorted(x3), 3, 0)
    with pytest.raises(KeyError, match="Aa"):
        matching_monomial(g1, Matching(frozenset([0])), {})


def _inside(p, quad):
    sign = 0
    for k in range(4):
        (x1, y1), (x2, y2) = quad[k], quad[(k + 1) % 4]
        cross = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1)
        if cross == 0:
            return False
        s = 1 if cross > 0 else -1
        if sign and s != sign:
            return False
        sign = s
    return True


@pytest.mark.parametrize("seed", range(3))
def test_tilings_cover_the_torus_once(g1, seed):
    rng = random.Random(seed)
    W = EdgeWeighting.uniform(1)
    ms = enumerate_matchings(g1)
    t = to_rhombus_tiling(g1, ms[rng.randrange(len(ms))], W)
    assert len(t.rhombi) == 9 and t.forced == ()
    size = 3
    for _ in range(300):
        p = (rng.uniform(0, size), rng.uniform(0, size))
        hits = 0
        for r in t.rhombi:
            for du in (-size, 0, size):
                for dv in (-size, 0, size):
                    if _inside((p[0] + du, p[1] + dv), r.corners):
                        hits += 1
        assert hits == 1


def test_diagonal_matching_is_a_single_orientation(g1):
    diag = Matching(frozenset(g1.edge_index(x) for x in "Aa Bb Cc Dd Ee Ff Gg Hh Ii".split()))
    t = to_rhombus_tiling(g1, diag, EdgeWeighting.uniform(1))
    assert {r.orientation for r in t.rhombi} == {0}


def test_forced_edges_are_respected(g1):
    W, _ = example_weighting(3, 1, 1)
    ms = enumerate_matchings(g1, positive_edges(g1, W))
    for m in ms:
        t = to_rhombus_tiling(g1, m, W)
        assert len(t.forced) == 6
        assert tiling_respects_forced(t)
    diag = Matching(frozenset(g1.edge_index(x) for x in "Aa Bb Cc Dd Ee Ff Gg Hh Ii".split()))
    with pytest.raises(ValueError, match="weight 0"):
        to_rhombus_tiling(g1, diag, W)


def test_svg_output(g1):
    W, _ = example_weighting(3, 1, 1)
    m = enumerate_matchings(g1, positive_edges(g1, W))[0]
    t = to_rhombus_tiling(g1, m, W)
    svg = render_tiling_svg(t)
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f".//{ns}polygon")) == 9
    assert len(root.findall(f".//{ns}path")) == len(t.forced) == 6
    assert render_tiling_svg(t) == svg
