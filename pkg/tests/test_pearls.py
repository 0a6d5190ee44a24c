import random
from math import factorial

import pytest

from pearlchain.pearls import (
    BLACK, WHITE, EnumerationLimitError, PearlChain, automorphism_count,
    automorphisms, canonical_form, chain_from_pairs, enumerate_pearl_chains,
    labeled_chain_count, leaking_vectors, validate_pearl_chain, white_pairs,
)


def test_validate_accepts_square_chain():
    vertices = [("w1", WHITE), ("w2", WHITE), ("b1", BLACK), ("b2", BLACK)]
    edges = [("e1", "w1", "b1"), ("e2", "w2", "b1"),
             ("e3", "w1", "b2"), ("e4", "w2", "b2")]
    violations, derived = validate_pearl_chain(vertices, edges)
    assert violations == []
    assert derived == (2, 1)


def test_validate_rejects_two_cycle():
    vertices = [("w1", WHITE), ("w2", WHITE), ("b1", BLACK), ("b2", BLACK)]
    edges = [("e1", "w1", "b1"), ("e2", "w1", "b1"),
             ("e3", "w1", "b2"), ("e4", "w2", "b2")]
    violations, derived = validate_pearl_chain(vertices, edges)
    assert derived is None
    assert any("2-cycle" in v for v in violations)


def test_validate_rejects_bad_black_valence():
    vertices = [("w1", WHITE), ("w2", WHITE), ("b1", BLACK)]
    edges = [("e1", "w1", "b1"), ("e2", "w2", "b1"), ("e3", "w1", "b1")]
    violations, _ = validate_pearl_chain(vertices, edges)
    assert any("valence" in v for v in violations)


def test_validate_rejects_monochrome_edge_and_disconnection():
    vertices = [("w1", WHITE), ("w2", WHITE), ("w3", WHITE), ("w4", WHITE),
                ("b1", BLACK), ("b2", BLACK), ("b3", BLACK)]
    edges = [("e1", "w1", "b1"), ("e2", "w2", "b1"),
             ("e3", "w3", "b2"), ("e4", "w4", "b2"),
             ("e5", "w3", "b3"), ("e6", "w4", "b3"),
             ("e7", "w1", "w2")]
    violations, _ = validate_pearl_chain(vertices, edges)
    assert any("bipartite" in v for v in violations)
    vertices = vertices[:6]
    edges = edges[:4]
    violations, _ = validate_pearl_chain(vertices + [("b3", BLACK)],
                                         edges + [("e5", "w3", "b3"),
                                                  ("e6", "w4", "b3")])
    assert any("connected" in v for v in violations)


def test_enumeration_counts():
    assert len(enumerate_pearl_chains(2, 1)) == 1
    assert len(enumerate_pearl_chains(3, 1)) == 2
    assert len(enumerate_pearl_chains(2, 2)) == 1
    assert len(enumerate_pearl_chains(3, 2)) == 3
    assert enumerate_pearl_chains(1, 1) == []
    assert enumerate_pearl_chains(1, 5) == []


def test_enumerated_chains_are_valid():
    for d2, g in [(2, 1), (3, 1), (2, 2), (3, 2), (4, 1)]:
        for P in enumerate_pearl_chains(d2, g):
            violations, derived = validate_pearl_chain(P.vertices, P.edges)
            assert violations == []
            assert derived == (d2, g)


def test_enumeration_limit():
    with pytest.raises(EnumerationLimitError):
        enumerate_pearl_chains(6, 4)
    with pytest.raises(ValueError):
        enumerate_pearl_chains(0, 1)


def test_canonical_form_invariant_under_relabeling():
    rng = random.Random(7)
    for d2, g in [(2, 1), (3, 1), (3, 2)]:
        for P in enumerate_pearl_chains(d2, g):
            pairs = P.pair_multiset()
            for _ in range(10):
                perm = list(range(d2))
                rng.shuffle(perm)
                shuffled = [tuple(sorted((perm[i], perm[j])))
                            for i, j in pairs]
                rng.shuffle(shuffled)
                Q = chain_from_pairs(sorted(shuffled), d2, g)
                assert canonical_form(Q) == canonical_form(P)


def test_automorphism_counts():
    squares = enumerate_pearl_chains(2, 1)[0]
    assert automorphism_count(squares) == 4
    a, b = enumerate_pearl_chains(3, 1)
    assert automorphism_count(a) == 2   # [(0,1),(0,1),(0,2)]
    assert automorphism_count(b) == 6   # triangle
    theta = enumerate_pearl_chains(2, 2)[0]
    assert automorphism_count(theta) == 12


def test_automorphisms_are_structure_preserving():
    for d2, g in [(2, 1), (3, 1), (2, 2)]:
        for P in enumerate_pearl_chains(d2, g):
            autos = automorphisms(P)
            assert len(autos) == automorphism_count(P)
            edge_set = {(w, b) for _, w, b in P.edges}
            colors = dict(P.vertices)
            for vmap, emap in autos:
                assert sorted(vmap) == sorted(vmap.values())
                for lab in vmap:
                    assert colors[lab] == colors[vmap[lab]]
                for elab, w, b in P.edges:
                    assert (vmap[w], vmap[b]) in edge_set
                assert sorted(emap) == sorted(emap.values())


def test_labeled_count_identity():
    # sum over iso classes of (d2)! * (d2+g-1)! / |Aut| equals the direct
    # count of chains on individually labeled vertices
    for d2, g in [(2, 1), (3, 1), (2, 2), (3, 2)]:
        total = 0
        for P in enumerate_pearl_chains(d2, g):
            total += (factorial(d2) * factorial(d2 + g - 1)
                      // automorphism_count(P))
        assert total == labeled_chain_count(d2, g)


def test_leaking_vectors():
    P = enumerate_pearl_chains(2, 1)[0]
    vs = leaking_vectors(P, [0, 0])
    assert len(vs) == 1
    vs = leaking_vectors(P, [-1, 1])
    assert len(vs) == 2
    for v in vs:
        assert sum(v.values()) == 0
        for b in P.black_labels:
            assert v[b] == 0
    with pytest.raises(ValueError):
        leaking_vectors(P, [0, 0, 0])


def test_json_round_trip():
    for P in enumerate_pearl_chains(3, 2):
        Q = PearlChain.from_json_dict(P.to_json_dict())
        assert Q == P


def test_white_pairs():
    assert white_pairs(3) == [(0, 1), (0, 2), (1, 2)]
