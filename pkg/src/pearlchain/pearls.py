"""Pearl chains: bipartite 2-colored graphs indexing floor-decomposed curve counts.

A pearl chain of type (d2, g) is a connected bipartite graph with d2 white
vertices, d2+g-1 black vertices, every black vertex 2-valent, and no cycles
of length two.  Since each black vertex is adjacent to exactly two distinct
white vertices, a chain is faithfully encoded by the multiset of unordered
white pairs, one per black vertex; everything here (enumeration, canonical
form, automorphisms) works on that encoding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations
from math import factorial

WHITE = "white"
BLACK = "black"


class EnumerationLimitError(Exception):
    """Raised when (d2, g) exceeds the configured brute-force limits."""


@dataclass(frozen=True)
class PearlChain:
    """A labeled pearl chain.

    vertices: tuple of (label, color) pairs, the x_1..x_n labeling order.
    edges: tuple of (edge_label, white_label, black_label), the q_1..q_r order.
    """

    vertices: tuple
    edges: tuple

    @property
    def n(self):
        return len(self.vertices)

    @property
    def r(self):
        return len(self.edges)

    @property
    def white_labels(self):
        return tuple(lab for lab, c in self.vertices if c == WHITE)

    @property
    def black_labels(self):
        return tuple(lab for lab, c in self.vertices if c == BLACK)

    @property
    def d2(self):
        return len(self.white_labels)

    @property
    def g(self):
        return self.r - self.n + 1

    def vertex_index(self, label):
        for i, (lab, _) in enumerate(self.vertices):
            if lab == label:
                return i
        raise KeyError(label)

    def color(self, label):
        return self.vertices[self.vertex_index(label)][1]

    def incident_edges(self, label):
        """Indices into self.edges of the edges touching the given vertex."""
        return tuple(k for k, (_, w, b) in enumerate(self.edges)
                     if w == label or b == label)

    def pair_multiset(self):
        """Sorted list of white-index pairs, one per black vertex."""
        widx = {lab: i for i, lab in enumerate(self.white_labels)}
        pairs = []
        for b in self.black_labels:
            ws = sorted(widx[w] for _, w, bb in self.edges if bb == b)
            pairs.append(tuple(ws))
        return sorted(pairs)

    def to_json_dict(self):
        return {
            "d2": self.d2,
            "g": self.g,
            "white": list(self.white_labels),
            "black": list(self.black_labels),
            "edges": [[lab, w, b] for lab, w, b in self.edges],
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, d):
        vertices = tuple((w, WHITE) for w in d["white"]) + \
            tuple((b, BLACK) for b in d["black"])
        edges = tuple((lab, w, b) for lab, w, b in d["edges"])
        return cls(vertices, edges)


def validate_pearl_chain(vertices, edges):
    """Check the pearl-chain axioms on a candidate labeled colored multigraph.

    vertices: iterable of (label, color); edges: iterable of
    (edge_label, label1, label2).  Returns (violations, derived) where
    violations is a list of human-readable strings (empty on success) and
    derived is the (d2, g) pair when the candidate is valid, else None.
    """
    vertices = tuple(vertices)
    edges = tuple(edges)
    violations = []
    colors = {}
    for lab, c in vertices:
        if lab in colors:
            violations.append(f"duplicate vertex label {lab!r}")
        colors[lab] = c

    valence = {lab: 0 for lab in colors}
    seen_pairs = set()
    for lab, a, b in edges:
        if a not in colors or b not in colors:
            violations.append(f"edge {lab!r} has unknown endpoint")
            continue
        if {colors[a], colors[b]} != {WHITE, BLACK}:
            violations.append(f"edge {lab!r} is not bipartite (joins {colors[a]}/{colors[b]})")
        pair = frozenset((a, b))
        if pair in seen_pairs:
            violations.append(f"parallel edges on endpoints {sorted(pair)} (2-cycle)")
        seen_pairs.add(pair)
        valence[a] += 1
        valence[b] += 1

    for lab, c in vertices:
        if c == BLACK and valence[lab] != 2:
            violations.append(f"black vertex {lab!r} has valence {valence[lab]}, expected 2")

    # connectivity
    if vertices:
        adj = {lab: set() for lab in colors}
        for _, a, b in edges:
            if a in adj and b in adj:
                adj[a].add(b)
                adj[b].add(a)
        seen = set()
        stack = [vertices[0][0]]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(adj[v] - seen)
        if len(seen) != len(vertices):
            violations.append("graph is not connected")

    d2 = sum(1 for _, c in vertices if c == WHITE)
    nblack = len(vertices) - d2
    g = len(edges) - len(vertices) + 1
    if g < 1:
        violations.append(f"first Betti number is {g}, expected >= 1")
    if nblack != d2 + g - 1:
        violations.append(f"{nblack} black vertices, expected d2+g-1 = {d2 + g - 1}")

    if violations:
        return violations, None
    return [], (d2, g)


def chain_from_pairs(pairs, d2, g):
    """Build the canonical labeled chain for a sorted white-pair multiset.

    Whites are x1..x_{d2}, blacks x_{d2+1}..x_n in pair order, and each
    black's two edges are emitted lower-white-first, so labels q1..q_r.
    """
    vertices = [(f"x{i + 1}", WHITE) for i in range(d2)]
    vertices += [(f"x{d2 + j + 1}", BLACK) for j in range(len(pairs))]
    edges = []
    for j, (i1, i2) in enumerate(pairs):
        blab = f"x{d2 + j + 1}"
        edges.append((f"q{2 * j + 1}", f"x{i1 + 1}", blab))
        edges.append((f"q{2 * j + 2}", f"x{i2 + 1}", blab))
    return PearlChain(tuple(vertices), tuple(edges))


def _pairs_connected(pairs, d2):
    adj = {i: set() for i in range(d2)}
    for i, j in pairs:
        adj[i].add(j)
        adj[j].add(i)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    return len(seen) == d2


def canonical_pairs(pairs, d2):
    """Lexicographically minimal pair multiset over all white relabelings."""
    best = None
    for perm in permutations(range(d2)):
        cand = sorted(tuple(sorted((perm[i], perm[j]))) for i, j in pairs)
        if best is None or cand < best:
            best = cand
    return best


def canonical_form(chain):
    """Canonical relabeling of a pearl chain; isomorphism-class invariant."""
    pairs = canonical_pairs(chain.pair_multiset(), chain.d2)
    return chain_from_pairs(pairs, chain.d2, chain.g)


def enumerate_pearl_chains(d2, g, max_vertices=12):
    """All pearl chains of type (d2, g), one canonical chain per iso class.

    Brute force: multisets of black-vertex white-pairs, connectivity filter,
    classification by canonical form.  Deterministic output order.
    """
    if d2 < 1 or g < 1:
        raise ValueError("d2 and g must be positive")
    nblack = d2 + g - 1
    if d2 + nblack > max_vertices:
        raise EnumerationLimitError(
            f"(d2={d2}, g={g}) needs {d2 + nblack} vertices, limit {max_vertices}")
    if d2 == 1:
        return []  # any black vertex would form a 2-cycle
    all_pairs = white_pairs(d2)
    seen = set()
    out = []
    for pairs in combinations_with_replacement(all_pairs, nblack):
        if not _pairs_connected(pairs, d2):
            continue
        canon = tuple(canonical_pairs(list(pairs), d2))
        if canon in seen:
            continue
        seen.add(canon)
        out.append(canon)
    return [chain_from_pairs(list(c), d2, g) for c in sorted(out)]


def white_pairs(d2):
    """Unordered pairs of distinct white indices."""
    return [(i, j) for i in range(d2) for j in range(i + 1, d2)]


def automorphism_count(chain):
    """Order of the color-preserving automorphism group.

    A white permutation preserving the pair multiset extends to black
    vertices in (product of pair multiplicities factorial) ways; edges are
    determined by their endpoints since the graph is simple.
    """
    return sum(_matchings(sigma, chain) for sigma in _white_symmetries(chain))


def _white_symmetries(chain):
    pairs = chain.pair_multiset()
    key = sorted(pairs)
    for sigma in permutations(range(chain.d2)):
        if sorted(tuple(sorted((sigma[i], sigma[j]))) for i, j in pairs) == key:
            yield sigma


def _matchings(sigma, chain):
    from collections import Counter
    mult = Counter(chain.pair_multiset())
    out = 1
    for m in mult.values():
        out *= factorial(m)
    return out


def automorphisms(chain):
    """All automorphisms as (vertex_label_map, edge_label_map) dicts."""
    whites = chain.white_labels
    blacks = chain.black_labels
    widx = {lab: i for i, lab in enumerate(whites)}
    black_pair = {}
    for b in blacks:
        ws = sorted(widx[w] for _, w, bb in chain.edges if bb == b)
        black_pair[b] = tuple(ws)
    edge_by_pair = {(w, b): lab for lab, w, b in chain.edges}
    out = []
    for sigma in _white_symmetries(chain):
        # group blacks by their image pair and match within groups
        from collections import defaultdict
        src = defaultdict(list)
        dst = defaultdict(list)
        for b in blacks:
            i, j = black_pair[b]
            src[tuple(sorted((sigma[i], sigma[j])))].append(b)
            dst[black_pair[b]].append(b)
        keys = sorted(src)
        if sorted(dst) != keys:
            continue
        for combo in _group_matchings(src, dst, keys):
            vmap = {whites[i]: whites[sigma[i]] for i in range(len(whites))}
            vmap.update(combo)
            emap = {}
            for lab, w, b in chain.edges:
                emap[lab] = edge_by_pair[(vmap[w], vmap[b])]
            out.append((vmap, emap))
    return out


def _group_matchings(src, dst, keys):
    """All black-vertex bijections matching pair groups, as dicts."""
    def rec(i):
        if i == len(keys):
            yield {}
            return
        k = keys[i]
        for perm in permutations(dst[k]):
            for rest in rec(i + 1):
                d = dict(zip(src[k], perm))
                d.update(rest)
                yield d
    return rec(0)


def leaking_vectors(chain, delta):
    """All distinct assignments of the leak multiset to the white vertices.

    Returns a list of dicts vertex_label -> int (0 on black vertices).
    No quotient by automorphisms is taken here; the 1/|Aut| prefactor lives
    in the generating-series assembly.
    """
    delta = list(delta)
    if len(delta) != chain.d2:
        raise ValueError(f"|delta| = {len(delta)} != d2 = {chain.d2}")
    whites = chain.white_labels
    out = []
    for assign in sorted(set(permutations(delta))):
        v = {lab: 0 for lab, _ in chain.vertices}
        for lab, leak in zip(whites, assign):
            v[lab] = leak
        out.append(v)
    return out


def labeled_chain_count(d2, g):
    """Direct count of chains with individually labeled whites and blacks.

    Independent oracle: assign each labeled black vertex an unordered pair
    of distinct labeled whites, keep the connected ones.
    """
    from itertools import product
    nblack = d2 + g - 1
    if d2 == 1:
        return 0
    all_pairs = white_pairs(d2)
    count = 0
    for choice in product(all_pairs, repeat=nblack):
        if _pairs_connected(choice, d2):
            count += 1
    return count
