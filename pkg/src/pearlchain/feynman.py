"""Feynman integrals for labeled pearl chains: exact coefficient extraction.

The (refined) Feynman integral for a pearl chain with order Omega is the
coefficient of x_1^{l_1}...x_n^{l_n} in the product over edges q_k of
propagator slices P(x_{k1}/x_{k2}, q_k), numerator = endpoint earlier in
Omega.  We never build the full multivariate product: every black vertex is
2-valent with zero leak, so its two slices contract into an effective factor
u^a v^{-a} between the neighboring whites.  These factors depend only on a
sign configuration and are cached; the remaining contraction runs over the
small white-vertex graph by greedy variable elimination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .pearls import PearlChain, WHITE, automorphism_count, automorphisms, \
    enumerate_pearl_chains, leaking_vectors
from .series import TruncatedSeries


def x_bound(n, D, l_total_abs):
    """Per-slice cap on |x-exponents| that can reach the target coefficient.

    Rank-weighted potential: every q^0 slice term lowers the potential by at
    least its exponent, q-carrying terms move it by at most q-degree*(n-1),
    and the target potential is bounded by n * sum|l_i|.
    """
    return max(1, D * (n - 1) + l_total_abs * n)


def _pcoeff(e, qdeg, B):
    """Integer coefficient of x^e q^qdeg in the propagator, |e| capped at B."""
    if e == 0 or abs(e) > B:
        return 0
    if qdeg == 0:
        return -e if e >= 1 else 0
    d = abs(e)
    return -d if qdeg % d == 0 else 0


_FACTOR_CACHE = {}


def _black_factor(t1, t2, D, B):
    """Contraction of the two slices at a black vertex over its x-variable.

    t1/t2 say whether the first/second neighboring white is the numerator of
    its slice (+1) or the denominator (-1).  Result: dict mapping
    (a, qdeg1, qdeg2) -> int coefficient of u^a v^{-a} q1^qdeg1 q2^qdeg2.
    """
    key = (t1, t2, D, B)
    hit = _FACTOR_CACHE.get(key)
    if hit is not None:
        return hit
    out = {}
    for a in range(-B, B + 1):
        if a == 0:
            continue
        e1 = t1 * a
        e2 = -t2 * a
        for qd1 in range(D + 1):
            c1 = _pcoeff(e1, qd1, B)
            if c1 == 0:
                continue
            for qd2 in range(D + 1 - qd1):
                c2 = _pcoeff(e2, qd2, B)
                if c2:
                    out[(a, qd1, qd2)] = c1 * c2
    _FACTOR_CACHE[key] = out
    return out


def _white_graph(P, omega, D, B):
    """Effective factors between whites, one per black vertex.

    Returns (white_indices, factors) where factors is a list of
    (u, v, Fdict, k1, k2): u carries exponent +a, v exponent -a, and the
    black's two edge indices k1 < k2 receive the q-degrees.
    """
    rank = {lab: omega[i] for i, (lab, _) in enumerate(P.vertices)}
    whites = list(P.white_labels)
    factors = []
    for b in P.black_labels:
        ks = P.incident_edges(b)
        if len(ks) != 2:
            raise ValueError(f"black vertex {b} is not 2-valent")
        k1, k2 = sorted(ks)
        u = P.edges[k1][1]
        v = P.edges[k2][1]
        t1 = 1 if rank[u] < rank[b] else -1
        t2 = 1 if rank[v] < rank[b] else -1
        F = _black_factor(t1, t2, D, B)
        factors.append((whites.index(u), whites.index(v), F, k1, k2))
    return whites, factors


def _factor_order(nwhites, factors, targets):
    """Greedy elimination order: complete white variables as early as possible."""
    remaining = [0] * nwhites
    for u, v, _, _, _ in factors:
        remaining[u] += 1
        remaining[v] += 1
    todo = list(range(len(factors)))
    active = set()
    order = []
    while todo:
        best = None
        for i in todo:
            u, v, _, _, _ = factors[i]
            completes = (remaining[u] == 1) + (remaining[v] == 1 and u != v)
            activates = (u not in active) + (v not in active and v != u)
            score = (-completes, activates, i)
            if best is None or score < best[0]:
                best = (score, i)
        i = best[1]
        order.append(i)
        todo.remove(i)
        u, v, _, _, _ = factors[i]
        remaining[u] -= 1
        remaining[v] -= 1
        active.update((u, v))
    return order


def feynman_coefficients(P, omega, leak, D, refined):
    """All q-coefficients of the (refined) Feynman integral, as a dict.

    Keys are q-exponent tuples of length r (refined) or total degrees
    (unrefined); values are exact ints.  leak maps vertex labels to ints.
    """
    n = P.n
    r = P.r
    l = {lab: leak.get(lab, 0) for lab, _ in P.vertices}
    for lab, c in P.vertices:
        if c != WHITE and l[lab] != 0:
            raise ValueError(f"nonzero leak on black vertex {lab}")
    if sum(l.values()) != 0:
        return {}
    B = x_bound(n, D, sum(abs(x) for x in l.values()))
    whites, factors = _white_graph(P, omega, D, B)
    targets = [l[w] for w in whites]

    remaining = [0] * len(whites)
    for u, v, _, _, _ in factors:
        remaining[u] += 1
        remaining[v] += 1
    # whites of valence 1 and zero leak kill the integral: the propagator has
    # no x^0 terms, so their single factor can never hit exponent 0
    order = _factor_order(len(whites), factors, targets)

    zero_q = (0,) * r if refined else 0
    state = {((), zero_q): 1}
    active = []  # white indices, aligned with x-exponent tuples in state keys

    for fi in order:
        u, v, F, k1, k2 = factors[fi]
        new_active = list(active)
        for w in (u, v):
            if w not in new_active:
                new_active.append(w)
        pu = new_active.index(u)
        pv = new_active.index(v)
        pad = len(new_active) - len(active)
        remaining[u] -= 1
        remaining[v] -= 1
        completed = [w for w in (u, v) if remaining[w] == 0]

        new_state = {}
        for (xe, qe), coeff in state.items():
            xe_ext = xe + (0,) * pad
            if refined:
                qbudget = D - sum(qe)
            else:
                qbudget = D - qe
            for (a, qd1, qd2), fc in F.items():
                if qd1 + qd2 > qbudget:
                    continue
                nx = list(xe_ext)
                nx[pu] += a
                nx[pv] -= a
                ok = True
                for w in completed:
                    if nx[new_active.index(w)] != targets[w]:
                        ok = False
                        break
                if not ok:
                    continue
                if refined:
                    nq = list(qe)
                    nq[k1] += qd1
                    nq[k2] += qd2
                    nq = tuple(nq)
                else:
                    nq = qe + qd1 + qd2
                key = (tuple(nx), nq)
                s = new_state.get(key, 0) + coeff * fc
                if s == 0:
                    new_state.pop(key, None)
                else:
                    new_state[key] = s
        # drop coordinates of completed whites
        if completed:
            drop = sorted((new_active.index(w) for w in completed), reverse=True)
            squeezed = {}
            for (xe, qe), coeff in new_state.items():
                nx = list(xe)
                for p in drop:
                    del nx[p]
                squeezed[(tuple(nx), qe)] = coeff
            new_state = squeezed
            for w in completed:
                new_active.remove(w)
        state = new_state
        active = new_active

    out = {}
    for (xe, qe), coeff in state.items():
        assert not xe
        if coeff:
            out[qe] = coeff
    return out


@dataclass(frozen=True)
class FeynmanRequest:
    """Inputs of one (refined) Feynman-integral evaluation."""
    chain: PearlChain
    omega: tuple         # omega[i] = position (1..n) of vertex i
    leaking: dict        # vertex label -> int, 0 on blacks
    D: int

    def __post_init__(self):
        n = self.chain.n
        if sorted(self.omega) != list(range(1, n + 1)):
            raise ValueError(f"omega must be a permutation of 1..{n}")
        if self.D < 0:
            raise ValueError("D must be >= 0")
        for lab, c in self.chain.vertices:
            if c != WHITE and self.leaking.get(lab, 0) != 0:
                raise ValueError(f"nonzero leak on black vertex {lab}")


def refined_feynman(req):
    """Refined Feynman integral as a truncated series in q_1..q_r."""
    coeffs = feynman_coefficients(req.chain, req.omega, req.leaking, req.D,
                                  refined=True)
    qvars = tuple(lab for lab, _, _ in req.chain.edges)
    B = x_bound(req.chain.n, req.D, sum(abs(v) for v in req.leaking.values()))
    return TruncatedSeries((), qvars, req.D, B,
                           {((), qe): Fraction(c) for qe, c in coeffs.items()})


def feynman(req):
    """Unrefined Feynman integral: univariate series in q."""
    coeffs = feynman_coefficients(req.chain, req.omega, req.leaking, req.D,
                                  refined=False)
    B = x_bound(req.chain.n, req.D, sum(abs(v) for v in req.leaking.values()))
    return TruncatedSeries((), ("q",), req.D, B,
                           {((), (d,)): Fraction(c) for d, c in coeffs.items()})


def all_orders(n):
    """All n! orders as position tuples."""
    return [tuple(p) for p in permutations(range(1, n + 1))]


def identity_order(n):
    return tuple(range(1, n + 1))


def _leak_symmetries(P, leak):
    """Vertex-index permutations from automorphisms that preserve the leak."""
    idx = {lab: i for i, (lab, _) in enumerate(P.vertices)}
    labels = [lab for lab, _ in P.vertices]
    l = {lab: leak.get(lab, 0) for lab in labels}
    out = []
    for vmap, _ in automorphisms(P):
        if all(l[lab] == l[vmap[lab]] for lab in labels):
            out.append(tuple(idx[vmap[lab]] for lab in labels))
    return out


def _order_orbits(P, leak, orders=None):
    """Orbit representatives of orders under leak-preserving automorphisms.

    Returns a dict mapping the representative (minimal) order of each orbit
    to the number of given orders it stands for.
    """
    if orders is None:
        orders = all_orders(P.n)
    sigmas = _leak_symmetries(P, leak)
    reps = {}
    for omega in orders:
        images = []
        for s in sigmas:
            om2 = [0] * len(omega)
            for i, si in enumerate(s):
                om2[si] = omega[i]
            images.append(tuple(om2))
        rep = min(images)
        reps[rep] = reps.get(rep, 0) + 1
    return reps


def _unrefined_cell(args):
    P, omega, leak, D = args
    return feynman_coefficients(P, omega, leak, D, refined=False)


def order_sum(P, leak, D, orders=None):
    """Sum of unrefined Feynman integrals over all (or given) orders.

    Composing the order with a leak-preserving automorphism does not change
    the unrefined integral (it permutes the propagator slices), so only one
    representative per orbit is evaluated.
    """
    coeffs = [0] * (D + 1)
    for rep, mult in _order_orbits(P, leak, orders).items():
        for d, c in feynman_coefficients(P, rep, leak, D, refined=False).items():
            coeffs[d] += c * mult
    return coeffs


# The correspondence with classical Gromov-Witten invariants is cited, not
# computed: nothing in this package verifies it.
GW_CORRESPONDENCE = (
    "For delta all zero, the coefficient of q^d1 equals the Gromov-Witten "
    "invariant N_{(d1,d2,g)} of E x P^1 by the tropical correspondence "
    "theorem for E x P^1; this layer is citation-only metadata.")


@dataclass(frozen=True)
class GeneratingSeries:
    """Univariate q-series of curve counts with its defining parameters."""
    d2: int
    g: int
    delta: tuple
    D: int
    normalized: bool
    coeffs: tuple  # Fractions, index = power of q

    def __post_init__(self):
        if self.coeffs and self.coeffs[0] != 0:
            raise ValueError("constant term of a generating series must vanish")

    def to_json_dict(self):
        from .series import format_rational
        out = {
            "d2": self.d2,
            "g": self.g,
            "delta": list(self.delta),
            "D": self.D,
            "normalized": self.normalized,
            "coeffs": [format_rational(c) for c in self.coeffs],
        }
        if all(x == 0 for x in self.delta):
            out["gw_correspondence"] = GW_CORRESPONDENCE
        return out

    @classmethod
    def from_json_dict(cls, d):
        from .series import parse_rational
        return cls(d["d2"], d["g"], tuple(d["delta"]), d["D"], d["normalized"],
                   tuple(parse_rational(c) for c in d["coeffs"]))


def pearl_chain_series(P, delta, D, aut_normalize=True, jobs=1):
    """Per-pearl-chain generating series: sum over leaking vectors and orders.

    With jobs > 1, the independent (order-orbit, leaking-vector) cells are
    evaluated in a process pool.
    """
    delta = tuple(sorted(delta))
    if len(delta) != P.d2:
        raise ValueError("delta size must equal d2")
    if sum(delta) != 0:
        raise ValueError("delta must sum to zero")
    tasks = []
    for leak in leaking_vectors(P, delta):
        for rep, mult in _order_orbits(P, leak).items():
            tasks.append((leak, rep, mult))
    if jobs > 1:
        from multiprocessing import Pool
        with Pool(jobs) as pool:
            cells = pool.map(_unrefined_cell,
                             [(P, rep, leak, D) for leak, rep, _ in tasks])
    else:
        cells = [feynman_coefficients(P, rep, leak, D, refined=False)
                 for leak, rep, _ in tasks]
    coeffs = [0] * (D + 1)
    for (_, _, mult), cell in zip(tasks, cells):
        for d, c in cell.items():
            coeffs[d] += c * mult
    out = [Fraction(c) for c in coeffs]
    if aut_normalize:
        aut = automorphism_count(P)
        out = [c / aut for c in out]
    return GeneratingSeries(P.d2, P.g, delta, D, aut_normalize, tuple(out))


def generating_series(d2, g, delta, D, aut_normalize=True, jobs=1):
    """Full generating series plus the per-pearl-chain breakdown.

    Returns (GeneratingSeries, breakdown) where breakdown is a list of
    (PearlChain, GeneratingSeries) in canonical enumeration order.
    """
    delta = tuple(sorted(delta))
    if len(delta) != d2:
        raise ValueError("delta size must equal d2")
    if sum(delta) != 0:
        raise ValueError("delta must sum to zero")
    breakdown = []
    total = [Fraction(0)] * (D + 1)
    for P in enumerate_pearl_chains(d2, g):
        s = pearl_chain_series(P, delta, D, aut_normalize=aut_normalize,
                               jobs=jobs)
        breakdown.append((P, s))
        for d in range(D + 1):
            total[d] += s.coeffs[d]
    return GeneratingSeries(d2, g, delta, D, aut_normalize, tuple(total)), breakdown
