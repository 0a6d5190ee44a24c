"""Exact decomposition of q-series as polynomials in E2, E4, E6.

A quasimodular form of weight at most W is a polynomial in the Eisenstein
series E2, E4, E6 with monomial weights 2a+4b+6c <= W.  Decomposition is an
exact linear solve over the rationals on the leading coefficients, followed
by verification on all remaining known coefficients: a fit that only holds
on the solving window is a hard failure, not a result.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .series import format_rational, parse_rational

DEFAULT_GUARD = 5


class NotQuasimodularError(Exception):
    """The series is not a weight-bounded polynomial in E2, E4, E6."""


class InsufficientPrecisionError(Exception):
    """Too few known coefficients to solve and verify the decomposition."""


@dataclass(frozen=True)
class EisensteinSeries:
    """Truncated integer q-expansion of E_k, k in {2, 4, 6}."""
    k: int
    coeffs: tuple


def _sigma(m, power):
    return sum(d ** power for d in range(1, m + 1) if m % d == 0)


_EISENSTEIN_DATA = {2: (-24, 1), 4: (240, 3), 6: (-504, 5)}


def eisenstein(k, D):
    """E_k to order q^D, with the standard -24/240/-504 normalizations."""
    if k not in _EISENSTEIN_DATA:
        raise ValueError(f"k must be one of 2, 4, 6, got {k}")
    if D < 0:
        raise ValueError("D must be >= 0")
    mult, power = _EISENSTEIN_DATA[k]
    return EisensteinSeries(k, (1,) + tuple(mult * _sigma(m, power)
                                            for m in range(1, D + 1)))


def monomial_weight(mono):
    a, b, c = mono
    return 2 * a + 4 * b + 6 * c


def monomials(max_weight):
    """Exponent triples (a, b, c) of weight 2a+4b+6c <= max_weight, graded lex."""
    out = []
    for a in range(max_weight // 2 + 1):
        for b in range((max_weight - 2 * a) // 4 + 1):
            for c in range((max_weight - 2 * a - 4 * b) // 6 + 1):
                out.append((a, b, c))
    return sorted(out, key=lambda m: (monomial_weight(m), m))


def _mul(u, v, D):
    out = [Fraction(0)] * (D + 1)
    for i, x in enumerate(u):
        if x == 0:
            continue
        for j in range(min(D - i, len(v) - 1) + 1):
            out[i + j] += x * v[j]
    return out


_MONO_CACHE = {}


def monomial_series(mono, D):
    """q-expansion of E2^a E4^b E6^c to order q^D, as a tuple of Fractions."""
    key = (mono, D)
    hit = _MONO_CACHE.get(key)
    if hit is not None:
        return hit
    a, b, c = mono
    out = [Fraction(1)] + [Fraction(0)] * D
    for k, e in ((2, a), (4, b), (6, c)):
        if e:
            ek = [Fraction(x) for x in eisenstein(k, D).coeffs]
            for _ in range(e):
                out = _mul(out, ek, D)
    out = tuple(out)
    _MONO_CACHE[key] = out
    return out


@dataclass(frozen=True)
class QuasimodDecomposition:
    """Exact polynomial in E2, E4, E6 equal to a given series.

    terms maps exponent triples (a, b, c) to nonzero rationals, stored in
    graded lexicographic order.
    """

    max_weight: int
    terms: tuple  # of ((a, b, c), Fraction)

    @property
    def weights(self):
        return tuple(monomial_weight(m) for m, _ in self.terms)

    @property
    def is_homogeneous(self):
        return len(set(self.weights)) <= 1

    @property
    def weight(self):
        return max(self.weights, default=0)

    def weight_split(self):
        """Sub-polynomials by monomial weight, as a dict weight -> terms."""
        out = {}
        for m, c in self.terms:
            out.setdefault(monomial_weight(m), []).append((m, c))
        return {w: tuple(ts) for w, ts in sorted(out.items())}

    def evaluate(self, D):
        """q-expansion of the polynomial to order q^D."""
        out = [Fraction(0)] * (D + 1)
        for m, c in self.terms:
            for i, x in enumerate(monomial_series(m, D)):
                out[i] += c * x
        return out

    def to_json_dict(self):
        return {
            "max_weight": self.max_weight,
            "monomials": [{"e2": a, "e4": b, "e6": c, "c": format_rational(x)}
                          for (a, b, c), x in self.terms],
            "homogeneous": self.is_homogeneous,
            "weight": self.weight,
        }

    @classmethod
    def from_json_dict(cls, d):
        terms = tuple(((t["e2"], t["e4"], t["e6"]), parse_rational(t["c"]))
                      for t in d["monomials"])
        return cls(d["max_weight"], terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b, c), x in self.terms:
            mono = "".join(f"E{k}^{e}" if e > 1 else f"E{k}"
                           for k, e in ((2, a), (4, b), (6, c)) if e) or "1"
            parts.append(f"({x})*{mono}")
        return " + ".join(parts)


def decompose(coeffs, max_weight, guard=DEFAULT_GUARD):
    """Write a q-series as a polynomial in E2, E4, E6 of weight <= max_weight.

    coeffs holds the known expansion, coeffs[d] the coefficient of q^d.  The
    linear system is solved on the first dim coefficients (dim = number of
    candidate monomials) and verified on every remaining one; at least guard
    verification coefficients are required.
    """
    coeffs = [Fraction(c) for c in coeffs]
    D = len(coeffs) - 1
    mons = monomials(max_weight)
    dim = len(mons)
    if D < dim - 1 + guard:
        raise InsufficientPrecisionError(
            f"need at least {dim + guard} coefficients "
            f"({dim} to solve, {guard} to verify), got {D + 1}")
    cols = [monomial_series(m, D) for m in mons]

    # exact Gaussian elimination on the square leading system
    rows = [[cols[j][i] for j in range(dim)] + [coeffs[i]] for i in range(dim)]
    where = []
    r = 0
    for col in range(dim):
        piv = next((i for i in range(r, dim) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(dim):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        where.append(col)
        r += 1
    # E2, E4, E6 are algebraically independent, so the truncated monomial
    # columns must be independent as well; anything else is a setup bug
    assert r == dim, "monomial coefficient matrix is rank-deficient"

    sol = [Fraction(0)] * dim
    for i, col in enumerate(where):
        sol[col] = rows[i][dim]

    for d in range(D + 1):
        lhs = sum(sol[j] * cols[j][d] for j in range(dim) if sol[j] != 0)
        if lhs != coeffs[d]:
            raise NotQuasimodularError(
                f"no weight <= {max_weight} decomposition: first mismatch at "
                f"q^{d} (fit gives {lhs}, series has {coeffs[d]})")

    terms = tuple((m, sol[j]) for j, m in enumerate(mons) if sol[j] != 0)
    return QuasimodDecomposition(max_weight, terms)


def weight_profile(dec):
    """(is_homogeneous, weight, per-weight split) of a decomposition."""
    return dec.is_homogeneous, dec.weight, dec.weight_split()
