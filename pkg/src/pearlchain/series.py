"""Exact sparse truncated series: Laurent in x-variables, power in q-variables.

Coefficients are exact rationals (fractions.Fraction).  Every series carries
explicit truncation bounds: D on the total q-degree and B on the absolute
value of each x-exponent.  Coefficient queries outside the bounds raise;
silent truncation is the main correctness hazard here, so it is a hard error.
"""

from __future__ import annotations

import json
from fractions import Fraction


class TruncationError(Exception):
    """A coefficient was requested outside the truncation bounds."""


class DeclarationError(Exception):
    """Two series with incompatible variable declarations were combined."""


class TruncatedSeries:
    """Sparse multivariate series with exact rational coefficients.

    terms maps (x_exponents, q_exponents) tuples to nonzero Fractions.
    x-exponents may be negative (Laurent); q-exponents are >= 0 with total
    degree <= D; |x-exponent| <= B per variable.
    """

    __slots__ = ("xvars", "qvars", "D", "B", "terms")

    def __init__(self, xvars, qvars, D, B, terms=None):
        self.xvars = tuple(xvars)
        self.qvars = tuple(qvars)
        self.D = int(D)
        self.B = int(B)
        clean = {}
        for (xe, qe), c in (terms or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            self._check_bounds(xe, qe)
            clean[(tuple(xe), tuple(qe))] = c
        self.terms = clean

    def _check_bounds(self, xe, qe):
        if len(xe) != len(self.xvars) or len(qe) != len(self.qvars):
            raise DeclarationError("exponent vector length mismatch")
        if any(abs(e) > self.B for e in xe):
            raise TruncationError(f"x-exponent {xe} exceeds bound B={self.B}")
        if any(e < 0 for e in qe):
            raise ValueError("q-exponents must be nonnegative")
        if sum(qe) > self.D:
            raise TruncationError(f"q-degree {sum(qe)} exceeds bound D={self.D}")

    def same_declaration(self, other):
        return (self.xvars == other.xvars and self.qvars == other.qvars
                and self.D == other.D and self.B == other.B)

    @classmethod
    def zero(cls, xvars, qvars, D, B):
        return cls(xvars, qvars, D, B, {})

    @classmethod
    def one(cls, xvars, qvars, D, B):
        zx = (0,) * len(xvars)
        zq = (0,) * len(qvars)
        return cls(xvars, qvars, D, B, {(zx, zq): Fraction(1)})

    @classmethod
    def monomial(cls, xvars, qvars, D, B, xe, qe, coeff=1):
        return cls(xvars, qvars, D, B, {(tuple(xe), tuple(qe)): Fraction(coeff)})

    def coefficient(self, xe, qe):
        """Exact stored coefficient, 0 if absent; out-of-bounds is an error."""
        xe, qe = tuple(xe), tuple(qe)
        self._check_bounds(xe, qe)
        return self.terms.get((xe, qe), Fraction(0))

    def __add__(self, other):
        if not self.same_declaration(other):
            raise DeclarationError("cannot add series with different declarations")
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k, Fraction(0)) + c
            if s == 0:
                terms.pop(k, None)
            else:
                terms[k] = s
        return TruncatedSeries(self.xvars, self.qvars, self.D, self.B, terms)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        if c == 0:
            return TruncatedSeries.zero(self.xvars, self.qvars, self.D, self.B)
        return TruncatedSeries(self.xvars, self.qvars, self.D, self.B,
                               {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        return multiply(self, other)

    def __eq__(self, other):
        return (isinstance(other, TruncatedSeries) and self.same_declaration(other)
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.xvars, self.qvars, self.D, self.B,
                     tuple(sorted(self.terms.items()))))

    def is_zero(self):
        return not self.terms

    def sorted_terms(self):
        """Terms in canonical (exponent-lexicographic) order."""
        return sorted(self.terms.items())

    def __repr__(self):
        parts = []
        for (xe, qe), c in self.sorted_terms()[:8]:
            mono = "*".join([f"{v}^{e}" for v, e in zip(self.xvars, xe) if e] +
                            [f"{v}^{e}" for v, e in zip(self.qvars, qe) if e]) or "1"
            parts.append(f"{c}*{mono}")
        more = "" if len(self.terms) <= 8 else f" ... ({len(self.terms)} terms)"
        return f"TruncatedSeries({' + '.join(parts) or '0'}{more})"

    def to_json_dict(self):
        return {
            "xvars": list(self.xvars),
            "qvars": list(self.qvars),
            "D": self.D,
            "B": self.B,
            "terms": [{"x": list(xe), "q": list(qe), "c": format_rational(c)}
                      for (xe, qe), c in self.sorted_terms()],
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, d):
        terms = {(tuple(t["x"]), tuple(t["q"])): parse_rational(t["c"])
                 for t in d["terms"]}
        return cls(d["xvars"], d["qvars"], d["D"], d["B"], terms)


def format_rational(c):
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def parse_rational(s):
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def multiply(a, b):
    """Exact product; terms beyond the shared truncation bounds are discarded."""
    if not a.same_declaration(b):
        raise DeclarationError("cannot multiply series with different declarations")
    D, B = a.D, a.B
    terms = {}
    bt = list(b.terms.items())
    for (xa, qa), ca in a.terms.items():
        for (xb, qb), cb in bt:
            qe = tuple(x + y for x, y in zip(qa, qb))
            if sum(qe) > D:
                continue
            xe = tuple(x + y for x, y in zip(xa, xb))
            if any(abs(e) > B for e in xe):
                continue
            k = (xe, qe)
            s = terms.get(k, Fraction(0)) + ca * cb
            if s == 0:
                terms.pop(k, None)
            else:
                terms[k] = s
    return TruncatedSeries(a.xvars, a.qvars, D, B, terms)


def propagator_entries(D, B):
    """The propagator P(x, q) as (x_exponent, q_degree, integer_coefficient).

    q^0 part: -d * x^d for 1 <= d <= B.  q^n part (n >= 1): -d * (x^d + x^-d)
    for each divisor d of n with d <= B.
    """
    out = [(d, 0, -d) for d in range(1, B + 1)]
    for nn in range(1, D + 1):
        for d in range(1, min(nn, B) + 1):
            if nn % d == 0:
                out.append((d, nn, -d))
                out.append((-d, nn, -d))
    return out


def propagator(num_var, den_var, q_var, D, B, xvars=None, qvars=None):
    """The propagator with x replaced by num_var/den_var, in q_var.

    The ambient declaration defaults to just (num_var, den_var) and (q_var);
    pass xvars/qvars to embed the slice into a larger ring.
    """
    if num_var == den_var:
        raise ValueError("num_var and den_var must differ")
    if D < 0 or B < 1:
        raise ValueError("need D >= 0 and B >= 1")
    xvars = tuple(xvars) if xvars is not None else (num_var, den_var)
    qvars = tuple(qvars) if qvars is not None else (q_var,)
    ni = xvars.index(num_var)
    di = xvars.index(den_var)
    qi = qvars.index(q_var)
    terms = {}
    for e, qdeg, c in propagator_entries(D, B):
        xe = [0] * len(xvars)
        xe[ni] = e
        xe[di] = -e
        qe = [0] * len(qvars)
        qe[qi] = qdeg
        terms[(tuple(xe), tuple(qe))] = Fraction(c)
    return TruncatedSeries(xvars, qvars, D, B, terms)


def specialize_q(s, q_name="q"):
    """Collapse all q-variables to a single one by summing exponents."""
    terms = {}
    for (xe, qe), c in s.terms.items():
        k = (xe, (sum(qe),))
        terms[k] = terms.get(k, Fraction(0)) + c
    return TruncatedSeries(s.xvars, (q_name,), s.D, s.B, terms)
