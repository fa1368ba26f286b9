"""Exact rational and polynomial arithmetic.

Coefficients are :class:`fractions.Fraction` (exact rationals) or
:class:`MPoly` (polynomials in a fixed set of variables, by default the three
masses ``m1, m2, m3``).  Univariate polynomials over either ring are
:class:`Poly`.  Everything here is immutable.
"""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

MASS_VARS = ("m1", "m2", "m3")


def as_rational(x) -> Fraction:
    """Convert ints, Fractions, decimal floats and ``"p/q"`` strings to Fraction.

    Floats go through their shortest repr, so ``0.2`` becomes ``1/5``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational number: {x!r}")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, np.floating):
        x = float(x)
    if isinstance(x, float):
        if not np.isfinite(x):
            raise InputError(f"not a finite number: {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational {x!r}") from exc
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    raise InputError(f"not a rational number: {x!r}")


def _is_field_scalar(c) -> bool:
    return isinstance(c, (numbers.Number, Fraction)) and not isinstance(c, bool)


# ---------------------------------------------------------------------------
# Multivariate polynomials
# ---------------------------------------------------------------------------


class MPoly:
    """Polynomial with Fraction coefficients in a fixed tuple of variables."""

    __slots__ = ("terms", "variables")

    def __init__(self, terms=None, variables: Sequence[str] = MASS_VARS):
        self.variables = tuple(variables)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(self.variables):
                raise InputError("exponent vector does not match variables")
            c = as_rational(c)
            if c != 0:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if clean[exps] == 0:
                    del clean[exps]
        self.terms = clean

    @classmethod
    def const(cls, c, variables: Sequence[str] = MASS_VARS) -> "MPoly":
        return cls({(0,) * len(variables): c}, variables)

    @classmethod
    def var(cls, name: str, variables: Sequence[str] = MASS_VARS) -> "MPoly":
        variables = tuple(variables)
        if name not in variables:
            raise InputError(f"unknown variable {name!r}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls({exps: 1}, variables)

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.variables != self.variables:
                raise InputError(
                    f"mismatched variable sets {self.variables} vs {other.variables}")
            return other
        if _is_field_scalar(other) and not isinstance(other, complex):
            return MPoly.const(other, self.variables)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return MPoly(terms, self.variables)

    __radd__ = __add__

    def __neg__(self):
        return MPoly({e: -c for e, c in self.terms.items()}, self.variables)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MPoly(terms, self.variables)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = MPoly.const(1, self.variables)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, monomial: dict) -> Fraction:
        exps = tuple(monomial.get(v, 0) for v in self.variables)
        return self.terms.get(exps, Fraction(0))

    def evaluate(self, values):
        """Evaluate at a mapping ``{name: value}`` or a sequence in variable order."""
        if isinstance(values, dict):
            values = [values[v] for v in self.variables]
        if len(values) != len(self.variables):
            raise InputError("wrong number of values")
        total = 0
        for exps, c in self.terms.items():
            term = c
            for v, e in zip(values, exps):
                if e:
                    term = term * v ** e
            total = total + term
        return total

    def substitute(self, name: str, replacement: "MPoly") -> "MPoly":
        idx = self.variables.index(name)
        replacement = self._coerce(replacement)
        out = MPoly({}, self.variables)
        for exps, c in self.terms.items():
            rest = list(exps)
            k = rest[idx]
            rest[idx] = 0
            out = out + MPoly({tuple(rest): c}, self.variables) * replacement ** k
        return out

    def ratio_to(self, other: "MPoly"):
        """Return r with ``self == r * other`` or None when not proportional."""
        other = self._coerce(other)
        if other.is_zero():
            return None if not self.is_zero() else Fraction(0)
        if set(self.terms) != set(other.terms):
            return None
        ratios = {self.terms[e] / other.terms[e] for e in other.terms}
        return ratios.pop() if len(ratios) == 1 else None

    def __repr__(self):
        return f"MPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, key=lambda e: (-sum(e), [-x for x in e])):
            c = self.terms[exps]
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, exps) if e)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def mass_symbols(variables: Sequence[str] = MASS_VARS):
    return tuple(MPoly.var(v, variables) for v in variables)


# ---------------------------------------------------------------------------
# Univariate polynomials
# ---------------------------------------------------------------------------


def _is_zero(c) -> bool:
    if isinstance(c, MPoly):
        return c.is_zero()
    return c == 0


class Poly:
    """Univariate polynomial, coefficients in ascending degree.

    The coefficient ring is whatever the coefficients are: Fraction, complex,
    mpmath numbers or :class:`MPoly`.  Division needs a field.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = list(coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_rationals(cls, coeffs: Iterable) -> "Poly":
        return cls(as_rational(c) for c in coeffs)

    @classmethod
    def x(cls) -> "Poly":
        return cls((Fraction(0), Fraction(1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        if not self.coeffs:
            raise InputError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        return Poly((other,))

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(c * other for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = Poly((1,))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly((other,))
        return len(self.coeffs) == len(other.coeffs) and all(
            _is_zero(a - b) for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly(k * c for k, c in enumerate(self.coeffs) if k)

    def map_coeffs(self, f) -> "Poly":
        return Poly(f(c) for c in self.coeffs)

    def taylor_shift(self, a) -> "Poly":
        """Coefficients of ``s -> p(a + s)``."""
        out = Poly()
        for c in reversed(self.coeffs):
            out = out * Poly((a, 1)) + c
        return out

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead
        quot = [0] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if _is_zero(c):
                continue
            f = c / lead
            quot[k - dq] = f
            for j, b in enumerate(other.coeffs):
                rem[k - dq + j] = rem[k - dq + j] - f * b
        return Poly(quot), Poly(rem[:dq])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        return Poly(c / self.lead for c in self.coeffs)

    def __repr__(self):
        return f"Poly({format_poly(self)})"

    def pretty(self, var: str = "x") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if _is_zero(c):
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            cs = f"({c})" if isinstance(c, MPoly) else str(c)
            parts.append(cs if not mono else f"{cs}*{mono}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Text serialization: "c0 c1 ... cd"
# ---------------------------------------------------------------------------


def format_poly(p: Poly) -> str:
    """Ascending coefficient list, rationals written ``p/q``."""
    if p.is_zero():
        return "0"
    return " ".join(str(as_rational(c)) for c in p.coeffs)


def parse_poly(text: str) -> Poly:
    tokens = text.split()
    if not tokens:
        raise InputError("empty polynomial text")
    return Poly.from_rationals(tokens)


# ---------------------------------------------------------------------------
# Determinants and resultants
# ---------------------------------------------------------------------------


def _det_field(rows):
    a = [list(r) for r in rows]
    n = len(a)
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if not _is_zero(a[r][col])), None)
        if pivot is None:
            return 0 * det
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det = det * p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if _is_zero(f):
                continue
            for c in range(col, n):
                a[r][c] = a[r][c] - f * a[col][c]
    return det


def _det_division_free(rows):
    # Laplace expansion along rows, memoized on the set of used columns.
    n = len(rows)
    partial = {0: 1}
    for i in range(n):
        nxt: dict = {}
        for mask, val in partial.items():
            for j in range(n):
                if mask >> j & 1:
                    continue
                entry = rows[i][j]
                if _is_zero(entry):
                    continue
                sign = -1 if bin(mask >> (j + 1)).count("1") % 2 else 1
                term = val * entry
                term = term if sign == 1 else -term
                key = mask | (1 << j)
                nxt[key] = nxt[key] + term if key in nxt else term
        partial = nxt
    return partial.get((1 << n) - 1, 0)


def determinant(rows):
    """Determinant of a square matrix over any commutative coefficient ring."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InputError("determinant needs a square matrix")
    if n == 0:
        return 1
    flat = [c for r in rows for c in r]
    if any(isinstance(c, MPoly) for c in flat):
        return _det_division_free(rows)
    return _det_field(rows)


def sylvester_matrix(p: Poly, q: Poly):
    m, n = p.degree, q.degree
    size = m + n
    zero = 0 * (p.lead if not isinstance(p.lead, MPoly) else 1)
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(p.coeffs)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(q.coeffs)):
            row[i + k] = c
        rows.append(row)
    return rows


def _variables_of(p: Poly):
    return {c.variables for c in p.coeffs if isinstance(c, MPoly)}


def resultant(p: Poly, q: Poly):
    """Sylvester resultant of two univariate polynomials."""
    vs = _variables_of(p) | _variables_of(q)
    if len(vs) > 1:
        raise InputError(f"mismatched variable sets: {sorted(vs)}")
    if p.is_zero() and q.is_zero():
        raise InputError("resultant of two zero polynomials")
    if p.is_zero() or q.is_zero():
        other = q if p.is_zero() else p
        return other.lead ** 0 if other.degree == 0 else 0 * other.lead
    if p.degree == 0:
        return p.lead ** q.degree
    if q.degree == 0:
        return q.lead ** p.degree
    return determinant(sylvester_matrix(p, q))


# ---------------------------------------------------------------------------
# gcd, square-free decomposition
# ---------------------------------------------------------------------------


def _require_field(*polys: Poly):
    for p in polys:
        if any(isinstance(c, MPoly) for c in p.coeffs):
            raise InputError("operation needs a field of coefficients")


def gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd over the rationals."""
    _require_field(p, q)
    if p.is_zero() and q.is_zero():
        raise InputError("gcd of two zero polynomials")
    a, b = p, q
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def square_free_part(p: Poly) -> Poly:
    if p.is_zero():
        raise InputError("square-free part of the zero polynomial")
    if p.degree <= 0:
        return Poly((Fraction(1),))
    return (p // gcd(p, p.derivative())).monic()


def square_free_decomposition(p: Poly):
    """Yun's algorithm: list of (factor, multiplicity) with p = c * prod f^k."""
    if p.is_zero():
        raise InputError("square-free decomposition of the zero polynomial")
    p = p.monic()
    out = []
    if p.degree == 0:
        return out
    dp = p.derivative()
    a = gcd(p, dp)
    b = p // a
    c = dp // a
    k = 1
    while b.degree > 0:
        d = c - b.derivative()
        g = gcd(b, d)
        if g.degree > 0:
            out.append((g, k))
        b = b // g
        c = d // g
        k += 1
    return out


# ---------------------------------------------------------------------------
# Real roots: Sturm sequences
# ---------------------------------------------------------------------------


def sturm_sequence(p: Poly):
    _require_field(p)
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append(-r)
    return [s for s in seq if not s.is_zero()]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _variations(signs) -> int:
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _variations_at(seq, x) -> int:
    if x == float("inf"):
        return _variations([_sign(s.lead) for s in seq])
    if x == float("-inf"):
        return _variations([_sign(s.lead) * (-1) ** s.degree for s in seq])
    return _variations([_sign(s(x)) for s in seq])


def count_real_roots(p: Poly, lo=float("-inf"), hi=float("inf")) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    if p.is_zero():
        raise InputError("zero polynomial")
    seq = sturm_sequence(p.map_coeffs(as_rational))
    return _variations_at(seq, lo) - _variations_at(seq, hi)


def root_bound(p: Poly) -> Fraction:
    lead = abs(p.lead)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))


def real_root_isolation(p: Poly, width=None):
    """Disjoint rational intervals (lo, hi), each holding exactly one real root.

    The polynomial is made square-free first; p(lo) and p(hi) have opposite
    signs for every interval.  With ``width`` the intervals are bisected until
    ``hi - lo <= width``.
    """
    if p.is_zero():
        raise InputError("cannot isolate roots of the zero polynomial")
    p = square_free_part(p.map_coeffs(as_rational))
    if p.degree <= 0:
        return []
    seq = sturm_sequence(p)
    bound = root_bound(p)
    found = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = _variations_at(seq, lo) - _variations_at(seq, hi)
        if n == 0:
            continue
        if n == 1 and p(hi) != 0:
            found.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        k = 3
        while p(mid) == 0:
            mid = lo + (hi - lo) * Fraction(k, 2 * k + 1)
            k += 1
        stack.append((mid, hi))
        stack.append((lo, mid))
    found.sort()
    if width is not None:
        found = [refine_root(p, lo, hi, width) for lo, hi in found]
    return found


def refine_root(p: Poly, lo, hi, width):
    """Bisect a sign-changing interval of a square-free p down to ``width``."""
    lo, hi, width = as_rational(lo), as_rational(hi), as_rational(width)
    slo = _sign(p(lo))
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = _sign(p(mid))
        if sm == 0:
            delta = min(width, hi - lo) / 4
            return mid - delta, mid + delta
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def rational_roots(p: Poly):
    """Exact rational roots of a rational polynomial (distinct, sorted)."""
    p = p.map_coeffs(as_rational)
    if p.is_zero():
        raise InputError("zero polynomial")
    out = []
    for lo, hi in real_root_isolation(p):
        lo, hi = refine_root(square_free_part(p), lo, hi, Fraction(1, 10 ** 12))
        guess = ((lo + hi) / 2).limit_denominator(10 ** 6)
        if p(guess) == 0:
            out.append(guess)
    return sorted(set(out))


# ---------------------------------------------------------------------------
# Exact linear algebra over the rationals
# ---------------------------------------------------------------------------


def rational_matrix(rows) -> list:
    return [[as_rational(c) for c in r] for r in rows]


def charpoly(rows) -> Poly:
    """det(x I - A) by Faddeev-LeVerrier, exact over the rationals."""
    a = rational_matrix(rows)
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # m <- A m + c_{n-k+1} I
        am = [[sum(a[i][l] * m[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            am[i][i] += coeffs[n - k + 1]
        m = am
        tr = sum(sum(a[i][l] * m[l][i] for l in range(n)) for i in range(n))
        coeffs[n - k] = -tr / k
    return Poly(coeffs)


def rank(rows) -> int:
    a = rational_matrix(rows)
    if not a:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        for i in range(n_rows):
            if i != r and a[i][col] != 0:
                f = a[i][col] / a[r][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == n_rows:
            break
    return r


def nullspace(rows):
    """Basis of the right kernel, as a list of Fraction vectors."""
    a = rational_matrix(rows)
    n_rows, n_cols = len(a), len(a[0])
    pivots = []
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == n_rows:
            break
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n_cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fc]
        basis.append(v)
    return basis


def identity(n: int):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

