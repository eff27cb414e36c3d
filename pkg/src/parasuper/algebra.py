"""Exact arithmetic: odd prime fields, rationals, and cyclotomic fields Q(zeta_M).

Every character value in this package is an element of one fixed cyclotomic
field per configuration, held in canonical form: a coefficient vector of
rationals over the power basis zeta^0, ..., zeta^(phi(M)-1), reduced modulo
the M-th cyclotomic polynomial.  Equality of values is coefficient-wise
equality, so all downstream checks (orthogonality, constancy) are exact.

Rationals are fractions.Fraction, normalized to plain int when integral so
that hashing and comparison stay cheap.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import ValidationError


def is_odd_prime(q):
    if q < 3 or q % 2 == 0:
        return False
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


def fp_inv(a, p):
    """Multiplicative inverse in F_p."""
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod %d" % p)
    return pow(a, p - 2, p)


def smallest_nonsquare(p):
    squares = {(i * i) % p for i in range(1, p)}
    for t in range(2, p):
        if t not in squares:
            return t
    raise ValueError("no non-square mod %d" % p)


def primitive_root(p):
    """Smallest primitive root of F_p (p an odd prime)."""
    order = p - 1
    factors = set()
    n, d = order, 2
    while d * d <= n:
        while n % d == 0:
            factors.add(d)
            n //= d
        d += 1
    if n > 1:
        factors.add(n)
    for g in range(2, p):
        if all(pow(g, order // f, p) != 1 for f in factors):
            return g
    raise ValueError("no primitive root mod %d" % p)


def _poly_divmod_int(num, den):
    # exact division of integer polynomials, den monic; coefficients ascending
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    assert all(c == 0 for c in num[len(den) - 1:]) or all(c == 0 for c in num), num
    return out, num[: len(den) - 1]


_CYCLO_CACHE = {}


def cyclotomic_poly(M):
    """Coefficients (ascending) of the M-th cyclotomic polynomial."""
    if M in _CYCLO_CACHE:
        return _CYCLO_CACHE[M]
    poly = [-1] + [0] * (M - 1) + [1]  # x^M - 1
    for d in range(1, M):
        if M % d == 0:
            phi_d = cyclotomic_poly(d)
            poly, rem = _poly_divmod_int(poly, phi_d)
            assert not any(rem), "cyclotomic division must be exact"
    _CYCLO_CACHE[M] = tuple(poly)
    return _CYCLO_CACHE[M]


def _num(x):
    """Canonicalize a rational: Fraction with denominator 1 becomes int."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return x
    return int(x)


class CycField:
    """The cyclotomic field Q(zeta_M), with reduction tables precomputed."""

    def __init__(self, M):
        if M < 2:
            raise ValidationError("cyc-order", "cyclotomic order must be >= 2, got %r" % (M,))
        self.M = M
        poly = cyclotomic_poly(M)
        self.dim = len(poly) - 1
        # rows[k] = integer coefficient vector of zeta^k in the power basis
        upto = max(M, 2 * self.dim - 1)
        rows = []
        for k in range(upto + 1):
            if k < self.dim:
                row = [0] * self.dim
                row[k] = 1
            else:
                prev = rows[k - 1]
                row = [0] + list(prev[:-1])
                top = prev[-1]
                if top:
                    row = [c - top * poly[i] for i, c in enumerate(row)]
            rows.append(row)
        self._pow = [tuple(r) for r in rows]
        self.zero = Cyc(self, (0,) * self.dim)
        self.one = Cyc(self, self._pow[0])

    def __repr__(self):
        return "CycField(%d)" % self.M

    def zeta_pow(self, k):
        """zeta_M^k as a canonical field element."""
        return Cyc(self, self._pow[k % self.M])

    def root_of_unity(self, order, k):
        """zeta_order^k embedded in this field (order must divide M)."""
        if self.M % order:
            raise ValidationError("cyc-embed", "order %d does not divide M=%d" % (order, self.M))
        return self.zeta_pow((self.M // order) * (k % order))

    def additive_character(self, p, t):
        """Value eps(t) = zeta_p^t of the fixed nontrivial character of (F_p, +)."""
        return self.root_of_unity(p, int(t) % p)

    def from_coeffs(self, coeffs):
        coeffs = tuple(_num(Fraction(c)) for c in coeffs)
        if len(coeffs) != self.dim:
            raise ValidationError(
                "cyc-coeffs", "expected %d coefficients, got %d" % (self.dim, len(coeffs)))
        return Cyc(self, coeffs)

    def from_int(self, n):
        return Cyc(self, (int(n),) + (0,) * (self.dim - 1))

    def from_fraction(self, q):
        return Cyc(self, (_num(Fraction(q)),) + (0,) * (self.dim - 1))

    def parse(self, strings):
        """Inverse of Cyc.serialize: list of 'num' or 'num/den' strings."""
        vals = []
        for s in strings:
            if "/" in s:
                a, b = s.split("/")
                vals.append(Fraction(int(a), int(b)))
            else:
                vals.append(int(s))
        return self.from_coeffs(vals)


class Cyc:
    """Immutable element of a CycField in canonical coefficient form."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)
        self._hash = None

    def _check(self, other):
        if self.field is not other.field and self.field.M != other.field.M:
            raise ValidationError("cyc-mismatch", "elements of Q(zeta_%d) and Q(zeta_%d) cannot mix"
                                  % (self.field.M, other.field.M))

    def __add__(self, other):
        if not isinstance(other, Cyc):
            return NotImplemented
        self._check(other)
        return Cyc(self.field, tuple(_num(a + b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if not isinstance(other, Cyc):
            return NotImplemented
        self._check(other)
        return Cyc(self.field, tuple(_num(a - b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Cyc(self.field, tuple(_num(-a) for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Cyc):
            return NotImplemented
        self._check(other)
        d = self.field.dim
        conv = [0] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        conv[i + j] += a * b
        out = list(conv[:d])
        pow_rows = self.field._pow
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c:
                row = pow_rows[k]
                for i in range(d):
                    if row[i]:
                        out[i] += c * row[i]
        return Cyc(self.field, tuple(_num(v) for v in out))

    __rmul__ = __mul__

    def scale(self, q):
        if q == 1:
            return self
        return Cyc(self.field, tuple(_num(a * q) for a in self.coeffs))

    def conjugate(self):
        """Complex conjugation: zeta maps to zeta^(-1)."""
        d = self.field.dim
        M = self.field.M
        out = [0] * d
        pow_rows = self.field._pow
        for k, a in enumerate(self.coeffs):
            if a:
                row = pow_rows[(M - k) % M]
                for i in range(d):
                    if row[i]:
                        out[i] += a * row[i]
        return Cyc(self.field, tuple(_num(v) for v in out))

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def as_fraction(self):
        if not self.is_rational():
            raise ValidationError("cyc-not-rational", "value %r is not rational" % (self,))
        return Fraction(self.coeffs[0])

    def as_int(self):
        q = self.as_fraction()
        if q.denominator != 1:
            raise ValidationError("cyc-not-integer", "value %r is not an integer" % (self,))
        return int(q)

    def serialize(self):
        out = []
        for c in self.coeffs:
            f = Fraction(c)
            if f.denominator == 1:
                out.append(str(f.numerator))
            else:
                out.append("%d/%d" % (f.numerator, f.denominator))
        return out

    def __eq__(self, other):
        if not isinstance(other, Cyc):
            return NotImplemented
        return self.field.M == other.field.M and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.M, self.coeffs))
        return self._hash

    def __repr__(self):
        return "Cyc(M=%d, %s)" % (self.field.M, list(self.coeffs))


def lcm(a, b):
    return a * b // gcd(a, b)
