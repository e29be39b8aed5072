"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Scalars are polynomials in zeta_N with arbitrary-precision rational
coefficients, kept reduced mod the N-th cyclotomic polynomial.  Canonical form
is a coefficient tuple of length phi(N); equality and hashing are
coefficient-wise.  No floating point anywhere.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover - gmpy2 is an accelerator, not required
    mpq = Fraction

from .errors import ConductorMismatch, ScalarParseError

MPQ_ZERO = mpq(0)
MPQ_ONE = mpq(1)

_COERCIBLE = (int, type(mpq(0)), Fraction)


def euler_phi(n: int) -> int:
    assert n >= 1
    result = n
    p, m = 2, n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _int_poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    # num / den for integer polynomials, den monic, remainder known to be zero
    num = list(num)
    dd = len(den) - 1
    assert den[dd] == 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            out[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    assert all(x == 0 for x in num[:dd]), "non-exact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_modulus(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, low degree first, monic."""
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in _divisors(n):
        if d < n:
            poly = _int_poly_div_exact(poly, cyclotomic_modulus(d))
    return tuple(poly)


# polynomial helpers over mpq, dense low-first lists


def _pdeg(p):
    for i in range(len(p) - 1, -1, -1):
        if p[i]:
            return i
    return -1


def _pdivmod(a, b):
    db = _pdeg(b)
    assert db >= 0
    r = list(a)
    if _pdeg(r) < db:
        return [MPQ_ZERO], r
    q = [MPQ_ZERO] * (_pdeg(r) - db + 1)
    inv_lead = 1 / b[db]
    for i in range(_pdeg(r), db - 1, -1):
        c = r[i]
        if c:
            f = c * inv_lead
            q[i - db] = f
            for j in range(db + 1):
                r[i - db + j] -= f * b[j]
    return q, r


def _pmulsub(s0, q, s1):
    # s0 - q*s1
    out = list(s0) + [MPQ_ZERO] * max(0, len(q) + len(s1) - 1 - len(s0))
    for i, qi in enumerate(q):
        if qi:
            for j, sj in enumerate(s1):
                if sj:
                    out[i + j] -= qi * sj
    return out


class CycloField:
    """The field Q(zeta_N) with its canonical reduction data."""

    _instances: dict[int, "CycloField"] = {}

    def __new__(cls, conductor: int):
        conductor = int(conductor)
        if conductor < 1:
            raise ScalarParseError("conductor must be a positive integer",
                                   conductor=conductor)
        inst = cls._instances.get(conductor)
        if inst is None:
            inst = super().__new__(cls)
            inst.conductor = conductor
            inst.modulus = cyclotomic_modulus(conductor)
            inst.phi = len(inst.modulus) - 1
            inst._zero = None
            inst._one = None
            cls._instances[conductor] = inst
        return inst

    def __repr__(self):
        return f"CycloField({self.conductor})"

    def __eq__(self, other):
        return isinstance(other, CycloField) and other.conductor == self.conductor

    def __hash__(self):
        return hash(("CycloField", self.conductor))

    def _make(self, coeffs) -> "CycloNumber":
        return CycloNumber(self, tuple(coeffs))

    def zero(self) -> "CycloNumber":
        if self._zero is None:
            self._zero = self._make([MPQ_ZERO] * self.phi)
        return self._zero

    def one(self) -> "CycloNumber":
        if self._one is None:
            self._one = self.scalar(1)
        return self._one

    def scalar(self, value) -> "CycloNumber":
        """Coerce an int, rational, string literal, or CycloNumber into this field."""
        if isinstance(value, CycloNumber):
            if value.field is self or value.field == self:
                return value
            return value.embed(self)
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, _COERCIBLE):
            coeffs = [MPQ_ZERO] * self.phi
            coeffs[0] = mpq(value)
            return self._make(coeffs)
        raise ScalarParseError(f"cannot coerce {type(value).__name__} to CycloNumber")

    def rational(self, p, q=1) -> "CycloNumber":
        coeffs = [MPQ_ZERO] * self.phi
        coeffs[0] = mpq(p) / mpq(q)
        return self._make(coeffs)

    def root_of_unity(self, k: int) -> "CycloNumber":
        """zeta_N^k in canonical form."""
        k = int(k) % self.conductor
        if k < self.phi:
            coeffs = [MPQ_ZERO] * self.phi
            coeffs[k] = MPQ_ONE
            return self._make(coeffs)
        vec = [MPQ_ZERO] * (k + 1)
        vec[k] = MPQ_ONE
        return self._make(_reduce(vec, self))

    def element(self, coeffs) -> "CycloNumber":
        coeffs = [mpq(c) for c in coeffs]
        if len(coeffs) != self.phi:
            raise ScalarParseError(
                f"coefficient vector must have length {self.phi}",
                got=len(coeffs))
        return self._make(coeffs)

    def parse(self, text: str) -> "CycloNumber":
        return parse_scalar(self, text)


def _reduce(vec, field: CycloField):
    """Reduce an mpq coefficient list mod Phi_N; returns a tuple of length phi."""
    mod = field.modulus
    phi = field.phi
    if len(vec) < phi:
        vec = list(vec) + [MPQ_ZERO] * (phi - len(vec))
    for i in range(len(vec) - 1, phi - 1, -1):
        c = vec[i]
        if c:
            vec[i] = MPQ_ZERO
            base = i - phi
            for j in range(phi):
                mj = mod[j]
                if mj:
                    vec[base + j] -= c * mj
    return tuple(vec[:phi])


class CycloNumber:
    """Immutable element of Q(zeta_N) in canonical reduced form."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: CycloField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    # -- predicates

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ScalarParseError(f"{self} is not rational")
        return self.coeffs[0]

    def __bool__(self):
        return any(self.coeffs)

    # -- ring structure

    def _coerce(self, other):
        if isinstance(other, CycloNumber):
            if other.field is self.field:
                return other
            if other.field.conductor == self.field.conductor:
                return other
            raise ConductorMismatch(
                "operands live in different cyclotomic fields; embed explicitly",
                left=self.field.conductor, right=other.field.conductor)
        if isinstance(other, _COERCIBLE):
            return self.field.scalar(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycloNumber(self.field,
                           tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycloNumber(self.field,
                           tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return CycloNumber(self.field, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        phi = self.field.phi
        if phi == 1:
            return CycloNumber(self.field, (a[0] * b[0],))
        prod = [MPQ_ZERO] * (2 * phi - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        return CycloNumber(self.field, _reduce(prod, self.field))

    __rmul__ = __mul__

    def inv(self) -> "CycloNumber":
        """Multiplicative inverse via extended Euclid against Phi_N."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero CycloNumber")
        phi = self.field.phi
        if phi == 1 or self.is_rational():
            coeffs = [MPQ_ZERO] * phi
            coeffs[0] = 1 / self.coeffs[0]
            return CycloNumber(self.field, tuple(coeffs))
        modpoly = [mpq(c) for c in self.field.modulus]
        r0, r1 = modpoly, list(self.coeffs)
        s0, s1 = [MPQ_ZERO], [MPQ_ONE]
        while _pdeg(r1) > 0:
            q, r = _pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _pmulsub(s0, q, s1)
        assert _pdeg(r1) == 0, "Phi_N not coprime to a nonzero element"
        lead = r1[0]
        u = [c / lead for c in s1]
        return CycloNumber(self.field, _reduce(u, self.field))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self
        if k < 0:
            base = self.inv()
            k = -k
        result = self.field.one()
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- embeddings

    def embed(self, target: CycloField) -> "CycloNumber":
        """Image in Q(zeta_M) for a conductor M that N divides."""
        n, m = self.field.conductor, target.conductor
        if m == n:
            return CycloNumber(target, self.coeffs)
        if m % n != 0:
            raise ConductorMismatch(
                "embedding requires the source conductor to divide the target",
                source=n, target=m)
        step = m // n
        vec = [MPQ_ZERO] * ((self.field.phi - 1) * step + 1)
        for k, c in enumerate(self.coeffs):
            if c:
                vec[k * step] += c
        return CycloNumber(target, _reduce(vec, target))

    # -- equality and display

    def __eq__(self, other):
        if isinstance(other, _COERCIBLE):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycloNumber):
            return NotImplemented
        return (self.field.conductor == other.field.conductor
                and self.coeffs == other.coeffs)

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.field.conductor, self.coeffs))

    def __repr__(self):
        return f"<{self}>"

    def __str__(self):
        n = self.field.conductor
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(f"z{n}^{k}")
            elif c == -1:
                terms.append(f"-z{n}^{k}")
            else:
                terms.append(f"{c}*z{n}^{k}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            if t.startswith("-"):
                out += " - " + t[1:]
            else:
                out += " + " + t
        return out


_TOKEN = re.compile(
    r"\s*(?:(?P<sign>[+-])"
    r"|(?P<rat>\d+(?:/\d+)?)"
    r"|(?P<unit>z\d+(?:\^-?\d+)?)"
    r"|(?P<star>\*))")

_UNIT = re.compile(r"z(\d+)(?:\^(-?\d+))?\Z")


def parse_scalar(field: CycloField, text: str) -> CycloNumber:
    """Parse the textual scalar form, e.g. '1/2 - z3^1' or '-2*z12^5'.

    Tokens zM^k with M properly dividing the field conductor embed
    automatically; any other conductor is an error.
    """
    total = field.zero()
    sign = 1
    rat = None
    unit = None
    star = False
    seen_any = False

    def commit():
        nonlocal total, sign, rat, unit, star, seen_any
        if rat is None and unit is None:
            raise ScalarParseError("empty term in scalar literal", text=text)
        if star and unit is None:
            raise ScalarParseError("dangling '*' in scalar literal", text=text)
        term = field.one() if unit is None else unit
        if rat is not None:
            term = term * rat
        if sign < 0:
            term = -term
        total = total + term
        sign, rat, unit, star, seen_any = 1, None, None, False, True

    pos = 0
    dangling_sign = False
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ScalarParseError("unreadable scalar literal",
                                   text=text, at=pos)
        pos = m.end()
        if m.group("sign"):
            if rat is not None or unit is not None:
                commit()
            dangling_sign = True
            if m.group("sign") == "-":
                sign = -sign
        elif m.group("rat"):
            dangling_sign = False
            if rat is not None or unit is not None:
                raise ScalarParseError("misplaced rational in scalar literal",
                                       text=text, at=pos)
            if "/" in m.group("rat"):
                p, q = m.group("rat").split("/")
                rat = mpq(int(p)) / mpq(int(q))
            else:
                rat = mpq(int(m.group("rat")))
        elif m.group("star"):
            if rat is None or unit is not None or star:
                raise ScalarParseError("misplaced '*' in scalar literal",
                                       text=text, at=pos)
            star = True
        else:
            dangling_sign = False
            if unit is not None:
                raise ScalarParseError("two roots of unity in one term",
                                       text=text, at=pos)
            um = _UNIT.match(m.group("unit"))
            conductor, exp = int(um.group(1)), um.group(2)
            exp = 1 if exp is None else int(exp)
            if conductor == field.conductor:
                unit = field.root_of_unity(exp)
            elif field.conductor % conductor == 0:
                unit = CycloField(conductor).root_of_unity(exp).embed(field)
            else:
                raise ConductorMismatch(
                    "scalar literal uses a conductor that does not divide the field's",
                    literal=conductor, field=field.conductor)
    if dangling_sign:
        raise ScalarParseError("dangling sign in scalar literal", text=text)
    if rat is None and unit is None and not seen_any:
        raise ScalarParseError("empty scalar literal", text=text)
    if rat is not None or unit is not None:
        commit()
    return total


def format_scalar(x: CycloNumber) -> str:
    return str(x)
