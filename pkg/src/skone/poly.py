"""Univariate polynomials over a field tower, plus monic quotient rings.

Polynomials are coefficient lists (low degree first) of FieldElements.
QuotientRing implements R[T]/(f) for monic f over any commutative coefficient
domain that supports +, -, *, is_zero; nesting QuotientRings gives the etale
subalgebras used to split symbol and p-algebras.
"""

from __future__ import annotations

from .errors import UnsupportedTower
from .fields import FieldElement, FieldTower, FiniteField


class Poly:
    """Dense univariate polynomial over a tower."""

    __slots__ = ("tower", "coeffs")

    def __init__(self, tower: FieldTower, coeffs):
        cs = [tower.elem(c) if not isinstance(c, FieldElement) else c for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.tower = tower
        self.coeffs = cs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1].is_one()

    def __getitem__(self, i: int) -> FieldElement:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.tower.zero()

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.tower, [self[i] + other[i] for i in range(n)])

    def __neg__(self):
        return Poly(self.tower, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            return Poly(self.tower, [c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly(self.tower, [])
        out = [self.tower.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.tower, out)

    def __pow__(self, n: int):
        result = Poly(self.tower, [self.tower.one()])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        inv_lead = other.coeffs[-1].inverse()
        rem = self.coeffs[:]
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(self.tower, []), self
        quo = [self.tower.zero()] * (dq + 1)
        for shift in range(dq, -1, -1):
            c = rem[shift + other.degree] * inv_lead
            quo[shift] = c
            if not c.is_zero():
                for i, oc in enumerate(other.coeffs):
                    rem[shift + i] = rem[shift + i] - c * oc
        return Poly(self.tower, quo), Poly(self.tower, rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = self.coeffs[-1].inverse()
        return Poly(self.tower, [c * inv for c in self.coeffs])

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def eval(self, x: FieldElement) -> FieldElement:
        acc = self.tower.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_in(self, x, one):
        """Horner evaluation at an element of any ring containing the tower."""
        acc = one * self.tower.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + one * c
        return acc

    def derivative(self) -> "Poly":
        return Poly(self.tower,
                    [self.coeffs[i] * i for i in range(1, len(self.coeffs))])

    def __repr__(self):
        if self.is_zero():
            return "0"
        bits = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            cs = str(c)
            if any(ch in cs for ch in "+- ") and not (cs.startswith("-") and cs[1:].isdigit()):
                cs = f"({cs})"
            if i == 0:
                bits.append(cs)
            else:
                mono = "X" if i == 1 else f"X^{i}"
                bits.append(mono if cs == "1" else f"{cs}*{mono}")
        return " + ".join(bits)

    @staticmethod
    def x(tower: FieldTower) -> "Poly":
        return Poly(tower, [tower.zero(), tower.one()])


def monic_nth_root(p: Poly, n: int) -> Poly:
    """Exact n-th root of a monic perfect n-th power; needs char coprime to n."""
    if not p.is_monic():
        raise ValueError("monic_nth_root expects a monic polynomial")
    if p.degree % n != 0:
        raise ValueError("degree not divisible by n")
    char = p.tower.characteristic
    if char != 0 and n % char == 0:
        raise UnsupportedTower(
            "n-th root extraction divides by n; not available when char | n")
    m = p.degree // n
    tower = p.tower
    ninv = tower.elem(1) / tower.elem(n)
    q = Poly(tower, [tower.zero()] * m + [tower.one()])
    for j in range(m - 1, -1, -1):
        # coefficient of X^(j + (n-1)m) in q^n is n*q_j + (known terms)
        t = q ** n
        idx = j + (n - 1) * m
        delta = (p[idx] - t[idx]) * ninv
        coeffs = q.coeffs[:]
        coeffs[j] = coeffs[j] + delta
        q = Poly(tower, coeffs)
    if q ** n == p:
        return q
    raise ValueError("polynomial is not a perfect n-th power")


def monic_sqrt_char2(p: Poly) -> Poly:
    """Square root of a monic perfect square over a perfect field of char 2."""
    tower = p.tower
    if tower.characteristic != 2:
        raise ValueError("char-2 square root called in wrong characteristic")
    if p.degree % 2:
        raise ValueError("odd degree cannot be a square")
    coeffs = []
    for i in range(0, p.degree + 1, 2):
        if not p[i + 1].is_zero() if i + 1 <= p.degree else False:
            raise ValueError("odd-degree coefficient nonzero; not a square")
        coeffs.append(_sqrt_perfect(p[i]))
    q = Poly(tower, coeffs)
    if q * q == p:
        return q
    raise ValueError("polynomial is not a perfect square")


def _sqrt_perfect(x: FieldElement) -> FieldElement:
    tower = x.tower
    if isinstance(tower, FiniteField) and tower.p == 2:
        return x ** (tower.q // 2)
    raise UnsupportedTower("char-2 square roots only over finite fields")


class QuotElt:
    """Element of a QuotientRing; coefficient vector over the base domain."""

    __slots__ = ("ring", "vec")

    def __init__(self, ring: "QuotientRing", vec):
        self.ring = ring
        self.vec = tuple(vec)

    def __add__(self, other):
        o = self.ring.coerce(other)
        return QuotElt(self.ring, [a + b for a, b in zip(self.vec, o.vec)])

    __radd__ = __add__

    def __neg__(self):
        return QuotElt(self.ring, [-a for a in self.vec])

    def __sub__(self, other):
        return self + (-self.ring.coerce(other))

    def __rsub__(self, other):
        return self.ring.coerce(other) - self

    def __mul__(self, other):
        o = self.ring.coerce(other)
        return self.ring._mul(self, o)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self.ring.coerce(other)
        return all(self.ring._base_eq(a, b) for a, b in zip(self.vec, o.vec))

    def is_zero(self):
        return all(self.ring._base_is_zero(a) for a in self.vec)

    def scalar_part(self):
        """The constant coefficient if all higher ones vanish, else None."""
        if all(self.ring._base_is_zero(a) for a in self.vec[1:]):
            return self.vec[0]
        return None

    def __repr__(self):
        return "QuotElt(" + ", ".join(map(str, self.vec)) + ")"


class QuotientRing:
    """R[T]/(f) for monic f; R is a tower or another QuotientRing."""

    def __init__(self, base, modulus_coeffs):
        # modulus given WITHOUT the leading 1: f = T^d + sum modulus[i] T^i
        self.base = base
        self.modulus = list(modulus_coeffs)
        self.deg = len(self.modulus)

    # --- base-domain helpers -------------------------------------------
    def base_zero(self):
        return self.base.zero()

    def base_one(self):
        return self.base.one()

    def _base_eq(self, a, b):
        return a == b

    def _base_is_zero(self, a):
        return a.is_zero()

    def zero(self):
        return QuotElt(self, [self.base_zero()] * self.deg)

    def one(self):
        return QuotElt(self, [self.base_one()] + [self.base_zero()] * (self.deg - 1))

    def gen(self):
        vec = [self.base_zero()] * self.deg
        if self.deg == 1:
            # T = -modulus[0]
            return QuotElt(self, [-self.modulus[0]])
        vec[1] = self.base_one()
        return QuotElt(self, vec)

    def coerce(self, x):
        if isinstance(x, QuotElt) and x.ring is self:
            return x
        if isinstance(self.base, QuotientRing):
            val = self.base.coerce(x)
        elif isinstance(x, int):
            val = self.base.elem(x)
        else:
            val = x
        return QuotElt(self, [val] + [self.base_zero()] * (self.deg - 1))

    def _mul(self, a: QuotElt, b: QuotElt) -> QuotElt:
        d = self.deg
        prod = [self.base_zero() for _ in range(2 * d - 1)]
        for i, x in enumerate(a.vec):
            if self._base_is_zero(x):
                continue
            for j, y in enumerate(b.vec):
                prod[i + j] = prod[i + j] + x * y
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            if self._base_is_zero(c):
                continue
            prod[k] = self.base_zero()
            for i, mi in enumerate(self.modulus):
                prod[k - d + i] = prod[k - d + i] - c * mi
        return QuotElt(self, prod[:d])


def scalar_of(x):
    """Peel nested QuotElt layers; return the underlying FieldElement or None."""
    while isinstance(x, QuotElt):
        s = x.scalar_part()
        if s is None:
            return None
        x = s
    return x
