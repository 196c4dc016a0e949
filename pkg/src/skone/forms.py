"""Quadratic forms, isotropy engines, Witt classes and I^n-level certificates.

Characteristic != 2 forms are diagonal; characteristic-2 forms are sums of
binary blocks [a,b] (a x^2 + x y + b y^2) plus a diagonal remainder.

Isotropy dispatch:
  Q          Hasse-Minkowski local conditions + meet-in-the-middle witness search
  F_q        exhaustive / targeted search
  Q_p        unit/valuation analysis through exact Hilbert symbols
  k((t))...  Springer residue decomposition (residue characteristic != 2)

I^n certificates are only claimed over towers where the claimed criteria are
complete: Q (torsion-free I^3), p-adic (I^3 = 0), finite fields (I^2 = 0) and
Laurent towers over these via the residue rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .errors import InconsistentConstruction, Undecided, UnsupportedTower
from .fields import (
    FieldElement,
    FieldTower,
    FiniteField,
    LaurentExt,
    PAdicDescriptor,
    Rationals,
    RootAdjunction,
    is_nth_power,
    laurent_split,
)

PFISTER_CONVENTION = "pfister <<a1,...,an>> = <1,-a1> x ... x <1,-an>"
HASSE_CONVENTION = "hasse = prod_{i<j} (a_i, a_j)_v"


# ---------------------------------------------------------------------------
# effective tower kind
# ---------------------------------------------------------------------------

def effective_tower(tower: FieldTower) -> FieldTower:
    """Strip root adjunctions that do not change the underlying field."""
    while isinstance(tower, RootAdjunction) and tower._passthrough:
        tower = tower.base
    return tower


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------

class QuadraticForm:
    """Nonsingular quadratic form over a tower.

    diag: tuple of nonzero diagonal entries (char != 2).
    blocks/diag: char 2, blocks are (a, b) for a x^2 + xy + b y^2.
    """

    def __init__(self, tower: FieldTower, diag=(), blocks=()):
        self.tower = tower
        self.char2 = tower.characteristic == 2
        self.diag = tuple(tower.elem(d) for d in diag)
        self.blocks = tuple((tower.elem(a), tower.elem(b)) for a, b in blocks)
        if not self.char2:
            if self.blocks:
                raise InconsistentConstruction("binary blocks are a char-2 presentation")
            if any(d.is_zero() for d in self.diag):
                raise InconsistentConstruction("diagonal entries must be nonzero")
        else:
            if any(d.is_zero() for d in self.diag):
                raise InconsistentConstruction("diagonal entries must be nonzero")

    @property
    def dim(self) -> int:
        return len(self.diag) + 2 * len(self.blocks)

    def eval(self, vec) -> FieldElement:
        vec = [self.tower.elem(v) for v in vec]
        acc = self.tower.zero()
        idx = 0
        for (a, b) in self.blocks:
            x, y = vec[idx], vec[idx + 1]
            acc = acc + a * x * x + x * y + b * y * y
            idx += 2
        for d in self.diag:
            acc = acc + d * vec[idx] * vec[idx]
            idx += 1
        return acc

    def perp(self, other: "QuadraticForm") -> "QuadraticForm":
        if other.tower != self.tower:
            raise InconsistentConstruction("orthogonal sum over different towers")
        return QuadraticForm(self.tower, self.diag + other.diag,
                             self.blocks + other.blocks)

    def neg(self) -> "QuadraticForm":
        if self.char2:
            # -q = q in characteristic 2
            return self
        return QuadraticForm(self.tower, tuple(-d for d in self.diag))

    def scale(self, c) -> "QuadraticForm":
        c = self.tower.elem(c)
        if c.is_zero():
            raise InconsistentConstruction("scaling by zero")
        if self.char2:
            cinv = c.inverse()
            return QuadraticForm(self.tower, tuple(c * d for d in self.diag),
                                 tuple((c * a, b * cinv) for a, b in self.blocks))
        return QuadraticForm(self.tower, tuple(c * d for d in self.diag))

    def __repr__(self):
        bits = [f"[{a},{b}]" for a, b in self.blocks]
        if self.diag:
            bits.append("<" + ",".join(str(d) for d in self.diag) + ">")
        return " + ".join(bits) if bits else "<>"

    def __eq__(self, other):
        return (isinstance(other, QuadraticForm) and self.tower == other.tower
                and self.diag == other.diag and self.blocks == other.blocks)


def pfister(tower: FieldTower, entries) -> QuadraticForm:
    """n-fold Pfister form <<a_1, ..., a_n>> (convention: tensor of <1, -a_i>;
    in characteristic 2 the last slot becomes the binary block [1, a_n])."""
    entries = [tower.elem(a) for a in entries]
    if any(a.is_zero() for a in entries):
        raise InconsistentConstruction("Pfister slots must be nonzero")
    if not entries:
        return QuadraticForm(tower, (tower.one(),))
    if tower.characteristic != 2:
        diag = [tower.one()]
        for a in entries:
            diag = diag + [-(a * d) for d in diag]
        return QuadraticForm(tower, diag)
    bilinear = [tower.one()]
    for a in entries[:-1]:
        bilinear = bilinear + [a * d for d in bilinear]  # -a = a in char 2
    a_n = entries[-1]
    blocks = [(d, a_n * d.inverse()) for d in bilinear]
    return QuadraticForm(tower, (), blocks)


# ---------------------------------------------------------------------------
# rational Hilbert symbols and square-class bookkeeping
# ---------------------------------------------------------------------------

def _val_unit_int(x: Fraction, p: int) -> tuple[int, int]:
    """x = p^v * unit with unit a p-free rational; unit returned as num*den."""
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, num * den  # same square class as num/den


def hilbert_symbol_rational(a: Fraction, b: Fraction, place) -> int:
    """(a, b)_v over Q; place is a prime or the string "inf". Returns +-1."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise InconsistentConstruction("Hilbert symbol needs nonzero entries")
    if place == "inf":
        return -1 if (a < 0 and b < 0) else 1
    p = place
    alpha, u = _val_unit_int(a, p)
    beta, w = _val_unit_int(b, p)
    if p != 2:
        eps = (p - 1) // 2
        sign = 1
        if (alpha * beta * eps) % 2:
            sign = -sign
        if beta % 2 and _legendre(u, p) < 0:
            sign = -sign
        if alpha % 2 and _legendre(w, p) < 0:
            sign = -sign
        return sign
    # p = 2 (Serre's formula with eps and omega on the odd parts)
    exp = _eps2(u) * _eps2(w) + alpha * _omega2(w) + beta * _omega2(u)
    return -1 if exp % 2 else 1


def _legendre(u: int, p: int) -> int:
    r = pow(u % p, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def _eps2(u: int) -> int:
    # (u - 1)/2 mod 2 for odd u
    return 0 if u % 4 == 1 else 1


def _omega2(u: int) -> int:
    return 0 if (u % 8) in (1, 7) else 1


def squarefree_part(x: Fraction) -> int:
    """The squarefree integer representing the square class of x in Q^*."""
    n = x.numerator * x.denominator
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    for p, e in sympy.factorint(n).items():
        if e % 2:
            out *= int(p)
    return sign * out


def rational_of(elem: FieldElement) -> Fraction:
    tower = effective_tower(elem.tower)
    if isinstance(tower, Rationals):
        return elem.payload
    if isinstance(tower, PAdicDescriptor):
        pay = elem.payload
        if pay.exact:
            return pay.rat
        raise Undecided("element is only known approximately")
    raise UnsupportedTower("no rational content in this tower")


# ---------------------------------------------------------------------------
# isotropy results
# ---------------------------------------------------------------------------

@dataclass
class IsotropyResult:
    isotropic: bool
    witness: tuple | None
    certificate: str

    def __bool__(self):
        return self.isotropic


def isotropy(q: QuadraticForm, witness_box: int = 64) -> IsotropyResult:
    """Decide isotropy with a witness (where the tower permits) or a certificate."""
    if q.dim == 0:
        return IsotropyResult(False, None, "empty form")
    tower = effective_tower(q.tower)
    if isinstance(tower, Rationals):
        return _isotropy_rational(q, witness_box)
    if isinstance(tower, FiniteField):
        return _isotropy_finite(q)
    if isinstance(tower, PAdicDescriptor):
        return _isotropy_padic(q)
    if isinstance(tower, LaurentExt):
        return _isotropy_laurent(q)
    raise UnsupportedTower(f"isotropy not supported over {q.tower}")


# --- Q ----------------------------------------------------------------------

def _int_diag(q: QuadraticForm) -> list[int]:
    """Scale each diagonal entry into an integer of the same square class."""
    out = []
    for d in q.diag:
        r = rational_of(d)
        out.append(r.numerator * r.denominator)
    return out


def rational_local_isotropy(diag_sqfree: list[int], place) -> bool:
    """Isotropy of a nonsingular diagonal form over Q_place (place prime or 'inf')."""
    n = len(diag_sqfree)
    if n <= 1:
        return False
    if place == "inf":
        return any(d > 0 for d in diag_sqfree) and any(d < 0 for d in diag_sqfree)
    p = place
    if n >= 5:
        return True
    d = 1
    for x in diag_sqfree:
        d *= x
    eps = 1
    for i in range(n):
        for j in range(i + 1, n):
            eps *= hilbert_symbol_rational(Fraction(diag_sqfree[i]),
                                           Fraction(diag_sqfree[j]), p)
    if n == 2:
        return _is_padic_square(Fraction(-d), p)
    if n == 3:
        return hilbert_symbol_rational(Fraction(-1), Fraction(-d), p) == eps
    # n == 4
    if not _is_padic_square(Fraction(d), p):
        return True
    return eps == hilbert_symbol_rational(Fraction(-1), Fraction(-1), p)


def _is_padic_square(x: Fraction, p: int) -> bool:
    v, u = _val_unit_int(x, p)
    if v % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return _legendre(u, p) == 1


def _bad_primes(ints: list[int]) -> list[int]:
    primes = {2}
    for n in ints:
        for p in sympy.factorint(abs(n)):
            primes.add(int(p))
    return sorted(primes)


def _isotropy_rational(q: QuadraticForm, box: int) -> IsotropyResult:
    diag = _int_diag(q)
    if len(diag) == 1:
        return IsotropyResult(False, None, "one-dimensional form")
    sqfree = [squarefree_part(Fraction(d)) for d in diag]
    if len(diag) == 2:
        if _rational_is_square(Fraction(-sqfree[0] * sqfree[1])):
            w = _witness_search(diag, box)
            return IsotropyResult(True, w, "binary: -a1 a2 is a square")
        return IsotropyResult(False, None, "binary: -a1 a2 is not a square")
    if not rational_local_isotropy(sqfree, "inf"):
        return IsotropyResult(False, None, "definite at the real place")
    if len(diag) >= 5:
        w = _witness_search(diag, box)
        return IsotropyResult(True, w,
                              "dim >= 5 and indefinite at the real place (Hasse-Minkowski)")
    failures = []
    for p in _bad_primes(sqfree):
        if not rational_local_isotropy(sqfree, p):
            failures.append(p)
    if failures:
        return IsotropyResult(False, None,
                              f"anisotropic over Q_p for p in {failures}")
    w = _witness_search(diag, box)
    return IsotropyResult(True, w, "isotropic at every place (Hasse-Minkowski)")


def _rational_is_square(x: Fraction) -> bool:
    if x <= 0:
        return x == 0
    from .fields import integer_nth_root
    return (integer_nth_root(x.numerator, 2) is not None
            and integer_nth_root(x.denominator, 2) is not None)


def _witness_search(diag: list[int], box: int):
    """Small-support-first integer witness search, exact verification.

    Pairs are checked by exact square tests; larger supports use a
    meet-in-the-middle enumeration with an expanding box.  Returns a tuple
    witness over the full index set, or None within the budget.
    """
    n = len(diag)
    from .fields import integer_nth_root

    def embed(sub_idx, sub_vec):
        out = [0] * n
        for i, x in zip(sub_idx, sub_vec):
            out[i] = x
        return tuple(out)

    # support 2: d_i x^2 + d_j y^2 = 0 with y = 1 needs -d_j/d_i square
    for i in range(n):
        for j in range(i + 1, n):
            num = -diag[i] * diag[j]
            if num <= 0:
                continue
            r = integer_nth_root(num, 2)
            if r is not None:
                # r^2 = -d_i d_j, so d_i r^2 + d_j d_i^2 = 0
                return embed((i, j), (r, diag[i]))
    # larger supports: meet-in-the-middle over an expanding box ladder,
    # skipping combinations whose enumeration cost would dominate
    from math import comb
    for b in (4, 8, 16, 32, 64, 128):
        if b > max(box, 4):
            break
        for size in range(3, min(n, 6) + 1):
            half = size // 2
            cost = comb(n, size) * ((b + 1) ** half + (2 * b + 1) ** (size - half))
            if cost > 3_000_000:
                continue
            for sub_idx in itertools.combinations(range(n), size):
                sub = [diag[i] for i in sub_idx]
                left, right = sub[:half], sub[half:]
                table: dict[int, tuple] = {}
                for vec in itertools.product(range(0, b + 1), repeat=len(left)):
                    val = sum(c * x * x for c, x in zip(left, vec))
                    if val not in table:
                        table[val] = vec
                for vec in itertools.product(range(-b, b + 1), repeat=len(right)):
                    val = sum(c * x * x for c, x in zip(right, vec))
                    hit = table.get(-val)
                    if hit is not None and (any(hit) or any(vec)):
                        return embed(sub_idx, hit + vec)
    return None


# --- F_q ---------------------------------------------------------------------

def _isotropy_finite(q: QuadraticForm) -> IsotropyResult:
    F: FiniteField = effective_tower(q.tower)
    n = q.dim
    if n == 1:
        return IsotropyResult(False, None, "one-dimensional form")
    # lexicographic search in payload order; first witness is deterministic
    if F.q ** n <= 4_000_000:
        elems = list(F.elements())
        for vec in itertools.product(elems, repeat=n):
            if all(v.is_zero() for v in vec):
                continue
            if q.eval(vec).is_zero():
                return IsotropyResult(True, tuple(vec), "exhaustive search")
        return IsotropyResult(False, None, "exhaustive search")
    if not q.char2 and n >= 3:
        # Chevalley-Warning guarantees a zero on the first three coordinates;
        # solve c z^2 = -(a x^2 + b y^2) by a square-root lookup
        elems = list(F.elements())
        a, b, c = q.diag[0], q.diag[1], q.diag[2]
        cinv = c.inverse()
        for x in elems:
            for y in elems:
                if x.is_zero() and y.is_zero():
                    continue
                rhs = -(a * x * x + b * y * y) * cinv
                z = _finite_sqrt(rhs, F)
                if z is not None:
                    wit = [x, y, z] + [F.zero()] * (n - 3)
                    assert q.eval(wit).is_zero()
                    return IsotropyResult(True, tuple(wit), "ternary subform search")
        return IsotropyResult(False, None, "search exhausted")
    raise UnsupportedTower("finite-field isotropy search space too large")


def _finite_sqrt(x: FieldElement, F: FiniteField):
    if x.is_zero():
        return F.zero()
    res = is_nth_power(x, 2)
    return res.witness if res.is_power else None


# --- Q_p ----------------------------------------------------------------------

def padic_square_class(elem: FieldElement) -> tuple[int, int]:
    """(v mod 2, small unit representative) of the square class over Q_p."""
    tower = effective_tower(elem.tower)
    v, unit, k = tower.val_unit(elem.payload)
    p = tower.p
    if p == 2:
        if k < 3:
            raise Undecided("need the unit modulo 8 for 2-adic square classes")
        return v % 2, unit % 8
    return v % 2, unit % p


def _padic_hilbert_additive(a: FieldElement, b: FieldElement) -> int:
    """(a,b)_p with values in {0,1} for the descriptor tower of a."""
    tower = effective_tower(a.tower)
    p = tower.p
    va, ua, _ = tower.val_unit(a.payload)
    vb, ub, kb = tower.val_unit(b.payload)
    if p != 2:
        eps = (p - 1) // 2
        total = (va * vb * eps) % 2
        if vb % 2 and _legendre(ua, p) < 0:
            total ^= 1
        if va % 2 and _legendre(ub, p) < 0:
            total ^= 1
        return total
    if kb < 3:
        raise Undecided("2-adic Hilbert symbol needs units modulo 8")
    exp = _eps2(ua) * _eps2(ub) + va * _omega2(ub) + vb * _omega2(ua)
    return exp % 2


def _isotropy_padic(q: QuadraticForm) -> IsotropyResult:
    tower = effective_tower(q.tower)
    n = q.dim
    if n == 1:
        return IsotropyResult(False, None, "one-dimensional form")
    if n >= 5:
        return IsotropyResult(True, None, "dim >= 5 over a p-adic field")
    diag = list(q.diag)
    if n == 2:
        d = -(diag[0] * diag[1])
        if is_nth_power(d, 2).is_power:
            return IsotropyResult(True, None, "binary: -a1 a2 is a square")
        return IsotropyResult(False, None,
                              "binary: -a1 a2 is a nonsquare (valuation/unit analysis)")
    eps = 0
    for i in range(n):
        for j in range(i + 1, n):
            eps ^= _padic_hilbert_additive(diag[i], diag[j])
    det = diag[0]
    for x in diag[1:]:
        det = det * x
    if n == 3:
        m1 = tower.elem(-1)
        cond = _padic_hilbert_additive(m1, m1 * det)
        if cond == eps:
            return IsotropyResult(True, None, "ternary Hilbert criterion")
        return IsotropyResult(False, None, "ternary Hilbert criterion (anisotropic)")
    # n == 4
    if not is_nth_power(det, 2).is_power:
        return IsotropyResult(True, None, "dim 4 with nontrivial discriminant")
    m1 = tower.elem(-1)
    if eps == _padic_hilbert_additive(m1, m1):
        return IsotropyResult(True, None, "dim 4, trivial disc, Hasse matches (-1,-1)")
    return IsotropyResult(False, None,
                          "dim 4 anisotropic: the unique norm-form class")


# --- Laurent towers -----------------------------------------------------------

def laurent_residue_split(q: QuadraticForm) -> tuple[QuadraticForm, QuadraticForm]:
    """q ~ q0 _|_ t*q1 with unit residues over the base (exact square classes)."""
    L: LaurentExt = effective_tower(q.tower)
    if L.characteristic == 2 or (isinstance(L.base, FiniteField) and L.base.p == 2):
        raise UnsupportedTower("Springer decomposition needs residue char != 2")
    unit_part, t_part = [], []
    for d in q.diag:
        sp = laurent_split(L.elem(d))
        # t^v u (1+w): (1+w) is a square by Hensel, so class is t^(v mod 2) * u
        if sp.valuation % 2 == 0:
            unit_part.append(sp.unit)
        else:
            t_part.append(sp.unit)
    return (QuadraticForm(L.base, unit_part) if unit_part else QuadraticForm(L.base),
            QuadraticForm(L.base, t_part) if t_part else QuadraticForm(L.base))


def _isotropy_laurent(q: QuadraticForm) -> IsotropyResult:
    L: LaurentExt = effective_tower(q.tower)
    q0, q1 = laurent_residue_split(q)
    r0 = isotropy(q0) if q0.dim else IsotropyResult(False, None, "empty residue")
    r1 = isotropy(q1) if q1.dim else IsotropyResult(False, None, "empty residue")
    if r0.isotropic or r1.isotropic:
        part = "unit" if r0.isotropic else f"{L.var}-part"
        wit = _lift_laurent_witness(q, q0, q1, r0 if r0.isotropic else r1,
                                    use_unit_part=r0.isotropic)
        return IsotropyResult(True, wit,
                              f"Springer: residue form ({part}) isotropic over {L.base}")
    return IsotropyResult(
        False, None,
        f"Springer: residue forms <{q0}> and <{q1}> both anisotropic over {L.base}")


def _lift_laurent_witness(q, q0, q1, res: IsotropyResult, use_unit_part: bool):
    """Lift a residue witness when all entries are exact monomials."""
    if res.witness is None:
        return None
    L: LaurentExt = effective_tower(q.tower)
    wit = []
    k = 0
    target = 0 if use_unit_part else 1
    for d in q.diag:
        terms, order = L.elem(d).payload
        if len(terms) != 1 or order is not None:
            return None  # entry has a genuine tail; report certificate only
        v = min(terms)
        if v % 2 == target:
            w = res.witness[k]
            k += 1
            wit.append(L.elem(w) * L.monomial(-(v - (v % 2)) // 2))
        else:
            wit.append(L.zero())
    probe = q.eval(wit)
    if probe.is_zero() and any(not w.is_zero() for w in wit):
        return tuple(wit)
    return None


# ---------------------------------------------------------------------------
# Witt classes
# ---------------------------------------------------------------------------

class WittClass:
    """Witt class with an explicit anisotropic kernel presentation."""

    def __init__(self, tower: FieldTower, kernel: QuadraticForm,
                 hyperbolic_rank: int = 0, provenance: str = "direct"):
        self.tower = tower
        self.kernel = kernel
        self.hyperbolic_rank = hyperbolic_rank
        self.provenance = provenance

    @property
    def dim_mod2(self) -> int:
        return self.kernel.dim % 2

    def is_zero(self) -> bool:
        return self.kernel.dim == 0

    def __repr__(self):
        return (f"WittClass(kernel={self.kernel}, hyperbolic_rank="
                f"{self.hyperbolic_rank})")


def witt_class(q: QuadraticForm, witness_box: int = 64) -> WittClass:
    """Witt decomposition: strip hyperbolic planes, keep the anisotropic kernel.

    witness_box bounds the splitting search over Q; a small box fails fast so
    callers can fall back to invariant-only certificates."""
    tower = effective_tower(q.tower)
    if isinstance(tower, (Rationals, FiniteField)) and not q.char2:
        return _witt_by_splitting(q, box=witness_box)
    if isinstance(tower, PAdicDescriptor):
        return _witt_padic(q)
    if isinstance(tower, LaurentExt):
        return _witt_laurent(q)
    if q.char2 and isinstance(tower, FiniteField):
        return _witt_char2_finite(q)
    raise UnsupportedTower(f"witt_class not supported over {q.tower}")


def _witt_by_splitting(q: QuadraticForm, box: int = 64) -> WittClass:
    diag = list(q.diag)
    tower = q.tower
    rank = 0
    while len(diag) >= 2:
        # hyperbolic pairs <d_i, d_j> with -d_i d_j a square split for free
        pair = _find_hyperbolic_pair(diag, tower)
        if pair is not None:
            i, j = pair
            diag = [d for k, d in enumerate(diag) if k not in (i, j)]
            rank += 1
            continue
        form = QuadraticForm(tower, diag)
        res = isotropy(form, witness_box=box)
        if not res.isotropic:
            break
        if res.witness is None:
            raise Undecided("isotropic but no explicit witness found in the box")
        diag = _split_hyperbolic(tower, diag, res.witness)
        rank += 1
    return WittClass(q.tower, QuadraticForm(tower, diag), rank, "witness splitting")


def _find_hyperbolic_pair(diag, tower):
    if isinstance(effective_tower(tower), Rationals):
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                if _rational_is_square(-(rational_of(diag[i]) * rational_of(diag[j]))):
                    return i, j
        return None
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            try:
                if is_nth_power(-(diag[i] * diag[j]), 2).is_power:
                    return i, j
            except (UnsupportedTower, Undecided):
                return None
    return None


def content_normalized(q: QuadraticForm) -> tuple[QuadraticForm, Fraction]:
    """Scale a rational diagonal form by a single global factor so entries are
    integers with trivial common content.  Global scaling preserves every
    I^n-level decision (for q of even dimension the class changes by
    <<lambda>> x q, which lies one filtration step deeper)."""
    import math

    if q.char2 or not isinstance(effective_tower(q.tower), Rationals):
        return q, Fraction(1)
    vals = [rational_of(d) for d in q.diag]
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in vals]
    content = 0
    for x in ints:
        content = math.gcd(content, abs(x))
    if content > 1:
        ints = [x // content for x in ints]
    scale = Fraction(den, max(content, 1))
    return QuadraticForm(q.tower,
                         [_strip_small_squares(q.tower.elem(x), q.tower)
                          for x in ints]), scale


def _split_hyperbolic(tower, diag, witness):
    """Remove the hyperbolic plane spanned by an isotropic witness."""
    n = len(diag)
    d = [tower.elem(x) for x in diag]
    v = [tower.elem(x) for x in witness]

    def bilin(x, y):
        acc = tower.zero()
        for c, xi, yi in zip(d, x, y):
            acc = acc + c * xi * yi
        return acc

    w = None
    for k in range(n):
        e = [tower.one() if i == k else tower.zero() for i in range(n)]
        if not bilin(v, e).is_zero():
            w = e
            break
    assert w is not None, "witness is in the radical of a nonsingular form"
    basis = []
    for k in range(n):
        e = [tower.one() if i == k else tower.zero() for i in range(n)]
        bv, bw = bilin(e, v), bilin(e, w)
        # project e onto the orthogonal complement of span(v, w)
        mvv, mvw, mww = bilin(v, v), bilin(v, w), bilin(w, w)
        # solve e' = e - s v - t w with B(e', v) = B(e', w) = 0;
        # v isotropic makes det = -mvw^2 != 0
        det = mvv * mww - mvw * mvw
        assert not det.is_zero()
        s = (bv * mww - bw * mvw) * det.inverse()
        t = (bw * mvv - bv * mvw) * det.inverse()
        basis.append([ei - s * vi - t * wi for ei, vi, wi in zip(e, v, w)])
    # Gram matrix of the projected vectors, then congruence-diagonalise
    gram = [[bilin(x, y) for y in basis] for x in basis]
    entries = diagonalize_gram(gram, tower)
    assert len(entries) == n - 2, "hyperbolic split changed rank unexpectedly"
    return entries


def diagonalize_gram(gram, tower) -> list:
    """Exact symmetric congruence diagonalisation; returns nonzero entries.

    Over Q the working basis is kept as primitive integer vectors (content
    stripped after every projection), which controls coefficient growth; the
    congruence is exact, so the quadratic-space class is preserved.
    """
    if isinstance(effective_tower(tower), Rationals):
        return _diagonalize_gram_rational(gram, tower)
    return _diagonalize_gram_generic(gram, tower)


def _diagonalize_gram_generic(gram, tower) -> list:
    g = [row[:] for row in gram]
    n = len(g)
    entries = []
    idx = list(range(n))
    while idx:
        piv = None
        for i in idx:
            if not g[i][i].is_zero():
                piv = i
                break
        if piv is None:
            found = False
            for i in idx:
                for j in idx:
                    if i != j and not g[i][j].is_zero():
                        for k in idx:
                            g[i][k] = g[i][k] + g[j][k]
                        for k in idx:
                            g[k][i] = g[k][i] + g[k][j]
                        found = True
                        break
                if found:
                    break
            if not found:
                break  # remaining block is zero (degenerate part)
            continue
        d = g[piv][piv]
        entries.append(d)
        others = [i for i in idx if i != piv]
        dinv = d.inverse()
        for i in others:
            f = g[i][piv] * dinv
            if not f.is_zero():
                for k in idx:
                    g[i][k] = g[i][k] - f * g[piv][k]
                for k in idx:
                    g[k][i] = g[k][i] - f * g[k][piv]
        idx = others
    return entries


def _diagonalize_gram_rational(gram, tower) -> list:
    import math

    n = len(gram)
    q = [[rational_of(x) if isinstance(x, FieldElement) else Fraction(x)
          for x in row] for row in gram]

    def bilin(u, v):
        acc = Fraction(0)
        for i, ui in enumerate(u):
            if ui:
                acc += ui * sum(q[i][j] * vj for j, vj in enumerate(v) if vj)
        return acc

    def primitive(vec):
        den = 1
        for x in vec:
            den = den * x.denominator // math.gcd(den, x.denominator)
        ints = [int(x * den) for x in vec]
        content = 0
        for x in ints:
            content = math.gcd(content, abs(x))
        if content > 1:
            ints = [x // content for x in ints]
        return [Fraction(x) for x in ints]

    basis = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    entries = []
    active = basis
    while active:
        vals = [bilin(b, b) for b in active]
        piv = None
        best = None
        for i, v in enumerate(vals):
            if v != 0 and (best is None or abs(v) < best):
                piv, best = i, abs(v)
        if piv is None:
            mixed = False
            for i in range(len(active)):
                for j in range(len(active)):
                    if i != j and bilin(active[i], active[j]) != 0:
                        active[i] = primitive([a + b for a, b in
                                               zip(active[i], active[j])])
                        mixed = True
                        break
                if mixed:
                    break
            if not mixed:
                break  # zero block
            continue
        p = active[piv]
        d = vals[piv]
        entries.append(_strip_small_squares(tower.elem(d), tower))
        rest = []
        for i, b in enumerate(active):
            if i == piv:
                continue
            c = bilin(b, p)
            nb = [d * x - c * y for x, y in zip(b, p)]
            rest.append(primitive(nb))
        active = rest
    return entries


def _strip_small_squares(d: FieldElement, tower) -> FieldElement:
    """Divide out squares of small primes to keep rational entries small."""
    if not isinstance(effective_tower(tower), Rationals):
        return d
    x: Fraction = d.payload
    n = x.numerator * x.denominator
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while n % (p * p) == 0:
            n //= p * p
    # perfect-square residue check for the remainder
    from .fields import integer_nth_root
    r = integer_nth_root(n, 2)
    if r is not None:
        n = 1
    return tower.elem(sign * n)


def _witt_padic(q: QuadraticForm) -> WittClass:
    tower = effective_tower(q.tower)
    n = q.dim
    # candidate anisotropic kernels over Q_p have dim <= 4
    reps = _padic_square_class_reps(tower)
    for r in range(n % 2, min(n, 4) + 1, 2):
        for cand in itertools.combinations_with_replacement(reps, r):
            cform = QuadraticForm(q.tower, [q.tower.elem(c) for c in cand])
            if r and isotropy(cform).isotropic:
                continue
            if _padic_class_equal(q, cform):
                return WittClass(q.tower, cform, (n - r) // 2, "invariant classification")
    raise Undecided("no p-adic kernel matched (internal error)")


def _padic_square_class_reps(tower: PAdicDescriptor) -> list[int]:
    p = tower.p
    if p == 2:
        return [1, 3, 5, 7, 2, 6, 10, 14]
    u = _nonresidue(p)
    return [1, u, p, u * p]


def _nonresidue(p: int) -> int:
    for u in range(2, p):
        if _legendre(u, p) < 0:
            return u
    raise RuntimeError("no quadratic nonresidue found")


def _padic_class_equal(q1: QuadraticForm, q2: QuadraticForm) -> bool:
    """Equality in the Witt group via (dim mod 2, disc, Hasse) completeness."""
    if (q1.dim - q2.dim) % 2:
        return False
    tower = q1.tower
    diff = q1.perp(q2.neg())
    # zero class iff even dim, trivial signed disc, Hasse equal to hyperbolic's
    return _padic_class_is_zero(diff)


def _padic_class_is_zero(q: QuadraticForm) -> bool:
    if q.dim % 2:
        return False
    tower = q.tower
    disc = _signed_disc(q)
    if not is_nth_power(disc, 2).is_power:
        return False
    eps = 0
    diag = list(q.diag)
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            eps ^= _padic_hilbert_additive(diag[i], diag[j])
    m = q.dim // 2
    hyp = _hyperbolic_hasse_padic(tower, q.dim)
    return eps == hyp


def _hyperbolic_hasse_padic(tower, dim: int) -> int:
    m = dim // 2
    one = tower.elem(1)
    mone = tower.elem(-1)
    diag = [one, mone] * m
    eps = 0
    for i in range(dim):
        for j in range(i + 1, dim):
            eps ^= _padic_hilbert_additive(diag[i], diag[j])
    return eps


def _signed_disc(q: QuadraticForm) -> FieldElement:
    n = q.dim
    det = q.tower.one()
    for d in q.diag:
        det = det * d
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return det * q.tower.elem(sign)


def _witt_laurent(q: QuadraticForm) -> WittClass:
    L: LaurentExt = effective_tower(q.tower)
    q0, q1 = laurent_residue_split(q)
    c0 = witt_class(q0) if q0.dim else WittClass(L.base, QuadraticForm(L.base))
    c1 = witt_class(q1) if q1.dim else WittClass(L.base, QuadraticForm(L.base))
    Lt = q.tower
    kernel_diag = [Lt.elem(d) for d in c0.kernel.diag] + \
        [Lt.elem(d) * effective_tower(Lt).monomial(1) for d in c1.kernel.diag]
    rank = c0.hyperbolic_rank + c1.hyperbolic_rank
    return WittClass(q.tower, QuadraticForm(Lt, kernel_diag), rank,
                     "Springer residue decomposition")


def _witt_char2_finite(q: QuadraticForm) -> WittClass:
    if q.diag:
        raise UnsupportedTower("odd-dimensional char-2 parts are out of scope")
    tower = q.tower
    a = arf_invariant(q)
    if a.is_trivial:
        return WittClass(tower, QuadraticForm(tower), q.dim // 2, "Arf classification")
    # the unique nonzero class: [1, c] with x^2 + x + c irreducible
    F: FiniteField = effective_tower(tower)
    for c in F.elements():
        probe = QuadraticForm(tower, (), [(tower.one(), c)])
        if not arf_invariant(probe).is_trivial:
            return WittClass(tower, probe, (q.dim - 2) // 2, "Arf classification")
    raise RuntimeError("unreachable: Arf is onto k/P(k)")


def witt_add(c1: WittClass, c2: WittClass) -> WittClass:
    if c1.tower != c2.tower:
        raise InconsistentConstruction("Witt addition over different towers")
    return witt_class(c1.kernel.perp(c2.kernel))


def witt_neg(c: WittClass) -> WittClass:
    return WittClass(c.tower, c.kernel.neg(), c.hyperbolic_rank, c.provenance)


def bilinear_mult(bilinear_diag, c: WittClass) -> WittClass:
    """Multiply by the diagonal symmetric bilinear form <b_1, ..., b_r>."""
    tower = c.tower
    entries = [tower.elem(b) for b in bilinear_diag]
    if any(e.is_zero() for e in entries):
        raise InconsistentConstruction("bilinear factor must be nonsingular")
    if not c.kernel.char2:
        diag = [b * d for b in entries for d in c.kernel.diag]
        return witt_class(QuadraticForm(tower, diag))
    blocks = []
    for b in entries:
        binv = b.inverse()
        for (x, y) in c.kernel.blocks:
            blocks.append((b * x, y * binv))
    return witt_class(QuadraticForm(tower, (), blocks))


# ---------------------------------------------------------------------------
# Arf invariant (characteristic 2)
# ---------------------------------------------------------------------------

@dataclass
class ArfInvariant:
    value: FieldElement
    is_trivial: bool

    def __repr__(self):
        return f"Arf({self.value}, trivial={self.is_trivial})"


def arf_invariant(q: QuadraticForm) -> ArfInvariant:
    """Arf(q) = sum a_i b_i in k / {x^2 + x}; triviality decided over F_2^e."""
    if not q.char2:
        raise UnsupportedTower("Arf invariant lives in characteristic 2")
    if q.diag:
        raise InconsistentConstruction("Arf needs an even-dimensional block form")
    tower = q.tower
    acc = tower.zero()
    for a, b in q.blocks:
        acc = acc + a * b
    F = effective_tower(tower)
    if isinstance(F, FiniteField):
        trivial = any((x * x + x) == acc for x in F.elements())
        return ArfInvariant(acc, trivial)
    raise UnsupportedTower("Arf triviality is certified over finite fields only")


# ---------------------------------------------------------------------------
# I^n-level certification
# ---------------------------------------------------------------------------

@dataclass
class LevelCertificate:
    level: int
    certified: bool
    detail: str

    def __repr__(self):
        tag = "" if self.certified else " (unverified above)"
        return f"I-level {self.level}{tag}: {self.detail}"


def i_level(c: WittClass) -> LevelCertificate:
    """Certified I^n-filtration level of a Witt class (capped at 4)."""
    tower = effective_tower(c.tower)
    if c.kernel.char2:
        if c.is_zero():
            return LevelCertificate(4, True, "zero class (hyperbolic)")
        return LevelCertificate(1, False,
                                "even-dimensional; higher char-2 levels unverified")
    if c.is_zero():
        return LevelCertificate(4, True, "zero class (hyperbolic)")
    if isinstance(tower, Rationals):
        return _i_level_rational(c)
    if isinstance(tower, FiniteField):
        if c.kernel.dim % 2:
            return LevelCertificate(0, True, "odd dimension")
        if is_nth_power(_signed_disc(c.kernel), 2).is_power:
            return LevelCertificate(4, True, "even dim, trivial disc: zero in W(F_q)")
        return LevelCertificate(1, True, "even dim, nontrivial disc (I^2(F_q) = 0)")
    if isinstance(tower, PAdicDescriptor):
        if c.kernel.dim % 2:
            return LevelCertificate(0, True, "odd dimension")
        if not is_nth_power(_signed_disc(c.kernel), 2).is_power:
            return LevelCertificate(1, True, "nontrivial signed discriminant")
        if _padic_class_is_zero(c.kernel):
            return LevelCertificate(4, True, "zero class (I^3 of a p-adic field vanishes)")
        return LevelCertificate(2, True,
                                "nonzero class with trivial disc; I^3(Q_p) = 0 caps the level")
    if isinstance(tower, LaurentExt):
        lvl, detail = _i_level_laurent(c.kernel)
        return LevelCertificate(lvl, True, detail)
    raise UnsupportedTower(f"i_level not certified over {c.tower}")


def _i_level_rational(c: WittClass) -> LevelCertificate:
    q = c.kernel
    if q.dim % 2:
        return LevelCertificate(0, True, "odd dimension")
    disc = rational_of(_signed_disc(q))
    if not _rational_is_square(disc) :
        return LevelCertificate(1, True, "nontrivial signed discriminant")
    ints = [squarefree_part(rational_of(d)) for d in q.diag]
    sig = sum(1 if d > 0 else -1 for d in ints)
    places = ["inf"] + _bad_primes(ints)
    m = q.dim // 2
    hyp = [1, -1] * m
    for v in places:
        eq = _hasse_product(ints, v)
        eh = _hasse_product(hyp, v)
        if eq != eh:
            return LevelCertificate(2, True,
                                    f"Clifford/Hasse data nontrivial at place {v}")
    if sig % 16 == 0:
        return LevelCertificate(4, True,
                                "level 3 criteria and all real signatures = 0 mod 16")
    return LevelCertificate(3, True,
                            f"Clifford trivial everywhere; signature {sig} != 0 mod 16")


def _hasse_product(ints: list[int], place) -> int:
    eps = 1
    for i in range(len(ints)):
        for j in range(i + 1, len(ints)):
            eps *= hilbert_symbol_rational(Fraction(ints[i]), Fraction(ints[j]), place)
    return eps


def _i_level_laurent(q: QuadraticForm) -> tuple[int, str]:
    """Highest n <= 4 with q in I^n, by the residue rule
    q in I^n(k((t))) iff q1 in I^(n-1)(k) and q0 + q1 in I^n(k)."""
    q0, q1 = laurent_residue_split(q)

    def level_of(form: QuadraticForm) -> int:
        base = effective_tower(form.tower)
        if form.dim == 0:
            return 4
        if isinstance(base, LaurentExt):
            return _i_level_laurent(form)[0]
        return i_level(witt_class(form)).level

    l1 = level_of(q1)
    lsum = level_of(q0.perp(q1))
    lvl = min(l1 + 1, lsum, 4)
    return lvl, (f"residue rule: t-part level {l1}, unit+t sum level {lsum}")


def witt_equal_mod_i4(c1: WittClass, c2: WittClass) -> bool:
    """c1 = c2 in W / I^4 (used for v- and sigma-independence checks).

    The I-level criteria are Witt-class invariants, so they run on the raw
    orthogonal difference without any decomposition work."""
    diff_form = c1.kernel.perp(c2.kernel.neg())
    if diff_form.dim == 0:
        return True
    if isinstance(effective_tower(c1.tower), Rationals) and not diff_form.char2:
        normalized, _ = content_normalized(diff_form)
        probe = WittClass(c1.tower, normalized, 0, "unreduced difference")
        return i_level(probe).level >= 4
    diff = witt_add(c1, witt_neg(c2))
    if diff.is_zero():
        return True
    return i_level(diff).level >= 4
