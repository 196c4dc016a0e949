"""Milnor K-theory mod m: symbols, tame residues, local pairings, and
residue-coordinate computations of H^j_m over iterated Laurent towers.

Conventions (also attached to every CLI report):
  * residues follow the "second projection" normalisation: the residue is
    taken with the uniformizer moved to the FIRST slot, d{t, u2, ..., ur} =
    {u2bar, ..., urbar};
  * the unit-part projection replaces unit slots by their leading residues
    (exact modulo m in the tame complete case);
  * tame Hilbert pairing values are discrete logs with respect to the
    canonical residue of the chosen primitive m-th root of unity.

Equality with the value "zero" is only ever asserted when the decision
procedure certifies it; otherwise Undecided is raised.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InconsistentConstruction,
    PrecisionExhausted,
    Undecided,
    UnsupportedTower,
)
from .fields import (
    FieldElement,
    FieldTower,
    FiniteField,
    LaurentExt,
    PAdicDescriptor,
    _residue_of_exact_order,
    is_nth_power,
    laurent_split,
)
from .forms import _padic_hilbert_additive, effective_tower

RESIDUE_CONVENTION = "residue: uniformizer-first, second-projection normalisation"


# ---------------------------------------------------------------------------
# Milnor symbols
# ---------------------------------------------------------------------------

class KClass:
    """Formal sum of pure symbols {x_1, ..., x_r} with coefficients mod m."""

    def __init__(self, tower: FieldTower, degree: int, modulus: int, terms=(),
                 normalized: bool = False):
        self.tower = tower
        self.degree = degree
        self.modulus = modulus
        self.terms = list(terms)
        if not normalized:
            self.terms = _normalize_terms(tower, degree, modulus, self.terms)

    def __add__(self, other: "KClass") -> "KClass":
        if (other.tower != self.tower or other.degree != self.degree
                or other.modulus != self.modulus):
            raise InconsistentConstruction("K-class mismatch in addition")
        return KClass(self.tower, self.degree, self.modulus,
                      self.terms + other.terms)

    def __neg__(self):
        return KClass(self.tower, self.degree, self.modulus,
                      [(-c, s) for c, s in self.terms], normalized=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "KClass":
        return KClass(self.tower, self.degree, self.modulus,
                      [(c * k, s) for c, s in self.terms])

    def is_syntactically_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for c, slots in self.terms:
            body = "{" + ",".join(str(s) for s in slots) + "}"
            bits.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(bits) + f" (mod {self.modulus})"


def symbol(tower: FieldTower, entries, modulus: int) -> KClass:
    """The pure symbol {x_1, ..., x_r} mod modulus."""
    slots = []
    for x in entries:
        e = tower.elem(x)
        if e.is_zero():
            raise InconsistentConstruction("symbol slots must be nonzero")
        slots.append(e)
    return KClass(tower, len(slots), modulus, [(1, tuple(slots))])


def k_add(c1: KClass, c2: KClass) -> KClass:
    return c1 + c2


def k_normalize(c: KClass) -> KClass:
    return KClass(c.tower, c.degree, c.modulus, c.terms)


def _normalize_terms(tower, degree, modulus, terms):
    out = []
    for coeff, slots in terms:
        coeff %= modulus
        if coeff == 0:
            continue
        res = _normalize_pure(tower, list(slots), modulus)
        if res is None:
            continue
        sign, slots2 = res
        coeff = (coeff * sign) % modulus
        if coeff:
            out.append((coeff, tuple(slots2)))
    # combine syntactically identical slot tuples
    combined = []
    for coeff, slots in out:
        for k, (c0, s0) in enumerate(combined):
            if len(s0) == len(slots) and all(a == b for a, b in zip(s0, slots)):
                combined[k] = ((c0 + coeff) % modulus, s0)
                break
        else:
            combined.append((coeff, slots))
    return [(c, s) for c, s in combined if c]


def _normalize_pure(tower, slots, modulus):
    """None if the pure symbol is a listed relator; else (sign, slots)."""
    sign = 1
    one = tower.one()
    changed = True
    while changed:
        changed = False
        for x in slots:
            if x == one:
                return None
            try:
                if is_nth_power(x, modulus).is_power:
                    return None
            except (UnsupportedTower, Undecided, PrecisionExhausted):
                pass
        n = len(slots)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                if slots[i] + slots[j] == one:
                    return None          # Steinberg
                if slots[j] == -slots[i]:
                    return None          # {x, -x} = 0
        minus_one = tower.elem(-1)
        for i in range(n):
            for j in range(i + 1, n):
                if slots[i] == slots[j] and not slots[j] == minus_one:
                    # move slot j next to slot i, then {x,x} = {x,-1}
                    if (j - i - 1) % 2:
                        sign = -sign
                    slots[j] = minus_one
                    changed = True
                    break
            if changed:
                break
    return sign, slots


# ---------------------------------------------------------------------------
# tame residues
# ---------------------------------------------------------------------------

def tame_residue(c: KClass, var: str | None = None) -> KClass:
    """Residue along the outermost Laurent variable; degree drops by one."""
    L = effective_tower(c.tower)
    if not isinstance(L, LaurentExt):
        raise UnsupportedTower("tame_residue expects a Laurent-extension class")
    if var is not None and L.var != var:
        raise InconsistentConstruction(
            f"residue variable {var!r} is not the outermost variable {L.var!r}")
    out_terms = []
    for coeff, slots in c.terms:
        out_terms.extend(_residue_of_pure(L, coeff, slots, c.modulus))
    return KClass(L.base, c.degree - 1, c.modulus, out_terms)


def unit_reduction(c: KClass) -> KClass:
    """The unit-part projection: drop {t,...} components, reduce unit slots."""
    L = effective_tower(c.tower)
    if not isinstance(L, LaurentExt):
        raise UnsupportedTower("unit_reduction expects a Laurent-extension class")
    out_terms = []
    for coeff, slots in c.terms:
        data = [_slot_split(L, s) for s in slots]
        # the S = (empty set) piece of the multilinear expansion: every slot
        # t^v u(1+w) contributes its unit residue u-bar
        out_terms.append((coeff, tuple(lead for _, lead in data)))
    return KClass(L.base, c.degree, c.modulus, out_terms)


def _slot_split(L: LaurentExt, s: FieldElement):
    sp = laurent_split(L.elem(s))
    return sp.valuation, sp.unit


def _residue_of_pure(L: LaurentExt, coeff, slots, modulus):
    """Residue of coeff * {slots}: multilinear expansion, {t,t} reduction."""
    data = [_slot_split(L, s) for s in slots]
    minus_one = L.base.elem(-1)
    out = []
    val_positions = [i for i, (v, _) in enumerate(data) if v != 0]
    for size in range(1, len(val_positions) + 1):
        for S in itertools.combinations(val_positions, size):
            mult = 1
            for i in S:
                mult *= data[i][0]
            # pattern: 't' at positions in S, unit residues elsewhere
            pattern = []
            for i, (v, lead) in enumerate(data):
                pattern.append(("t", None) if i in S else ("u", lead))
            sign = 1
            # reduce multiple t's: {.., t, .., t, ..} -> {.., t, -1, ..} with sign
            while True:
                tpos = [i for i, (k, _) in enumerate(pattern) if k == "t"]
                if len(tpos) <= 1:
                    break
                i, j = tpos[0], tpos[1]
                if (j - i - 1) % 2:
                    sign = -sign
                pattern[j] = ("u", minus_one)
            tpos = [i for i, (k, _) in enumerate(pattern) if k == "t"]
            i = tpos[0]
            if i % 2:
                sign = -sign
            rest = [lead for (kk, lead) in pattern if kk == "u"]
            out.append(((coeff * mult * sign) % modulus, tuple(rest)))
    return out


# ---------------------------------------------------------------------------
# local pairings
# ---------------------------------------------------------------------------

def hilbert_pairing(a: FieldElement, b: FieldElement, modulus: int) -> int:
    """The m-torsion Hilbert pairing of a local field, additively in Z/m.

    Value 0 iff b is a norm from the Kummer extension attached to a.
    Supported: tame modulus (m | p-1), m = 2 for every p (including p = 2).
    """
    K = effective_tower(a.tower)
    if not isinstance(K, PAdicDescriptor):
        raise UnsupportedTower("hilbert_pairing expects p-adic descriptor elements")
    p = K.p
    if modulus == 2:
        if p == 2:
            return _padic_hilbert_additive(a, b)
        # fall through to the tame computation (2 | p-1)
    if p != 2 and (p - 1) % modulus == 0:
        return _tame_pairing(K, a, b, modulus)
    raise UnsupportedTower(
        f"hilbert_pairing mod {modulus} over Qp({p}) is wild; only tame moduli "
        f"and m=2 are implemented")


def _tame_pairing(K: PAdicDescriptor, a: FieldElement, b: FieldElement,
                  m: int) -> int:
    p = K.p
    va, ua, _ = K.val_unit(a.payload)
    vb, ub, _ = K.val_unit(b.payload)
    # tame symbol T(a,b) = (-1)^(va vb) a^vb / b^va mod p
    t = pow(-1, va * vb, p) * pow(ua % p, vb, p) * pow(pow(ub % p, -1, p), va, p) % p
    tm = pow(t, (p - 1) // m, p)
    zbar = pow(_residue_of_exact_order(p, m), 1, p) if m > 2 else p - 1
    if m == 1:
        return 0
    if m == 2:
        return 0 if tm == 1 else 1
    val = 1
    for k in range(m):
        if val == tm:
            return k
        val = (val * zbar) % p
    raise InconsistentConstruction("tame symbol value is not an m-th root of unity")


def dlog_mod(F: FiniteField, x: FieldElement, m: int) -> int:
    """Discrete log of x in F_q^x / (F_q^x)^m, base the canonical generator."""
    d = math.gcd(m, F.q - 1)
    if d == 1:
        return 0
    g = F.multiplicative_generator()
    acc = F.one()
    for k in range(F.q - 1):
        if acc == x:
            return k % d
        acc = acc * g
    raise InconsistentConstruction("element not in F_q^x")


# ---------------------------------------------------------------------------
# zero certification
# ---------------------------------------------------------------------------

def kclass_is_zero(c: KClass) -> bool:
    """Certified zero test; raises Undecided when no procedure applies."""
    if not c.terms:
        return True
    tower = effective_tower(c.tower)
    if c.degree == 0:
        return sum(cf for cf, _ in c.terms) % c.modulus == 0
    if isinstance(tower, FiniteField):
        if c.degree >= 2:
            return True  # K_r(F_q) = 0 for r >= 2
        total = 0
        for cf, (x,) in c.terms:
            total += cf * dlog_mod(tower, tower.elem(x), c.modulus)
        return total % math.gcd(c.modulus, tower.q - 1) == 0
    if isinstance(tower, PAdicDescriptor):
        return _padic_kclass_is_zero(c, tower)
    if isinstance(tower, LaurentExt):
        if tower.characteristic != 0 and c.modulus % tower.characteristic == 0:
            raise Undecided("wild modulus over a Laurent tower")
        return kclass_is_zero(unit_reduction(c)) and kclass_is_zero(tame_residue(c))
    raise Undecided(f"no zero-certification procedure over {c.tower}")


def _padic_kclass_is_zero(c: KClass, K: PAdicDescriptor) -> bool:
    p, m = K.p, c.modulus
    tame = (p - 1) % m == 0 or m == 1
    if not tame and not (m == 2):
        raise Undecided(f"modulus {m} is wild over Qp({p})")
    if c.degree >= 3:
        return True  # cd(Q_p) = 2
    if c.degree == 2:
        total = 0
        for cf, (x, y) in c.terms:
            total += cf * hilbert_pairing(K.elem(x) if not isinstance(x, FieldElement)
                                          else x, y, m)
        return total % m == 0
    # degree 1: valuation and unit class
    vtot = 0
    if p == 2:
        u8 = 1
        for cf, (x,) in c.terms:
            v, u, k = K.val_unit(x.payload)
            if k < 3:
                raise Undecided("2-adic unit precision below 8")
            vtot += cf * v
            u8 = (u8 * pow(u % 8, cf, 8)) % 8
        return vtot % m == 0 and u8 % 8 == 1
    d = math.gcd(m, p - 1)
    ulog = 0
    g = _primitive_root(p)
    for cf, (x,) in c.terms:
        v, u, _ = K.val_unit(x.payload)
        vtot += cf * v
        ulog += cf * _dlog_mod_p(u % p, g, p)
    return vtot % m == 0 and ulog % d == 0


def _primitive_root(p: int) -> int:
    from .fields import factorize
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factorize(p - 1)):
            return g
    raise InconsistentConstruction("no primitive root (p not prime?)")


def _dlog_mod_p(u: int, g: int, p: int) -> int:
    acc = 1
    for k in range(p - 1):
        if acc == u % p:
            return k
        acc = (acc * g) % p
    raise InconsistentConstruction("discrete log does not exist")


def kclass_order(c: KClass) -> int:
    """Order of c in K/m (smallest e | m with e*c = 0), certified."""
    for e in range(1, c.modulus + 1):
        if c.modulus % e:
            continue
        if kclass_is_zero(c.scale(e)):
            return e
    return c.modulus


# ---------------------------------------------------------------------------
# cohomology classes through the splitting tower
# ---------------------------------------------------------------------------

@dataclass
class BrauerCoordinate:
    """An element of Br(k) for a local-field (Q/Z) or finite-field (0) tower."""
    value: Fraction
    provenance: str

    def __post_init__(self):
        self.value = Fraction(self.value) % 1

    def __repr__(self):
        return f"BrauerCoordinate({self.value}, {self.provenance!r})"


@dataclass
class CohClass:
    """Symbol-backed cohomology class of H^degree.

    Purely symbol-backed classes have character None; the characteristic-p
    lift machinery attaches an Artin-Schreier-Witt character, which raises
    the degree by one (i(w) cup h^q(symbol))."""
    kclass: KClass
    character: object | None = None

    @property
    def tower(self):
        return self.kclass.tower

    @property
    def degree(self):
        return self.kclass.degree + (0 if self.character is None else 1)

    @property
    def modulus(self):
        return self.kclass.modulus


@dataclass
class CoordinateRecord:
    subset: tuple[str, ...]
    group: str
    value: object

    def __repr__(self):
        return f"[{','.join(self.subset) or '-'}] {self.group}: {self.value}"


def coh_coordinates(c: CohClass | KClass) -> list[CoordinateRecord]:
    """Iterated-residue coordinates of a symbol-backed class over an s-fold
    Laurent tower (s <= 2) on a p-adic (tame) or finite descriptor."""
    k = c.kclass if isinstance(c, CohClass) else c
    if isinstance(c, CohClass) and c.character is not None:
        raise UnsupportedTower("coordinates need a purely symbol-backed class")
    chain = effective_tower(k.tower).residue_chain()
    if len(chain) > 2:
        raise UnsupportedTower("coordinate computation implemented for s <= 2")
    records = []
    for size in range(len(chain) + 1):
        for subset in itertools.combinations(range(len(chain)), size):
            cur = k
            names = []
            for i, (var, _) in enumerate(chain):
                if i in subset:
                    cur = tame_residue(cur, var)
                    names.append(var)
                else:
                    cur = unit_reduction(cur)
            records.append(_evaluate_base_class(cur, tuple(names)))
    return records


def top_coordinate(c: CohClass | KClass) -> CoordinateRecord:
    recs = coh_coordinates(c)
    full = max(len(r.subset) for r in recs)
    for r in recs:
        if len(r.subset) == full:
            return r
    raise RuntimeError("unreachable")


def _evaluate_base_class(k: KClass, names) -> CoordinateRecord:
    tower = effective_tower(k.tower)
    m = k.modulus
    deg = k.degree
    if isinstance(tower, FiniteField):
        if deg >= 2:
            return CoordinateRecord(names, "0 (K_r of a finite field, r >= 2)", 0)
        if deg == 1:
            total = 0
            for cf, (x,) in k.terms:
                total += cf * dlog_mod(tower, tower.elem(x), m)
            d = math.gcd(m, tower.q - 1)
            return CoordinateRecord(names, f"Z/{d}", total % d)
        return CoordinateRecord(names, f"Z/{m}", sum(c for c, _ in k.terms) % m)
    if isinstance(tower, PAdicDescriptor):
        if deg >= 3:
            return CoordinateRecord(names, "0 (cd(Q_p) = 2)", 0)
        if deg == 2:
            total = 0
            for cf, (x, y) in k.terms:
                total += cf * hilbert_pairing(x, y, m)
            return CoordinateRecord(names, f"Z/{m}",
                                    BrauerCoordinate(Fraction(total % m, m),
                                                     "Hilbert pairing"))
        if deg == 1:
            p = tower.p
            vtot, ulog = 0, 0
            g = _primitive_root(p)
            for cf, (x,) in k.terms:
                v, u, _ = tower.val_unit(x.payload)
                vtot += cf * v
                if p != 2:
                    ulog += cf * _dlog_mod_p(u % p, g, p)
            d = math.gcd(m, p - 1) if p != 2 else m
            return CoordinateRecord(names, f"Z/{m} x Z/{d}",
                                    (vtot % m, ulog % d if d else 0))
        return CoordinateRecord(names, f"Z/{m}", sum(c for c, _ in k.terms) % m)
    raise UnsupportedTower(f"coordinate evaluation over {k.tower}")


# ---------------------------------------------------------------------------
# relative cohomology H^4_{n, A (x) r}
# ---------------------------------------------------------------------------

@dataclass
class RelativeGroup:
    modulus: int
    subgroup_gcd: int          # subgroup of Z/modulus is <subgroup_gcd>
    order: int                 # order of the quotient group
    per_r: int                 # period of A^(x r)
    generators: list
    convention: str = RESIDUE_CONVENTION

    def describe(self) -> str:
        return f"Z/{self.order}"

    def m_r_map(self) -> dict:
        ok = all((self.per_r * v) % self.modulus == 0
                 for v in (self.subgroup_gcd,)) or self.subgroup_gcd == self.modulus
        return {"kind": "multiply-then-include",
                "factor": self.per_r,
                "domain": f"Z/{self.order}",
                "codomain": f"Z/{self.modulus}",
                "well_defined": (self.per_r * self.subgroup_gcd) % self.modulus == 0}

    def pi_r_map(self) -> dict:
        return {"kind": "reduction mod the residue subgroup",
                "domain": f"Z/{self.modulus}",
                "codomain": f"Z/{self.order}"}


def brauer_symbol_of(A) -> KClass:
    """[A] in K_2/per-coordinates for a tensor of symbol algebras."""
    from .algebras import SymbolTag, TensorTag
    T = A.base
    n = None
    parts = []

    def collect(alg):
        nonlocal n
        if isinstance(alg.tag, TensorTag):
            collect(alg.tag.left)
            collect(alg.tag.right)
        elif isinstance(alg.tag, SymbolTag):
            if n is None:
                n = alg.tag.n
            elif n != alg.tag.n:
                raise UnsupportedTower("mixed symbol degrees are out of scope")
            parts.append((alg.tag.a, alg.tag.b))
        else:
            raise UnsupportedTower("Brauer symbol needs symbol-algebra factors")
    collect(A)
    cls = KClass(T, 2, n, [])
    for a, b in parts:
        cls = cls + symbol(T, [a, b], n)
    return cls


def laurent_var_element(T: FieldTower, var: str) -> FieldElement:
    """The monomial var^1 as an element of the full tower T."""
    layers = []
    cur = effective_tower(T)
    while isinstance(cur, LaurentExt) and cur.var != var:
        layers.append(cur)
        cur = effective_tower(cur.base)
    if not isinstance(cur, LaurentExt):
        raise InconsistentConstruction(f"variable {var!r} not found in {T}")
    elem = cur.monomial(1)
    for L in reversed(layers):
        elem = L.elem(elem)
    return elem


def field_generators_mod_m(T: FieldTower, m: int) -> list[FieldElement]:
    """Generators of T^x/(T^x)^m for T an iterated Laurent tower over a tame
    p-adic descriptor: Teichmueller unit, p, and the Laurent variables."""
    chain = effective_tower(T).residue_chain()
    base = effective_tower(T)
    for _, b in chain:
        base = effective_tower(b)
    if not isinstance(base, PAdicDescriptor):
        raise UnsupportedTower("generator set implemented over p-adic bases")
    p = base.p
    if m > 1 and (p - 1) % m != 0 and m != 2:
        raise UnsupportedTower("wild modulus for the generator set")
    gens = [T.elem(_primitive_root(p)), T.elem(p)]
    for var, _ in chain:
        gens.append(laurent_var_element(T, var))
    return gens


def relative_group(A, r: int, modulus: int) -> RelativeGroup:
    """H^4_{modulus, A^(x r)} over a 2-fold Laurent tower on a tame p-adic base,
    computed through iterated residues and the Hilbert pairing."""
    from .algebras import SymbolTag, TensorTag
    T = A.base
    beta = brauer_symbol_of(A)          # [A] in K_2 / n
    n = beta.modulus
    if modulus % n:
        raise InconsistentConstruction(
            f"modulus {modulus} must be divisible by the symbol degree {n}")
    # per(A^(x r)) = order of r * beta in K_2/n
    per_r = kclass_order(beta.scale(r))
    gens = field_generators_mod_m(T, modulus)
    values = []
    gen_info = []
    for i, g in enumerate(gens):
        for j in range(i, len(gens)):
            h = gens[j]
            total = 0
            for cf, (a, b) in beta.terms:
                # lift of cf*{a,b} into Z/modulus carries the factor modulus/n
                cls4 = symbol(T, [g, h, a, b], modulus).scale(cf * (modulus // n) * r)
                rec = top_coordinate(cls4)
                val = rec.value
                if isinstance(val, BrauerCoordinate):
                    val = int(val.value * modulus) % modulus
                total = (total + val) % modulus
            values.append(total)
            gen_info.append(((str(g), str(h)), total))
    g = modulus
    for v in values:
        g = math.gcd(g, v)
    order = g  # quotient of Z/modulus by the subgroup generated by the values
    return RelativeGroup(modulus=modulus, subgroup_gcd=g, order=order,
                         per_r=per_r, generators=gen_info)
