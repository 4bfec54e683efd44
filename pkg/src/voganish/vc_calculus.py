"""Grothendieck-group bookkeeping for microlocal vanishing cycles.

A K-class is a finite formal sum of keys (simple sheaves or characters)
with integer coefficients and integer shifts.  Traces weight a term with
shift k by (-1)^k.  Ev tables map (simple, stratum) to a K-class of
characters of the microlocal component group of the stratum.
"""

from dataclasses import dataclass, field

from .errors import InvariantError
from .symmetry_groups import FiniteAbelianGroup, Gauss, product_group


class KClass:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for (key, shift), c in (terms or {}).items():
            if c:
                self.terms[(key, shift)] = self.terms.get((key, shift), 0) + c
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def single(cls, key, coeff=1, shift=0):
        return cls({(key, shift): coeff})

    @classmethod
    def of(cls, keys):
        out = cls()
        for k in keys:
            out = out + cls.single(k)
        return out

    def __add__(self, other):
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return KClass(t)

    def __neg__(self):
        return KClass({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return KClass({k: c * v for k, v in self.terms.items()})

    def shifted(self, s):
        return KClass({(k, sh + s): v for (k, sh), v in self.terms.items()})

    def map_keys(self, f):
        out = {}
        for (k, sh), v in self.terms.items():
            nk = f(k)
            out[(nk, sh)] = out.get((nk, sh), 0) + v
        return KClass(out)

    def collapsed(self):
        """key -> sum of coeff * (-1)^shift; what every trace sees."""
        out = {}
        for (k, sh), v in self.terms.items():
            out[k] = out.get(k, 0) + (v if sh % 2 == 0 else -v)
        return {k: v for k, v in out.items() if v}

    def keys(self):
        return sorted({k for k, _ in self.terms}, key=repr)

    def is_zero(self):
        return not self.terms

    def rank(self):
        return sum(self.collapsed().values())

    def trace(self, value):
        """sum coeff (-1)^shift value(key)."""
        out = Gauss(0)
        for k, v in self.collapsed().items():
            out = out + value(k) * v
        return out

    def __eq__(self, other):
        return isinstance(other, KClass) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (k, sh), v in sorted(self.terms.items(), key=repr):
            s = f"{v}*{k}" if v != 1 else f"{k}"
            parts.append(s + (f"[{sh}]" if sh else ""))
        return " + ".join(parts)

    def tensor(self, other, combine):
        out = {}
        for (a, sa), va in self.terms.items():
            for (b, sb), vb in other.terms.items():
                key = (combine(a, b), sa + sb)
                out[key] = out.get(key, 0) + va * vb
        return KClass(out)


@dataclass
class StratumData:
    name: str
    dim: int
    a_x: FiniteAbelianGroup
    a_mic: FiniteAbelianGroup
    proj_x: list = field(default_factory=list)   # images of A_mic generators in A_x
    proj_xi: list = field(default_factory=list)
    local_systems: dict = field(default_factory=dict)  # name -> character of a_x
    dual: str = None


@dataclass(frozen=True)
class CharacterSheaf:
    name: str
    stratum: str
    char: tuple


@dataclass
class EvTable:
    strata: dict               # name -> StratumData (ordered)
    simples: dict              # name -> CharacterSheaf (ordered)
    values: dict               # (simple, stratum) -> KClass of characters of a_mic
    leq: object = None         # leq(C, D): C lies in the closure of D

    def get(self, p, c):
        return self.values.get((p, c), KClass())

    def evs_of(self, kclass, c):
        """Additive extension to K-classes of simples."""
        out = KClass()
        for (p, sh), v in kclass.terms.items():
            out = out + self.get(p, c).shifted(sh).scale(v)
        return out

    def trace(self, p, c, s):
        g = self.strata[c].a_mic
        return self.get(p, c).trace(lambda ch: g.value(ch, s))

    def trivial_simple(self, c):
        st = self.strata[c]
        for name, sh in self.simples.items():
            if sh.stratum == c and sh.char == st.a_x.identity:
                return name
        raise InvariantError(f"no trivial local system listed on {c}")


@dataclass(frozen=True)
class Violation:
    law: str
    where: str
    detail: str

    def __str__(self):
        return f"[{self.law}] {self.where}: {self.detail}"


# ---------------------------------------------------------------------------
# twisting and normalisation

def twist_system(table):
    out = {}
    for c, st in table.strata.items():
        p = table.trivial_simple(c)
        val = table.get(p, c)
        col = val.collapsed()
        if not col:
            raise InvariantError(f"Evs_{c}(IC(1_{c})) is missing, table incomplete")
        if len(col) != 1 or list(col.values())[0] != 1:
            raise InvariantError(f"Evs_{c}(IC(1_{c})) = {val} is not rank one")
        out[c] = next(iter(col))
    return out


def nevs_from_evs(table):
    tw = twist_system(table)
    vals = {}
    for (p, c), k in table.values.items():
        g = table.strata[c].a_mic
        inv = g.char_inv(tw[c])
        vals[(p, c)] = k.map_keys(lambda ch, g=g, inv=inv: g.char_mul(ch, inv))
    return EvTable(table.strata, table.simples, vals, table.leq)


def check_support(table):
    out = []
    for (p, c), v in table.values.items():
        if v.is_zero():
            continue
        sup = table.simples[p].stratum
        if not table.leq(c, sup):
            out.append(Violation("support", f"{p} @ {c}", f"value {v} but {c} is not in the closure of {sup}"))
    return out


def check_rank_one_twist(table):
    out = []
    for c in table.strata:
        try:
            p = table.trivial_simple(c)
        except InvariantError as e:
            out.append(Violation("rank-one twist", c, str(e)))
            continue
        v = table.get(p, c)
        col = v.collapsed()
        if len(col) != 1 or list(col.values())[0] != 1 or any(sh for _, sh in v.terms):
            out.append(Violation("rank-one twist", c, f"Evs_{c}(IC(1_{c})) = {v} is not a rank-one local system"))
    return out


def check_diagonal(nevs):
    """NEvs_C(IC(C, L)) must be the pullback of L along A^mic_C -> A_C."""
    out = []
    for p, sh in nevs.simples.items():
        st = nevs.strata[sh.stratum]
        want = st.a_x.pullback(sh.char, st.proj_x, st.a_mic)
        got = nevs.get(p, sh.stratum)
        if got != KClass.single(want):
            out.append(Violation("diagonal", f"{p} @ {sh.stratum}",
                                 f"NEvs = {_named(got, st.a_mic)}, pullback of {st.a_x.char_name(sh.char)} is {st.a_mic.char_name(want)}"))
    return out


def check_additivity(table):
    """Entries are genuine local systems and Evs is additive on K-classes."""
    out = []
    for (p, c), v in table.values.items():
        g = table.strata[c].a_mic
        for (ch, shift), coeff in v.terms.items():
            if len(ch) != len(g.orders) or g.normalize(ch) != tuple(ch):
                out.append(Violation("additivity", f"{p} @ {c}", f"{ch} is not a character of A^mic_{c}"))
            if coeff < 0 or shift:
                out.append(Violation("additivity", f"{p} @ {c}", "entry is not an honest local system"))
    names = list(table.simples)
    for c in table.strata:
        total = KClass()
        for p in names:
            total = total + table.get(p, c)
        whole = table.evs_of(KClass.of(names), c)
        if whole != total:
            out.append(Violation("additivity", c, "Evs of the sum differs from the sum of Evs"))
    return out


def _named(k, g):
    if k.is_zero():
        return "0"
    return repr(k.map_keys(g.char_name))


# ---------------------------------------------------------------------------
# Fourier transform

def hat_map(fourier, strata_dual, simples):
    """Ft table entries "name_Ck" mean IC(name on C*_k); hat moves them to
    the transposed stratum, i.e. the dual of C_k."""
    out = {}
    for p, target in fourier.items():
        name, _, k = target.rpartition("_")
        if k not in strata_dual:
            raise InvariantError(f"Fourier target {target} names an unknown stratum")
        q = f"{name}_{strata_dual[k]}"
        if q not in simples:
            raise InvariantError(f"Fourier target {target} has no simple {q}")
        out[p] = q
    missing = [p for p in simples if p not in out]
    if missing:
        raise InvariantError(f"simples missing from the Fourier table: {missing}")
    return out


def fourier_transform(fourier, p):
    if p not in fourier:
        raise InvariantError(f"{p} is missing from the Fourier table")
    return fourier[p]


def check_hat_involution(hat):
    out = []
    for p, q in hat.items():
        if hat.get(q) != p:
            out.append(Violation("Fourier involution", p, f"hat(hat({p})) = {hat.get(q)}"))
    if sorted(hat.values()) != sorted(hat):
        out.append(Violation("Fourier involution", "table", "hat is not a permutation of simples"))
    return out


def transport(k, images, src, dst):
    """Move a K-class of characters of dst... along swap: src -> dst.

    ``images`` sends src generators to dst elements; a character chi of src
    is carried to the unique character of dst pulling back to chi."""
    pull = {}
    for ch in dst.characters():
        pull[dst.pullback(ch, images, src)] = ch
    if len(pull) != dst.order:
        raise InvariantError("swap map is not an isomorphism")
    return k.map_keys(lambda ch: pull[tuple(ch)])


def fourier_ev_compat(nevs, evs, hat, swaps):
    """swap_C(NEvs_C(P)) == Evs_{C^}(hat P) for every simple and stratum."""
    out = []
    for c, st in nevs.strata.items():
        d = st.dual
        dst = nevs.strata[d].a_mic
        for p in nevs.simples:
            left = transport(nevs.get(p, c), swaps[c], st.a_mic, dst)
            right = evs.get(hat[p], d)
            if left != right:
                out.append(Violation("Fourier-Ev compatibility", f"{p} @ {c}",
                                     f"NEvs moved to {d} is {_named(left, dst)}, Evs_{d}({hat[p]}) is {_named(right, dst)}"))
    return out


# ---------------------------------------------------------------------------
# products

def thom_sebastiani(ta, tb):
    strata = {}
    for ca, sa in ta.strata.items():
        for cb, sb in tb.strata.items():
            ga = product_group([sa.a_x, sb.a_x])
            gm = product_group([sa.a_mic, sb.a_mic])
            ls = {f"{na}⊠{nb}": tuple(a) + tuple(b)
                  for na, a in sa.local_systems.items() for nb, b in sb.local_systems.items()}
            strata[f"{ca}×{cb}"] = StratumData(
                f"{ca}×{cb}", sa.dim + sb.dim, ga, gm,
                [tuple(i) + tuple(0 for _ in sb.a_x.orders) for i in sa.proj_x]
                + [tuple(0 for _ in sa.a_x.orders) + tuple(i) for i in sb.proj_x],
                [], ls, f"{sa.dual}×{sb.dual}" if sa.dual and sb.dual else None)
    simples = {}
    for pa, sha in ta.simples.items():
        for pb, shb in tb.simples.items():
            simples[f"{pa}⊠{pb}"] = CharacterSheaf(f"{pa}⊠{pb}", f"{sha.stratum}×{shb.stratum}",
                                                   tuple(sha.char) + tuple(shb.char))
    values = {}
    for pa in ta.simples:
        for pb in tb.simples:
            for ca in ta.strata:
                for cb in tb.strata:
                    k = ta.get(pa, ca).tensor(tb.get(pb, cb), lambda a, b: tuple(a) + tuple(b))
                    if not k.is_zero():
                        values[(f"{pa}⊠{pb}", f"{ca}×{cb}")] = k

    def leq(c, d):
        ca, cb = c.split("×")
        da, db = d.split("×")
        return ta.leq(ca, da) and tb.leq(cb, db)

    return EvTable(strata, simples, values, leq)


def zero_table():
    """Ev table of the zero variety: one stratum, one simple."""
    g = FiniteAbelianGroup(())
    st = StratumData("0", 0, g, g, [], [], {"1": ()}, "0")
    return EvTable({"0": st}, {"1_0": CharacterSheaf("1_0", "0", ())},
                   {("1_0", "0"): KClass.single(())}, lambda a, b: True)


# ---------------------------------------------------------------------------
# atomic vanishing-cycle rules

ATOMIC_FORMS = ("Zero", "Smooth", "Square", "SquareUnit", "QuadSum", "XY")


@dataclass(frozen=True)
class RPhi:
    """Output of an atomic rule: kind in {input, zero, local_system,
    skyscraper}; monodromy is a set of quadratic characters (their product)."""

    kind: str
    monodromy: frozenset = frozenset()
    shift: int = 0
    rank: int = 1


def atomic_rphi(form, local_system="1", e=None, variables=None):
    if form not in ATOMIC_FORMS:
        raise InvariantError(f"unknown normal form {form!r}")
    if form == "Zero":
        return RPhi("input", frozenset([local_system]) - {"1"})
    if form == "Smooth":
        return RPhi("zero", rank=0)
    if form == "Square":
        return RPhi("local_system", frozenset({"x"}))
    if form == "SquareUnit":
        return RPhi("local_system", frozenset({variables or "u"}))
    if form == "QuadSum":
        if not e or e < 1:
            raise InvariantError("QuadSum needs e >= 1")
        names = variables or [f"u{i + 1}" for i in range(e)]
        return RPhi("local_system", frozenset(names), 1 - e)
    return RPhi("skyscraper")


def rphi_product(a, b):
    """Thom-Sebastiani: monodromies multiply, shifts add with a -1 correction."""
    if a.kind == "zero" or b.kind == "zero":
        return RPhi("zero", rank=0)
    kind = "local_system" if "local_system" in (a.kind, b.kind) else a.kind
    return RPhi(kind, a.monodromy ^ b.monodromy, a.shift + b.shift - 1, a.rank * b.rank)
