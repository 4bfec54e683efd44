"""ABV-packets, Arthur sheaves and eta coefficients.

Representation labels are opaque strings.  They meet the geometry only
through the Vogan bijection, which sends a simple perverse sheaf to a pair
(representation, pure inner form).  Functions here take a loaded bundle
(see ``datasets``) and return plain data plus lists of ``Violation``.
"""

from dataclasses import dataclass, field

from . import linalg as la
from .errors import InvariantError
from .symmetry_groups import Gauss, is_stabilizer_element
from .vc_calculus import KClass, Violation, twist_system


@dataclass
class VoganBijection:
    map: dict            # simple -> (rep, form)
    kottwitz_sign: dict  # form -> +1 / -1
    base_form: str = "0"

    def __post_init__(self):
        seen = {}
        for p, rf in self.map.items():
            rf = tuple(rf)
            if rf in seen:
                raise InvariantError(f"Vogan bijection sends {seen[rf]} and {p} to {rf}")
            if rf[1] not in self.kottwitz_sign:
                raise InvariantError(f"{p} maps to unknown pure form {rf[1]!r}")
            seen[rf] = p
        self._inverse = seen
        if self.kottwitz_sign.get(self.base_form) != 1:
            raise InvariantError(f"base form {self.base_form} must have Kottwitz sign +1")

    def rep(self, p):
        return tuple(self.map[p])

    def simple(self, rep, form):
        key = (rep, form)
        if key not in self._inverse:
            raise InvariantError(f"no simple corresponds to {fmt_rep(key)}")
        return self._inverse[key]

    def has(self, rf):
        return tuple(rf) in self._inverse

    def sign(self, form):
        return self.kottwitz_sign[form]


def fmt_rep(rf):
    rep, form = rf
    return f"({rep},{form})"


class VirtualRep:
    """Finite formal combination of (rep, form) pairs, Gaussian coefficients."""

    def __init__(self, coeffs=None):
        self.coeffs = {}
        for k, v in (coeffs or {}).items():
            v = v if isinstance(v, Gauss) else Gauss(int(v))
            if v:
                self.coeffs[tuple(k)] = self.coeffs.get(tuple(k), Gauss(0)) + v
        self.coeffs = {k: v for k, v in self.coeffs.items() if v}

    def __eq__(self, other):
        return isinstance(other, VirtualRep) and self.coeffs == other.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Gauss(0)) + v
        return VirtualRep(out)

    def __getitem__(self, k):
        return self.coeffs.get(tuple(k), Gauss(0))

    def support(self):
        return set(self.coeffs)

    def items(self):
        return sorted(self.coeffs.items())

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, v in self.items():
            if v == 1:
                parts.append(f"+[{fmt_rep(k)}]")
            elif v == -1:
                parts.append(f"-[{fmt_rep(k)}]")
            else:
                parts.append(f"+({v})[{fmt_rep(k)}]")
        s = " ".join(parts)
        return s[1:] if s.startswith("+") else s


@dataclass
class MultiplicityMatrix:
    role: str          # "m_rep" (rows/cols are reps) or "m_geo" (simples)
    labels: list
    rows: list
    table_id: str = ""

    def __post_init__(self):
        if self.role not in ("m_rep", "m_geo"):
            raise InvariantError(f"unknown matrix role {self.role!r}")
        self.labels = [tuple(l) if isinstance(l, (list, tuple)) else l for l in self.labels]
        n = len(self.labels)
        if len(self.rows) != n or any(len(r) != n for r in self.rows):
            raise InvariantError(f"{self.role} is not a square {n}x{n} matrix")

    def problems(self):
        """Unitriangularity and sign violations, as strings."""
        out = []
        n = len(self.labels)
        for i, row in enumerate(self.rows):
            for j, v in enumerate(row):
                if v < 0:
                    out.append(f"negative entry {v} at ({_lab(self.labels[i])}, {_lab(self.labels[j])})")
            if row[i] != 1:
                out.append(f"diagonal entry at {_lab(self.labels[i])} is {row[i]}, expected 1")
        upper = any(self.rows[i][j] for i in range(n) for j in range(i))
        lower = any(self.rows[i][j] for i in range(n) for j in range(i + 1, n))
        if upper and lower:
            out.append("matrix is neither upper nor lower unitriangular in the recorded order")
        return out

    def entry(self, a, b):
        return self.rows[self.labels.index(a)][self.labels.index(b)]


def _lab(l):
    return fmt_rep(l) if isinstance(l, tuple) else str(l)


# ---------------------------------------------------------------------------
# packets and Arthur sheaves

def abv_packet(bundle, c):
    ev = bundle.evs
    return {bundle.vogan.rep(p) for p in ev.simples if not ev.get(p, c).is_zero()}


@dataclass
class ArthurSheaf:
    stratum: str
    total: KClass
    packet: KClass = field(default_factory=KClass)
    coronal: KClass = field(default_factory=KClass)


def arthur_sheaf(bundle, c):
    ev = bundle.evs
    total, packet, coronal = KClass(), KClass(), KClass()
    for p, sh in ev.simples.items():
        r = ev.get(p, c).rank()
        if not r:
            continue
        term = KClass.single(p, r)
        total = total + term
        if sh.stratum == c:
            packet = packet + term
        else:
            coronal = coronal + term
    return ArthurSheaf(c, total, packet, coronal)


def check_arthur_sheaves(bundle):
    out = []
    for c, rec in bundle.arthur_sheaves.items():
        got = arthur_sheaf(bundle, c)
        want_p = KClass.of(rec.get("packet", []))
        want_c = KClass.of(rec.get("coronal", []))
        if got.packet != want_p or got.coronal != want_c:
            out.append(Violation("Arthur sheaf", c,
                                 f"computed packet {got.packet} + coronal {got.coronal}, "
                                 f"recorded {want_p} + {want_c}"))
    return out


def check_arthur_sheaf_fourier(bundle):
    """Ft A_C = A_C^ : ranks agree after moving simples through hat."""
    out = []
    hat = bundle.hat
    for c, st in bundle.evs.strata.items():
        moved = arthur_sheaf(bundle, c).total.map_keys(lambda p: hat[p])
        other = arthur_sheaf(bundle, st.dual).total
        if moved != other:
            out.append(Violation("Arthur-sheaf Fourier", c,
                                 f"Ft A_{c} = {moved} but A_{st.dual} = {other}"))
    return out


def check_abv_packets(bundle):
    out = []
    for c, members in bundle.abv_expected.items():
        got = abv_packet(bundle, c)
        want = {tuple(m) for m in members}
        if got != want:
            out.append(Violation("ABV packet", c,
                                 f"computed {_fmt_set(got)}, recorded {_fmt_set(want)}"))
    return out


def _fmt_set(s):
    return "{" + ", ".join(fmt_rep(k) for k in sorted(s)) + "}"


# ---------------------------------------------------------------------------
# eta coefficients

def stratum_element(bundle, c, s):
    """Normalise s to an element of A^mic_C.

    s is either an exponent tuple or a matrix stabilizing the base pair;
    a matrix that does not stabilize the pair is rejected."""
    st = bundle.evs.strata[c]
    g = st.a_mic
    if s and isinstance(s[0], (list, tuple)):
        if not bundle.has_witnesses(c):
            raise InvariantError(f"{c} has no base pair; give s as an element of A^mic_{c}")
        V = bundle.variety
        pair = bundle.base_pair(c)
        t = la.mat(s)
        if not is_stabilizer_element(V, t, list(pair)):
            raise InvariantError(f"s does not stabilize the base pair of {c}")
        return bundle.mic_coords(c, t)
    s = tuple(s)
    if len(s) != len(g.orders) or g.normalize(s) != s:
        raise InvariantError(f"{s} is not an element of A^mic_{c} {g.orders}")
    return s


def eta_nevs(bundle, c, s):
    s = stratum_element(bundle, c, s)
    nevs = bundle.nevs
    st = nevs.strata[c]
    out = {}
    for p, sh in nevs.simples.items():
        k = nevs.get(p, c)
        if k.is_zero():
            continue
        rep, form = bundle.vogan.rep(p)
        sign = bundle.vogan.sign(form) * (-1) ** (st.dim - nevs.strata[sh.stratum].dim)
        out[(rep, form)] = k.trace(lambda ch: st.a_mic.value(ch, s)) * sign
    return VirtualRep(out)


def eta_evs(bundle, c):
    """Rank version: the value of eta_nevs at the identity."""
    return eta_nevs(bundle, c, bundle.evs.strata[c].a_mic.identity)


def eta_arthur(bundle, param, s):
    g = bundle.evs.strata[param.stratum].a_mic
    s = g.normalize(s)
    ss = g.mul(s, param.s_psi)
    out = {}
    for rep, form, ch in param.members:
        out[(rep, form)] = g.value(ch, ss) * bundle.vogan.sign(form)
    return VirtualRep(out)


@dataclass
class ArthurParam:
    name: str
    stratum: str
    s_psi: tuple
    members: list      # (rep, form, character tuple or None for pseudo)
    pseudo: bool = False

    def packet(self):
        return {(r, f) for r, f, _ in self.members}

    def char_of(self, rf):
        for r, f, ch in self.members:
            if (r, f) == tuple(rf):
                return ch
        return None


@dataclass
class ComparisonRow:
    stratum: str
    param: str
    status: str        # "pass", "fail", "pseudo: packet only" or "no Arthur comparand"
    detail: str = ""


def compare_arthur(bundle):
    """Packet and eta comparison for every stratum; returns (rows, violations)."""
    rows, bad = [], []
    by_stratum = {}
    for prm in bundle.arthur:
        by_stratum.setdefault(prm.stratum, []).append(prm)
    for c in bundle.evs.strata:
        params = [p for p in by_stratum.get(c, []) if not p.pseudo]
        if not params:
            got = abv_packet(bundle, c)
            pseudo = [p for p in by_stratum.get(c, []) if p.pseudo]
            if not pseudo:
                rows.append(ComparisonRow(c, "-", "no Arthur comparand", f"ABV packet {_fmt_set(got)}"))
            # pseudo-Arthur packets carry no characters, so only the packet is compared
            for prm in pseudo:
                if got == prm.packet():
                    rows.append(ComparisonRow(c, prm.name, "pseudo: packet only", f"ABV packet {_fmt_set(got)}"))
                    continue
                v = Violation("packet equality", f"{prm.name} @ {c}",
                              f"ABV packet {_fmt_set(got)} vs pseudo-Arthur packet {_fmt_set(prm.packet())}")
                bad.append(v)
                rows.append(ComparisonRow(c, prm.name, "fail", v.detail))
            continue
        for prm in params:
            problems = []
            got = abv_packet(bundle, c)
            if got != prm.packet():
                problems.append(Violation("packet equality", f"{prm.name} @ {c}",
                                          f"ABV packet {_fmt_set(got)} vs Arthur packet {_fmt_set(prm.packet())}"))
            g = bundle.evs.strata[c].a_mic
            for s in g.elements():
                a = eta_arthur(bundle, prm, s)
                n = eta_nevs(bundle, c, s)
                if a != n:
                    problems.append(Violation("eta equality", f"{prm.name} @ {c}, s={s}",
                                              f"Arthur {a} vs NEvs {n}"))
            bad += problems
            rows.append(ComparisonRow(c, prm.name, "fail" if problems else "pass",
                                      "; ".join(v.detail for v in problems)))
    return rows, bad


def check_pairing(bundle):
    """<eta^Evs_C, P> = (-1)^dim C rank Evs_C(P), pairing [pi,delta] with
    P(pi,delta) by e(delta) (-1)^dim C_P."""
    out = []
    ev = bundle.evs
    for c, st in ev.strata.items():
        eta = eta_evs(bundle, c)
        for p, sh in ev.simples.items():
            rep, form = bundle.vogan.rep(p)
            pair = eta[(rep, form)] * bundle.vogan.sign(form) * (-1) ** ev.strata[sh.stratum].dim
            want = (-1) ** st.dim * ev.get(p, c).rank()
            if pair != want:
                out.append(Violation("pairing consistency", f"{p} @ {c}", f"<eta, P> = {pair}, expected {want}"))
    return out


# ---------------------------------------------------------------------------
# Kazhdan-Lusztig and twisting

def kl_check(m_rep, m_geo, vogan):
    """t(m_rep) = m'_geo, with rows of m_rep read through the bijection."""
    if len(m_rep.labels) != len(m_geo.labels):
        raise InvariantError(f"m_rep has {len(m_rep.labels)} labels, m_geo has {len(m_geo.labels)}")
    for i, (rf, p) in enumerate(zip(m_rep.labels, m_geo.labels)):
        if p not in vogan.map:
            raise InvariantError(f"m_geo label {p} is not a simple")
        if vogan.rep(p) != tuple(rf):
            raise InvariantError(f"index {i}: m_rep label {fmt_rep(rf)} is not aligned with m_geo label {p} "
                                 f"(which corresponds to {fmt_rep(vogan.rep(p))})")
    out = []
    n = len(m_rep.labels)
    for i in range(n):
        for j in range(n):
            if m_rep.rows[i][j] != m_geo.rows[j][i]:
                out.append(Violation("Kazhdan-Lusztig", f"{m_geo.labels[j]} x {m_geo.labels[i]}",
                                     f"m_rep[{_lab(m_rep.labels[i])}][{_lab(m_rep.labels[j])}] = {m_rep.rows[i][j]} "
                                     f"but m'_geo[{m_geo.labels[j]}][{m_geo.labels[i]}] = {m_geo.rows[j][i]}"))
                return out
    return out


@dataclass
class TwistRow:
    param: str
    stratum: str
    chi: str
    twist: str
    ok: bool


def twisting_vs_aubert(bundle):
    """chi_psi from the Aubert pairing against the trace of the twist."""
    tw = twist_system(bundle.evs)
    params = {p.stratum: p for p in bundle.arthur if not p.pseudo}
    dual_of = bundle.aubert
    rows, bad = [], []
    for c, prm in params.items():
        st = bundle.evs.strata[c]
        g = st.a_mic
        d = st.dual
        hat_prm = params.get(d)
        if hat_prm is None:
            continue
        gd = bundle.evs.strata[d].a_mic
        swap = bundle.swaps[c]
        chi = {}
        problems = []
        for s in g.elements():
            s_hat = gd.image(swap, s)
            vals = set()
            for r, f, ch in prm.members:
                partner = dual_of.get((r, f))
                if partner is None:
                    problems.append(f"{fmt_rep((r, f))} has no Aubert dual")
                    continue
                ch_hat = hat_prm.char_of(partner)
                if ch_hat is None:
                    problems.append(f"Aubert dual {fmt_rep(partner)} of {fmt_rep((r, f))} is not in {hat_prm.name}")
                    continue
                vals.add(gd.value(ch_hat, s_hat) * g.value(ch, s).conj())
            if len(vals) > 1:
                problems.append(f"ratio is not constant over the packet at s={s}")
            if vals:
                chi[s] = vals.pop()
        chi_char = None
        for cand in g.characters():
            if all(g.value(cand, s) == v for s, v in chi.items()):
                chi_char = cand
                break
        if chi_char is None and not problems:
            problems.append("ratio is not a character")
        ok = not problems and chi_char == tuple(tw[c])
        if not ok and not problems:
            problems.append(f"chi = {g.char_name(chi_char)} but the twist at {c} is {g.char_name(tw[c])}")
        rows.append(TwistRow(prm.name, c, g.char_name(chi_char) if chi_char is not None else "?",
                             g.char_name(tw[c]), ok))
        bad += [Violation("twisting character", f"{prm.name} @ {c}", m) for m in problems]
    return rows, bad
