"""Endoscopic embeddings and the restriction trace identity.

A product embedding places each factor variety inside the ambient one by a
signed partial permutation P_f (factor basis vector e_j goes to +-e_k), so a
point (X_a, X_b) becomes P_a X_a P_a^T + P_b X_b P_b^T.  The identity checked
for each lifting stratum C' over C is

    (-1)^dim C' tr_{a'_s} NEvs'_{C'}(P|)  =  (-1)^dim C tr_{a_s} NEvs_C(P)

where P| is the curated restriction of P and a'_s, a_s are the images of s
in the microlocal component groups, read off through the witnesses.

A "central" embedding (used for SL(2)) has a single point stratum and
component group Z/2 generated by s; restriction is restriction of the
character to <s>.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .components import find_conjugator
from .errors import InvariantError, Unsupported
from .symmetry_groups import FiniteAbelianGroup, Gauss
from .vc_calculus import (CharacterSheaf, EvTable, KClass, StratumData, Violation,
                          check_support, nevs_from_evs, thom_sebastiani)


@dataclass
class EndoscopicEmbedding:
    name: str
    kind: str                     # "product" or "central"
    s: tuple
    factors: list                 # [(Bundle, signed 1-indexed embedding)]
    stratum_map: dict             # C' -> C
    regular_strata: list
    restriction_table: dict       # ambient simple -> KClass of product simples
    ambient: object = None
    printed: dict = field(default_factory=dict)
    provenance: str = ""
    notes: dict = field(default_factory=dict)
    disputed: dict = field(default_factory=dict)   # simple -> reason; failures become warnings

    @classmethod
    def from_record(cls, ambient, rec):
        kind = rec.get("kind", "product")
        if kind not in ("product", "central"):
            raise InvariantError(f"unknown embedding kind {kind!r}")
        factors = [(ambient.factor_bundle(f["bundle"]), list(f["embed"])) for f in rec.get("factors", [])]
        res = {}
        for p, terms in rec["restriction"].items():
            res[p] = KClass({(q, int(sh)): int(k) for q, k, sh in terms})
        return cls(rec["name"], kind, tuple(rec["s"]), factors, dict(rec.get("stratum_map", {})),
                   list(rec.get("regular", [])), res, ambient, rec.get("printed", {}),
                   rec.get("provenance", ""), dict(rec.get("notes", {})), dict(rec.get("disputed", {})))

    @property
    def factor_instances(self):
        return tuple(b.instance for b, _ in self.factors)

    # caches live on the instance; the dataclass stays a plain record
    def _cache(self):
        return self.__dict__.setdefault("_memo", {})


# ---------------------------------------------------------------------------
# embedding matrices

def embedding_matrices(emb):
    """P_f for each factor, after checking the form and the grading."""
    memo = emb._cache()
    if "P" in memo:
        return memo["P"]
    V = emb.ambient.variety
    out = []
    used = set()
    for fb, idx in emb.factors:
        Vf = fb.variety
        if len(idx) != Vf.N:
            raise InvariantError(f"{emb.name}: factor {fb.id} needs {Vf.N} indices, got {len(idx)}")
        P = la.zeros(V.N, Vf.N)
        for j, k in enumerate(idx):
            pos = abs(k) - 1
            if pos in used or not 0 <= pos < V.N:
                raise InvariantError(f"{emb.name}: index {k} reused or out of range")
            used.add(pos)
            P[pos][j] = Fraction(1 if k > 0 else -1)
        shifts = {V.block_of(abs(k) - 1) - Vf.block_of(j) for j, k in enumerate(idx)}
        if len(shifts) != 1:
            raise InvariantError(f"{emb.name}: factor {fb.id} does not respect the grading")
        if V.is_sp:
            if la.matmul(la.matmul(la.transpose(P), V.J), P) != Vf.J:
                raise InvariantError(f"{emb.name}: factor {fb.id} does not preserve the symplectic form")
        out.append(P)
    memo["P"] = out
    return out


def _embed(Ps, mats):
    out = None
    for P, m in zip(Ps, mats):
        term = la.matmul(la.matmul(P, m), la.transpose(P))
        out = term if out is None else la.add(out, term)
    return out


def _s_matrix(emb):
    return la.diag(emb.s)


# ---------------------------------------------------------------------------
# Ev' for the product

def _central_table(ambient_stratum="0"):
    g = FiniteAbelianGroup((2,))
    st = StratumData("0", 0, g, g, [(1,)], [], {"1": (0,), "E": (1,)}, "0")
    simples = {"1_0": CharacterSheaf("1_0", "0", (0,)), "E_0": CharacterSheaf("E_0", "0", (1,))}
    values = {("1_0", "0"): KClass.single((0,)), ("E_0", "0"): KClass.single((1,))}
    return EvTable({"0": st}, simples, values, lambda a, b: True)


def ev_prime(emb):
    memo = emb._cache()
    if "ev" not in memo:
        if emb.kind == "central":
            memo["ev"] = _central_table()
        else:
            if len(emb.factors) != 2:
                raise Unsupported("product embeddings with other than two factors")
            memo["ev"] = thom_sebastiani(emb.factors[0][0].evs, emb.factors[1][0].evs)
    return memo["ev"]


def nevs_prime(emb):
    memo = emb._cache()
    if "nev" not in memo:
        memo["nev"] = nevs_from_evs(ev_prime(emb))
    return memo["nev"]


# ---------------------------------------------------------------------------
# strata

@dataclass
class EmbeddedStratum:
    name: str
    ambient: str       # None when the rank label matches no stratum
    lifts: bool
    x: list = None
    xi: list = None


def embed_strata(emb):
    memo = emb._cache()
    if "strata" in memo:
        return memo["strata"]
    amb = emb.ambient
    out = {}
    if emb.kind == "central":
        if len(amb.strata_raw) != 1:
            raise InvariantError("central embeddings need a one-stratum ambient bundle")
        out["0"] = EmbeddedStratum("0", next(iter(amb.strata_raw)), True)
        memo["strata"] = out
        return out
    V = amb.variety
    Ps = embedding_matrices(emb)
    labels = {V.rank_label(amb.base_pair(c)[0]): c for c in amb.strata_raw}
    for name in ev_prime(emb).strata:
        parts = name.split("×")
        pairs = [fb.base_pair(cf) for (fb, _), cf in zip(emb.factors, parts)]
        X = _embed(Ps, [p[0] for p in pairs])
        Xi = _embed(Ps, [p[1] for p in pairs])
        c = labels.get(V.rank_label(X))
        lifts = c is not None and V.pair_orbit_dim(X, Xi) == V.dim_V
        out[name] = EmbeddedStratum(name, c, lifts, X, Xi)
    memo["strata"] = out
    return out


def s_images(emb, c2):
    """(a'_s, a_s) for a lifting product stratum c2."""
    memo = emb._cache().setdefault("s", {})
    if c2 in memo:
        return memo[c2]
    amb = emb.ambient
    es = embed_strata(emb)[c2]
    if not es.lifts:
        raise InvariantError(f"{c2} does not lift to a regular conormal of {emb.ambient.name}")
    if emb.kind == "central":
        g = amb.evs.strata[es.ambient].a_mic
        memo[c2] = ((1,), g.normalize(emb.s))
        return memo[c2]
    S = _s_matrix(emb)
    a_prime = ()
    for (fb, _), P, cf in zip(emb.factors, embedding_matrices(emb), c2.split("×")):
        sf = la.matmul(la.matmul(la.transpose(P), S), P)
        a_prime += tuple(fb.mic_coords(cf, sf))
    V = amb.variety
    h = find_conjugator(V, [es.x, es.xi], list(amb.base_pair(es.ambient)))
    if h is None:
        raise InvariantError(f"embedded pair of {c2} is not conjugate to the base pair of {es.ambient} "
                             "by a signed block permutation")
    t = la.matmul(la.matmul(h, S), la.transpose(h))
    memo[c2] = (a_prime, amb.mic_coords(es.ambient, t))
    return memo[c2]


# ---------------------------------------------------------------------------
# the identity

@dataclass
class IdentityRow:
    stratum: str
    ambient: str
    lhs: Gauss
    rhs: Gauss

    @property
    def ok(self):
        return self.lhs == self.rhs


def lifting_strata(emb):
    es = embed_strata(emb)
    order = [c for c in emb.regular_strata if c in es and es[c].lifts]
    order += [c for c, e in es.items() if e.lifts and c not in order]
    return order


def trace_identity_check(emb, p):
    if p not in emb.restriction_table:
        raise InvariantError(f"{p} is not in the restriction table of {emb.name}")
    res = emb.restriction_table[p]
    nev2 = nevs_prime(emb)
    for (q, _sh) in res.terms:
        if q not in nev2.simples:
            raise InvariantError(f"restriction of {p} names unknown product simple {q}")
    nev = emb.ambient.nevs
    rows = []
    for c2 in lifting_strata(emb):
        c = embed_strata(emb)[c2].ambient
        a2, a = s_images(emb, c2)
        g2 = nev2.strata[c2].a_mic
        g = nev.strata[c].a_mic
        lhs = nev2.evs_of(res, c2).trace(lambda ch: g2.value(ch, a2)) * (-1) ** nev2.strata[c2].dim
        rhs = nev.get(p, c).trace(lambda ch: g.value(ch, a)) * (-1) ** nev.strata[c].dim
        rows.append(IdentityRow(c2, c, lhs, rhs))
    return rows


def check_embedding(emb):
    """(violations, warnings) for one embedding."""
    bad, warn = [], []
    es = embed_strata(emb)
    for c2, c in emb.stratum_map.items():
        if c2 not in es:
            bad.append(Violation("stratum map", f"{emb.name}: {c2}", "not a product stratum"))
        elif es[c2].ambient != c:
            bad.append(Violation("stratum map", f"{emb.name}: {c2}",
                                 f"embedded representative lies in {es[c2].ambient}, recorded {c}"))
    got = {c for c, e in es.items() if e.lifts}
    if got != set(emb.regular_strata):
        bad.append(Violation("regular strata", emb.name,
                             f"computed {sorted(got)}, recorded {sorted(emb.regular_strata)}"))
    for v in check_support(ev_prime(emb)):
        bad.append(Violation("support", f"{emb.name}: {v.where}", v.detail))
    for p in emb.restriction_table:
        rows = trace_identity_check(emb, p)
        failing = [r for r in rows if not r.ok]
        if p in emb.disputed:
            # known inconsistency in the source tables: report it, never hide it
            where = f"{emb.name}: {p}"
            if failing:
                warn += [Violation("disputed restriction row", f"{where} @ {r.stratum}",
                                   f"LHS {r.lhs} != RHS {r.rhs} ({emb.disputed[p]})") for r in failing]
            else:
                warn.append(Violation("disputed restriction row", where, "now satisfies the identity"))
        else:
            for r in failing:
                bad.append(Violation("endoscopic trace identity", f"{emb.name}: {p} @ {r.stratum}",
                                     f"LHS {r.lhs} != RHS {r.rhs}"))
        for c2, (l, r) in emb.printed.get(p, {}).items():
            hit = next((x for x in rows if x.stratum == c2), None)
            if hit is None:
                warn.append(Violation("printed values", f"{emb.name}: {p} @ {c2}", "stratum does not lift"))
            elif (hit.lhs, hit.rhs) != (Gauss(l), Gauss(r)):
                warn.append(Violation("printed values", f"{emb.name}: {p} @ {c2}",
                                      f"computed ({hit.lhs},{hit.rhs}), recorded ({l},{r})"))
    return bad, warn
