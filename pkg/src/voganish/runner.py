"""verify_all: run every consistency check on a bundle.

Each check yields findings with a law name.  Failures make the run fail;
warnings (printed values that disagree with what we compute, disputed
source rows) only fail it in strict mode.
"""

import time
from dataclasses import dataclass, field

from . import packets as pk
from . import vc_calculus as vc
from .endoscopy import check_embedding
from .errors import VoganishError
from .symmetry_groups import FiniteAbelianGroup, Pi0, is_surjective, witness_iso

SECTIONS = ("geometry", "components", "laws", "fourier", "arthur_sheaves", "kl", "abv",
            "arthur", "twisting", "endoscopy")


@dataclass
class Finding:
    section: str
    law: str
    where: str
    detail: str
    severity: str = "fail"      # or "warn"

    def __str__(self):
        tag = "FAIL" if self.severity == "fail" else "warn"
        return f"{tag} [{self.law}] {self.where}: {self.detail}"


@dataclass
class Report:
    bundle: str
    findings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def failures(self):
        return [f for f in self.findings if f.severity == "fail"]

    @property
    def warnings(self):
        return [f for f in self.findings if f.severity == "warn"]

    def ok(self, strict=False):
        return not self.failures and not (strict and self.warnings)

    def laws_failed(self):
        return sorted({f.law for f in self.failures})


def _from(section, violations, severity="fail"):
    return [Finding(section, v.law, v.where, v.detail, severity) for v in violations]


# ---------------------------------------------------------------------------
# sections

def check_geometry(b):
    V = b.variety
    out = []

    def bad(law, where, detail):
        out.append(Finding("geometry", law, where, detail))

    labels = {}
    for c, st in b.strata_raw.items():
        x, xi = b.base_pair(c)
        if not V.in_V(x):
            bad("base point", c, "x is not in V")
            continue
        if not V.in_Vstar(xi):
            bad("base point", c, "xi is not in V*")
            continue
        if not V.is_conormal(x, xi):
            bad("conormality", c, "[x, xi] != 0")
        if V.pair_orbit_dim(x, xi) != V.dim_V:
            bad("strong regularity", c, f"pair orbit has dim {V.pair_orbit_dim(x, xi)}, want {V.dim_V}")
        d = V.point_orbit_dim(x)
        if d != int(st["dim"]):
            bad("orbit dimension", c, f"computed {d}, recorded {st['dim']}")
        lab = V.rank_label(x)
        if lab in labels:
            bad("orbit count", c, f"same orbit as {labels[lab]}")
        labels[lab] = c
    orbits = V.enumerate_orbits()
    if len(orbits) != len(b.strata_raw):
        bad("orbit count", b.id, f"{len(orbits)} orbits, {len(b.strata_raw)} strata recorded")
    if out:
        return out
    for c, st in b.strata_raw.items():
        x, xi = b.base_pair(c)
        dual = labels.get(V.dual_rank_label(xi))
        if dual != st["dual"]:
            bad("duality", c, f"covector lies over {dual}, recorded dual {st['dual']}")
        ecc = int(st["dim"]) + int(b.strata_raw[st["dual"]]["dim"]) - V.dim_V
        if ecc != int(st.get("eccentricity", ecc)):
            bad("eccentricity", c, f"computed {ecc}, recorded {st['eccentricity']}")
    got = {(labels[a], labels[c]) for a, c in V.covers()}
    want = {tuple(e) for e in b.raw.get("covers", [])}
    if got != want:
        bad("Hasse diagram", b.id, f"computed covers {sorted(got)}, recorded {sorted(want)}")
    return out


def check_components(b):
    out = []

    def bad(law, where, detail):
        out.append(Finding("components", law, where, detail))

    h = FiniteAbelianGroup(b.instance.h_component_group).order if b.instance.h_component_group else 1
    for c, st in b.strata.items():
        raw = b.strata_raw[c]
        if b.has_witnesses(c):
            for which, key, g in (("mic", "a_mic", st.a_mic), ("x", "a_x", st.a_x)):
                wit = raw[key].get("witnesses", [])
                pi0 = b._pi0(c, which)
                ok, msg, _ = witness_iso(pi0, wit)
                if not ok:
                    bad("component group", f"{c} {key}", msg)
                elif g.order != 2 ** pi0.k:
                    bad("component group", f"{c} {key}", f"recorded order {g.order}, computed {2 ** pi0.k}")
        else:
            # reduced geometry: |A| = |pi0 of the reduced stabilizer| * |pi0(H)|
            for which, key, g in (("mic", "a_mic", st.a_mic), ("x", "a_x", st.a_x)):
                want = 2 ** b._pi0(c, which).k * h
                if g.order != want:
                    bad("component group", f"{c} {key}", f"recorded order {g.order}, reduced count gives {want}")
        if not is_surjective(st.proj_x, st.a_mic, st.a_x):
            bad("component group", c, "A^mic -> A is not surjective")
    return out


def check_laws(b):
    ev = b.evs
    v = vc.check_support(ev) + vc.check_rank_one_twist(ev) + vc.check_additivity(ev)
    if not v:
        v += vc.check_diagonal(b.nevs)
    return _from("laws", v)


def check_fourier(b):
    v = vc.check_hat_involution(b.hat)
    if not v:
        v += vc.fourier_ev_compat(b.nevs, b.evs, b.hat, b.swaps)
    return _from("fourier", v)


def check_arthur_sheaf_section(b):
    return _from("arthur_sheaves", pk.check_arthur_sheaves(b) + pk.check_arthur_sheaf_fourier(b))


def check_kl(b):
    out = []
    for m in (b.m_rep, b.m_geo):
        for msg in m.problems():
            out.append(Finding("kl", "unitriangularity", m.role, msg))
    out += _from("kl", pk.kl_check(b.m_rep, b.m_geo, b.vogan))
    return out


def check_abv(b):
    return _from("abv", pk.check_abv_packets(b))


def check_arthur(b):
    _, v = pk.compare_arthur(b)
    return _from("arthur", v + pk.check_pairing(b))


def check_twisting(b):
    _, v = pk.twisting_vs_aubert(b)
    return _from("twisting", v)


def check_endoscopy(b):
    out = []
    for emb in b.endoscopy:
        bad, warn = check_embedding(emb)
        out += _from("endoscopy", bad) + _from("endoscopy", warn, "warn")
    return out


CHECKS = {
    "geometry": check_geometry,
    "components": check_components,
    "laws": check_laws,
    "fourier": check_fourier,
    "arthur_sheaves": check_arthur_sheaf_section,
    "kl": check_kl,
    "abv": check_abv,
    "arthur": check_arthur,
    "twisting": check_twisting,
    "endoscopy": check_endoscopy,
}


def verify_all(bundle, sections=None):
    """Run the named sections (all by default) and collect findings.

    A check that cannot even run (malformed data caught late) becomes a
    failure under its section rather than an exception."""
    rep = Report(bundle.id)
    for name in sections or SECTIONS:
        t = time.perf_counter()
        try:
            rep.findings += CHECKS[name](bundle)
        except VoganishError as e:
            rep.findings.append(Finding(name, name, bundle.id, str(e)))
        rep.timings[name] = time.perf_counter() - t
    return rep
