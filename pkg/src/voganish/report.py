"""Tables for a bundle, rendered as Markdown or CSV.

Output is a pure function of the bundle (no timestamps, fixed ordering), so
two runs produce identical bytes.
"""

import csv
import io
from dataclasses import dataclass

from . import packets as pk
from .endoscopy import lifting_strata, trace_identity_check
from .runner import verify_all


@dataclass
class Table:
    id: str
    header: list
    rows: list
    note: str = ""


def _pt(V, m):
    ent = V.entries(m)
    if not ent:
        return "0"
    out = ""
    for (i, j), v in sorted(ent.items()):
        sign = "-" if v < 0 else "+"
        mag = "" if abs(v) == 1 else str(abs(v))
        out += f" {sign} {mag}E{i}{j}"
    out = out[3:]
    return ("-" + out) if ent[min(ent)] < 0 else out


def _kc(k, g):
    if k.is_zero():
        return "0"
    return repr(k.map_keys(g.char_name))


def _set(s):
    return " ".join(sorted(pk.fmt_rep(x) for x in s))


# ---------------------------------------------------------------------------
# individual tables

def orbits_table(b):
    V = b.variety
    rows = []
    for c, st in b.strata_raw.items():
        x, xi = b.base_pair(c)
        rows.append([c, st["dim"], st["dual"], st["eccentricity"], _pt(V, x), _pt(V, xi)])
    covers = ", ".join(f"{a}<{c}" for a, c in b.raw.get("covers", []))
    return Table(f"orbits-{b.name}", ["stratum", "dim", "dual", "ecc", "x", "xi"], rows, f"covers: {covers}")


def ev_table(b, normalised=False):
    t = b.nevs if normalised else b.evs
    strata = list(t.strata)
    rows = []
    for p in t.simples:
        rows.append([p] + [_kc(t.get(p, c), t.strata[c].a_mic) for c in strata])
    return Table(f"{'NEvs' if normalised else 'Evs'}-{b.name}", ["P"] + strata, rows)


def fourier_table(b):
    return Table(f"Ft-{b.name}", ["P", "Ft P", "hat P"], [[p, q, b.hat[p]] for p, q in b.fourier.items()])


def mult_table(b, role):
    m = getattr(b, role)
    labels = [pk._lab(tuple(l) if isinstance(l, list) else l) for l in m.labels]
    tid = f"{'mrep' if role == 'm_rep' else 'mgeo'}-{b.name}"
    return Table(tid, [""] + labels, [[lab] + list(r) for lab, r in zip(labels, m.rows)])


def arthur_sheaf_table(b):
    rows = []
    for c in b.evs.strata:
        a = pk.arthur_sheaf(b, c)
        rows.append([c, repr(a.packet) if not a.packet.is_zero() else "0",
                     repr(a.coronal) if not a.coronal.is_zero() else "0"])
    return Table(f"AS-{b.name}", ["stratum", "packet", "coronal"], rows)


def abv_table(b):
    rows = [[c, _set(pk.abv_packet(b, c))] for c in b.evs.strata]
    return Table(f"ABV-{b.name}", ["stratum", "ABV packet"], rows)


def eta_table(b):
    rows = []
    for prm in b.arthur:
        if prm.pseudo:
            continue
        g = b.evs.strata[prm.stratum].a_mic
        for s in g.elements():
            a = pk.eta_arthur(b, prm, s)
            n = pk.eta_nevs(b, prm.stratum, s)
            rows.append([prm.name, prm.stratum, "".join(str(v) for v in s), repr(a), repr(n),
                         "ok" if a == n else "MISMATCH"])
    return Table(f"eta-{b.name}", ["psi", "stratum", "s", "eta Arthur", "eta NEvs", ""], rows)


def twist_table(b):
    rows, _ = pk.twisting_vs_aubert(b)
    return Table(f"twist-{b.name}", ["psi", "stratum", "chi_psi", "trace T_psi", ""],
                 [[r.param, r.stratum, r.chi, r.twist, "ok" if r.ok else "MISMATCH"] for r in rows])


def endoscopy_tables(b):
    out = []
    for emb in b.endoscopy:
        rows = []
        for p in emb.restriction_table:
            for r in trace_identity_check(emb, p):
                printed = emb.printed.get(p, {}).get(r.stratum)
                rows.append([p, r.stratum, r.ambient, str(r.lhs), str(r.rhs),
                             "" if printed is None else f"({printed[0]},{printed[1]})",
                             "ok" if r.ok else "MISMATCH"])
        note = f"s = {list(emb.s)}; lifting strata: {', '.join(lifting_strata(emb))}"
        out.append(Table(f"endo-{b.name}-{emb.name}", ["P", "C'", "C", "LHS", "RHS", "printed", ""], rows, note))
    return out


def verify_table(b):
    rep = verify_all(b)
    rows = [[f.severity, f.section, f.law, f.where, f.detail] for f in rep.findings]
    note = "all checks pass" if rep.ok(strict=True) else (
        f"{len(rep.failures)} failure(s), {len(rep.warnings)} warning(s)")
    return Table(f"verify-{b.name}", ["severity", "section", "law", "where", "detail"], rows, note)


TABLES = {
    "orbits": lambda b: [orbits_table(b)],
    "evs": lambda b: [ev_table(b)],
    "nevs": lambda b: [ev_table(b, True)],
    "fourier": lambda b: [fourier_table(b)],
    "mrep": lambda b: [mult_table(b, "m_rep")],
    "mgeo": lambda b: [mult_table(b, "m_geo")],
    "arthur_sheaves": lambda b: [arthur_sheaf_table(b)],
    "abv": lambda b: [abv_table(b)],
    "eta": lambda b: [eta_table(b)],
    "twist": lambda b: [twist_table(b)],
    "endoscopy": endoscopy_tables,
    "verify": lambda b: [verify_table(b)],
}


def build(b, which=None):
    out = []
    for k in which or TABLES:
        out += TABLES[k](b)
    return out


# ---------------------------------------------------------------------------
# rendering

def _md_cell(v):
    return str(v).replace("|", "\\|")


def render_md(tables):
    parts = []
    for t in tables:
        lines = [f"### {t.id}", ""]
        if t.note:
            lines += [t.note, ""]
        lines.append("| " + " | ".join(_md_cell(h) for h in t.header) + " |")
        lines.append("|" + "---|" * len(t.header))
        for r in t.rows:
            lines.append("| " + " | ".join(_md_cell(v) for v in r) + " |")
        if not t.rows:
            lines.append("| " + " | ".join("" for _ in t.header) + " |")
        parts.append("\n".join(lines) + "\n")
    return "\n".join(parts)


def render_csv(tables):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for t in tables:
        w.writerow(["table", t.id])
        w.writerow(t.header)
        w.writerows(t.rows)
        w.writerow([])
    return buf.getvalue()


def render(tables, fmt="md"):
    if fmt == "csv":
        return render_csv(tables)
    return render_md(tables)
