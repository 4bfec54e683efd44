"""Example bundles: JSON files holding one worked example each.

A bundle is a versioned UTF-8 JSON document.  Top-level keys:

    schema        "voganish-bundle/1"
    id, title     short id (file stem) and a human title
    instance      name, family, graded_dims, self_dual, rank, pure_forms
    reduction     optional; {"h_component_group": [...]} when the geometry
                  runs on a reduced variety and component groups are given
                  explicitly rather than by witnesses
    strata        list of {name, dim, dual, eccentricity, x, xi, a_x, a_mic,
                  local_systems, optional proj_x / swap}
    covers        Hasse diagram edges [lower, upper]
    simples       list of {name, stratum, local_system}
    tables        evs, fourier, vogan, m_rep, m_geo, arthur, aubert,
                  arthur_sheaves, optional abv; each carries "provenance"
    endoscopy     optional list of endoscopic embeddings

Points are lists of [i, j, value] with 1-indexed positions.  Groups are
{"orders": [...], "witnesses": [diag entries, ...]}; characters are named
as in ``FiniteAbelianGroup.char_name``.
"""

import json
from functools import cached_property, lru_cache
from pathlib import Path

from . import linalg as la
from .components import find_conjugator, witness_coords
from .errors import BundleError, InvariantError, VoganishError
from .packets import ArthurParam, MultiplicityMatrix, VoganBijection
from .quiver_geometry import GroupInstance, Variety
from .symmetry_groups import FiniteAbelianGroup, Pi0, witness_matrix
from .vc_calculus import (CharacterSheaf, EvTable, KClass, StratumData, hat_map,
                          nevs_from_evs)

SCHEMA = "voganish-bundle/1"
DATA_DIR = Path(__file__).parent / "data"
TABLES = ("evs", "fourier", "vogan", "m_rep", "m_geo", "arthur", "aubert", "arthur_sheaves")


def bundle_ids():
    return sorted(p.stem for p in DATA_DIR.glob("*.json"))


def resolve_path(ref, base_dir=None):
    """A bundle reference is a path or a bare id looked up next to the
    referring bundle, then in the packaged data directory."""
    p = Path(ref)
    if p.suffix == ".json" and p.exists():
        return p
    for d in ([Path(base_dir)] if base_dir else []) + [DATA_DIR]:
        cand = d / f"{ref}.json"
        if cand.exists():
            return cand
    raise BundleError(f"bundle {ref!r} not found")


def load_bundle(path, seed=0, validate=True):
    path = resolve_path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise BundleError(f"{path}: not UTF-8 ({e})") from None
    return loads_bundle(text, source=str(path), base_dir=path.parent, seed=seed, validate=validate)


def loads_bundle(text, source="<string>", base_dir=None, seed=0, validate=True):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise BundleError(f"{source}:{e.lineno}:{e.colno}: parse error: {e.msg}") from None
    return Bundle(raw, source=source, base_dir=base_dir, seed=seed, validate=validate)


def emit_bundle(bundle):
    return json.dumps(bundle.raw, ensure_ascii=False, indent=2) + "\n"


def _point(V, entries):
    return V.point({(i, j): v for i, j, v in entries})


# geometry depends only on the instance and the base points, so bundles that
# share them (reloads, mutated copies) share the work
@lru_cache(maxsize=None)
def _variety(instance):
    return Variety(instance)


@lru_cache(maxsize=None)
def _pi0(instance, mats, seed):
    return Pi0(_variety(instance), [list(map(list, m)) for m in mats], seed)


def _freeze(m):
    return tuple(tuple(r) for r in m)


def _kclass(cell):
    """A table cell: a character name, or a list of [name, coeff, shift]."""
    if isinstance(cell, str):
        return [(cell, 1, 0)]
    return [(t[0], int(t[1]), int(t[2])) for t in cell]


class Bundle:
    def __init__(self, raw, source="<dict>", base_dir=None, seed=0, validate=True):
        if not isinstance(raw, dict):
            raise BundleError(f"{source}: top level must be an object")
        if raw.get("schema") != SCHEMA:
            raise BundleError(f"{source}: schema version {raw.get('schema')!r} is not supported (expected {SCHEMA!r})")
        self.raw = raw
        self.source = source
        self.base_dir = base_dir
        self.seed = seed
        self._factor_cache = {}
        try:
            self._index()
            if validate:
                self._validate()
        except BundleError:
            raise
        except (KeyError, TypeError, IndexError) as e:
            raise BundleError(f"{source}: malformed bundle ({type(e).__name__}: {e})") from None
        except VoganishError as e:
            raise BundleError(f"{source}: {e}") from None

    # ----- raw access ------------------------------------------------------
    def _index(self):
        r = self.raw
        self.id = r["id"]
        self.title = r.get("title", self.id)
        inst = r["instance"]
        self.name = inst["name"]
        self.strata_raw = {}
        for st in r["strata"]:
            if st["name"] in self.strata_raw:
                raise BundleError(f"{self.source}: duplicate stratum {st['name']}")
            self.strata_raw[st["name"]] = st
        self.simples_raw = {}
        for sp in r["simples"]:
            if sp["name"] in self.simples_raw:
                raise BundleError(f"{self.source}: duplicate simple {sp['name']}")
            self.simples_raw[sp["name"]] = sp
        self.tables = r.get("tables", {})
        missing = [t for t in TABLES if t not in self.tables]
        if missing:
            raise BundleError(f"{self.source}: missing tables {missing}")
        self.reduction = r.get("reduction")

    def provenance(self, table):
        return self.tables[table].get("provenance", "")

    def _dangling(self, what):
        raise BundleError(f"{self.source}: dangling reference: {what}")

    def _validate(self):
        strata = self.strata_raw
        for c, st in strata.items():
            if st["dual"] not in strata:
                self._dangling(f"stratum {c} has dual {st['dual']}")
        for a, b in self.raw.get("covers", []):
            for x in (a, b):
                if x not in strata:
                    self._dangling(f"cover edge names stratum {x}")
        groups = {c: (self._group(st["a_x"]), self._group(st["a_mic"])) for c, st in strata.items()}
        for p, sp in self.simples_raw.items():
            if sp["stratum"] not in strata:
                self._dangling(f"simple {p} lies on stratum {sp['stratum']}")
            if sp["local_system"] not in strata[sp["stratum"]]["local_systems"]:
                self._dangling(f"simple {p} uses local system {sp['local_system']}")
        for c, st in strata.items():
            for ls, ch in st["local_systems"].items():
                self._char(groups[c][0], ch, f"local system {ls} on {c}")
        for p, row in self.tables["evs"]["entries"].items():
            if p not in self.simples_raw:
                self._dangling(f"Evs row {p}")
            for c, cell in row.items():
                if c not in strata:
                    self._dangling(f"Evs entry {p} @ {c}")
                for ch, _, _ in _kclass(cell):
                    self._char(groups[c][1], ch, f"Evs entry {p} @ {c}")
        fmap = self.tables["fourier"]["map"]
        for p, q in fmap.items():
            if p not in self.simples_raw:
                self._dangling(f"Fourier row {p}")
        vmap = self.tables["vogan"]["map"]
        forms = {f for f, _ in self.raw["instance"]["pure_forms"]}
        for p, (rep, form) in vmap.items():
            if p not in self.simples_raw:
                self._dangling(f"Vogan bijection row {p}")
            if form not in forms:
                self._dangling(f"Vogan image of {p} uses pure form {form}")
        for p in self.simples_raw:
            if p not in vmap:
                self._dangling(f"simple {p} has no Vogan image")
        reps = {tuple(v) for v in vmap.values()}
        for lab in self.tables["m_rep"]["labels"]:
            if tuple(lab) not in reps:
                self._dangling(f"m_rep label {lab}")
        for lab in self.tables["m_geo"]["labels"]:
            if lab not in self.simples_raw:
                self._dangling(f"m_geo label {lab}")
        for role in ("m_rep", "m_geo"):
            bad = getattr(self, role).problems()
            if bad:
                raise BundleError(f"{self.source}: {role} is not unitriangular: {bad[0]}")
        for prm in self.tables["arthur"]["params"]:
            if prm["stratum"] not in strata:
                self._dangling(f"Arthur parameter {prm['name']} on {prm['stratum']}")
            g = groups[prm["stratum"]][1]
            for m in prm["members"]:
                rep, form = m[0], m[1]
                if (rep, form) not in reps:
                    self._dangling(f"Arthur member ({rep},{form}) of {prm['name']}")
                if len(m) > 2:
                    self._char(g, m[2], f"character of ({rep},{form}) in {prm['name']}")
                elif not prm.get("pseudo"):
                    self._dangling(f"member ({rep},{form}) of {prm['name']} has no character")
        for a, b in self.tables["aubert"]["pairs"]:
            for x in (a, b):
                if tuple(x) not in reps:
                    self._dangling(f"Aubert pair member {x}")
        for c, rec in self.tables["arthur_sheaves"]["strata"].items():
            if c not in strata:
                self._dangling(f"Arthur sheaf on {c}")
            for p in rec.get("packet", []) + rec.get("coronal", []):
                if p not in self.simples_raw:
                    self._dangling(f"Arthur sheaf on {c} lists {p}")
        for c in self.tables.get("abv", {}).get("packets", {}):
            if c not in strata:
                self._dangling(f"ABV packet on {c}")
        for e in self.raw.get("endoscopy", []):
            for f in e.get("factors", []):
                try:
                    resolve_path(f["bundle"], self.base_dir)
                except BundleError:
                    self._dangling(f"endoscopic factor bundle {f['bundle']}")
            for p in e["restriction"]:
                if p not in self.simples_raw:
                    self._dangling(f"restriction row {p} in {e['name']}")
            for c2, c in e.get("stratum_map", {}).items():
                if c not in strata:
                    self._dangling(f"endoscopic stratum {c2} maps to {c}")

    def _group(self, rec):
        return FiniteAbelianGroup(rec.get("orders", []))

    def _char(self, g, name, where):
        try:
            return g.char_from_name(name)
        except InvariantError:
            self._dangling(f"{where} names {name!r}, not a character of {g.orders}")

    # ----- geometry ----------------------------------------------------------
    @cached_property
    def instance(self):
        i = self.raw["instance"]
        red = self.reduction or {}
        return GroupInstance(i["name"], i["family"], tuple(i["graded_dims"]), bool(i.get("self_dual", False)),
                             tuple(red.get("h_component_group", ())),
                             tuple((f, s) for f, s in i["pure_forms"]), i.get("rank"))

    @cached_property
    def variety(self):
        return _variety(self.instance)

    def base_pair(self, c):
        st = self.strata_raw[c]
        V = self.variety
        return _point(V, st["x"]), _point(V, st["xi"])

    def has_witnesses(self, c):
        return "witnesses" in self.strata_raw[c]["a_mic"]

    def _pi0(self, c, which):
        key = (c, which)
        cache = self.__dict__.setdefault("_pi0_cache", {})
        if key not in cache:
            x, xi = self.base_pair(c)
            mats = [x] if which == "x" else [x, xi]
            cache[key] = _pi0(self.instance, tuple(_freeze(m) for m in mats), self.seed)
        return cache[key]

    def mic_coords(self, c, t):
        return witness_coords(self._pi0(c, "mic"), self.strata_raw[c]["a_mic"]["witnesses"], t)

    def x_coords(self, c, t):
        return witness_coords(self._pi0(c, "x"), self.strata_raw[c]["a_x"]["witnesses"], t)

    def _proj_x(self, c):
        st = self.strata_raw[c]
        if "proj_x" in st:
            return [tuple(v) for v in st["proj_x"]]
        if not self.has_witnesses(c):
            raise InvariantError(f"{c}: no witnesses and no explicit proj_x")
        return [self.x_coords(c, witness_matrix(w)) for w in st["a_mic"]["witnesses"]]

    def _swap(self, c):
        """Images of the A^mic_C generators in A^mic of the dual stratum."""
        st = self.strata_raw[c]
        if "swap" in st:
            return [tuple(v) for v in st["swap"]]
        d = st["dual"]
        x, xi = self.base_pair(c)
        xd, xid = self.base_pair(d)
        h = find_conjugator(self.variety, [la.transpose(xi), la.transpose(x)], [xd, xid])
        if h is None:
            raise InvariantError(f"transposed base pair of {c} is not H-conjugate to the base pair of {d} "
                                 "by a signed block permutation")
        out = []
        for w in st["a_mic"]["witnesses"]:
            t = la.matmul(la.matmul(h, witness_matrix(w)), la.transpose(h))
            out.append(self.mic_coords(d, t))
        return out

    # ----- tables ------------------------------------------------------------
    @cached_property
    def strata(self):
        out = {}
        for c, st in self.strata_raw.items():
            ax, am = self._group(st["a_x"]), self._group(st["a_mic"])
            ls = {n: ax.char_from_name(ch) for n, ch in st["local_systems"].items()}
            out[c] = StratumData(c, int(st["dim"]), ax, am, self._proj_x(c), [], ls, st["dual"])
        return out

    @cached_property
    def closure(self):
        """Reflexive-transitive closure of the cover relation."""
        up = {c: set() for c in self.strata_raw}
        for a, b in self.raw.get("covers", []):
            up[a].add(b)
        leq = {}
        for c in up:
            seen, todo = {c}, [c]
            while todo:
                for d in up[todo.pop()]:
                    if d not in seen:
                        seen.add(d)
                        todo.append(d)
            leq[c] = seen
        return leq

    def leq(self, a, b):
        return b in self.closure[a]

    @cached_property
    def evs(self):
        strata = self.strata
        simples = {}
        for p, sp in self.simples_raw.items():
            st = strata[sp["stratum"]]
            simples[p] = CharacterSheaf(p, sp["stratum"], st.local_systems[sp["local_system"]])
        values = {}
        for p, row in self.tables["evs"]["entries"].items():
            for c, cell in row.items():
                g = strata[c].a_mic
                values[(p, c)] = KClass({(g.char_from_name(ch), sh): k for ch, k, sh in _kclass(cell)})
        return EvTable(strata, simples, values, self.leq)

    @cached_property
    def nevs(self):
        return nevs_from_evs(self.evs)

    @property
    def fourier(self):
        return dict(self.tables["fourier"]["map"])

    @cached_property
    def hat(self):
        return hat_map(self.fourier, {c: st["dual"] for c, st in self.strata_raw.items()}, self.evs.simples)

    @cached_property
    def swaps(self):
        return {c: self._swap(c) for c in self.strata_raw}

    @cached_property
    def vogan(self):
        forms = {f: int(s) for f, s in self.raw["instance"]["pure_forms"]}
        base = self.raw["instance"]["pure_forms"][0][0]
        return VoganBijection({p: tuple(v) for p, v in self.tables["vogan"]["map"].items()}, forms, base)

    @cached_property
    def m_rep(self):
        t = self.tables["m_rep"]
        return MultiplicityMatrix("m_rep", t["labels"], t["rows"], t.get("provenance", ""))

    @cached_property
    def m_geo(self):
        t = self.tables["m_geo"]
        return MultiplicityMatrix("m_geo", t["labels"], t["rows"], t.get("provenance", ""))

    @cached_property
    def arthur(self):
        out = []
        for prm in self.tables["arthur"]["params"]:
            g = self._group(self.strata_raw[prm["stratum"]]["a_mic"])
            # pseudo-Arthur members carry no characters
            members = [(m[0], m[1], g.char_from_name(m[2]) if len(m) > 2 else None) for m in prm["members"]]
            out.append(ArthurParam(prm["name"], prm["stratum"], g.normalize(prm["s_psi"]), members,
                                   bool(prm.get("pseudo", False))))
        return out

    @cached_property
    def aubert(self):
        out = {}
        for a, b in self.tables["aubert"]["pairs"]:
            out[tuple(a)] = tuple(b)
            out[tuple(b)] = tuple(a)
        return out

    @property
    def arthur_sheaves(self):
        return self.tables["arthur_sheaves"]["strata"]

    @property
    def abv_expected(self):
        return self.tables.get("abv", {}).get("packets", {})

    # ----- endoscopy ---------------------------------------------------------
    def factor_bundle(self, ref):
        if ref not in self._factor_cache:
            self._factor_cache[ref] = load_bundle(resolve_path(ref, self.base_dir), seed=self.seed)
        return self._factor_cache[ref]

    @cached_property
    def endoscopy(self):
        from .endoscopy import EndoscopicEmbedding
        return [EndoscopicEmbedding.from_record(self, rec) for rec in self.raw.get("endoscopy", [])]

    def __eq__(self, other):
        return isinstance(other, Bundle) and self.raw == other.raw

    def __repr__(self):
        return f"Bundle({self.id!r}, {len(self.strata_raw)} strata, {len(self.simples_raw)} simples)"
