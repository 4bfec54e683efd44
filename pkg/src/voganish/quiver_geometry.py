"""Vogan varieties as graded quiver representation spaces.

The ambient Lie algebra is gl(N) or sp(N) with N = sum of the graded dims,
graded by eigenspace blocks E_1..E_r.  V is the degree-one part (blocks
(k, k+1), so x maps E_{k+1} to E_k), V* the degree minus one part, and the
Lie algebra of H is the block diagonal.  Points are full N x N matrices of
Fractions; ``Variety.blocks`` slices out the Hom factors.
"""

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import linalg as la
from .errors import GenericityError, InvariantError, Unsupported

FAMILIES = ("GL", "Sp", "EvenO", "OddO-dual")
RETRY_BUDGET = 64


@dataclass(frozen=True)
class GroupInstance:
    name: str
    family: str
    graded_dims: tuple
    self_dual: bool = False
    h_component_group: tuple = ()
    pure_forms: tuple = (("0", 1),)
    rank: int = None

    def problems(self):
        out = []
        dims = tuple(self.graded_dims)
        if self.family not in FAMILIES:
            out.append(f"unknown family {self.family!r}")
        if not dims:
            out.append("graded_dims is empty")
        if any(int(d) != d or d <= 0 for d in dims):
            out.append("graded_dims must be positive integers")
        if self.self_dual and dims != dims[::-1]:
            out.append("self_dual requires d_i = d_{r+1-i}")
        if self.family == "GL" and self.self_dual:
            out.append("GL family cannot be self_dual")
        if self.family != "GL" and not self.self_dual:
            out.append(f"{self.family} family requires self_dual")
        if self.family == "Sp" and sum(dims) % 2:
            out.append("Sp family needs an even total dimension")
        if self.rank is not None and sum(dims) != self.rank:
            out.append(f"sum of graded_dims {sum(dims)} != rank {self.rank}")
        for o in self.h_component_group:
            if o < 1:
                out.append("h_component_group orders must be positive")
        return out


@dataclass(frozen=True)
class OrbitLabel:
    """Rank invariants: ranks[(i, j)] for i < j is the rank of E_j -> E_i."""

    r: int
    ranks: tuple  # ((i, j), rank) sorted by (i, j)
    sym_ranks: tuple = None

    def rank(self, i, j):
        return dict(self.ranks)[(i, j)]

    def as_dict(self):
        return dict(self.ranks)

    @property
    def canonical_name(self):
        if self.r <= 1:
            return "()"
        d = self.as_dict()
        rows = []
        for i in range(1, self.r):
            rows.append(".".join(str(d[(i, j)]) for j in range(i + 1, self.r + 1)))
        return "/".join(rows)

    def __str__(self):
        return self.canonical_name

    def leq(self, other):
        a, b = self.as_dict(), other.as_dict()
        return all(a[k] <= b[k] for k in a)


def make_label(r, ranks, self_dual):
    items = tuple(sorted(ranks.items()))
    sym = None
    if self_dual:
        sym = tuple(ranks[(i, r + 1 - i)] for i in range(1, (r + 1) // 2 + 1) if i < r + 1 - i)
    return OrbitLabel(r, items, sym)


@dataclass(frozen=True)
class ConormalPair:
    x: tuple
    xi: tuple
    orbit: OrbitLabel
    strongly_regular: bool


@dataclass
class Orbit:
    label: OrbitLabel
    dim: int
    representative: list
    dual_label: OrbitLabel = None
    eccentricity: int = None
    segments: tuple = ()
    a_group: object = None
    local_systems: list = field(default_factory=list)


def _freeze(m):
    return tuple(tuple(r) for r in m)


class Variety:
    def __init__(self, instance):
        bad = instance.problems()
        if bad:
            raise InvariantError(f"{instance.name}: " + "; ".join(bad))
        if instance.family in ("EvenO", "OddO-dual"):
            raise Unsupported(f"{instance.family} varieties are not implemented")
        self.instance = instance
        self.dims = tuple(instance.graded_dims)
        self.r = len(self.dims)
        self.N = sum(self.dims)
        self.offsets = [sum(self.dims[:k]) for k in range(self.r)]
        self._block = []
        for k, d in enumerate(self.dims):
            self._block += [k + 1] * d
        self.is_sp = instance.family == "Sp"
        self._label_cache = {}

    # ----- coordinates -------------------------------------------------------
    def block_of(self, p):
        return self._block[p]

    def block_range(self, k):
        o = self.offsets[k - 1]
        return range(o, o + self.dims[k - 1])

    @cached_property
    def J(self):
        if not self.is_sp:
            return None
        n = self.N
        J = la.zeros(n)
        for p in range(n):
            q = n - 1 - p
            J[p][q] = Fraction((-1) ** (q + 1))
        return J

    def graded_basis(self, degree):
        """Basis of the degree part of the ambient Lie algebra."""
        n = self.N
        slots = [(p, q) for p in range(n) for q in range(n)
                 if self._block[q] - self._block[p] == degree]
        if not self.is_sp:
            out = []
            for p, q in slots:
                m = la.zeros(n)
                m[p][q] = Fraction(1)
                out.append(m)
            return out
        # X^T J + J X = 0 restricted to the slots
        J = self.J
        rows = []
        for a in range(n):
            for b in range(n):
                row = []
                for p, q in slots:
                    # (X^T J)_{ab} = X_{pa} J_{pb}  and  (J X)_{ab} = J_{ap} X_{pb}
                    v = Fraction(0)
                    if q == a:
                        v += J[p][b]
                    if q == b:
                        v += J[a][p]
                    row.append(v)
                if any(row):
                    rows.append(row)
        out = []
        for vec in la.nullspace(rows, len(slots)):
            m = la.zeros(n)
            for (p, q), v in zip(slots, vec):
                m[p][q] = v
            out.append(m)
        return out

    @cached_property
    def V_basis(self):
        return self.graded_basis(1)

    @cached_property
    def Vstar_basis(self):
        return self.graded_basis(-1)

    @cached_property
    def lieH_basis(self):
        return self.graded_basis(0)

    @cached_property
    def dim_V(self):
        return len(self.V_basis)

    @cached_property
    def dim_H(self):
        return len(self.lieH_basis)

    def in_algebra(self, m, degree):
        n = self.N
        for p in range(n):
            for q in range(n):
                if m[p][q] and self._block[q] - self._block[p] != degree:
                    return False
        if self.is_sp:
            J = self.J
            chk = la.add(la.matmul(la.transpose(m), J), la.matmul(J, m))
            return la.is_zero(chk)
        return True

    def in_V(self, x):
        return self.in_algebra(x, 1)

    def in_Vstar(self, xi):
        return self.in_algebra(xi, -1)

    def point(self, entries):
        """Full matrix from {(i, j): value} with 1-indexed positions."""
        m = la.zeros(self.N)
        for (i, j), v in entries.items():
            m[i - 1][j - 1] = Fraction(v)
        return m

    def entries(self, m):
        return {(p + 1, q + 1): v for p, row in enumerate(m) for q, v in enumerate(row) if v}

    def blocks(self, x):
        """The Hom factors of a point of V: block (k, k+1) for k = 1..r-1."""
        out = []
        for k in range(1, self.r):
            rows = self.block_range(k)
            cols = self.block_range(k + 1)
            out.append([[x[p][q] for q in cols] for p in rows])
        return tuple(out)

    # ----- rank invariants -----------------------------------------------
    def rank_label(self, x):
        key = _freeze(x)
        hit = self._label_cache.get(key)
        if hit is not None:
            return hit
        ranks = {}
        power = x
        for m in range(1, self.r):
            if m > 1:
                power = la.matmul(power, x)
            for i in range(1, self.r - m + 1):
                j = i + m
                sub = [[power[p][q] for q in self.block_range(j)] for p in self.block_range(i)]
                ranks[(i, j)] = la.rank(sub) if any(any(r) for r in sub) else 0
        lab = make_label(self.r, ranks, self.instance.self_dual)
        self._label_cache[key] = lab
        return lab

    def dual_rank_label(self, xi):
        return self.rank_label(la.transpose(xi))

    def check_label(self, label):
        """List of violated rank inequalities (empty when admissible)."""
        d = label.as_dict()
        bad = []
        if label.r != self.r:
            return [f"label has r={label.r}, variety has r={self.r}"]
        for (i, j), v in d.items():
            if v < 0:
                bad.append(f"r_{i}{j} < 0")
            if v > min(self.dims[i - 1], self.dims[j - 1]):
                bad.append(f"r_{i}{j} exceeds min(d_{i}, d_{j})")
            if j - i > 1:
                if v > d[(i, j - 1)]:
                    bad.append(f"r_{i}{j} > r_{i}{j - 1}")
                if v > d[(i + 1, j)]:
                    bad.append(f"r_{i}{j} > r_{i + 1}{j}")
        if self.instance.self_dual:
            r = self.r
            for (i, j), v in d.items():
                if d.get((r + 1 - j, r + 1 - i)) != v:
                    bad.append(f"r_{i}{j} != r_{r + 1 - j}{r + 1 - i} (self-duality)")
        return bad

    # ----- multisegments ----------------------------------------------------
    def segments(self):
        return [(a, b) for a in range(1, self.r + 1) for b in range(a, self.r + 1)]

    def _multisegments(self):
        segs = self.segments()
        dims = self.dims
        out = []

        def rec(idx, remaining, chosen):
            if idx == len(segs):
                if not any(remaining):
                    out.append(tuple(chosen))
                return
            a, b = segs[idx]
            cap = min(remaining[k - 1] for k in range(a, b + 1))
            for m in range(cap, -1, -1):
                rem = list(remaining)
                for k in range(a, b + 1):
                    rem[k - 1] -= m
                rec(idx + 1, rem, chosen + [(a, b)] * m)

        rec(0, list(dims), [])
        if self.is_sp:
            r = self.r
            keep = []
            for ms in out:
                cnt = {}
                for s in ms:
                    cnt[s] = cnt.get(s, 0) + 1
                ok = True
                for (a, b), m in cnt.items():
                    dual = (r + 1 - b, r + 1 - a)
                    if cnt.get(dual, 0) != m:
                        ok = False
                    if dual == (a, b) and (b - a + 1) % 2 == 1 and m % 2:
                        ok = False
                if ok:
                    keep.append(ms)
            out = keep
        return out

    def segment_label(self, ms):
        ranks = {}
        for i in range(1, self.r + 1):
            for j in range(i + 1, self.r + 1):
                ranks[(i, j)] = sum(1 for a, b in ms if a <= i and j <= b)
        return make_label(self.r, ranks, self.instance.self_dual)

    def _build_point(self, ms):
        """Signed-permutation representative of a multisegment, or None."""
        n = self.N
        if not self.is_sp:
            pos = {}
            nxt = [0] * self.r
            for c, (a, b) in enumerate(sorted(ms)):
                for k in range(a, b + 1):
                    pos[(c, k)] = self.offsets[k - 1] + nxt[k - 1]
                    nxt[k - 1] += 1
            x = la.zeros(n)
            for c, (a, b) in enumerate(sorted(ms)):
                for k in range(a + 1, b + 1):
                    x[pos[(c, k - 1)]][pos[(c, k)]] = Fraction(1)
            return x
        r = self.r
        cnt = {}
        for s in sorted(ms):
            cnt[s] = cnt.get(s, 0) + 1
        pieces = []  # (segA, segB or None)
        for (a, b), m in sorted(cnt.items()):
            dual = (r + 1 - b, r + 1 - a)
            if dual == (a, b):
                if (b - a + 1) % 2 == 0:
                    pieces += [((a, b), None)] * m
                else:
                    pieces += [((a, b), (a, b))] * (m // 2)
            elif (a, b) < dual:
                pieces += [((a, b), dual)] * m
        # abstract vectors (piece, role, k); form and successor maps
        partner = {}
        succ = {}
        by_block = {k: [] for k in range(1, r + 1)}
        singles = 0
        for pid, (sa, sb) in enumerate(pieces):
            # alternate the sign of lone self-dual pieces so the induced
            # forms are split over Q (needed for rational degenerations)
            eps = 1
            if sb is None:
                eps = (-1) ** singles
                singles += 1
            for k in range(sa[0], sa[1] + 1):
                v = (pid, "A", k)
                by_block[k].append(v)
                if k > sa[0]:
                    succ[v] = (pid, "A", k - 1)
                if sb is None:
                    partner[v] = ((pid, "A", r + 1 - k), eps * (-1) ** k)
                else:
                    partner[v] = ((pid, "B", r + 1 - k), (-1) ** k)
            if sb is not None:
                for k in range(sb[0], sb[1] + 1):
                    v = (pid, "B", k)
                    by_block[k].append(v)
                    if k > sb[0]:
                        succ[v] = (pid, "B", k - 1)
                    partner[v] = ((pid, "A", r + 1 - k), -((-1) ** (r + 1 - k)))
        J = self.J
        pos, sgn = {}, {}
        for k in range(1, r + 1):
            if k > r + 1 - k:
                break
            vecs = by_block[k]
            nxt = self.offsets[k - 1]
            for v in vecs:
                if v in pos:
                    continue
                w, sigma = partner[v]
                p = nxt
                nxt += 1
                q = n - 1 - p
                if self._block[q] != r + 1 - k:
                    return None
                pos[v], sgn[v] = p, 1
                pos[w], sgn[w] = q, sigma * int(J[p][q])
        if len(pos) != n:
            return None
        x = la.zeros(n)
        for v, w in succ.items():
            x[pos[w]][pos[v]] = Fraction(sgn[w] * sgn[v])
        return x

    @cached_property
    def _orbit_table(self):
        table = {}
        for ms in self._multisegments():
            lab = self.segment_label(ms)
            if lab in table:
                continue
            x = self._build_point(ms)
            if x is None or not self.in_V(x) or self.rank_label(x) != lab:
                continue
            table[lab] = (ms, x)
        return table

    def enumerate_orbits(self):
        labels = list(self._orbit_table)
        return sorted(labels, key=lambda l: (self.orbit_dimension(l), l.ranks))

    def representative(self, label):
        if label not in self._orbit_table:
            bad = self.check_label(label)
            raise InvariantError("inadmissible label " + str(label) + (": " + "; ".join(bad) if bad else ": not realizable"))
        return [list(r) for r in self._orbit_table[label][1]]

    def multisegment(self, label):
        return self._orbit_table[label][0]

    # ----- dimensions and conormal data ----------------------------------
    def centralizer(self, mats):
        """Basis coefficients (in lieH_basis) of {h : [h, m] = 0 for all m}."""
        key = tuple(_freeze(la.mat(m)) for m in mats)
        memo = self.__dict__.setdefault("_centralizer_cache", {})
        if key not in memo:
            memo[key] = self._centralizer(mats)
        return list(memo[key])

    def _centralizer(self, mats):
        basis = self.lieH_basis
        if not basis:
            return []
        rows = []
        brs = [[la.flatten(la.bracket(h, m)) for h in basis] for m in mats]
        for br in brs:
            for e in range(self.N * self.N):
                row = [col[e] for col in br]
                if any(row):
                    rows.append(row)
        return la.nullspace(rows, len(basis))

    def stabilizer_dim(self, mats):
        return len(self.centralizer(mats))

    def point_orbit_dim(self, x):
        return self.dim_H - self.stabilizer_dim([x])

    def orbit_dimension(self, label):
        return self.point_orbit_dim(self.representative(label))

    def conormal_fiber(self, x):
        basis = self.Vstar_basis
        if not basis:
            return []
        cols = [la.flatten(la.bracket(x, b)) for b in basis]
        rows = []
        for e in range(self.N * self.N):
            row = [c[e] for c in cols]
            if any(row):
                rows.append(row)
        return [la.combine(v, basis) for v in la.nullspace(rows, len(basis))]

    def pair_orbit_dim(self, x, xi):
        return self.dim_H - self.stabilizer_dim([x, xi])

    def is_conormal(self, x, xi):
        return (self.in_V(x) and self.in_Vstar(xi) and la.is_zero(la.bracket(x, xi))
                and sum(la.matmul(x, xi)[i][i] for i in range(self.N)) == 0)

    def strongly_regular_pair(self, label, seed=0):
        x = self.representative(label)
        fiber = self.conormal_fiber(x)
        rng = random.Random(f"{self.instance.name}:{label.canonical_name}:{seed}")
        for _ in range(RETRY_BUDGET):
            coeffs = [Fraction(rng.randint(-3, 3)) for _ in fiber]
            xi = la.combine(coeffs, fiber) if fiber else la.zeros(self.N)
            if self.pair_orbit_dim(x, xi) == self.dim_V:
                return ConormalPair(_freeze(x), _freeze(xi), label, True)
        raise GenericityError(f"no strongly regular covector for {label} in {RETRY_BUDGET} tries")

    def dual_orbit(self, label, seed=0):
        pair = self.strongly_regular_pair(label, seed)
        return self.dual_rank_label([list(r) for r in pair.xi])

    def eccentricity(self, label, seed=0):
        dual = self.dual_orbit(label, seed)
        return self.orbit_dimension(label) + self.orbit_dimension(dual) - self.dim_V

    # ----- closure order ----------------------------------------------------
    def closure_leq(self, a, b):
        return a.leq(b)

    def covers(self):
        labs = self.enumerate_orbits()
        out = []
        for a in labs:
            for b in labs:
                if a == b or not a.leq(b):
                    continue
                if any(c not in (a, b) and a.leq(c) and c.leq(b) for c in labs):
                    continue
                out.append((a, b))
        return out

    def _cocharacters(self):
        n = self.N
        if self.is_sp:
            half = n // 2
            for ws in itertools.product(range(-2, 3), repeat=half):
                yield list(ws) + [-w for w in reversed(ws)]
        else:
            for ws in itertools.product((-1, 0, 1), repeat=n - 1):
                yield [0] + list(ws)

    def _unipotents(self, depth=3):
        """Identity, then words of length <= depth in exp(cX), X nilpotent basis."""
        nil = [b for b in self.lieH_basis if all(b[p][p] == 0 for p in range(self.N))]
        gens = [_exp_nilpotent(la.scale(c, b)) for b in nil
                for c in (1, -1, Fraction(1, 2), Fraction(-1, 2))]
        seen = {_freeze(la.identity(self.N))}
        layer = [la.identity(self.N)]
        yield layer[0]
        for _ in range(depth):
            nxt = []
            for g in layer:
                for h in gens:
                    gh = la.matmul(g, h)
                    key = _freeze(gh)
                    if key not in seen:
                        seen.add(key)
                        nxt.append(gh)
                        yield gh
            layer = nxt

    def degeneration_witness(self, lower, upper):
        """(g, weights, limit) with lim_{t->0} t^w g x g^-1 t^-w in lower, or None."""
        x = self.representative(upper)
        cochars = list(self._cocharacters())
        seen = set()
        for g in self._unipotents():
            y = la.matmul(la.matmul(g, x), la.inverse(g))
            nz = [(p, q) for p in range(self.N) for q in range(self.N) if y[p][q]]
            for w in cochars:
                if any(w[p] - w[q] < 0 for p, q in nz):
                    continue
                keep = frozenset((p, q) for p, q in nz if w[p] == w[q])
                key = (_freeze(y), keep)
                if key in seen:
                    continue
                seen.add(key)
                lim = la.zeros(self.N)
                for p, q in keep:
                    lim[p][q] = y[p][q]
                if self.rank_label(lim) == lower:
                    return g, w, lim
        return None


def _exp_nilpotent(X):
    n = len(X)
    out = la.identity(n)
    term = la.identity(n)
    for k in range(1, n + 1):
        term = la.scale(Fraction(1, k), la.matmul(term, X))
        if la.is_zero(term):
            break
        out = la.add(out, term)
    return out


# module-level entry points ----------------------------------------------------

def build_variety(instance):
    return Variety(instance)


def enumerate_orbits(V):
    return V.enumerate_orbits()


def representative(V, label):
    return V.representative(label)


def orbit_dimension(V, label):
    return V.orbit_dimension(label)


def closure_leq(V, a, b):
    return V.closure_leq(a, b)


def dual_orbit(V, label, seed=0):
    return V.dual_orbit(label, seed)


def eccentricity(V, label, seed=0):
    return V.eccentricity(label, seed)


def conormal_fiber(V, x):
    return V.conormal_fiber(x)


def strongly_regular_pair(V, label, seed=0):
    return V.strongly_regular_pair(label, seed)


def orbit_record(V, label, seed=0):
    dual = V.dual_orbit(label, seed)
    dim = V.orbit_dimension(label)
    return Orbit(label=label, dim=dim, representative=V.representative(label),
                 dual_label=dual, eccentricity=dim + V.orbit_dimension(dual) - V.dim_V,
                 segments=V.multisegment(label))
