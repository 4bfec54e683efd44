"""Finite abelian component groups and their characters.

Groups are products of cyclic groups Z/o; elements and characters are
exponent vectors.  Character values are Gaussian integers (all orders in the
catalog divide 4).

pi_0 of a stabilizer is computed from the commutant algebra A of the point
(or pair) inside the block-diagonal matrices.  A is stable under the
adjoint a* = J^-1 a^T J and the stabilizer is its unitary group.  Modulo the
radical, A splits into simple factors; a factor fixed by * whose fixed part
has dimension n(n+1)/2 contributes an orthogonal group, hence one Z/2.  All
other factors (swapped pairs, symplectic type) have connected unitary groups.
"""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import sympy

from . import linalg as la
from .errors import InvariantError, Unsupported


@dataclass(frozen=True)
class Gauss:
    re: int = 0
    im: int = 0

    def __add__(self, o):
        o = _g(o)
        return Gauss(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Gauss(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-_g(o))

    def __mul__(self, o):
        o = _g(o)
        return Gauss(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __eq__(self, o):
        if isinstance(o, (int, Gauss)):
            o = _g(o)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def conj(self):
        return Gauss(self.re, -self.im)

    def __bool__(self):
        return bool(self.re or self.im)

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return {1: "i", -1: "-i"}.get(self.im, f"{self.im}i")
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        return f"{self.re}{sign}{'' if mag == 1 else mag}i"

    __repr__ = __str__

    @staticmethod
    def root(k):
        """i**k."""
        return (Gauss(1), Gauss(0, 1), Gauss(-1), Gauss(0, -1))[k % 4]


def _g(v):
    return v if isinstance(v, Gauss) else Gauss(int(v), 0)


MU4_NAMES = ("+1", "-1", "+i", "-i")
MU4_EXPS = (0, 2, 1, 3)


class FiniteAbelianGroup:
    def __init__(self, orders, witnesses=None):
        self.orders = tuple(int(o) for o in orders)
        if any(o < 1 for o in self.orders):
            raise InvariantError("group orders must be positive")
        self.witnesses = witnesses

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.orders == other.orders

    def __hash__(self):
        return hash(self.orders)

    def __repr__(self):
        return f"FiniteAbelianGroup{self.orders}"

    @property
    def order(self):
        out = 1
        for o in self.orders:
            out *= o
        return out

    @property
    def identity(self):
        return tuple(0 for _ in self.orders)

    def elements(self):
        return [tuple(e) for e in itertools.product(*[range(o) for o in self.orders])]

    def mul(self, a, b):
        return tuple((x + y) % o for x, y, o in zip(a, b, self.orders))

    def normalize(self, a):
        return tuple(int(x) % o for x, o in zip(a, self.orders))

    # characters ----------------------------------------------------------
    def characters(self):
        if self.orders == (4,):
            return [(e,) for e in MU4_EXPS]
        return self.elements()

    def char_name(self, c):
        c = self.normalize(c)
        if not self.orders:
            return "1"
        if self.orders == (4,):
            return MU4_NAMES[MU4_EXPS.index(c[0])]
        if all(o == 2 for o in self.orders):
            return "".join("+" if v == 0 else "-" for v in c)
        return "(" + ",".join(str(v) for v in c) + ")"

    def char_from_name(self, name):
        for c in self.characters():
            if self.char_name(c) == name:
                return c
        raise InvariantError(f"{name!r} is not a character of {self!r}")

    def angle(self, c, g):
        return sum((Fraction(ci * gi, o) for ci, gi, o in zip(c, g, self.orders)), Fraction(0)) % 1

    def value(self, c, g):
        a = self.angle(c, g)
        if (4 * a).denominator != 1:
            raise Unsupported("character value outside mu_4")
        return Gauss.root(int(4 * a))

    def char_mul(self, a, b):
        return self.mul(a, b)

    def char_inv(self, a):
        return tuple((-x) % o for x, o in zip(a, self.orders))

    def pullback(self, c, images, source):
        """Pull a character of self back along the map sending source
        generator j to images[j] (an element of self)."""
        out = []
        for img, o in zip(images, source.orders):
            a = self.angle(c, img) * o
            if a.denominator != 1:
                raise InvariantError("map is not a homomorphism on generator orders")
            out.append(int(a) % o)
        return tuple(out)

    def image(self, images, g):
        out = self.identity
        for gj, img in zip(g, images):
            for _ in range(gj):
                out = self.mul(out, img)
        return out


def product_group(groups):
    orders = []
    for g in groups:
        orders += list(g.orders)
    return FiniteAbelianGroup(orders)


def characters(group):
    return group.characters()


# ---------------------------------------------------------------------------
# pi_0 of stabilizers

def _rank_f2(rows):
    rows = [list(r) for r in rows]
    rank, ncol = 0, len(rows[0]) if rows else 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % 2), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] % 2:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def solve_f2(cols, target):
    """Exponent vector e with sum e_j cols[j] = target over F_2, or None."""
    k = len(cols)
    for e in itertools.product((0, 1), repeat=k):
        acc = [0] * len(target)
        for ej, c in zip(e, cols):
            if ej:
                acc = [(a + b) % 2 for a, b in zip(acc, c)]
        if acc == [t % 2 for t in target]:
            return tuple(e)
    return None


def _pair(a, bt):
    return sum((x * y for ra, rb in zip(a, bt) for x, y in zip(ra, rb) if x and y), Fraction(0))


class Pi0:
    """pi_0 of the unitary group of a *-algebra, as (Z/2)^k."""

    def __init__(self, variety, mats, seed=0):
        self.V = variety
        self.mats = [la.mat(m) for m in mats]
        self.k = 0
        self.factors = []
        if not variety.is_sp:
            return
        self._setup(seed)

    # algebra plumbing
    def _setup(self, seed):
        V = self.V
        n = V.N
        slots = [(p, q) for p in range(n) for q in range(n) if V.block_of(p) == V.block_of(q)]
        rows = []
        for m in self.mats:
            for a in range(n):
                for b in range(n):
                    row = []
                    for p, q in slots:
                        # (E_pq m - m E_pq)_{ab}
                        v = Fraction(0)
                        if a == p:
                            v += m[q][b]
                        if b == q:
                            v -= m[a][p]
                        row.append(v)
                    if any(row):
                        rows.append(row)
        basis = []
        for vec in la.nullspace(rows, len(slots)) if rows else [[Fraction(int(i == j)) for j in range(len(slots))] for i in range(len(slots))]:
            m = la.zeros(n)
            for (p, q), v in zip(slots, vec):
                m[p][q] = v
            basis.append(m)
        self.basis = basis
        self._tr = lambda a: sum(a[i][i] for i in range(n))
        J = V.J
        self._Jinv = la.inverse(J)
        self._J = J
        # trace vectors identify A/rad; tr(ab) = sum a_ij b_ji
        bt = [la.transpose(b) for b in basis]
        self._tv = lambda a: [_pair(a, b) for b in bt]
        # center mod rad: a with tr(a [b, c]) = 0 for all b, c
        crow = []
        for j, b in enumerate(basis):
            for c in basis[j + 1:]:
                comm_t = la.transpose(la.bracket(b, c))
                row = [_pair(a, comm_t) for a in basis]
                if any(row):
                    crow.append(row)
        zc = la.nullspace(crow, len(basis)) if crow else [[Fraction(int(i == j)) for j in range(len(basis))] for i in range(len(basis))]
        zmats = [la.combine(v, basis) for v in zc]
        # drop radical directions from the center
        zvecs = la.row_basis([self._tv(z) for z in zmats]) if zmats else []
        dim_center = len(zvecs)
        rng = random.Random(f"pi0:{seed}")
        for _ in range(16):
            z = la.combine([Fraction(rng.randint(-9, 9)) for _ in zmats], zmats)
            roots = self._min_poly_roots(z)
            if roots is not None and len(roots) == dim_center:
                break
        else:
            raise Unsupported("center of the commutant is not split over Q")
        idem = []
        for lam in roots:
            e = la.identity(n)
            for mu in roots:
                if mu != lam:
                    e = la.matmul(e, la.scale(Fraction(1) / (lam - mu), la.sub(z, la.scale(mu, la.identity(n)))))
            idem.append(e)
        self.idempotents = idem
        for j, e in enumerate(idem):
            es = self.star(e)
            tv = self._tv(es)
            partner = next(i for i, f in enumerate(idem) if self._tv(f) == tv)
            if partner != j:
                continue
            span = [la.matmul(e, b) for b in basis]
            fac = self._independent(span)
            d = len(fac)
            nn = isqrt(d)
            if nn * nn != d:
                raise Unsupported("simple factor of non-square dimension")
            sym = self._independent([la.add(f, self.star(f)) for f in span])
            if len(sym) == nn * (nn + 1) // 2:
                self.factors.append((e, nn, fac))
        self.k = len(self.factors)

    def star(self, a):
        return la.matmul(la.matmul(self._Jinv, la.transpose(a)), self._J)

    def _independent(self, mats):
        out, vecs = [], []
        for m in mats:
            v = self._tv(m)
            if la.rank(vecs + [v]) > len(vecs):
                vecs.append(v)
                out.append(m)
        return out

    def _min_poly_roots(self, z):
        n = self.V.N
        powers = [la.identity(n)]
        vecs = [self._tv(powers[0])]
        while True:
            nxt = la.matmul(powers[-1], z)
            v = self._tv(nxt)
            c = la.coordinates(v, vecs)
            if c is not None:
                break
            powers.append(nxt)
            vecs.append(v)
        t = sympy.Symbol("t")
        poly = t ** len(c) - sum(sympy.Rational(ci.numerator, ci.denominator) * t ** i for i, ci in enumerate(c))
        roots = sympy.roots(sympy.Poly(poly, t))
        if any(m != 1 or not r.is_rational for r, m in roots.items()) or sum(roots.values()) != len(c):
            return None
        return [Fraction(int(r.p), int(r.q)) for r in roots]

    def in_algebra(self, t):
        return all(la.matmul(t, m) == la.matmul(m, t) for m in self.mats)

    def classify(self, t):
        """Component of an element t of the stabilizer with t^2 = 1."""
        t = la.mat(t)
        if not self.V.is_sp or not self.k:
            return ()
        key = tuple(tuple(r) for r in t)
        memo = self.__dict__.setdefault("_classified", {})
        if key not in memo:
            memo[key] = self._classify(t)
        return memo[key]

    def _classify(self, t):
        if not self.in_algebra(t):
            raise InvariantError("element does not stabilize the point")
        if la.matmul(t, t) != la.identity(self.V.N):
            raise Unsupported("only involutions are classified")
        out = []
        for e, nn, fac in self.factors:
            vecs = [self._tv(f) for f in fac]
            tr = Fraction(0)
            for i, f in enumerate(fac):
                c = la.coordinates(self._tv(la.matmul(la.matmul(t, e), f)), vecs)
                tr += c[i]
            m = (nn - tr / nn) / 2
            if m.denominator != 1:
                raise Unsupported("element does not act as an involution on a factor")
            out.append(int(m) % 2)
        return tuple(out)


def is_stabilizer_element(V, t, mats):
    t = la.mat(t)
    n = V.N
    for p in range(n):
        for q in range(n):
            if t[p][q] and V.block_of(p) != V.block_of(q):
                return False
    if V.is_sp:
        if la.matmul(la.matmul(la.transpose(t), V.J), t) != V.J:
            return False
    else:
        if la.rank(t) != n:
            return False
    ti = la.inverse(t)
    return all(la.matmul(la.matmul(t, la.mat(m)), ti) == la.mat(m) for m in mats)


def witness_matrix(entries):
    return la.diag(entries)


def equivariant_component_group(V, label, seed=0):
    return Pi0(V, [V.representative(label)], seed)


def microlocal_component_group(V, pair, seed=0):
    return Pi0(V, [pair.x, pair.xi], seed)


def witness_iso(pi0, witnesses):
    """Check diagonal witnesses give an isomorphism (Z/2)^k -> pi0.

    Returns (ok, message, images)."""
    imgs = [pi0.classify(witness_matrix(w)) for w in witnesses]
    if len(witnesses) != pi0.k:
        return False, f"expected {pi0.k} generators, dataset has {len(witnesses)}", imgs
    if pi0.k and _rank_f2(imgs) != pi0.k:
        return False, "witnesses do not generate the component group", imgs
    return True, "", imgs


def projection_maps(pi_pair, pair_witnesses, pi_x, x_witnesses, pi_xi, xi_witnesses):
    """Images of the pair generators in A_x and A_xi (dataset coordinates)."""
    out = []
    for target, tw in ((pi_x, x_witnesses), (pi_xi, xi_witnesses)):
        cols = [target.classify(witness_matrix(w)) for w in tw]
        imgs = []
        for w in pair_witnesses:
            v = target.classify(witness_matrix(w))
            e = solve_f2(cols, list(v)) if cols else ()
            if e is None:
                raise InvariantError("pair witness maps outside the span of target witnesses")
            imgs.append(e)
        out.append(imgs)
    return tuple(out)


def is_surjective(images, source, target):
    reached = {target.image(images, g) for g in source.elements()}
    return len(reached) == target.order
