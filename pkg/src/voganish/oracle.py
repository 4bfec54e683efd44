"""Brute-force orbit counting for GL quiver chains over a prime field F_p.

Used as an independent check of the multisegment enumeration: every point
of V(F_p) is visited, orbits are merged with union-find under generators of
H(F_p) = prod GL(d_k, F_p), and rank arrays are recomputed mod p.
"""

import itertools


def rank_mod_p(rows, p):
    m = [[v % p for v in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [(v * inv) % p for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _mul(a, b, p):
    return [[sum(x * y for x, y in zip(row, col)) % p for col in zip(*b)] for row in a]


def _inv(a, p):
    n = len(a)
    m = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] % p)
        m[c], m[piv] = m[piv], m[c]
        inv = pow(m[c][c], p - 2, p)
        m[c] = [(v * inv) % p for v in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[c])]
    return [r[n:] for r in m]


def _primitive_root(p):
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in range(2, p) if (p - 1) % f == 0 and all(f % d for d in range(2, f))):
            return g
    return 1


def gl_generators(n, p):
    """Transvections plus one diagonal element; these generate GL(n, F_p)."""
    out = []
    for i in range(n):
        for j in range(n):
            if i != j:
                m = [[int(a == b) for b in range(n)] for a in range(n)]
                m[i][j] = 1
                out.append(m)
    g = _primitive_root(p)
    if g != 1:
        m = [[int(a == b) for b in range(n)] for a in range(n)]
        m[0][0] = g
        out.append(m)
    return out


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


class ChainOracle:
    def __init__(self, dims, p):
        self.dims = tuple(dims)
        self.p = p
        self.shapes = [(self.dims[k], self.dims[k + 1]) for k in range(len(self.dims) - 1)]
        self.size = sum(a * b for a, b in self.shapes)

    def n_points(self):
        return self.p ** self.size

    def decode(self, idx):
        flat = []
        for _ in range(self.size):
            flat.append(idx % self.p)
            idx //= self.p
        mats, pos = [], 0
        for a, b in self.shapes:
            mats.append([flat[pos + i * b: pos + (i + 1) * b] for i in range(a)])
            pos += a * b
        return mats

    def encode(self, mats):
        flat = [v for m in mats for row in m for v in row]
        idx = 0
        for v in reversed(flat):
            idx = idx * self.p + (v % self.p)
        return idx

    def act(self, k, h, hinv, mats):
        """Apply h in GL(E_k) (1-indexed block) to a point."""
        out = list(mats)
        if k - 1 < len(mats):       # x_k : E_{k+1} -> E_k, left multiply
            out[k - 1] = _mul(h, mats[k - 1], self.p)
        if k - 2 >= 0:              # x_{k-1} : E_k -> E_{k-1}, right multiply
            out[k - 2] = _mul(mats[k - 2], hinv, self.p)
        return out

    def ranks(self, mats):
        r = len(self.dims)
        out = {}
        for i in range(1, r + 1):
            comp = None
            for j in range(i + 1, r + 1):
                comp = mats[i - 1] if comp is None else _mul(comp, mats[j - 2], self.p)
                out[(i, j)] = rank_mod_p(comp, self.p)
        return tuple(sorted(out.items()))

    def orbits(self):
        n = self.n_points()
        dsu = _DSU(n)
        gens = []
        for k, d in enumerate(self.dims, start=1):
            for h in gl_generators(d, self.p):
                gens.append((k, h, _inv(h, self.p)))
        for idx in range(n):
            mats = self.decode(idx)
            for k, h, hinv in gens:
                dsu.union(idx, self.encode(self.act(k, h, hinv, mats)))
        classes = {}
        for idx in range(n):
            classes.setdefault(dsu.find(idx), []).append(idx)
        return dsu, classes

    def summary(self):
        """{rank array: orbit size}; raises if an orbit mixes rank arrays."""
        dsu, classes = self.orbits()
        out = {}
        for root, members in classes.items():
            labs = {self.ranks(self.decode(i)) for i in members}
            if len(labs) != 1:
                raise AssertionError(f"orbit with several rank arrays: {labs}")
            lab = labs.pop()
            if lab in out:
                raise AssertionError(f"two orbits share rank array {lab}")
            out[lab] = len(members)
        self._dsu = dsu
        return out

    def orbit_size_of(self, mats):
        dsu = getattr(self, "_dsu", None)
        if dsu is None:
            self.summary()
            dsu = self._dsu
        root = dsu.find(self.encode(mats))
        return sum(1 for i in range(self.n_points()) if dsu.find(i) == root)


def chain_instances(max_dim=2, max_len=3):
    for r in range(1, max_len + 1):
        for dims in itertools.product(range(1, max_dim + 1), repeat=r):
            yield dims
