"""Exact rational matrix helpers.

Matrices are plain lists of rows holding ``Fraction`` (or ``int``) entries.
Rank, nullspace and linear solves are delegated to sympy's ``DomainMatrix``
over QQ; everything that crosses this module's boundary is a ``Fraction``.
"""

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _q(v):
    v = Fraction(v)
    return QQ(v.numerator, v.denominator)


def _f(q):
    return Fraction(int(q.numerator), int(q.denominator))


def to_dm(rows, ncols=None):
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return DomainMatrix([[_q(v) for v in r] for r in rows], (len(rows), ncols), QQ)


def from_dm(dm):
    return [[_f(v) for v in row] for row in dm.to_list()]


def rank(rows, ncols=None):
    if not rows:
        return 0
    return to_dm(rows, ncols).rank()


def nullspace(rows, ncols):
    """Basis of {v : rows . v = 0} as a list of vectors (rref normalised)."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ns = to_dm(rows, ncols).nullspace()
    out = from_dm(ns) if ns.shape[0] else []
    return [v for v in out if any(v)]


def rref(rows, ncols=None):
    if not rows:
        return [], ()
    m, piv = to_dm(rows, ncols).rref()
    return from_dm(m), tuple(piv)


def row_basis(rows, ncols=None):
    """Nonzero rows of the reduced echelon form."""
    m, piv = rref(rows, ncols)
    return m[: len(piv)]


def solve(rows, rhs):
    """One solution c of rows . c = rhs, or None."""
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, piv = rref(aug, n + 1)
    if n in piv:
        return None
    sol = [Fraction(0)] * n
    for i, p in enumerate(piv):
        sol[p] = m[i][n]
    return sol


# small dense helpers -------------------------------------------------------

def zeros(n, m=None):
    m = n if m is None else m
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def diag(entries):
    n = len(entries)
    out = zeros(n)
    for i, v in enumerate(entries):
        out[i][i] = Fraction(v)
    return out


def mat(rows):
    return [[Fraction(v) for v in r] for r in rows]


def matmul(a, b):
    # matrices here are mostly signed permutations, so skip zeros
    m = len(b[0]) if b else 0
    out = []
    for row in a:
        o = [Fraction(0)] * m
        for k, v in enumerate(row):
            if v:
                for j, w in enumerate(b[k]):
                    if w:
                        o[j] += v * w
        out.append(o)
    return out


def add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(c, a):
    c = Fraction(c)
    return [[c * x for x in r] for r in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def bracket(a, b):
    return sub(matmul(a, b), matmul(b, a))


def is_zero(a):
    return all(v == 0 for r in a for v in r)


def flatten(a):
    return [v for r in a for v in r]


def combine(coeffs, basis):
    """Linear combination sum c_i B_i of equally shaped matrices."""
    n, m = len(basis[0]), len(basis[0][0])
    out = zeros(n, m)
    for c, b in zip(coeffs, basis):
        if c:
            for i in range(n):
                for j in range(m):
                    if b[i][j]:
                        out[i][j] += c * b[i][j]
    return out


def inverse(a):
    n = len(a)
    aug = [list(r) + list(e) for r, e in zip(a, identity(n))]
    m, piv = rref(aug, 2 * n)
    if tuple(piv[:n]) != tuple(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m[:n]]


def coordinates(vec, basis_vecs):
    """Coordinates of vec in the span of basis_vecs (columns), or None."""
    cols = transpose(basis_vecs) if basis_vecs else []
    if not basis_vecs:
        return [] if not any(vec) else None
    return solve(cols, list(vec))
