"""Glue between base points and dataset group coordinates.

Datasets name component groups by diagonal witness elements.  These helpers
read an element of a stabilizer in those coordinates and find signed block
permutations in H carrying one base pair to another.
"""

import itertools
from fractions import Fraction

from . import linalg as la
from .errors import InvariantError
from .symmetry_groups import Pi0, solve_f2, witness_matrix


def witness_coords(pi0, witnesses, t):
    """Exponent vector of t in the basis given by the witness elements."""
    if not pi0.k:
        return tuple(0 for _ in witnesses)
    cols = [pi0.classify(witness_matrix(w)) for w in witnesses]
    e = solve_f2(cols, list(pi0.classify(t)))
    if e is None:
        raise InvariantError("element lies outside the span of the witnesses")
    return e


def signed_block_perms(V):
    """Signed permutation matrices preserving the grading (and J for Sp)."""
    blocks = [list(V.block_range(k)) for k in range(1, V.r + 1)]
    per_block = [list(itertools.permutations(b)) for b in blocks]
    J = V.J
    for choice in itertools.product(*per_block):
        perm = [None] * V.N
        for b, img in zip(blocks, choice):
            for src, dst in zip(b, img):
                perm[src] = dst
        for signs in itertools.product((1, -1), repeat=V.N):
            h = la.zeros(V.N)
            for src, dst in enumerate(perm):
                h[dst][src] = Fraction(signs[src])
            if J is not None:
                if la.matmul(la.matmul(la.transpose(h), J), h) != J:
                    continue
            yield h


def conjugate(h, m):
    # h is a signed permutation, so h^-1 = h^T
    return la.matmul(la.matmul(h, m), la.transpose(h))


def find_conjugator(V, src, dst):
    """h in H with h src_i h^-1 = dst_i for every i, or None."""
    src = [la.mat(m) for m in src]
    dst = [la.mat(m) for m in dst]
    ident = la.identity(V.N)
    if all(a == b for a, b in zip(src, dst)):
        return ident
    for h in signed_block_perms(V):
        if all(conjugate(h, a) == b for a, b in zip(src, dst)):
            return h
    return None


def element_in_pair_group(V, pair, witnesses, t, seed=0):
    """Coordinates of the stabilizer element t of pair = (x, xi)."""
    return witness_coords(Pi0(V, list(pair), seed), witnesses, t)
