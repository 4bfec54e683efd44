from hypothesis import given, settings
from hypothesis import strategies as st

from voganish.oracle import ChainOracle, chain_instances, gl_generators, rank_mod_p

from .conftest import frozen_summary


def test_rank_mod_p():
    assert rank_mod_p([[1, 1], [1, 1]], 2) == 1
    assert rank_mod_p([[1, 2], [2, 1]], 3) == 1
    assert rank_mod_p([[1, 2], [2, 1]], 5) == 2
    assert rank_mod_p([[0, 0]], 3) == 0


def test_frozen_file_covers_every_chain(gl_oracle):
    want = {(d, p) for d in chain_instances(2, 3) for p in (2, 3)}
    assert {(tuple(e["dims"]), e["p"]) for e in gl_oracle} == want


def test_frozen_sizes_add_up(gl_oracle):
    for e in gl_oracle:
        o = ChainOracle(e["dims"], e["p"])
        assert sum(x["size"] for x in e["orbits"]) == o.n_points()


def test_hom_f_p_2x2():
    # rank 0, 1, 2 matrices in M_2(F_p): 1, (p^2-1)(p+1), |GL_2|
    for p in (2, 3):
        s = ChainOracle((2, 2), p).summary()
        sizes = sorted(s.values())
        gl2 = (p * p - 1) * (p * p - p)
        assert sizes == sorted([1, (p * p - 1) * (p + 1), gl2])


def test_live_matches_frozen_for_small_chains(gl_oracle):
    for e in gl_oracle:
        if len(e["dims"]) <= 2:
            assert ChainOracle(e["dims"], e["p"]).summary() == frozen_summary(e)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(1, 2), (2, 1), (1, 1, 1), (2, 2)]), st.sampled_from([2, 3]), st.data())
def test_orbit_of_a_point_has_its_rank_array(dims, p, data):
    o = ChainOracle(dims, p)
    idx = data.draw(st.integers(0, o.n_points() - 1))
    mats = o.decode(idx)
    assert o.encode(mats) == idx
    assert o.orbit_size_of(mats) == o.summary()[o.ranks(mats)]


@given(st.integers(1, 2), st.sampled_from([2, 3]))
def test_generators_are_invertible(n, p):
    for h in gl_generators(n, p):
        assert rank_mod_p(h, p) == n
