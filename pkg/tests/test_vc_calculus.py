import copy

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voganish import vc_calculus as vc
from voganish.datasets import Bundle
from voganish.errors import InvariantError
from voganish.symmetry_groups import Gauss
from voganish.vc_calculus import KClass

keys = st.sampled_from(["a", "b", "c"])
kclasses = st.dictionaries(st.tuples(keys, st.integers(-2, 2)), st.integers(-3, 3), max_size=4).map(KClass)


@given(kclasses, kclasses, kclasses)
def test_kclass_group_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a - a).is_zero()
    assert a + KClass() == a


@given(kclasses, st.integers(-3, 3))
def test_shift_changes_trace_by_parity(a, s):
    val = {"a": Gauss(1), "b": Gauss(0, 1), "c": Gauss(-1)}.get
    assert a.shifted(s).trace(val) == a.trace(val) * (-1) ** s
    assert a.shifted(2).collapsed() == a.collapsed()


@given(kclasses, kclasses)
def test_trace_is_additive(a, b):
    val = {"a": Gauss(2), "b": Gauss(0, -1), "c": Gauss(1)}.get
    assert (a + b).trace(val) == a.trace(val) + b.trace(val)
    assert (a + b).rank() == a.rank() + b.rank()


@given(kclasses, kclasses)
def test_tensor_rank_is_multiplicative(a, b):
    t = a.tensor(b, lambda x, y: x + y)
    assert t.rank() == a.rank() * b.rank()


def test_kclass_repr():
    assert repr(KClass()) == "0"
    assert repr(KClass({("a", 0): 1, ("b", 1): 2})) == "a + 2*b[1]"


# ---------------------------------------------------------------------------
# the laws on the shipped tables

def test_laws_hold_on_every_example(bundles):
    for bid, b in bundles.items():
        bad = (vc.check_support(b.evs) + vc.check_rank_one_twist(b.evs) + vc.check_additivity(b.evs)
               + vc.check_diagonal(b.nevs) + vc.check_hat_involution(b.hat)
               + vc.fourier_ev_compat(b.nevs, b.evs, b.hat, b.swaps))
        assert not bad, (bid, [str(v) for v in bad])


def test_nevs_is_trivial_on_the_diagonal(bundles):
    for b in bundles.values():
        for c in b.nevs.strata:
            p = b.nevs.trivial_simple(c)
            g = b.nevs.strata[c].a_mic
            assert b.nevs.get(p, c) == KClass.single(g.identity)


def test_twist_of_so5_singular(bundles):
    b = bundles["so5sing"]
    tw = vc.twist_system(b.evs)
    names = {c: b.evs.strata[c].a_mic.char_name(t) for c, t in tw.items()}
    assert names == {"C0": "+", "C2": "--", "C3": "+"}


def _mutated(b, p, c, value):
    raw = copy.deepcopy(b.raw)
    raw["tables"]["evs"]["entries"].setdefault(p, {})[c] = value
    return Bundle(raw, validate=False)


def test_support_violation_is_named(bundles):
    b = _mutated(bundles["so3"], "1_C0", "Cy", "+")
    bad = vc.check_support(b.evs)
    assert [v.law for v in bad] == ["support"]
    assert "1_C0 @ Cy" in str(bad[0])


def test_diagonal_violation_is_named(bundles):
    b = _mutated(bundles["so7"], "F_C4", "C4", "+")
    bad = vc.check_diagonal(b.nevs)
    assert [str(v) for v in bad] == ["[diagonal] F_C4 @ C4: NEvs = +, pullback of - is -"]
    # changing the twist itself moves every other simple on C4 off the diagonal
    b = _mutated(bundles["so7"], "1_C4", "C4", "-")
    assert [v.where for v in vc.check_diagonal(b.nevs)] == ["F_C4 @ C4"]


def test_rank_one_twist_violation(bundles):
    b = _mutated(bundles["so3"], "1_Cy", "Cy", [["+", 2, 0]])
    assert [v.law for v in vc.check_rank_one_twist(b.evs)] == ["rank-one twist"]


def test_fourier_compat_catches_wrong_cell(bundles):
    b = _mutated(bundles["so5reg"], "1_Cux", "Cux", "-")
    bad = vc.fourier_ev_compat(b.nevs, b.evs, b.hat, b.swaps)
    assert bad and all(v.law == "Fourier-Ev compatibility" for v in bad)


def test_hat_involution_failure():
    bad = vc.check_hat_involution({"a": "b", "b": "c", "c": "a"})
    assert bad and bad[0].law == "Fourier involution"


def test_hat_map_rejects_unknown_targets():
    with pytest.raises(InvariantError):
        vc.hat_map({"1_C0": "1_C9"}, {"C0": "C1"}, {"1_C0": None})
    with pytest.raises(InvariantError):
        vc.hat_map({"1_C0": "1_C0"}, {"C0": "C1"}, {"1_C0": None})


# ---------------------------------------------------------------------------
# products

def test_thom_sebastiani_of_so3_squared(bundles):
    so3 = bundles["so3"].evs
    t = vc.thom_sebastiani(so3, so3)
    assert len(t.strata) == 4 and len(t.simples) == 9
    assert not vc.check_support(t)
    assert t.strata["Cy×Cy"].dim == 2
    assert t.leq("C0×C0", "Cy×Cy") and not t.leq("Cy×C0", "C0×Cy")


def test_thom_sebastiani_with_the_zero_variety(bundles):
    so3 = bundles["so3"].evs
    t = vc.thom_sebastiani(so3, vc.zero_table())
    for (p, c), k in so3.values.items():
        assert t.get(f"{p}⊠1_0", f"{c}×0").rank() == k.rank()


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["so3", "so5reg", "so5sing"]), st.sampled_from(["so3", "sl2"]))
def test_thom_sebastiani_values_multiply(bundles, a, b):
    ta, tb = bundles[a].evs, bundles[b].evs
    t = vc.thom_sebastiani(ta, tb)
    for pa in ta.simples:
        for pb in tb.simples:
            for ca in ta.strata:
                for cb in tb.strata:
                    got = t.get(f"{pa}⊠{pb}", f"{ca}×{cb}").rank()
                    assert got == ta.get(pa, ca).rank() * tb.get(pb, cb).rank()


# ---------------------------------------------------------------------------
# atomic rules

def test_atomic_forms():
    assert vc.atomic_rphi("Smooth").kind == "zero"
    assert vc.atomic_rphi("Square").monodromy == {"x"}
    assert vc.atomic_rphi("QuadSum", e=3).shift == -2
    assert vc.atomic_rphi("XY").kind == "skyscraper"
    assert vc.atomic_rphi("Zero", "L").monodromy == {"L"}
    with pytest.raises(InvariantError):
        vc.atomic_rphi("Cubic")
    with pytest.raises(InvariantError):
        vc.atomic_rphi("QuadSum", e=0)


def test_rphi_product_squares_cancel():
    a = vc.atomic_rphi("SquareUnit", variables="u")
    p = vc.rphi_product(a, a)
    assert p.monodromy == frozenset()
    assert p.shift == -1
    assert vc.rphi_product(a, vc.atomic_rphi("Smooth")).kind == "zero"
