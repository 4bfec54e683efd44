import copy

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voganish import packets as pk
from voganish.datasets import Bundle
from voganish.errors import InvariantError
from voganish.symmetry_groups import Gauss

I = Gauss(0, 1)


def _arthur(b, name):
    return next(p for p in b.arthur if p.name == name)


def test_pgl4_eta_takes_mu4_values(bundles):
    b = bundles["pgl4"]
    prm = _arthur(b, "psi0")
    eta = pk.eta_arthur(b, prm, (1,))
    assert eta[("phi0+", "0")] == Gauss(1)
    assert eta[("phi0-", "2")] == Gauss(-1)
    assert eta[("phi1+i", "1")] == I
    assert eta[("phi1-i", "3")] == -I
    assert eta == pk.eta_nevs(b, "C0", (1,))


def test_so5_singular_eta_at_c2(bundles):
    b = bundles["so5sing"]
    full = pk.eta_nevs(b, "C2", (1, 0))
    assert {k: str(v) for k, v in full.items()} == {("phi2+", "0"): "1", ("phi2-", "1"): "1", ("phi3-", "0"): "1"}
    rank = pk.eta_evs(b, "C2")
    assert {k: str(v) for k, v in rank.items()} == {("phi2+", "0"): "1", ("phi2-", "1"): "-1", ("phi3-", "0"): "-1"}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["sl2", "so3", "pgl4", "so5reg", "so5sing", "so7"]), st.data())
def test_eta_agrees_for_random_parameters(bundles, bid, data):
    b = bundles[bid]
    params = [p for p in b.arthur if not p.pseudo]
    prm = data.draw(st.sampled_from(params))
    g = b.evs.strata[prm.stratum].a_mic
    s = data.draw(st.sampled_from(g.elements()))
    assert pk.eta_arthur(b, prm, s) == pk.eta_nevs(b, prm.stratum, s)
    # the support of eta is the ABV packet
    assert pk.eta_nevs(b, prm.stratum, s).support() == pk.abv_packet(b, prm.stratum)


def test_stratum_element_accepts_stabilizer_matrices(bundles):
    b = bundles["so5sing"]
    s = [[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]]
    assert pk.stratum_element(b, "C2", s) in [(1, 0), (0, 1)]


def test_stratum_element_rejects_non_stabilizers(bundles):
    b = bundles["so5sing"]
    s = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    with pytest.raises(InvariantError, match="does not stabilize"):
        pk.stratum_element(b, "C2", s)
    with pytest.raises(InvariantError, match="not an element"):
        pk.stratum_element(b, "C2", (1,))
    with pytest.raises(InvariantError, match="not an element"):
        pk.stratum_element(b, "C2", (3, 0))


def test_reduced_bundle_needs_group_elements(bundles):
    with pytest.raises(InvariantError, match="no base pair"):
        pk.stratum_element(bundles["pgl4"], "C0", [[1, 0], [0, 1]])


def test_abv_packets_of_so7(bundles):
    b = bundles["so7"]
    assert pk._fmt_set(pk.abv_packet(b, "C4")) == "{(phi4+,0), (phi4-,1), (phi7+-,1)}"
    assert len(pk.abv_packet(b, "C7")) == 4
    # phi7+- appears in every packet
    assert all(("phi7+-", "1") in pk.abv_packet(b, c) for c in b.evs.strata)


def test_arthur_sheaves(bundles):
    assert repr(pk.arthur_sheaf(bundles["so7"], "C7").packet) == "1_C7 + E_C7 + F_C7 + L_C7"
    assert repr(pk.arthur_sheaf(bundles["so5sing"], "C2").packet) == "1_C2 + F_C2"
    for b in bundles.values():
        assert not pk.check_arthur_sheaves(b) + pk.check_arthur_sheaf_fourier(b)


def test_pseudo_parameters_compare_packets_only(bundles):
    rows, bad = pk.compare_arthur(bundles["so7"])
    assert not bad
    status = {r.param: r.status for r in rows}
    assert status["psi1"] == status["psi3"] == "pseudo: packet only"
    assert all(v == "pass" for k, v in status.items() if k not in ("psi1", "psi3"))


def test_pseudo_packet_mismatch_fails(bundles):
    raw = copy.deepcopy(bundles["so7"].raw)
    prm = next(p for p in raw["tables"]["arthur"]["params"] if p["name"] == "psi1")
    prm["members"] = prm["members"][:-1]
    rows, bad = pk.compare_arthur(Bundle(raw, validate=False))
    assert [r.status for r in rows if r.param == "psi1"] == ["fail"]
    assert bad and bad[0].law == "packet equality"


def test_pairing_and_kl_clean(bundles):
    for b in bundles.values():
        assert not pk.check_pairing(b)
        assert not pk.kl_check(b.m_rep, b.m_geo, b.vogan)


def test_kl_catches_a_transposed_entry(bundles):
    raw = copy.deepcopy(bundles["so5sing"].raw)
    raw["tables"]["m_geo"]["rows"][0][2] += 1
    b = Bundle(raw, validate=False)
    bad = pk.kl_check(b.m_rep, b.m_geo, b.vogan)
    assert bad
    assert all(v.law for v in bad)


def test_multiplicity_matrices_are_unitriangular(bundles):
    for b in bundles.values():
        for m in (b.m_rep, b.m_geo):
            assert m.problems() == []
            n = len(m.labels)
            assert all(m.rows[i][i] == 1 for i in range(n))


def test_twisting_rows(bundles):
    rows, bad = pk.twisting_vs_aubert(bundles["so7"])
    assert not bad
    assert [(r.param, r.chi) for r in rows if r.chi not in ("+", "++")] == [("psi2", "--"), ("psi6", "--")]
    rows, _ = pk.twisting_vs_aubert(bundles["pgl4"])
    assert {r.chi for r in rows} == {"+1"}


def test_twisting_detects_a_broken_aubert_partner(bundles):
    raw = copy.deepcopy(bundles["so5sing"].raw)
    pairs = raw["tables"]["aubert"]["pairs"]
    pairs[0], pairs[1] = [pairs[0][0], pairs[1][1]], [pairs[1][0], pairs[0][1]]
    _, bad = pk.twisting_vs_aubert(Bundle(raw, validate=False))
    assert bad and all(v.law == "twisting character" for v in bad)


def test_virtual_rep_printing():
    v = pk.VirtualRep({("a", "0"): Gauss(1), ("b", "1"): Gauss(-1), ("c", "0"): Gauss(0)})
    assert repr(v) == "[(a,0)] -[(b,1)]"
    assert v.support() == {("a", "0"), ("b", "1")}
