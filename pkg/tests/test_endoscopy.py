import copy

import pytest

from voganish.datasets import Bundle
from voganish.endoscopy import (EndoscopicEmbedding, check_embedding, embedding_matrices, lifting_strata,
                                s_images, trace_identity_check)
from voganish.errors import InvariantError
from voganish.symmetry_groups import Gauss


def _emb(bundles, bid, name=None):
    embs = bundles[bid].endoscopy
    return embs[0] if name is None else next(e for e in embs if e.name == name)


def _lhs(emb, p):
    return [int(str(r.lhs)) for r in trace_identity_check(emb, p)]


def test_sl2_central_embeddings(bundles):
    want = {"sigma": [1, 1, -1, -1], "tau": [1, -1, 1, -1], "sigma tau": [1, -1, -1, 1]}
    for emb in bundles["sl2"].endoscopy:
        key = emb.name.split("s=")[1]
        got = [_lhs(emb, p)[0] for p in ("++_C0", "+-_C0", "-+_C0", "--_C0")]
        assert got == want[key], emb.name
        assert check_embedding(emb) == ([], [])


def test_so5_singular_lifting_strata_and_s_images(bundles):
    emb = _emb(bundles, "so5sing")
    assert lifting_strata(emb) == ["C0×C0", "Cy×C0", "C0×Cy", "Cy×Cy"]
    a2, a = s_images(emb, "Cy×C0")
    assert a2 == (0, 1) and a in [(1, 0), (0, 1)]


def test_so5_singular_identity_holds(bundles):
    emb = _emb(bundles, "so5sing")
    for p in emb.restriction_table:
        assert all(r.ok for r in trace_identity_check(emb, p)), p


def test_so5_singular_computed_vectors(bundles):
    emb = _emb(bundles, "so5sing")
    assert _lhs(emb, "L_C3") == [0, -1, -1, 1]
    # these two disagree with the printed (-1,-1,-1,0) and (0,1,1,0)
    assert _lhs(emb, "1_C2") == [-1, 1, 1, 0]
    assert _lhs(emb, "F_C2") == [0, 1, -1, 0]
    bad, warn = check_embedding(emb)
    assert bad == []
    assert sorted(v.where for v in warn) == [
        "SO(3)xSO(3): 1_C2 @ C0×Cy", "SO(3)xSO(3): 1_C2 @ Cy×C0", "SO(3)xSO(3): F_C2 @ C0×Cy"]
    assert {v.law for v in warn} == {"printed values"}


def test_so7_printed_vectors(bundles):
    emb = _emb(bundles, "so7")
    assert _lhs(emb, "E_C7") == [-1, 1, 1, -1, -1, 1]
    assert _lhs(emb, "F_C4") == [1, 1, 0, 0, 0, 0]


def test_so7_disputed_row_is_a_warning(bundles):
    emb = _emb(bundles, "so7")
    bad, warn = check_embedding(emb)
    assert bad == []
    assert [(v.law, v.where) for v in warn] == [("disputed restriction row", "SO(5)xSO(3): F_C7 @ Cx×Cy")]
    (row,) = [r for r in trace_identity_check(emb, "F_C7") if not r.ok]
    assert (row.lhs, row.rhs) == (Gauss(1), Gauss(-1))


def _so7_with_restriction(bundles, p, terms):
    raw = copy.deepcopy(bundles["so7"].raw)
    raw["endoscopy"][0]["restriction"][p] = terms
    return Bundle(raw, validate=False).endoscopy[0]


def test_f_c4_with_the_tabled_shift_fails(bundles):
    # negative control: shift [1] on the first term breaks the identity at Cu×C0
    emb = _so7_with_restriction(bundles, "F_C4", [["1_Cu⊠E_Cy", 1, 1], ["L_Cx⊠1_C0", 1, 2]])
    bad, _ = check_embedding(emb)
    assert [(v.law, v.where) for v in bad] == [("endoscopic trace identity", "SO(5)xSO(3): F_C4 @ Cu×C0")]


def test_dropping_a_term_fails(bundles):
    emb = _so7_with_restriction(bundles, "E_C7", [["L_Cux⊠E_Cy", 1, 2]])
    bad, _ = check_embedding(emb)
    assert bad and all(v.law == "endoscopic trace identity" for v in bad)


def test_unknown_product_simple(bundles):
    emb = _so7_with_restriction(bundles, "E_C7", [["Q_Cux⊠E_Cy", 1, 1]])
    with pytest.raises(InvariantError, match="unknown product simple"):
        trace_identity_check(emb, "E_C7")


def test_bad_embedding_indices(bundles):
    amb = bundles["so5sing"]
    rec = copy.deepcopy(amb.raw["endoscopy"][0])
    rec["factors"][1]["embed"] = [1, -3]
    emb = EndoscopicEmbedding.from_record(amb, rec)
    with pytest.raises(InvariantError, match="reused"):
        embedding_matrices(emb)
    rec["factors"][1]["embed"] = [3, 2]
    emb = EndoscopicEmbedding.from_record(amb, rec)
    with pytest.raises(InvariantError):
        embedding_matrices(emb)


def test_wrong_stratum_map_is_reported(bundles):
    amb = bundles["so5sing"]
    rec = copy.deepcopy(amb.raw["endoscopy"][0])
    rec["stratum_map"]["Cy×Cy"] = "C2"
    bad, _ = check_embedding(EndoscopicEmbedding.from_record(amb, rec))
    assert [v.law for v in bad] == ["stratum map"]


def test_unknown_kind(bundles):
    amb = bundles["so5sing"]
    rec = dict(amb.raw["endoscopy"][0], kind="twisted")
    with pytest.raises(InvariantError, match="unknown embedding kind"):
        EndoscopicEmbedding.from_record(amb, rec)
