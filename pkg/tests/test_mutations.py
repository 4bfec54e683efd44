"""Single-cell mutations of the shipped tables must all be caught.

The sweep itself is shared with the acceptance test (computed once).
"""

import copy
import io
import json

import pytest

from voganish import cli
from voganish.datasets import emit_bundle, loads_bundle

from .conftest import mutation_sweep, single_mutations

BUNDLES = ["pgl4", "sl2", "so3", "so5reg", "so5sing", "so7"]


@pytest.mark.parametrize("bid", BUNDLES)
def test_every_single_mutation_fails(bundles, bid):
    results = mutation_sweep(bundles[bid])
    assert results
    missed = [name for name, rep in results if rep.ok()]
    assert not missed, missed[:10]
    for name, rep in results:
        assert rep.laws_failed(), name


def test_mutation_counts(bundles):
    n = {bid: sum(1 for _ in single_mutations(bundles[bid])) for bid in BUNDLES}
    # 2 * n^2 multiplicity changes per matrix plus the Evs changes
    assert n["so7"] >= 4 * 15 * 15
    assert n["sl2"] == 4 * 3 + 4 * 4 * 4


def test_evs_mutation_names_a_vanishing_cycle_law(bundles):
    for name, rep in mutation_sweep(bundles["so5sing"]):
        if name.startswith("Evs"):
            laws = set(rep.laws_failed())
            assert laws & {"support", "diagonal", "rank-one twist", "Fourier-Ev compatibility", "additivity",
                           "Arthur sheaf", "Arthur-sheaf Fourier", "eta equality", "endoscopic trace identity",
                           "twisting character"}, (name, laws)


def test_multiplicity_mutation_names_the_transpose_law(bundles):
    for name, rep in mutation_sweep(bundles["so3"]):
        if not name.startswith("Evs"):
            assert rep.failures, name
            assert any(f.section == "kl" for f in rep.failures), name


def test_cli_reports_mutation_with_law(bundles, tmp_path):
    raw = copy.deepcopy(bundles["so5reg"].raw)
    raw["tables"]["evs"]["entries"]["1_Cux"]["Cux"] = "-"
    p = tmp_path / "mut.json"
    p.write_text(emit_bundle(loads_bundle(json.dumps(raw, ensure_ascii=False), validate=False)),
                 encoding="utf-8")
    out = io.StringIO()
    code = cli.main(["--bundle", str(p), "verify"], out=out)
    assert code == 1
    assert "FAIL [" in out.getvalue()
