import copy
import json
from pathlib import Path

import pytest

from voganish.datasets import Bundle, bundle_ids, load_bundle
from voganish.runner import verify_all

DATA = Path(__file__).parent / "data"

_criteria = {}


@pytest.fixture(scope="session")
def bundles():
    return {bid: load_bundle(bid) for bid in bundle_ids()}


@pytest.fixture(scope="session")
def gl_oracle():
    with open(DATA / "gl_chain_oracle.json", encoding="utf-8") as fh:
        return json.load(fh)["chains"]


def frozen_summary(entry):
    """Oracle entry -> {rank array: orbit size}, keyed like ChainOracle.summary."""
    return {tuple(((i, j), r) for i, j, r in o["ranks"]): o["size"] for o in entry["orbits"]}


def single_mutations(b):
    """Every one-cell change: each Evs cell to each other character of its
    group, each multiplicity entry by +1 and -1."""
    raw = b.raw
    for p, cells in raw["tables"]["evs"]["entries"].items():
        for c, v in cells.items():
            if not isinstance(v, str):
                continue
            g = b.evs.strata[c].a_mic
            for ch in g.characters():
                name = g.char_name(ch)
                if name != v:
                    r = copy.deepcopy(raw)
                    r["tables"]["evs"]["entries"][p][c] = name
                    yield f"Evs {p} @ {c}: {v} -> {name}", r
    for role in ("m_rep", "m_geo"):
        n = len(raw["tables"][role]["rows"])
        for i in range(n):
            for j in range(n):
                for d in (1, -1):
                    r = copy.deepcopy(raw)
                    r["tables"][role]["rows"][i][j] += d
                    yield f"{role}[{i}][{j}] {d:+d}", r


_sweep = {}


def mutation_sweep(b):
    """[(mutation, report)] for a bundle; computed once per session."""
    if b.id not in _sweep:
        out = []
        for name, raw in single_mutations(b):
            mb = Bundle(raw, source=f"{b.id} mutated", validate=False)
            out.append((name, verify_all(mb)))
        _sweep[b.id] = out
    return _sweep[b.id]


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    key = props["criterion"]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[key] = (report.outcome, props.get("title", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=int):
        outcome, title = _criteria[key]
        tag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {key}: {tag}  {title}")
