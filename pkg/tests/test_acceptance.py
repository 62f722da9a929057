"""Exit criteria, one test per criterion. Each prints a PASS/FAIL line in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py``.
"""

import contextlib
import random
import sqlite3

import pytest

from conftest import build_fig3
from gen import random_recipe
from oracles import HierarchyOracle, expected_bound_violations, is_forest, loss_census, parse_ntriples, sql_load, tbx_survivors
from termcore import (
    Approach,
    add_concept,
    add_term,
    denote,
    homographs,
    new_termbase,
    set_superordinate,
    store,
    terminology_schema,
    validate_termbase,
    view,
)
from termcore.ddl import emit_ddl, map_schema
from termcore.er import ERError
from termcore.rdf import to_ntriples
from termcore.tbx import export_tbx, import_tbx
from termcore.terminology import TermAlreadyAssignedError

RESULTS: dict[str, str] = {}
N_INSTANCES = 200
BASE = "http://example.org/termbase"


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException as exc:
        RESULTS[name] = f"FAIL  {name}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        raise
    RESULTS[name] = f"PASS  {name}"


@pytest.fixture(scope="module")
def recipes():
    return [random_recipe(random.Random(1000 + i), max_concepts=30, max_langs=3) for i in range(N_INSTANCES)]


def test_ac1_fig3_fidelity():
    with criterion("AC1 Fig-3 fidelity"):
        inst = build_fig3()
        assert len(validate_termbase(inst)) == 0
        extra = inst.copy()
        extra.add_link("Denoted", "c2", "t1")
        report = validate_termbase(extra)
        assert [(v.kind, v.type_name, v.id, v.observed, v.bound) for v in report] == [
            ("above-max", "Term", "t1", 2, 1)
        ]
        # Stated as: removing ANY single Denoted link yields exactly two below-min violations.
        observed = {}
        for link in sorted(inst.links_of("Denoted")):
            broken = inst.copy()
            broken.remove_link("Denoted", link.id1, link.id2)
            observed[(link.id1, link.id2)] = [(v.kind, v.type_name, v.id) for v in validate_termbase(broken)]
        assert all(len(v) == 2 and all(k == "below-min" for k, _, _ in v) for v in observed.values()), observed


def test_ac2_homographs():
    with criterion("AC2 homograph contract"):
        inst = new_termbase()
        for concept, term in (("river-side", "t-bank-1"), ("financial-institution", "t-bank-2")):
            add_concept(inst, concept)
            add_term(inst, term, "bank", "en")
            denote(inst, concept, term)
        assert len(validate_termbase(inst)) == 0
        assert homographs(inst, "bank") == ["t-bank-1", "t-bank-2"]
        assert homographs(inst, "bank", "en") == ["t-bank-1", "t-bank-2"]


def test_ac3_one_concept_per_term():
    with criterion("AC3 one concept per term (100/100)"):
        rng = random.Random(3)
        rejected = 0
        seed = 0
        while rejected < 100:
            seed += 1
            inst = random_recipe(random.Random(seed), max_concepts=12).build()
            concepts = [c.id for c in inst.of_type("Concept")]
            if len(concepts) < 2:
                continue
            term = rng.choice(inst.links_of("Denoted"))
            other = rng.choice([c for c in concepts if c != term.id1])
            before = store.dumps(inst)
            with pytest.raises(TermAlreadyAssignedError):
                denote(inst, other, term.id2)
            assert store.dumps(inst) == before
            rejected += 1
        assert rejected == 100


def test_ac4_hierarchy_forest():
    with criterion("AC4 hierarchy forest vs ancestor-walk oracle (200 sequences)"):
        rng = random.Random(4)
        for _ in range(N_INSTANCES):
            n = rng.randint(1, 20)
            concepts = [f"c{i}" for i in range(n)]
            inst = new_termbase()
            for c in concepts:
                add_concept(inst, c)
            oracle = HierarchyOracle()
            for _ in range(rng.randint(1, 3 * n)):
                child, parent = rng.choice(concepts), rng.choice(concepts)
                expect = oracle.accepts(child, parent)
                try:
                    set_superordinate(inst, child, parent)
                    accepted = True
                except ERError:
                    accepted = False
                assert accepted == expect, (child, parent)
                if accepted:
                    oracle.apply(child, parent)
                assert is_forest(inst)
                assert {(l.id2, l.id1) for l in inst.links_of("Hierarchical")} == set(oracle.parent.items())
            assert not validate_termbase(inst).of_kind("conditional")


def test_ac5_tbx_round_trip(recipes):
    with criterion("AC5 TBX round trip + loss census (200 + 200 instances)"):
        for i in range(N_INSTANCES):
            inst = random_recipe(random.Random(5000 + i), max_concepts=30, max_langs=3, restricted=True).build()
            xml, loss = export_tbx(inst, f"doc {i}")
            assert not loss
            assert store.dumps(import_tbx(xml)) == store.dumps(inst)
        for recipe in recipes:
            inst = recipe.build()
            xml, loss = export_tbx(inst, "unrestricted")
            assert loss.as_dict() == loss_census(inst)
            assert store.dumps(import_tbx(xml)) == store.dumps(tbx_survivors(inst))


def test_ac6_ntriples(recipes):
    with criterion("AC6 N-Triples count + permutation determinism (200 instances)"):
        for i, recipe in enumerate(recipes):
            a = recipe.build()
            b = recipe.build(random.Random(6000 + i))
            text = to_ntriples(a, BASE)
            n_attrs = sum(len(e.attrs) for e in a.entities.values())
            assert len(text.splitlines()) == len(parse_ntriples(text)) == len(a.entities) + n_attrs + len(a.links)
            assert to_ntriples(b, BASE).encode("utf-8") == text.encode("utf-8")


def test_ac7_ddl_executes(recipes):
    with criterion("AC7 DDL executes, bulk-loads, rejects NULL denoting_concept"):
        mapping = map_schema(terminology_schema())
        ddl = emit_ddl(mapping)
        for recipe in recipes:
            conn = sqlite3.connect(":memory:")
            conn.executescript(ddl)
            sql_load(conn, mapping, recipe.build())
            assert conn.execute("PRAGMA foreign_key_check").fetchall() == []
            conn.close()
        conn = sqlite3.connect(":memory:")
        conn.execute("PRAGMA foreign_keys = ON")
        conn.executescript(ddl)
        conn.execute("INSERT INTO concept (id) VALUES ('c1')")
        with pytest.raises(sqlite3.IntegrityError, match="NOT NULL"):
            conn.execute("INSERT INTO term (id, designation, language, denoting_concept) VALUES ('t1', 'x', 'en', NULL)")


def test_ac8_view_coherence(recipes):
    with criterion("AC8 view coherence (200 instances)"):
        for recipe in recipes:
            inst = recipe.build()
            assert len(validate_termbase(inst)) == 0
            assert not expected_bound_violations(inst)
            projections = {a: view(inst, a).instance for a in Approach}
            cores = {
                a: (
                    {k for k in p.entities if k[0] == "Concept"},
                    {k for k in p.entities if k[0] == "Term"},
                    set(p.links_of("Denoted")),
                )
                for a, p in projections.items()
            }
            assert len(set(map(repr, cores.values()))) == 1
            ono, sem = projections[Approach.ONOMASIOLOGICAL], projections[Approach.SEMASIOLOGICAL]
            assert all(sem.entities.get(k) == e for k, e in ono.entities.items())
            assert ono.links <= sem.links
