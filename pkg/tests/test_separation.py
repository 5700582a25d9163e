import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iakr.core import IA, ConstraintSet, Key, Relation, Schema, SchemaError, ind, key
from iakr.countermodel import verify_countermodel
from iakr.semantics import satisfies, satisfies_all
from iakr.separation import (
    SearchTooLarge,
    bounded_search,
    candidate_targets,
    cardinality_schedule,
    counting_chain,
    enumerate_relations,
    kary_demo,
    lemma3_model,
    lemma4_model,
    lemma5_models,
    lemma6_models,
    rn_schema,
    search_space_size,
    sigma_n,
    theorem3_countermodel,
    upward_closure,
)

import oracles


def test_sigma2():
    s = sigma_n(2)
    assert set(s.constraints) == {ind("A1", "B1"), ind("A2", "B2"), key("B1 A2"), key("B2 A1")}


def test_sigma7_cycle():
    s = sigma_n(7)
    assert len(s.constraints) == 14
    assert s.key(7) == key("B7 A1")
    assert all(s.key(i) == key(f"B{i} A{i + 1}") for i in range(1, 7))


def test_sigma_needs_two_pairs():
    with pytest.raises(ValueError):
        sigma_n(1)


def test_closure():
    for n in range(2, 6):
        c = upward_closure(sigma_n(n))
        assert key("A1 B1") not in c
        assert all(x in c for x in sigma_n(n))
    c2 = upward_closure(sigma_n(2))
    assert len(c2) == 9
    assert ind("B2", "A2") in c2
    assert ind("A1", "A2") not in c2


def test_candidate_targets_cover_keys_and_unary_atoms():
    assert len(candidate_targets(2)) == 16 + 16


# --- counting chain --------------------------------------------------------------


def test_counting_chain_single_tuple():
    rep = counting_chain(Relation.from_rows(rn_schema(3), [(0,) * 6]), 3)
    assert rep.key_holds
    assert all(s.lhs == 1 and s.rhs == 1 for s in rep.steps)


def test_counting_chain_two_tuples():
    rep = counting_chain(Relation.from_rows(rn_schema(2), [(0, 0, 0, 0), (1, 0, 1, 0)]), 2)
    d = rep.to_dict()
    assert d["conclusion"] == "key(A1 B1) holds"
    assert (rep.steps[0].lhs, rep.steps[0].rhs) == (1, 1)
    assert any(s.lhs == 2 and s.rhs == 2 and s.op == "=" for s in rep.steps)


def test_counting_chain_rejects_non_models():
    with pytest.raises(ValueError):
        counting_chain(Relation.from_rows(rn_schema(2), [(0, 0, 0, 0), (1, 1, 1, 1)]), 2)


def test_counting_chain_on_every_small_model():
    s2 = sigma_n(2)
    count = 0
    for r in enumerate_relations(s2.schema, 3, 2):
        if satisfies_all(r, s2.constraints).all_hold:
            rep = counting_chain(r, 2)
            assert rep.key_holds and satisfies(r, key("A1 B1")).holds
            count += 1
    assert count > 1


# --- schedule and the big construction ------------------------------------------


def test_schedule_seven():
    sch = cardinality_schedule(7, "A1 B1 A3 B3 A5 B5 A7")
    assert (sch.m, sch.M) == (3, 720)
    assert sch.a == (2, 3, 3, 4, 4, 5, 5)
    assert sch.b == (240, 240, 180, 180, 144, 144, 144)
    d = json.loads(sch.to_json())
    assert d["D"] == ["A1", "B1", "A3", "B3", "A5", "B5", "A7"]
    assert oracles.schedule(7, [sch.doubled(i) for i in range(1, 8)]) == (720, list(sch.a), list(sch.b))


@st.composite
def outside_sets(draw):
    n = draw(st.integers(2, 6))
    attrs = rn_schema(n).attributes
    D = draw(st.frozensets(st.sampled_from(attrs)))
    if key(D) in upward_closure(sigma_n(n)):
        D = frozenset()
    return n, D


@given(outside_sets())
def test_schedule_integrality(case):
    n, D = case
    sch = cardinality_schedule(n, D)
    assert all(x >= 2 for x in sch.a + sch.b)
    for i in range(1, n + 1):
        mult = sch.a[i - 1] + 1 if sch.doubled(i) else sch.a[i - 1]
        assert mult * sch.b[i - 1] == sch.M
        if i < n:
            assert sch.b[i - 1] * sch.a[i] == sch.M
    assert oracles.schedule(n, [sch.doubled(i) for i in range(1, n + 1)]) == (sch.M, list(sch.a), list(sch.b))


def test_lemma3_small():
    r = lemma3_model(2, "A2")
    assert len(r) == 6
    s = sigma_n(2)
    assert verify_countermodel(r, s.without(s.key(2)), key("A2")).ok


def test_lemma3_rejects_closure_members():
    with pytest.raises(ValueError):
        lemma3_model(2, "B1 A2")


@given(outside_sets())
def test_lemma3_cardinalities(case):
    n, D = case
    sch = cardinality_schedule(n, D)
    if sch.M > 720:
        return
    r = lemma3_model(n, D)
    s = sigma_n(n)
    assert len(r) == sch.M
    assert verify_countermodel(r, s.without(s.key(n)), key(D)).ok
    for i in range(2, n + 1):
        assert len(oracles.projection(set(r.rows()), r.schema, {f"A{i}"})) == sch.a[i - 1]
    for i in range(1, n + 1):
        assert len(oracles.projection(set(r.rows()), r.schema, {f"B{i}"})) == sch.b[i - 1]


def test_lemma4_examples():
    s = sigma_n(2)
    for D, size in [("B1", 6), ("A1 B1", 24)]:
        r = lemma4_model(2, D)
        assert len(r) == size
        assert verify_countermodel(r, s.without(s.ia(1)), key(D)).ok


def test_lemma4_first_column_is_the_row_index_off_row_one():
    r = lemma4_model(3, "B1")
    col = [t[0] for t in r.rows()]
    assert col[0] == 0 and col[1] == 0
    assert col[2:] == list(range(2, len(r)))


# --- the small 0/1 constructions ------------------------------------------------


def test_lemma5_two_one():
    r, r2 = lemma5_models(2, 1)
    assert set(r.rows()) == {(0, 0, 0, 0), (0, 1, 1, 0), (1, 0, 1, 1), (1, 1, 0, 1)}
    assert set(r2.rows()) == {(0, 0, 0, 0), (1, 0, 1, 0)}
    s = sigma_n(2)
    sub = s.without(s.key(2))
    assert satisfies_all(r, sub).all_hold and not satisfies(r, ind("A1", "A1")).holds
    assert satisfies_all(r2, sub).all_hold and not satisfies(r2, ind("A1", "A2")).holds


def test_lemma5_targets():
    for n in range(2, 6):
        s = sigma_n(n)
        sub = s.without(s.key(n))
        for i in range(1, n + 1):
            r, r2 = lemma5_models(n, i)
            row2 = r.rows()[2]
            assert [a for a, v in zip(r.schema.attributes, row2) if v == 0] == [f"B{i}"]
            for j in range(1, n + 1):
                ai = f"A{i}"
                if j <= i:
                    assert verify_countermodel(r, sub, ind(ai, f"A{j}")).ok
                else:
                    assert verify_countermodel(r2, sub, ind(ai, f"A{j}")).ok
                if j > i:
                    assert verify_countermodel(r, sub, ind(ai, f"B{j}")).ok
                elif j < i:
                    assert verify_countermodel(r2, sub, ind(ai, f"B{j}")).ok


def test_lemma6_two_one():
    r0, r1, r2, r3 = lemma6_models(2, 1)
    assert set(r0.rows()) == {(0, 0, 0, 0), (1, 1, 1, 0)}
    assert r2 is None and r3 is None
    s = sigma_n(2)
    assert verify_countermodel(r0, s.without(s.ia(1)), ind("A1", "A2")).ok


def test_lemma6_shapes():
    for n in range(2, 6):
        for i in range(1, n + 1):
            r0, r1, r2, r3 = lemma6_models(n, i)
            assert len(r0) == len(r1) == 2
            assert (r2 is None) == (i == 1)
            assert (r3 is None) != (1 < i < n)
            t = r1.rows()[1]
            assert all(v == (0 if a.startswith("A") and a != "A1" else 1) for a, v in zip(r1.schema.attributes, t))
            if r3 is not None:
                assert len(r3) == 4


def test_small_constructions_reject_bad_index():
    for f in (lemma5_models, lemma6_models):
        with pytest.raises(ValueError):
            f(2, 0)
        with pytest.raises(ValueError):
            f(2, 3)


# --- dispatcher -------------------------------------------------------------------


def test_theorem3_examples():
    res = theorem3_countermodel(2, key("B2 A1"), key("A1 B1"))
    assert res.lemma == 3 and res.check.ok
    res = theorem3_countermodel(2, ind("A2", "B2"), ind("A1", "A2"))
    assert res.lemma == 6 and res.check.ok
    assert res.to_dict()["verified"] is True
    with pytest.raises(ValueError):
        theorem3_countermodel(2, key("B1 A2"), key("B2 A1"))
    with pytest.raises(ValueError):
        theorem3_countermodel(2, key("A1"), key("A1 B1"))


def test_theorem3_every_pair_at_two():
    s = sigma_n(2)
    closure = upward_closure(s)
    for psi in s:
        for phi in candidate_targets(2):
            if phi in closure:
                continue
            res = theorem3_countermodel(2, psi, phi)
            assert verify_countermodel(res.relation, s.without(psi), phi).ok


# --- bounded search ---------------------------------------------------------------


def test_bounded_search_examples():
    s = sigma_n(2)
    assert bounded_search(s.constraints, key("A1 B1"), 3, 4) is None
    r = bounded_search(s.without(s.key(2)), key("A1 B1"), 2, 2)
    assert r.rows() == [(0, 0, 0, 0), (0, 0, 1, 0)]
    assert bounded_search(s.constraints, key("B1 A2"), 2, 3) is None


def test_enumeration_is_complete_up_to_renaming():
    schema = Schema("R", ("A", "B"))
    seen = {frozenset(r.rows()) for r in enumerate_relations(schema, 2, 2)}
    for k in range(1, 3):
        for rows in itertools.combinations(itertools.product(range(2), repeat=2), k):
            canon = False
            for pa in itertools.permutations(range(2)):
                for pb in itertools.permutations(range(2)):
                    if frozenset((pa[a], pb[b]) for a, b in rows) in seen:
                        canon = True
            assert canon, rows


def test_search_guard():
    assert search_space_size(4, 3, 3) > 0
    with pytest.raises(SearchTooLarge):
        bounded_search(sigma_n(2).constraints, key("A1 B1"), 3, 4, limit=10)


# --- arity demonstration ------------------------------------------------------------


def test_kary_demo_two():
    rep = kary_demo(2)
    assert rep.pairs == rep.verified == 84
    assert rep.gap_atom == "key(A1 B1)" and not rep.gap_in_closure
    assert rep.gap_bounded_search.startswith("none")
    assert set(rep.by_lemma) == {3, 4, 5, 6}
    with pytest.raises(ValueError):
        kary_demo(4)


def test_schema_mismatch_in_counting_chain():
    with pytest.raises(SchemaError):
        counting_chain(Relation.from_rows(Schema("X", ("A",)), [(0,)]), 2)


def test_unused_constraint_types():
    assert IA(frozenset({"A1"}), frozenset({"A1"})) not in upward_closure(sigma_n(2))
    assert Key(frozenset()) not in upward_closure(sigma_n(2))
    assert isinstance(sigma_n(2).without(key("B1 A2")), ConstraintSet)
