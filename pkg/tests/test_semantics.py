import json
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iakr.core import IA, ConstraintSet, Key, Relation, Schema, SchemaError, ind, key
from iakr.semantics import confirms_violation, restrict_constraints, satisfies, satisfies_all, satisfies_ia, satisfies_key
from iakr.separation import sigma_n

import oracles

AB = Schema("R", ("A", "B"))
ABC = Schema("R", ("A", "B", "C"))


def rel(schema, rows):
    return Relation.from_rows(schema, rows)


def test_key_examples():
    r = rel(AB, [(0, 0), (0, 1)])
    v = satisfies_key(r, key("A"))
    assert not v.holds
    assert set(v.witness) == {(0, 0), (0, 1)}
    assert satisfies_key(r, key("A B")).holds


def test_ia_examples():
    assert not satisfies_ia(rel(AB, [(0, 0), (1, 1)]), ind("A", "B")).holds
    assert satisfies_ia(rel(AB, list(product([0, 1], repeat=2))), ind("A", "B")).holds
    assert satisfies_ia(rel(AB, [(0, 0), (1, 1)]), ind((), "A B")).holds


def test_missing_combination_is_reported():
    v = satisfies_ia(rel(AB, [(0, 0), (1, 1)]), ind("A", "B"))
    t, t2 = v.witness
    assert (t[0], t2[1]) == (0, 1)


def test_satisfies_all_examples():
    s2 = sigma_n(2)
    r = Relation(s2.schema, [(0, 0, 0, 0), (1, 0, 1, 0)])
    assert satisfies_all(r, s2.constraints).all_hold
    assert satisfies_all(Relation.empty(s2.schema), s2.constraints).all_hold
    rep = satisfies_all(rel(AB, [(0, 0), (0, 1)]), ConstraintSet(AB, [key("A")]))
    assert not rep.all_hold and rep.violations[0].witness is not None


def test_schema_mismatch_is_rejected():
    with pytest.raises(SchemaError):
        satisfies(rel(AB, [(0, 0)]), key("C"))
    with pytest.raises(SchemaError):
        satisfies_all(rel(AB, [(0, 0)]), ConstraintSet(ABC, [key("A")]))


def test_report_json_shape():
    rep = satisfies_all(rel(AB, [(0, 0), (0, 1)]), ConstraintSet(AB, [key("A"), key("A B")]))
    d = json.loads(rep.to_json(AB))
    entries = {e["constraint"]: e for e in d["results"]}
    assert entries["key(A)"]["verdict"] == "violated"
    assert entries["key(A)"]["witness"] == [{"A": 0, "B": 0}, {"A": 0, "B": 1}]
    assert "witness" not in entries["key(A B)"]


def test_restriction_examples():
    s2 = sigma_n(2).constraints
    assert set(restrict_constraints(s2, ["A1", "B1", "A2"])) == {ind("A1", "B1"), key("B1 A2")}
    assert restrict_constraints(s2, s2.schema.attributes) == s2
    with_empty = s2.with_(key(), ind((), ()))
    assert set(restrict_constraints(with_empty, [])) == {key(), ind((), ())}
    with pytest.raises(SchemaError):
        restrict_constraints(s2, ["Z"])


# --- properties against the literal definitions ---------------------------------

rows3 = st.lists(st.tuples(*[st.integers(0, 2)] * 3), max_size=10)
subsets = st.frozensets(st.sampled_from(ABC.attributes))


@given(rows3, subsets, subsets)
def test_ia_agrees_with_definition(rows, x, y):
    r = rel(ABC, rows)
    v = satisfies_ia(r, IA(x, y))
    assert v.holds == oracles.ia_holds(set(rows), ABC, x, y)
    if not v.holds:
        assert confirms_violation(r, IA(x, y), v.witness)


@given(rows3, subsets)
def test_key_agrees_with_definition(rows, x):
    r = rel(ABC, rows)
    v = satisfies_key(r, Key(x))
    assert v.holds == oracles.key_holds(set(rows), ABC, x)
    if not v.holds:
        assert confirms_violation(r, Key(x), v.witness)


@given(rows3, subsets, subsets)
def test_ia_symmetry(rows, x, y):
    r = rel(ABC, rows)
    assert satisfies_ia(r, IA(x, y)).holds == satisfies_ia(r, IA(y, x)).holds


@given(rows3, subsets)
def test_constancy_characterization(rows, x):
    r = rel(ABC, rows)
    assert satisfies_ia(r, IA(x, x)).holds == (len(oracles.projection(set(rows), ABC, x)) <= 1)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=5), st.lists(st.integers(0, 3), min_size=1, max_size=4))
def test_product_closure(left, right):
    wide = Schema("P", ("A", "B", "C"))
    r = rel(wide, [(a, b, c) for (a, b) in left for c in right])
    for x in [frozenset(), frozenset("A"), frozenset("B"), frozenset("AB")]:
        for y in [frozenset(), frozenset("C")]:
            assert satisfies_ia(r, IA(x, y)).holds


def test_full_key_always_holds():
    r = rel(ABC, [(0, 0, 0), (0, 0, 1), (1, 0, 0)])
    assert satisfies_key(r, Key(ABC.all_attributes)).holds


def test_confirms_violation_rejects_bogus_witness():
    r = rel(AB, [(0, 0), (0, 1)])
    assert not confirms_violation(r, key("B"), ((0, 0), (0, 1)))
    assert not confirms_violation(r, key("A"), ((0, 0), (9, 9)))
