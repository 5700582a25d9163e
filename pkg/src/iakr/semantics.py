"""Satisfaction of keys and independence atoms on concrete relations."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import IA, Constraint, ConstraintSet, Key, Relation, SchemaError, _group_ids, check_constraint


@dataclass(frozen=True)
class Verdict:
    """Outcome of checking one constraint.

    ``witness`` is ``None`` when the constraint holds.  For a key it is two
    distinct tuples agreeing on the key; for an IA ``X ⊥ Y`` it is a pair
    ``(t, t')`` such that no tuple carries ``t``'s X-values together with
    ``t'``'s Y-values.
    """

    constraint: Constraint
    holds: bool
    witness: tuple[tuple, tuple] | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self, schema=None) -> dict:
        out = {"constraint": self.constraint.format(schema), "verdict": "holds" if self.holds else "violated"}
        if self.witness is not None:
            if schema is not None:
                out["witness"] = [dict(zip(schema.attributes, map(_jsonable, t))) for t in self.witness]
            else:
                out["witness"] = [list(map(_jsonable, t)) for t in self.witness]
        return out


def _jsonable(v):
    return v if isinstance(v, (int, str, float, bool)) or v is None else str(v)


@dataclass(frozen=True)
class SatisfactionReport:
    relation_size: int
    verdicts: tuple[Verdict, ...]

    @property
    def all_hold(self) -> bool:
        return all(v.holds for v in self.verdicts)

    def __bool__(self) -> bool:
        return self.all_hold

    @property
    def violations(self) -> tuple[Verdict, ...]:
        return tuple(v for v in self.verdicts if not v.holds)

    def to_dict(self, schema=None) -> dict:
        return {
            "all_hold": self.all_hold,
            "tuples": self.relation_size,
            "results": [v.to_dict(schema) for v in self.verdicts],
        }

    def to_json(self, schema=None) -> str:
        return json.dumps(self.to_dict(schema), indent=2)


def _require(r: Relation, c: Constraint) -> None:
    try:
        check_constraint(r.schema, c)
    except SchemaError as exc:
        raise SchemaError(f"{c} is not over schema {r.schema.name}: {exc}") from None


def satisfies_key(r: Relation, k: Key) -> Verdict:
    _require(r, k)
    cols = r.schema.columns(k.attrs)
    ids, count = _group_ids(r.data, cols)
    if count == len(r):
        return Verdict(k, True)
    order = np.argsort(ids, kind="stable")
    s = ids[order]
    pos = int(np.flatnonzero(s[1:] == s[:-1])[0])
    return Verdict(k, False, (r.row(int(order[pos])), r.row(int(order[pos + 1]))))


def satisfies_ia(r: Relation, ia: IA) -> Verdict:
    """Rule S-I taken literally, overlapping sides included.

    When ``X ∩ Y`` is non-empty a combining tuple can only exist for pairs
    agreeing on the overlap, so the atom forces the overlap to be constant.
    Otherwise ``r(XY) -> r(X) x r(Y)`` is injective and the atom holds iff
    it is onto, i.e. ``|r(XY)| = |r(X)| * |r(Y)|``.
    """
    _require(r, ia)
    n = len(r)
    if n == 0:
        return Verdict(ia, True)
    schema = r.schema
    overlap = ia.left & ia.right
    if overlap:
        oid, oc = _group_ids(r.data, schema.columns(overlap))
        if oc > 1:
            j = int(np.flatnonzero(oid != oid[0])[0])
            return Verdict(ia, False, (r.row(0), r.row(j)))
    xi, cx = _group_ids(r.data, schema.columns(ia.left))
    yi, cy = _group_ids(r.data, schema.columns(ia.right))
    cxy = _group_ids(r.data, schema.columns(ia.left | ia.right))[1]
    if cxy == cx * cy:
        return Verdict(ia, True)
    present = np.unique(xi * cy + yi)
    gaps = np.flatnonzero(present != np.arange(len(present)))
    missing = int(gaps[0]) if len(gaps) else len(present)
    x, y = divmod(missing, cy)
    t = int(np.flatnonzero(xi == x)[0])
    t2 = int(np.flatnonzero(yi == y)[0])
    return Verdict(ia, False, (r.row(t), r.row(t2)))


def satisfies(r: Relation, c: Constraint) -> Verdict:
    if isinstance(c, Key):
        return satisfies_key(r, c)
    return satisfies_ia(r, c)


def satisfies_all(r: Relation, sigma: ConstraintSet | list) -> SatisfactionReport:
    if isinstance(sigma, ConstraintSet) and sigma.schema != r.schema:
        raise SchemaError(f"constraint schema {sigma.schema.name} differs from relation schema {r.schema.name}")
    return SatisfactionReport(len(r), tuple(satisfies(r, c) for c in sigma))


def confirms_violation(r: Relation, c: Constraint, witness: tuple[tuple, tuple]) -> bool:
    """Replay a witness against the definitions by direct tuple inspection."""
    rows = set(r.rows())
    t, t2 = witness
    if t not in rows or t2 not in rows:
        return False
    idx = r.schema.index
    if isinstance(c, Key):
        cols = [idx(a) for a in c.attrs]
        return t != t2 and all(t[j] == t2[j] for j in cols)
    xs = [idx(a) for a in c.left]
    ys = [idx(a) for a in c.right]
    return not any(all(u[j] == t[j] for j in xs) and all(u[j] == t2[j] for j in ys) for u in rows)


def restrict_constraints(sigma: ConstraintSet, attrs) -> ConstraintSet:
    """``Σ↾R'``: the members of ``sigma`` mentioning only attributes in ``attrs``."""
    sub = sigma.schema.attrset(attrs)
    return ConstraintSet(sigma.schema, (c for c in sigma if c.attributes <= sub))
