"""Finite versus general implication: the cyclic family Σ_n and its models.

``Σ_n`` lives on ``R_n = A1 B1 ... An Bn`` and consists of the atoms
``A_i ⊥ B_i`` and the keys ``key(B_i A_{i+1})`` (indices mod n).  Every
finite model satisfies ``key(A1 B1)`` (see :func:`counting_chain`), yet no
rule of bounded arity can derive it: dropping any single member of Σ_n
leaves a set whose finite consequences stay inside the upward closure
``C↑(Σ_n)``.  The explicit finite countermodels behind that claim are built
here and re-checked semantically before they are returned.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .core import IA, Constraint, ConstraintSet, Key, Relation, Schema, SchemaError, check_constraint, projection_size
from .countermodel import CountermodelCheck, InvariantViolation, verify_countermodel
from .semantics import satisfies, satisfies_all


def _a(i: int) -> str:
    return f"A{i}"


def _b(i: int) -> str:
    return f"B{i}"


def rn_schema(n: int) -> Schema:
    return Schema(f"R{n}", tuple(x for i in range(1, n + 1) for x in (_a(i), _b(i))))


def _attrs(schema: Schema, attrs: Iterable[str] | str) -> frozenset[str]:
    return schema.attrset(attrs)


# ---------------------------------------------------------------------------
# Σ_n and C↑(Σ_n)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SigmaN:
    n: int
    constraints: ConstraintSet

    @property
    def schema(self) -> Schema:
        return self.constraints.schema

    def ia(self, i: int) -> IA:
        """``A_i ⊥ B_i``."""
        return IA(frozenset({_a(i)}), frozenset({_b(i)}))

    def key(self, i: int) -> Key:
        """``key(B_i A_{i+1})``; ``key(self.n)`` closes the cycle."""
        return Key(frozenset({_b(i), _a(i % self.n + 1)}))

    @property
    def ias(self) -> tuple[IA, ...]:
        return tuple(self.ia(i) for i in range(1, self.n + 1))

    @property
    def keys(self) -> tuple[Key, ...]:
        return tuple(self.key(i) for i in range(1, self.n + 1))

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def __contains__(self, c: object) -> bool:
        return isinstance(c, (Key, IA)) and self.constraints.contains_up_to_symmetry(c)

    def without(self, psi: Constraint) -> ConstraintSet:
        if psi not in self:
            raise ValueError(f"{psi.format(self.schema)} is not a member of Σ_{self.n}")
        return self.constraints.without(psi)


def sigma_n(n: int) -> SigmaN:
    if n < 2:
        raise ValueError(f"Σ_n needs n >= 2, got {n}")
    schema = rn_schema(n)
    cs = [IA(frozenset({_a(i)}), frozenset({_b(i)})) for i in range(1, n + 1)]
    cs += [Key(frozenset({_b(i), _a(i % n + 1)})) for i in range(1, n + 1)]
    return SigmaN(n, ConstraintSet(schema, cs))


@dataclass(frozen=True)
class UpwardClosure:
    """Σ_n together with every superset key of its keys."""

    base: SigmaN

    def __contains__(self, c: object) -> bool:
        if isinstance(c, Key):
            return any(k.attrs <= c.attrs for k in self.base.keys)
        if isinstance(c, IA):
            return c in self.base
        return False

    def keys(self) -> list[Key]:
        schema = self.base.schema
        out = []
        for mask in range(1 << len(schema)):
            k = Key(schema.from_mask(mask))
            if k in self:
                out.append(k)
        return out

    def members(self) -> list[Constraint]:
        return [*self.keys(), *self.base.ias]

    def __len__(self) -> int:
        return len(self.keys()) + len(self.base.ias)


def upward_closure(s: SigmaN) -> UpwardClosure:
    return UpwardClosure(s)


def candidate_targets(n: int) -> list[Constraint]:
    """All keys over ``R_n`` and all oriented unary atoms, in a fixed order."""
    schema = rn_schema(n)
    keys = [Key(schema.from_mask(m)) for m in range(1 << len(schema))]
    ias = [IA(frozenset({x}), frozenset({y})) for x in schema.attributes for y in schema.attributes]
    return [*keys, *ias]


# ---------------------------------------------------------------------------
# the counting argument
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainStep:
    claim: str
    lhs: int
    rhs: int
    op: str  # "<=" or "="
    reason: str

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs if self.op == "=" else self.lhs <= self.rhs

    def to_dict(self) -> dict:
        return {"claim": self.claim, "lhs": self.lhs, "op": self.op, "rhs": self.rhs, "reason": self.reason}


@dataclass(frozen=True)
class ChainReport:
    n: int
    size: int
    steps: tuple[ChainStep, ...]
    key_holds: bool

    @property
    def conclusion(self) -> str:
        return "key(A1 B1) holds" if self.key_holds else "key(A1 B1) fails"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "tuples": self.size,
            "steps": [s.to_dict() for s in self.steps],
            "conclusion": self.conclusion,
        }


def counting_chain(r: Relation, n: int) -> ChainReport:
    """Replay the cardinality argument that finite models of Σ_n satisfy ``key(A1 B1)``.

    Each inequality is computed from ``r`` itself; a step that does not hold
    raises :class:`InvariantViolation`, which cannot happen when ``r ⊨ Σ_n``.
    """
    s = sigma_n(n)
    if r.schema != s.schema:
        raise SchemaError(f"relation must be over {s.schema.name} = {' '.join(s.schema.attributes)}")
    report = satisfies_all(r, s.constraints)
    if not report.all_hold:
        bad = ", ".join(v.constraint.format(r.schema) for v in report.violations)
        raise ValueError(f"relation is not a model of Σ_{n}: violates {bad}")

    def card(*attrs: str) -> int:
        return projection_size(r, attrs)

    def group_sizes(attr: str) -> np.ndarray:
        col = r.data[:, r.schema.index(attr)]
        return np.unique(col, return_counts=True)[1] if len(r) else np.zeros(0, dtype=np.int64)

    steps: list[ChainStep] = []
    for i in range(n, 1, -1):
        sizes = group_sizes(_a(i))
        lo = int(sizes.min()) if len(sizes) else 0
        hi = int(sizes.max()) if len(sizes) else 0
        steps.append(ChainStep(f"|r(B{i})| <= min_a |r(A{i}=a)|", card(_b(i)), lo, "<=", f"A{i} ⊥ B{i}"))
        steps.append(ChainStep(f"max_a |r(A{i}=a)| <= |r(B{i - 1})|", hi, card(_b(i - 1)), "<=", f"key(B{i - 1} A{i})"))
        steps.append(ChainStep(f"|r(B{i})| <= |r(B{i - 1})|", card(_b(i)), card(_b(i - 1)), "<=", "previous two steps"))
    size = len(r)
    bn_a1 = card(_b(n), "A1")
    steps.append(ChainStep(f"|r| = |r(B{n} A1)|", size, bn_a1, "=", f"key(B{n} A1)"))
    steps.append(ChainStep(f"|r(B{n} A1)| <= |r(B{n})| * |r(A1)|", bn_a1, card(_b(n)) * card("A1"), "<=", "product bound"))
    steps.append(ChainStep("|r| <= |r(B1)| * |r(A1)|", size, card("B1") * card("A1"), "<=", "chain of B-cardinalities"))
    steps.append(ChainStep("|r(B1)| * |r(A1)| = |r(A1 B1)|", card("B1") * card("A1"), card("A1", "B1"), "=", "A1 ⊥ B1"))
    steps.append(ChainStep("|r| <= |r(A1 B1)|", size, card("A1", "B1"), "<=", "so no two tuples share A1 B1"))
    for st in steps:
        if not st.holds:
            raise InvariantViolation(f"counting step failed: {st.claim} with {st.lhs} vs {st.rhs}")
    holds = size == card("A1", "B1")
    if holds != satisfies(r, Key(frozenset({"A1", "B1"}))).holds:
        raise InvariantViolation("counting conclusion disagrees with the key check")
    return ChainReport(n, size, tuple(steps), holds)


# ---------------------------------------------------------------------------
# the cardinality schedule and the key/key model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CardinalitySchedule:
    n: int
    D: frozenset[str]
    m: int
    M: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    def doubled(self, i: int) -> bool:
        """Whether ``A_i B_i ⊆ D`` (1-based)."""
        return {_a(i), _b(i)} <= self.D

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "D": rn_schema(self.n).ordered(self.D),
            "m": self.m,
            "M": self.M,
            "a": list(self.a),
            "b": list(self.b),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _require_outside_closure(n: int, D: frozenset[str]) -> SigmaN:
    s = sigma_n(n)
    if Key(D) in upward_closure(s):
        raise ValueError(f"key({' '.join(s.schema.ordered(D))}) is in the upward closure of Σ_{n}; no countermodel exists")
    return s


def cardinality_schedule(n: int, D: Iterable[str] | str) -> CardinalitySchedule:
    """``a_1 = 2``, ``b_i = M/a_i`` (or ``M/(a_i+1)`` when ``A_i B_i ⊆ D``), ``a_{i+1} = M/b_i``."""
    schema = rn_schema(n)
    D = _attrs(schema, D)
    _require_outside_closure(n, D)
    m = sum(1 for i in range(1, n + 1) if {_a(i), _b(i)} <= D)
    M = math.factorial(m + 3)
    a, b = [2], []
    for i in range(1, n + 1):
        div = a[-1] + 1 if {_a(i), _b(i)} <= D else a[-1]
        if M % div:
            raise InvariantViolation(f"schedule not integral at b_{i}")
        b.append(M // div)
        if i < n:
            if M % b[-1]:
                raise InvariantViolation(f"schedule not integral at a_{i + 1}")
            a.append(M // b[-1])
    if min(a + b) < 2:
        raise InvariantViolation("schedule entries must be at least 2")
    return CardinalitySchedule(n, D, m, M, tuple(a), tuple(b))


_STAR = -1


def _pinned_extension(group: np.ndarray, width: int, pins: dict[int, int]) -> np.ndarray:
    """A new column ``y`` such that ``(group, y)`` enumerates ``groups × {0..width-1}``.

    Within each group, rows are assigned the unused values in increasing
    order following row order; the rows in ``pins`` get their fixed value.
    """
    out = np.empty(len(group), dtype=np.int64)
    taken: dict[int, set[int]] = {}
    for row, v in pins.items():
        g = int(group[row])
        if v in taken.setdefault(g, set()):
            raise InvariantViolation("pinned rows collide in the enumeration")
        taken[g].add(v)
    cursor: dict[int, int] = {}
    for row, g in enumerate(group.tolist()):
        if row in pins:
            out[row] = pins[row]
            continue
        v = cursor.get(g, 0)
        used = taken.get(g, ())
        while v in used:
            v += 1
        if v >= width:
            raise InvariantViolation("group larger than the value range")
        out[row] = v
        cursor[g] = v + 1
    return out


def _lemma3_columns(n: int, D: frozenset[str]) -> tuple[CardinalitySchedule, np.ndarray]:
    sched = cardinality_schedule(n, D)
    M = sched.M
    t1 = {x: 0 if x in D else 1 for x in rn_schema(n).attributes}
    cols: dict[str, np.ndarray] = {}

    # A1 B1: rows run through B1-major order; the A1 alphabet is {0,*,1} when A1 B1 ⊆ D
    b1 = sched.b[0]
    if sched.doubled(1):
        alphabet = [0, _STAR, 1]
        first, second = (0, 0), (_STAR, 0)
    else:
        alphabet = [0, 1]
        first, second = (0, 0), (t1["A1"], t1["B1"])
    pairs = [(x, y) for y in range(b1) for x in alphabet]
    pairs.remove(first)
    pairs.remove(second)
    pairs = [first, second, *pairs]
    if len(pairs) != M:
        raise InvariantViolation("first column pair does not have M rows")
    cols["A1"] = np.array([p[0] for p in pairs], dtype=np.int64)
    cols["B1"] = np.array([p[1] for p in pairs], dtype=np.int64)

    for i in range(1, n):
        a_next, b_prev, b_next = sched.a[i], sched.b[i - 1], sched.b[i]
        ai, bi = _a(i + 1), _b(i + 1)
        # key(B_i A_{i+1}): pair every B_i value with every A_{i+1} value once
        cols[ai] = _pinned_extension(cols[_b(i)], a_next, {0: 0, 1: t1[ai]})
        if not sched.doubled(i + 1):
            cols[bi] = _pinned_extension(cols[ai], b_next, {0: 0, 1: t1[bi]})
        else:
            # index the rows of each A_{i+1} group by l in 0..b_i-1; t1 sits at l = b_{i+1}
            ell = _pinned_extension(cols[ai], b_prev, {0: 0, 1: b_next})
            k = cols[ai]
            overflow = k * (b_prev - b_next) + (ell - b_next)
            cols[bi] = np.where(ell < b_next, ell, overflow)

    cols["A1"] = np.where(cols["A1"] == _STAR, 0, cols["A1"])
    data = np.column_stack([cols[x] for x in rn_schema(n).attributes])
    return sched, data


def lemma3_model(n: int, D: Iterable[str] | str) -> Relation:
    """A finite model of ``Σ_n ∖ {key(B_n A1)}`` violating ``key(D)``.

    Rows 0 and 1 are the all-zero tuple and the tuple that is 0 on ``D`` and
    1 elsewhere.  Column ``A_i`` takes ``a_i`` values and ``B_i`` takes
    ``b_i`` values, following :func:`cardinality_schedule`.
    """
    schema = rn_schema(n)
    D = _attrs(schema, D)
    s = _require_outside_closure(n, D)
    _, data = _lemma3_columns(n, D)
    r = Relation(schema, data, distinct=True)
    _verified(r, s.without(s.key(n)), Key(D))
    return r


def lemma4_model(n: int, D: Iterable[str] | str) -> Relation:
    """A finite model of ``Σ_n ∖ {A1 ⊥ B1}`` violating ``key(D)``.

    Starts from :func:`lemma3_model` and gives column A1 the row number,
    except that row 1 gets 0 when ``B_n ∉ D`` and 1 otherwise.
    """
    schema = rn_schema(n)
    D = _attrs(schema, D)
    s = _require_outside_closure(n, D)
    _, data = _lemma3_columns(n, D)
    data = data.copy()
    col = np.arange(len(data), dtype=np.int64)
    col[1] = 1 if _b(n) in D else 0
    data[:, 0] = col
    r = Relation(schema, data, distinct=True)
    _verified(r, s.without(s.ia(1)), Key(D))
    return r


def _verified(r: Relation, sigma: ConstraintSet, phi: Constraint) -> CountermodelCheck:
    check = verify_countermodel(r, sigma, phi)
    if not check.ok:
        raise InvariantViolation(f"construction failed its semantic check: {json.dumps(check.to_dict(r.schema))}")
    return check


# ---------------------------------------------------------------------------
# two-valued models for independence targets
# ---------------------------------------------------------------------------


def _zero_one(n: int, zeros) -> tuple[int, ...]:
    """The tuple over ``R_n`` that is 0 on ``zeros`` and 1 elsewhere."""
    zs = set(zeros)
    return tuple(0 if x in zs else 1 for x in rn_schema(n).attributes)


def _check_index(n: int, i: int) -> None:
    if n < 2:
        raise ValueError(f"Σ_n needs n >= 2, got {n}")
    if not 1 <= i <= n:
        raise ValueError(f"index {i} out of range 1..{n}")


def lemma5_models(n: int, i: int) -> tuple[Relation, Relation]:
    """Models ``r, r'`` of ``Σ_n ∖ {key(B_n A1)}`` refuting the atoms ``A_i ⊥ Y``.

    ``r`` violates ``A_i ⊥ A_j`` (j ≤ i) and ``A_i ⊥ B_j`` (j > i); ``r'``
    violates ``A_i ⊥ A_j`` (j > i) and ``A_i ⊥ B_j`` (j < i).
    """
    _check_index(n, i)
    rng = range(1, n + 1)
    t0 = _zero_one(n, [_a(j) for j in rng] + [_b(j) for j in rng])
    t1 = _zero_one(n, [_a(j) for j in rng if j <= i] + [_b(j) for j in rng if j > i])
    t2 = _zero_one(n, [_b(i)])
    t3 = _zero_one(n, [_b(j) for j in rng if j < i] + [_a(j) for j in rng if j > i])
    # 0 on A_j (j < i) and B_j (j >= i): this is the tuple that refutes the listed atoms
    t4 = _zero_one(n, [_a(j) for j in rng if j < i] + [_b(j) for j in rng if j >= i])
    schema = rn_schema(n)
    r = Relation(schema, [t0, t1, t2, t3])
    r2 = Relation(schema, [t0, t4])
    s = sigma_n(n)
    sigma = s.without(s.key(n))
    for j in rng:
        ai = {_a(i)}
        _verified(r if j <= i else r2, sigma, IA(frozenset(ai), frozenset({_a(j)})))
        if j != i:
            _verified(r if j > i else r2, sigma, IA(frozenset(ai), frozenset({_b(j)})))
    return r, r2


def lemma6_models(n: int, i: int) -> tuple[Relation, Relation, Relation | None, Relation | None]:
    """Models ``r0, r1, r2, r3`` of ``Σ_n ∖ {A1 ⊥ B1}`` refuting the atoms ``A_i ⊥ Y``.

    ``r0`` violates every ``A_i ⊥ A_j``; ``r1`` every ``A1 ⊥ B_j`` with j > 1;
    ``r2`` (only for i > 1) every ``A_i ⊥ B_j`` with j < i; ``r3`` (only for
    1 < i < n) every ``A_i ⊥ B_j`` with j > i.  Unavailable members are
    ``None``; for i = 1 the targets of ``r3`` are covered by ``r1``.
    """
    _check_index(n, i)
    rng = range(1, n + 1)
    schema = rn_schema(n)
    zero = _zero_one(n, schema.attributes)
    r0 = Relation(schema, [zero, _zero_one(n, [_b(j) for j in rng if j > 1])])
    r1 = Relation(schema, [zero, _zero_one(n, [_a(j) for j in rng if j > 1])])
    r2 = r3 = None
    if i > 1:
        t3 = _zero_one(n, [_a(j) for j in rng if 1 < j < i] + [_b(j) for j in rng if j >= i])
        r2 = Relation(schema, [zero, t3])
    if 1 < i < n:
        t4 = _zero_one(n, ["A1"] + [_b(j) for j in rng if j <= i])
        t5 = _zero_one(n, [_a(j) for j in rng if 1 < j <= i] + [_b(j) for j in rng if j > i])
        t6 = _zero_one(n, [_a(j) for j in rng if j > i])
        r3 = Relation(schema, [zero, t4, t5, t6])
    s = sigma_n(n)
    sigma = s.without(s.ia(1))
    ai = frozenset({_a(i)})
    for j in rng:
        _verified(r0, sigma, IA(ai, frozenset({_a(j)})))
        if j > 1:
            _verified(r1, sigma, IA(frozenset({"A1"}), frozenset({_b(j)})))
        if r2 is not None and j < i:
            _verified(r2, sigma, IA(ai, frozenset({_b(j)})))
        if r3 is not None and j > i:
            _verified(r3, sigma, IA(ai, frozenset({_b(j)})))
    return r0, r1, r2, r3


# ---------------------------------------------------------------------------
# dispatch under the symmetries of Σ_n
# ---------------------------------------------------------------------------


def _parse_attr(x: str) -> tuple[str, int]:
    return x[0], int(x[1:])


def _rotation(n: int, c: int) -> dict[str, str]:
    return {f"{s}{i}": f"{s}{(i - 1 + c) % n + 1}" for i in range(1, n + 1) for s in "AB"}


def _reflection(n: int, shift: int) -> dict[str, str]:
    """``A_i ↦ B_{shift-i}``, ``B_i ↦ A_{shift-i}`` (indices mod n)."""
    out = {}
    for i in range(1, n + 1):
        j = (shift - i - 1) % n + 1
        out[_a(i)] = _b(j)
        out[_b(i)] = _a(j)
    return out


def _compose(first: dict[str, str], then: dict[str, str]) -> dict[str, str]:
    return {x: then[y] for x, y in first.items()}


def _map_constraint(c: Constraint, mapping: dict[str, str]) -> Constraint:
    if isinstance(c, Key):
        return Key(frozenset(mapping[x] for x in c.attrs))
    return IA(frozenset(mapping[x] for x in c.left), frozenset(mapping[x] for x in c.right))


@dataclass(frozen=True)
class Theorem3Result:
    relation: Relation
    psi: Constraint
    phi: Constraint
    lemma: int
    part: str
    mapping: dict[str, str] = field(repr=False)
    check: CountermodelCheck = field(repr=False)

    def to_dict(self) -> dict:
        schema = self.relation.schema
        return {
            "psi": self.psi.format(schema),
            "phi": self.phi.format(schema),
            "lemma": self.lemma,
            "part": self.part,
            "mapping": {x: self.mapping[x] for x in schema.attributes},
            "tuples": len(self.relation),
            "verified": self.check.ok,
        }


def theorem3_countermodel(n: int, psi: Constraint, phi: Constraint) -> Theorem3Result:
    """A finite model of ``Σ_n ∖ {ψ}`` violating ``φ``, for any ``φ ∉ C↑(Σ_n)``.

    ``mapping`` sends each attribute of ``R_n`` to its name in the canonical
    situation of the construction used (removed member ``key(B_n A1)`` or
    ``A1 ⊥ B1``, target ``key(D)`` or ``A_i ⊥ Y``).
    """
    s = sigma_n(n)
    schema = s.schema
    check_constraint(schema, psi)
    check_constraint(schema, phi)
    if psi not in s:
        raise ValueError(f"{psi.format(schema)} is not a member of Σ_{n}")
    if isinstance(phi, IA) and not phi.is_unary:
        raise ValueError(f"{phi.format(schema)} is not a unary atom")
    if phi in upward_closure(s):
        raise ValueError(f"{phi.format(schema)} is in the upward closure of Σ_{n}; it is finitely implied")

    if isinstance(psi, Key):
        k = next(j for j in range(1, n + 1) if s.key(j) == psi)
        tau = _rotation(n, n - k)
        flip = _reflection(n, 1)
    else:
        k = next(j for j in range(1, n + 1) if s.ia(j).normalized() == psi.normalized())
        tau = _rotation(n, 1 - k)
        flip = _reflection(n, 2)
    target = _map_constraint(phi, tau)
    if isinstance(target, IA):
        if all(_parse_attr(x)[0] == "B" for x in target.attributes):
            tau = _compose(tau, flip)
            target = _map_constraint(phi, tau)
        if _parse_attr(next(iter(target.left)))[0] != "A":
            target = target.flipped()

    if isinstance(target, Key):
        if isinstance(psi, Key):
            canon, lemma, part = lemma3_model(n, target.attrs), 3, "r"
        else:
            canon, lemma, part = lemma4_model(n, target.attrs), 4, "r"
    else:
        (x,), (y,) = tuple(target.left), tuple(target.right)
        i = _parse_attr(x)[1]
        side, j = _parse_attr(y)
        if isinstance(psi, Key):
            lemma = 5
            r, r2 = lemma5_models(n, i)
            use_r = j <= i if side == "A" else j > i
            canon, part = (r, "r") if use_r else (r2, "r'")
        else:
            lemma = 6
            r0, r1, r2, r3 = lemma6_models(n, i)
            if side == "A":
                canon, part = r0, "r0"
            elif i == 1:
                canon, part = r1, "r1"
            elif j < i:
                canon, part = r2, "r2"
            else:
                canon, part = r3, "r3"

    inverse = {v: x for x, v in tau.items()}
    rel = canon.rename(schema, inverse)
    check = verify_countermodel(rel, s.without(psi), phi)
    if not check.ok:
        raise InvariantViolation(f"dispatched model fails its check for ψ={psi.format(schema)}, φ={phi.format(schema)}")
    return Theorem3Result(rel, psi, phi, lemma, part, tau, check)


# ---------------------------------------------------------------------------
# bounded finite-model search
# ---------------------------------------------------------------------------

DEFAULT_SEARCH_LIMIT = 2_000_000


class SearchTooLarge(RuntimeError):
    pass


def _growth_strings(length: int, max_values: int) -> list[tuple[int, ...]]:
    """Column patterns up to renaming: each value first appears right after the previous maximum."""
    out = []

    def rec(prefix: list[int], top: int) -> None:
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        for v in range(min(top + 2, max_values)):
            rec(prefix + [v], max(top, v))

    if length == 0:
        return [()]
    rec([0], 0)
    return out


def search_space_size(width: int, max_tuples: int, max_values: int) -> int:
    """Number of candidate relations (before dropping duplicate rows)."""
    return sum(len(_growth_strings(t, max_values)) ** width for t in range(max_tuples + 1))


def enumerate_relations(schema: Schema, max_tuples: int, max_values: int, limit: int = DEFAULT_SEARCH_LIMIT) -> Iterator[Relation]:
    """All relations with at most ``max_tuples`` rows and ``max_values`` values per column.

    Values in each column are numbered by first occurrence, which removes
    most renaming duplicates; remaining isomorphic copies are harmless for
    exhaustive checks.  Order: by size, then lexicographic in the column patterns.
    """
    if max_tuples < 0 or max_values < 1:
        raise ValueError("bounds must be non-negative (and at least one value)")
    total = search_space_size(len(schema), max_tuples, max_values)
    if total > limit:
        raise SearchTooLarge(f"{total} candidate relations exceed the limit {limit}")
    seen: set[frozenset] = set()
    for t in range(max_tuples + 1):
        patterns = _growth_strings(t, max_values)
        for combo in itertools.product(patterns, repeat=len(schema)):
            rows = list(zip(*combo)) if t else []
            if len(set(rows)) != t:
                continue
            key_ = frozenset(rows)
            if key_ in seen:
                continue
            seen.add(key_)
            yield Relation(schema, np.array(sorted(rows), dtype=np.int64).reshape(t, len(schema)), distinct=True)


def bounded_search(sigma: ConstraintSet, phi: Constraint, max_tuples: int, max_values: int, limit: int = DEFAULT_SEARCH_LIMIT) -> Relation | None:
    """The first enumerated ``r`` with ``r ⊨ Σ`` and ``r ⊭ φ``, or ``None``.

    ``None`` only means that no counterexample exists within the bounds.
    """
    check_constraint(sigma.schema, phi)
    for r in enumerate_relations(sigma.schema, max_tuples, max_values, limit):
        if not satisfies(r, phi).holds and satisfies_all(r, sigma).all_hold:
            return r
    return None


# ---------------------------------------------------------------------------
# bounded-arity demonstration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KaryReport:
    n: int
    pairs: int
    verified: int
    max_model_size: int
    by_lemma: dict[int, int]
    gap_atom: str
    gap_in_closure: bool
    gap_bounded_search: str
    closure_size: int
    reduction: str

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pairs": self.pairs,
            "verified": self.verified,
            "max_model_size": self.max_model_size,
            "by_lemma": {str(k): v for k, v in sorted(self.by_lemma.items())},
            "closure_size": self.closure_size,
            "gap_atom": self.gap_atom,
            "gap_in_closure": self.gap_in_closure,
            "gap_bounded_search": self.gap_bounded_search,
            "reduction": self.reduction,
        }


def kary_demo(n: int) -> KaryReport:
    """Check every pair (ψ ∈ Σ_n, φ ∉ C↑(Σ_n)) and summarise the arity gap."""
    if n not in (2, 3):
        raise ValueError("kary_demo runs at desk scale only: n must be 2 or 3")
    s = sigma_n(n)
    closure = upward_closure(s)
    targets = [phi for phi in candidate_targets(n) if phi not in closure]
    pairs = verified = biggest = 0
    by_lemma: dict[int, int] = {}
    for psi in s:
        for phi in targets:
            res = theorem3_countermodel(n, psi, phi)
            pairs += 1
            verified += res.check.ok
            biggest = max(biggest, len(res.relation))
            by_lemma[res.lemma] = by_lemma.get(res.lemma, 0) + 1
    gap = Key(frozenset({"A1", "B1"}))
    found = bounded_search(s.constraints, gap, 3, 3)
    reduction = (
        f"A rule with at most {2 * n - 1} premises drawn from Σ_{n} uses a subset missing some ψ, "
        f"so its conclusion is a finite consequence of Σ_{n} minus ψ and lies in C↑(Σ_{n}); "
        f"key(A1 B1) is finitely implied by Σ_{n} but lies outside C↑(Σ_{n})."
    )
    return KaryReport(
        n=n,
        pairs=pairs,
        verified=verified,
        max_model_size=biggest,
        by_lemma=by_lemma,
        gap_atom=gap.format(s.schema),
        gap_in_closure=gap in closure,
        gap_bounded_search="none within 3 tuples / 3 values" if found is None else "found a counterexample",
        closure_size=len(closure),
        reduction=reduction,
    )
