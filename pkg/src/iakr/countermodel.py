"""Chase-style countermodels for non-implied keys and independence atoms.

The infinite countermodels are built as increasing chains of finite
relations.  Each round repairs one scheduled independence atom by adding,
for every missing value pair, a tuple carrying the pair, zeros on the
constant attributes and fresh values everywhere else.  A prefix satisfies
all keys and the atom repaired last; only the union over all rounds
satisfies every atom at once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import IA, Constraint, ConstraintSet, Key, Relation, Schema, _group_ids
from .decision import constant_attributes, implies_general
from .semantics import SatisfactionReport, Verdict, satisfies, satisfies_all

DEFAULT_MAX_TUPLES = 20_000_000


class PreconditionError(ValueError):
    """The target constraint is implied, so no countermodel exists."""


class ChaseTooLarge(RuntimeError):
    pass


class InvariantViolation(AssertionError):
    """A construction produced a relation breaking its stated guarantees."""


@dataclass(frozen=True)
class ChasePrefix:
    relation: Relation
    rounds_done: int
    schedule: tuple[IA, ...]
    target: Constraint
    constant_set: frozenset[str]
    fresh_counter: int
    seed: tuple[tuple, ...]

    @property
    def schema(self) -> Schema:
        return self.relation.schema

    def scheduled_atom(self) -> IA | None:
        """The atom repaired in the last round, if any."""
        if self.rounds_done == 0 or not self.schedule:
            return None
        return self.schedule[(self.rounds_done - 1) % len(self.schedule)]

    def manifest(self) -> dict:
        schema = self.schema
        guarantees = [
            "every key of the constraint set holds in this prefix",
            f"target {self.target.format(schema)} is violated by the seed tuples",
        ]
        if self.constant_set:
            guarantees.append(f"columns {' '.join(schema.ordered(self.constant_set))} are constantly 0")
        atom = self.scheduled_atom()
        if atom is not None:
            guarantees.append(f"{atom.format(schema)} (repaired in round {self.rounds_done}) holds in this prefix")
        guarantees.append("other atoms hold only in the union of all rounds")
        return {
            "seed": [list(t) for t in self.seed],
            "schedule": [c.format(schema) for c in self.schedule],
            "rounds": self.rounds_done,
            "tuples": len(self.relation),
            "target": self.target.format(schema),
            "constant_set": schema.ordered(self.constant_set),
            "guarantees": guarantees,
        }

    def manifest_json(self) -> str:
        return json.dumps(self.manifest(), indent=2)


def _missing_count(data: np.ndarray, x: int, y: int) -> int:
    cx = len(np.unique(data[:, x]))
    cy = len(np.unique(data[:, y]))
    return cx * cy - _group_ids(data, [x, y])[1]


def _missing_pairs(data: np.ndarray, x: int, y: int) -> tuple[np.ndarray, np.ndarray]:
    """``r(X) × r(Y) \\ r(XY)`` for single columns, in lexicographic order."""
    ux = np.unique(data[:, x])
    uy = np.unique(data[:, y])
    radix = int(uy.max()) + 1
    gx = np.repeat(ux, len(uy))
    gy = np.tile(uy, len(ux))
    present = np.unique(data[:, x] * radix + data[:, y])
    keep = ~np.isin(gx * radix + gy, present, assume_unique=True)
    return gx[keep], gy[keep]


def _extend(data: np.ndarray, x: int, y: int, zero_cols: list[int], fresh_base: int, stride: int, max_tuples: int) -> np.ndarray:
    k = _missing_count(data, x, y)
    if k == 0:
        return data
    if data.shape[0] + k > max_tuples:
        raise ChaseTooLarge(f"next round would grow the relation to {data.shape[0] + k} tuples (limit {max_tuples})")
    a, b = _missing_pairs(data, x, y)
    width = data.shape[1]
    i = np.arange(1, k + 1, dtype=np.int64)[:, None]
    j = np.arange(1, width + 1, dtype=np.int64)[None, :]
    new = fresh_base + i * stride + j
    new[:, zero_cols] = 0
    new[:, x] = a
    new[:, y] = b
    return np.vstack([data, new])


def theorem2_chain(sigma: ConstraintSet, phi: Constraint, max_tuples: int = DEFAULT_MAX_TUPLES) -> Iterator[ChasePrefix]:
    """Yield the prefixes ``r_0 ⊆ r_1 ⊆ ...`` refuting ``Σ ⊨ φ``.

    With attributes ``A_1..A_M`` in schema order, the seed tuples are
    ``t_0(A_i) = 0`` / ``t_1(A_i) = 0`` on the constant set (and on ``D``
    when ``φ = key(D)``), and ``i`` / ``M + i`` elsewhere.  Round ``n``
    repairs atom ``((n - 1) mod N) + 1`` of the schedule; the fresh value of
    the ``i``-th new tuple in column ``j`` is ``m + i*M + j`` where ``m`` is
    the largest value present.
    """
    answer = implies_general(sigma, phi)
    if answer.implied:
        raise PreconditionError(f"{phi.format(sigma.schema)} is implied; there is no countermodel")
    schema = sigma.schema
    consts = constant_attributes(sigma).attrs
    M = len(schema)
    zero = set(consts)
    if isinstance(phi, Key):
        zero |= phi.attrs
    t0 = [0 if a in zero else i for i, a in enumerate(schema.attributes, start=1)]
    t1 = [0 if a in zero else M + i for i, a in enumerate(schema.attributes, start=1)]
    seed = (tuple(t0), tuple(t1))
    data = np.array(seed, dtype=np.int64)
    schedule = sigma.ias
    zero_cols = schema.columns(consts)

    n = 0
    while True:
        rel = Relation(schema, data, distinct=True)
        prefix = ChasePrefix(rel, n, schedule, phi, consts, int(data.max()) + 1, seed)
        _check_prefix(prefix, sigma)
        yield prefix
        n += 1
        if not schedule:
            continue
        atom = schedule[(n - 1) % len(schedule)]
        if atom.is_trivial or satisfies(rel, atom).holds:
            continue
        (xa,), (ya,) = tuple(atom.left), tuple(atom.right)
        data = _extend(data, schema.index(xa), schema.index(ya), zero_cols, int(data.max()), M, max_tuples)


def theorem2_prefix(sigma: ConstraintSet, phi: Constraint, rounds: int | None = None, max_tuples: int = DEFAULT_MAX_TUPLES) -> ChasePrefix:
    """The prefix after ``rounds`` rounds (default ``3 * |Σ_i|``); ``0`` gives the seed."""
    if rounds is None:
        rounds = 3 * len(sigma.ias)
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    for prefix in theorem2_chain(sigma, phi, max_tuples):
        if prefix.rounds_done == rounds:
            return prefix
    raise AssertionError("unreachable")


def finite_chase_model(sigma: ConstraintSet, phi: Constraint, max_rounds: int | None = None, max_tuples: int = 100_000) -> ChasePrefix | None:
    """Run the chase until a full pass over the schedule adds nothing.

    At that point every atom holds in the same finite relation, so the
    prefix is an honest finite countermodel.  Returns ``None`` when no such
    pass happens within ``max_rounds`` rounds (default ``10 * |Σ_i|``) or
    the relation outgrows ``max_tuples``.
    """
    n_atoms = len(sigma.ias)
    if max_rounds is None:
        max_rounds = 10 * max(n_atoms, 1)
    last_size, stable = -1, 0
    try:
        for prefix in theorem2_chain(sigma, phi, max_tuples):
            size = len(prefix.relation)
            stable = stable + 1 if size == last_size else 0
            last_size = size
            if stable >= n_atoms:
                return prefix if verify_countermodel(prefix.relation, sigma, phi).ok else None
            if prefix.rounds_done >= max_rounds:
                return None
    except ChaseTooLarge:
        return None
    return None


def _check_prefix(prefix: ChasePrefix, sigma: ConstraintSet) -> None:
    r = prefix.relation
    schema = r.schema
    if prefix.constant_set:
        cols = schema.columns(prefix.constant_set)
        if np.any(r.data[:, cols] != 0):
            raise InvariantViolation("constant columns are not all zero")
    for k in sigma.keys:
        if not satisfies(r, k).holds:
            raise InvariantViolation(f"{k.format(schema)} fails after round {prefix.rounds_done}")
    atom = prefix.scheduled_atom()
    if atom is not None and not satisfies(r, atom).holds:
        raise InvariantViolation(f"scheduled atom {atom.format(schema)} fails after round {prefix.rounds_done}")
    if not _seed_violates(prefix):
        raise InvariantViolation(f"target {prefix.target.format(schema)} no longer violated")


def _seed_violates(prefix: ChasePrefix) -> bool:
    r = prefix.relation
    schema = r.schema
    t0, t1 = prefix.seed
    phi = prefix.target
    if isinstance(phi, Key):
        cols = schema.columns(phi.attrs)
        return t0 != t1 and all(t0[j] == t1[j] for j in cols)
    xs = schema.columns(phi.left)
    ys = schema.columns(phi.right)
    hit = np.ones(len(r), dtype=bool)
    for j in xs:
        hit &= r.data[:, j] == t0[j]
    for j in ys:
        hit &= r.data[:, j] == t1[j]
    return not hit.any()


# ---------------------------------------------------------------------------
# the two-pair chain over A1 B1 A2 B2
# ---------------------------------------------------------------------------


def sigma2_schema() -> Schema:
    return Schema("R2", ("A1", "B1", "A2", "B2"))


def lemma2_chain(depth: int, *, as_printed: bool = False, max_tuples: int = DEFAULT_MAX_TUPLES) -> ChasePrefix:
    """Prefix ``r_depth`` of the infinite model of Σ_2 violating ``key(A1 B1)``."""
    prefix = None
    for prefix in iter_lemma2_chain(depth, as_printed=as_printed, max_tuples=max_tuples):
        pass
    return prefix


def iter_lemma2_chain(depth: int, *, as_printed: bool = False, max_tuples: int = DEFAULT_MAX_TUPLES) -> Iterator[ChasePrefix]:
    """Yield ``r_1, ..., r_depth``.

    ``r_1 = {(0,0,1,2), (0,0,3,4)}``.  Step ``n -> n+1`` completes the
    missing ``A2 B2`` pairs when ``n+1`` is even and the ``A1 B1`` pairs when
    it is odd; the completed pair goes in the columns of that atom and the
    other two columns get ``m+2i-1, m+2i``.  ``as_printed=True`` instead puts
    the pair in the opposite columns, reproducing the displayed tuple
    ``(a_i, b_i, m+2i-1, m+2i)`` literally; those prefixes do not satisfy
    the scheduled atom.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    schema = sigma2_schema()
    seed = ((0, 0, 1, 2), (0, 0, 3, 4))
    data = np.array(seed, dtype=np.int64)
    schedule = (IA(frozenset({"A1"}), frozenset({"B1"})), IA(frozenset({"A2"}), frozenset({"B2"})))
    target = Key(frozenset({"A1", "B1"}))
    for n in range(1, depth + 1):
        if n > 1:
            even = n % 2 == 0
            src = (2, 3) if even else (0, 1)
            dst = src
            if as_printed:
                dst = (0, 1) if even else (2, 3)
            other = tuple(c for c in range(4) if c not in dst)
            k = _missing_count(data, *src)
            if len(data) + k > max_tuples:
                raise ChaseTooLarge(f"r_{n} would have {len(data) + k} tuples (limit {max_tuples})")
            if k:
                a, b = _missing_pairs(data, *src)
                m = int(data.max())
                i = np.arange(1, k + 1, dtype=np.int64)
                new = np.empty((k, 4), dtype=np.int64)
                new[:, dst[0]], new[:, dst[1]] = a, b
                new[:, other[0]], new[:, other[1]] = m + 2 * i - 1, m + 2 * i
                data = np.vstack([data, new])
        rel = Relation(schema, data, distinct=True)
        # r_n is indexed from 1 and r_1 satisfies A1 ⊥ B1, so odd n maps to schedule[0]
        yield ChasePrefix(rel, n, schedule, target, frozenset(), int(data.max()) + 1, seed)


def lemma2_prefix_holds(prefix: ChasePrefix) -> dict[str, bool]:
    """Items checked for each prefix: both keys, the atom of the round, the violated target."""
    r = prefix.relation
    atom = prefix.schedule[0] if prefix.rounds_done % 2 == 1 else prefix.schedule[1]
    return {
        "key(B2 A1)": satisfies(r, Key(frozenset({"B2", "A1"}))).holds,
        "key(B1 A2)": satisfies(r, Key(frozenset({"B1", "A2"}))).holds,
        atom.format(r.schema): satisfies(r, atom).holds,
        "violates key(A1 B1)": not satisfies(r, prefix.target).holds,
    }


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CountermodelCheck:
    sigma_report: SatisfactionReport
    target: Verdict

    @property
    def ok(self) -> bool:
        return self.sigma_report.all_hold and not self.target.holds

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self, schema=None) -> dict:
        return {
            "verified": self.ok,
            "sigma": self.sigma_report.to_dict(schema),
            "target": self.target.to_dict(schema),
        }


def verify_countermodel(r: Relation, sigma: ConstraintSet, phi: Constraint) -> CountermodelCheck:
    """``r ⊨ Σ`` and ``r ⊭ φ``, with both sub-reports."""
    return CountermodelCheck(satisfies_all(r, sigma), satisfies(r, phi))
