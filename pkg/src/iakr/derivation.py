"""The nine inference rules for keys and independence atoms.

``saturate`` computes the closure of a constraint set inside the finite
universe ``{key(B) : B ⊆ R} ∪ {X ⊥ Y : X, Y ⊆ R}``.  No rule leads outside
that universe, so membership in the closure is exactly derivability.  Each
member carries the first proof tree found for it.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

from .core import IA, Constraint, ConstraintSet, Key, Schema, SchemaError, check_constraint

DEFAULT_SCHEMA_CAP = 6


class RuleError(ValueError):
    """A rule was applied to premises that do not fit its template."""


class Rule(Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    R5 = "R5"
    R6 = "R6"
    R7 = "R7"
    R8 = "R8"
    R9 = "R9"

    @property
    def title(self) -> str:
        return _TITLES[self]

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def variables(self) -> tuple[str, ...]:
        return _VARIABLES[self]


_TITLES = {
    Rule.R1: "trivial independence",
    Rule.R2: "symmetry",
    Rule.R3: "constancy",
    Rule.R4: "decomposition",
    Rule.R5: "exchange",
    Rule.R6: "trivial key",
    Rule.R7: "upward closure",
    Rule.R8: "1st composition",
    Rule.R9: "2nd composition",
}
_ARITY = {Rule.R1: 0, Rule.R6: 0, Rule.R2: 1, Rule.R4: 1, Rule.R7: 1, Rule.R3: 2, Rule.R5: 2, Rule.R8: 2, Rule.R9: 2}
_VARIABLES = {
    Rule.R1: ("X",),
    Rule.R2: ("X", "Y"),
    Rule.R3: ("X", "Y", "Z"),
    Rule.R4: ("X", "Y", "Z"),
    Rule.R5: ("X", "Y", "Z"),
    Rule.R6: (),
    Rule.R7: ("X", "Y"),
    Rule.R8: ("X", "Y"),
    Rule.R9: ("X", "Y"),
}

HYPOTHESIS = "hypothesis"


@dataclass(frozen=True, eq=False)
class ProofTree:
    """A derivation: ``rule`` applied to the conclusions of ``premises``.

    Leaves use ``rule == "hypothesis"``.  Subtrees may be shared, so a tree
    is really a DAG; every traversal here memoizes on node identity.
    """

    conclusion: Constraint
    rule: Rule | str
    premises: tuple[ProofTree, ...] = ()
    instantiation: Mapping[str, frozenset[str]] = field(default_factory=dict)

    @property
    def is_hypothesis(self) -> bool:
        return self.rule == HYPOTHESIS

    def nodes(self) -> Iterator[ProofTree]:
        """Distinct nodes, premises before conclusions."""
        seen: set[int] = set()
        stack: list[tuple[ProofTree, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in seen:
                continue
            if expanded:
                seen.add(id(node))
                yield node
            else:
                stack.append((node, True))
                stack.extend((p, False) for p in reversed(node.premises) if id(p) not in seen)

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def hypotheses(self) -> set[Constraint]:
        return {n.conclusion for n in self.nodes() if n.is_hypothesis}

    def rules_used(self) -> set[Rule]:
        return {n.rule for n in self.nodes() if not n.is_hypothesis}

    def to_dict(self, schema: Schema | None = None) -> dict:
        memo: dict[int, dict] = {}
        for node in self.nodes():
            d = {
                "conclusion": node.conclusion.format(schema),
                "rule": node.rule if node.is_hypothesis else node.rule.value,
            }
            if not node.is_hypothesis:
                d["instantiation"] = {v: _fmt(node.instantiation.get(v, frozenset()), schema) for v in node.rule.variables}
            d["premises"] = [memo[id(p)] for p in node.premises]
            memo[id(node)] = d
        return memo[id(self)]

    @classmethod
    def from_dict(cls, d: dict, schema: Schema) -> ProofTree:
        from .core import parse_constraint

        conclusion = parse_constraint(d["conclusion"], schema)
        premises = tuple(cls.from_dict(p, schema) for p in d.get("premises", ()))
        if d["rule"] == HYPOTHESIS:
            return cls(conclusion, HYPOTHESIS, premises)
        inst = {v: schema.attrset(names) for v, names in d.get("instantiation", {}).items()}
        return cls(conclusion, Rule(d["rule"]), premises, inst)


def _fmt(attrs: frozenset[str], schema: Schema | None) -> list[str]:
    return schema.ordered(attrs) if schema else sorted(attrs)


# ---------------------------------------------------------------------------
# single rule applications
# ---------------------------------------------------------------------------


def _ia(c: Constraint, what: str) -> IA:
    if not isinstance(c, IA):
        raise RuleError(f"{what} must be an independence atom, got {c}")
    return c


def _key(c: Constraint, what: str) -> Key:
    if not isinstance(c, Key):
        raise RuleError(f"{what} must be a key, got {c}")
    return c


def _match(actual: frozenset, expected: frozenset, what: str) -> None:
    if actual != expected:
        raise RuleError(f"{what}: expected {{{' '.join(sorted(expected))}}}, got {{{' '.join(sorted(actual))}}}")


def apply_rule(rule: Rule | str, instantiation: Mapping[str, Iterable[str]], premises: list[Constraint], schema: Schema) -> Constraint:
    """Conclusion of ``rule`` under ``instantiation`` from ``premises``.

    Raises :class:`RuleError` on arity or template mismatch and
    :class:`~iakr.core.SchemaError` for attributes outside ``schema``.
    """
    rule = Rule(rule)
    premises = list(premises)
    if len(premises) != rule.arity:
        raise RuleError(f"{rule.value} takes {rule.arity} premise(s), got {len(premises)}")
    for c in premises:
        check_constraint(schema, c)
    inst = {}
    for v in rule.variables:
        if v not in instantiation:
            raise RuleError(f"{rule.value} needs a binding for {v}")
        inst[v] = schema.attrset(instantiation[v])
    extra = set(instantiation) - set(rule.variables)
    if any(frozenset(instantiation[v]) for v in extra):
        raise RuleError(f"{rule.value} has no metavariable(s) {sorted(extra)}")
    X, Y, Z = inst.get("X"), inst.get("Y"), inst.get("Z")

    if rule is Rule.R1:
        return IA(frozenset(), X)
    if rule is Rule.R6:
        return Key(schema.all_attributes)
    if rule is Rule.R2:
        p = _ia(premises[0], "premise")
        _match(p.left, X, "R2 premise left side")
        _match(p.right, Y, "R2 premise right side")
        return IA(Y, X)
    if rule is Rule.R3:
        p, q = _ia(premises[0], "first premise"), _ia(premises[1], "second premise")
        _match(p.left, X, "R3 first premise left side")
        _match(p.right, X, "R3 first premise right side")
        _match(q.left, Y, "R3 second premise left side")
        _match(q.right, Z, "R3 second premise right side")
        return IA(X | Y, Z)
    if rule is Rule.R4:
        p = _ia(premises[0], "premise")
        _match(p.left, X, "R4 premise left side")
        _match(p.right, Y | Z, "R4 premise right side")
        return IA(X, Y)
    if rule is Rule.R5:
        p, q = _ia(premises[0], "first premise"), _ia(premises[1], "second premise")
        _match(p.left, X, "R5 first premise left side")
        _match(p.right, Y, "R5 first premise right side")
        _match(q.left, X | Y, "R5 second premise left side")
        _match(q.right, Z, "R5 second premise right side")
        return IA(X, Y | Z)
    if rule is Rule.R7:
        p = _key(premises[0], "premise")
        _match(p.attrs, X, "R7 premise")
        return Key(X | Y)
    if rule is Rule.R8:
        p, q = _ia(premises[0], "first premise"), _key(premises[1], "second premise")
        _match(p.left, X, "R8 first premise left side")
        _match(p.right, X, "R8 first premise right side")
        _match(q.attrs, X | Y, "R8 key premise")
        return Key(Y)
    # R9
    p, q = _ia(premises[0], "first premise"), _key(premises[1], "second premise")
    _match(p.left, X, "R9 first premise left side")
    _match(p.right, Y, "R9 first premise right side")
    _match(q.attrs, X, "R9 key premise")
    return IA(Y, Y)


def derive(rule: Rule | str, premises: Iterable[ProofTree], schema: Schema, **instantiation: Iterable[str]) -> ProofTree:
    """Build a rule node, computing (and thereby checking) its conclusion."""
    premises = tuple(premises)
    rule = Rule(rule)
    inst = {v: schema.attrset(instantiation.get(v, ())) for v in rule.variables}
    conclusion = apply_rule(rule, inst, [p.conclusion for p in premises], schema)
    return ProofTree(conclusion, rule, premises, inst)


def hypothesis(c: Constraint) -> ProofTree:
    return ProofTree(c, HYPOTHESIS)


# ---------------------------------------------------------------------------
# proof checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProofCheck:
    ok: bool
    failing: ProofTree | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_proof(proof: ProofTree, sigma: ConstraintSet) -> ProofCheck:
    """Accept iff every leaf is literally a member of ``sigma`` and every rule
    node re-derives its conclusion.  Reports the first failing node."""
    schema = sigma.schema
    for node in proof.nodes():
        if node.is_hypothesis:
            if node.premises:
                return ProofCheck(False, node, "hypothesis node with premises")
            if node.conclusion not in sigma:
                return ProofCheck(False, node, f"hypothesis {node.conclusion.format(schema)} is not in the constraint set")
            continue
        try:
            rule = Rule(node.rule)
            got = apply_rule(rule, node.instantiation, [p.conclusion for p in node.premises], schema)
        except (RuleError, SchemaError, ValueError) as exc:
            return ProofCheck(False, node, str(exc))
        if got != node.conclusion:
            return ProofCheck(False, node, f"{rule.value} yields {got.format(schema)}, node claims {node.conclusion.format(schema)}")
    return ProofCheck(True)


# ---------------------------------------------------------------------------
# saturation
# ---------------------------------------------------------------------------


def default_schema_cap() -> int:
    raw = os.environ.get("IAKR_SCHEMA_CAP")
    return int(raw) if raw else DEFAULT_SCHEMA_CAP


class SchemaTooLarge(ValueError):
    pass


class Saturation:
    """All constraints derivable from ``sigma``, each with one proof."""

    def __init__(self, schema: Schema, sigma: ConstraintSet, proofs: dict[Constraint, ProofTree]):
        self.schema = schema
        self.sigma = sigma
        self.proofs = proofs

    def __contains__(self, c: object) -> bool:
        return c in self.proofs

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self.proofs)

    def __len__(self) -> int:
        return len(self.proofs)

    @property
    def members(self) -> frozenset[Constraint]:
        return frozenset(self.proofs)

    @property
    def keys(self) -> list[Key]:
        return [c for c in self.proofs if isinstance(c, Key)]

    @property
    def ias(self) -> list[IA]:
        return [c for c in self.proofs if isinstance(c, IA)]

    def proof(self, c: Constraint) -> ProofTree:
        return self.proofs[c]

    def constants(self) -> frozenset[str]:
        return frozenset(a for a in self.schema.attributes if IA(frozenset({a}), frozenset({a})) in self.proofs)


def _submasks(m: int) -> Iterator[int]:
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m


def saturate(sigma: ConstraintSet, schema: Schema | None = None, cap: int | None = None) -> Saturation:
    """Least fixpoint of all rule applications over the schema's universe.

    Facts are processed in order of their encoding (keys before IAs, then by
    attribute bitmask), so the attached proofs are reproducible.
    """
    schema = schema or sigma.schema
    if schema != sigma.schema:
        raise SchemaError("constraint set and schema differ")
    cap = default_schema_cap() if cap is None else cap
    if len(schema) > cap:
        raise SchemaTooLarge(f"schema has {len(schema)} attributes; saturation is capped at {cap} (set IAKR_SCHEMA_CAP to raise it)")

    full = (1 << len(schema)) - 1
    sets = [schema.from_mask(m) for m in range(full + 1)]
    proofs: dict[tuple, ProofTree] = {}
    heap: list[tuple] = []

    def fact_constraint(f: tuple) -> Constraint:
        if f[0] == 0:
            return Key(sets[f[1]])
        return IA(sets[f[1]], sets[f[2]])

    def add(f: tuple, rule: Rule, premises: tuple, **inst: int) -> None:
        if f in proofs:
            return
        node = ProofTree(
            fact_constraint(f),
            rule,
            tuple(proofs[p] for p in premises),
            {v: sets[inst.get(v, 0)] for v in rule.variables},
        )
        proofs[f] = node
        heapq.heappush(heap, f)

    for c in sigma:
        if isinstance(c, Key):
            f = (0, schema.mask(c.attrs))
        else:
            f = (1, schema.mask(c.left), schema.mask(c.right))
        if f not in proofs:
            proofs[f] = ProofTree(c, HYPOTHESIS)
            heapq.heappush(heap, f)
    for x in range(full + 1):
        add((1, 0, x), Rule.R1, (), X=x)
    add((0, full), Rule.R6, ())

    keys: set[int] = set()
    consts: set[int] = set()
    ias: list[tuple[int, int]] = []
    by_left: dict[int, list[int]] = {}
    by_union: dict[int, list[tuple[int, int]]] = {}

    while heap:
        f = heapq.heappop(heap)
        if f[0] == 0:
            k = f[1]
            keys.add(k)
            # R7: key(X) / key(XY)
            rest = full & ~k
            for s in _submasks(rest):
                add((0, k | s), Rule.R7, (f,), X=k, Y=s)
            # R8: X⊥X, key(XY) / key(Y)   with X ⊆ k, Y = k \ X
            for c in sorted(consts):
                if c & ~k == 0:
                    add((0, k & ~c), Rule.R8, ((1, c, c), f), X=c, Y=k & ~c)
            # R9: X⊥Y, key(X) / Y⊥Y
            for y in sorted(by_left.get(k, ())):
                add((1, y, y), Rule.R9, ((1, k, y), f), X=k, Y=y)
            continue

        _, x, y = f
        ias.append((x, y))
        by_left.setdefault(x, []).append(y)
        by_union.setdefault(x | y, []).append((x, y))
        if x == y:
            consts.add(x)
        # R2
        add((1, y, x), Rule.R2, (f,), X=x, Y=y)
        # R4: X⊥YZ / X⊥Y
        for s in _submasks(y):
            add((1, x, s), Rule.R4, (f,), X=x, Y=s, Z=y & ~s)
        # R3 with f as the constancy premise
        if x == y:
            for a, b in list(ias):
                add((1, x | a, b), Rule.R3, (f, (1, a, b)), X=x, Y=a, Z=b)
        # R3 with f as the second premise
        for c in sorted(consts):
            add((1, c | x, y), Rule.R3, ((1, c, c), f), X=c, Y=x, Z=y)
        # R5 with f as X⊥Y
        for z in list(by_left.get(x | y, ())):
            add((1, x, y | z), Rule.R5, (f, (1, x | y, z)), X=x, Y=y, Z=z)
        # R5 with f as XY⊥Z
        for a, b in list(by_union.get(x, ())):
            add((1, a, b | y), Rule.R5, ((1, a, b), f), X=a, Y=b, Z=y)
        # R8 with f as the constancy premise
        if x == y:
            for k in sorted(keys):
                if x & ~k == 0:
                    add((0, k & ~x), Rule.R8, (f, (0, k)), X=x, Y=k & ~x)
        # R9 with f as X⊥Y
        if x in keys:
            add((1, y, y), Rule.R9, (f, (0, x)), X=x, Y=y)

    return Saturation(schema, sigma, {node.conclusion: node for node in proofs.values()})
