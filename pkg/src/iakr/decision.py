"""General implication for keys and unary independence atoms.

Everything hinges on the constant set ``R' = {A : Σ ⊢ A ⊥ A}``:

* ``Σ ⊨ key(D)``  iff some ``key(B)`` in ``Σ ∪ {key(R)}`` has ``B \\ R' ⊆ D``;
* ``Σ ⊨ A ⊥ B``   iff ``A ⊥ B`` or ``B ⊥ A`` is in Σ, or ``A`` or ``B`` is in ``R'``.

Positive answers come with proof trees over the nine rules; negative answers
name the chase construction that refutes them (see :mod:`iakr.countermodel`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import IA, Constraint, ConstraintSet, Key, Schema, check_constraint
from .derivation import HYPOTHESIS, ProofTree, Rule, derive, hypothesis


class UnsupportedConstraint(ValueError):
    """Input outside keys + unary independence atoms."""


def _check_sigma(sigma: ConstraintSet) -> None:
    for c in sigma:
        if isinstance(c, IA) and not (c.is_unary or c.is_trivial):
            raise UnsupportedConstraint(
                f"{c.format(sigma.schema)} is not unary; only keys and unary independence atoms are decided here "
                "(use derivation.saturate for a sound check on small schemas)"
            )


@dataclass(frozen=True)
class _Reason:
    kind: str  # "hypothesis", "composition" or "empty-key"
    ia: IA | None = None
    via: str | None = None  # attribute whose key feeds R9
    key: frozenset[str] | None = None
    stripped: frozenset[str] = frozenset()


@dataclass
class ConstantSet:
    """``R'`` together with the order and reason each attribute entered it."""

    sigma: ConstraintSet
    attrs: frozenset[str]
    order: tuple[str, ...]
    reasons: dict[str, _Reason] = field(repr=False)
    _proofs: dict = field(default_factory=dict, repr=False)

    def __contains__(self, a: object) -> bool:
        return a in self.attrs

    @property
    def schema(self) -> Schema:
        return self.sigma.schema

    # proofs -----------------------------------------------------------------

    def _key_hyp(self, attrs: frozenset[str]) -> ProofTree:
        k = Key(attrs)
        if k in self.sigma:
            return hypothesis(k)
        return derive(Rule.R6, (), self.schema)

    def constancy_proof(self, a: str) -> ProofTree:
        """Proof of ``a ⊥ a``."""
        memo = self._proofs
        if ("const", a) in memo:
            return memo[("const", a)]
        schema = self.schema
        why = self.reasons[a]
        if why.kind == HYPOTHESIS:
            p = hypothesis(why.ia)
        elif why.kind == "empty-key":
            k0 = self.stripped_key_proof(why.key, why.stripped)
            triv = derive(Rule.R1, (), schema, X={a})
            p = derive(Rule.R9, (triv, k0), schema, X=(), Y={a})
        else:
            b = why.via
            ia = why.ia
            ab = hypothesis(ia)
            if ia.left != {b}:
                ab = derive(Rule.R2, (ab,), schema, X=ia.left, Y=ia.right)
            kb = self.stripped_key_proof(why.key, why.stripped)
            if not kb.conclusion.attrs:
                kb = derive(Rule.R7, (kb,), schema, X=(), Y={b})
            p = derive(Rule.R9, (ab, kb), schema, X={b}, Y={a})
        memo[("const", a)] = p
        return p

    def block_proof(self, attrs) -> ProofTree:
        """Proof of ``S ⊥ S`` for a set ``S`` of constant attributes."""
        attrs = frozenset(attrs)
        memo = self._proofs
        if ("block", attrs) in memo:
            return memo[("block", attrs)]
        schema = self.schema
        if not attrs:
            p = derive(Rule.R1, (), schema, X=())
        else:
            members = [a for a in self.order if a in attrs]
            *init, last = members
            if not init:
                p = self.constancy_proof(last)
            else:
                s = frozenset(init)
                ss = self.block_proof(s)
                aa = self.constancy_proof(last)
                step = derive(Rule.R3, (aa, ss), schema, X={last}, Y=s, Z=s)  # AS ⊥ S
                flip = derive(Rule.R2, (step,), schema, X=s | {last}, Y=s)  # S ⊥ AS
                p = derive(Rule.R3, (aa, flip), schema, X={last}, Y=s, Z=s | {last})  # AS ⊥ AS
        memo[("block", attrs)] = p
        return p

    def stripped_key_proof(self, key_attrs: frozenset[str], stripped: frozenset[str]) -> ProofTree:
        """Proof of ``key(B \\ S)`` from ``key(B)`` and ``S ⊥ S`` (S ⊆ B)."""
        kb = self._key_hyp(key_attrs)
        if not stripped:
            return kb
        return derive(Rule.R8, (self.block_proof(stripped), kb), self.schema, X=stripped, Y=key_attrs - stripped)


def constant_attributes(sigma: ConstraintSet) -> ConstantSet:
    """Attributes made constant by Σ, as a least fixpoint.

    (a) ``A ⊥ A`` in Σ; (b) ``A ⊥ B`` in Σ (either orientation) and ``key(A)``
    derivable, i.e. some ``key(C)`` in ``Σ ∪ {key(R)}`` with ``C \\ R' ⊆ {A}``;
    (c) once ``key(∅)`` is derivable every attribute is constant.
    """
    _check_sigma(sigma)
    schema = sigma.schema
    full = schema.all_attributes
    keys = [k.attrs for k in sigma.keys]
    if full not in keys:
        keys.append(full)
    unary = [c for c in sigma.ias if c.is_unary]
    order: list[str] = []
    reasons: dict[str, _Reason] = {}
    const: set[str] = set()

    def key_for(z: frozenset[str]) -> frozenset[str] | None:
        for c in keys:
            if c - const <= z:
                return c
        return None

    def add(a: str, why: _Reason) -> None:
        const.add(a)
        order.append(a)
        reasons[a] = why

    changed = True
    while changed and len(const) < len(full):
        changed = False
        c0 = key_for(frozenset())
        if c0 is not None:
            stripped = frozenset(c0 & const)
            for a in schema.attributes:
                if a not in const:
                    add(a, _Reason("empty-key", key=c0, stripped=stripped))
            break
        for ia in unary:
            (a,), (b,) = tuple(ia.left), tuple(ia.right)
            if a == b:
                if a not in const:
                    add(a, _Reason(HYPOTHESIS, ia=ia))
                    changed = True
                continue
            for src, dst in ((a, b), (b, a)):
                if dst in const:
                    continue
                c = key_for(frozenset({src}))
                if c is not None:
                    add(dst, _Reason("composition", ia=ia, via=src, key=c, stripped=frozenset(c & const)))
                    changed = True
    return ConstantSet(sigma, frozenset(const), tuple(order), reasons)


@dataclass(frozen=True)
class ImplicationAnswer:
    query: Constraint
    implied: bool
    proof: ProofTree | None = None
    recipe: dict | None = None

    @property
    def verdict(self) -> str:
        return "implied" if self.implied else "not-implied"

    def __bool__(self) -> bool:
        return self.implied

    def to_dict(self, schema: Schema | None = None) -> dict:
        out: dict = {"query": self.query.format(schema), "verdict": self.verdict}
        if self.proof is not None:
            out["proof"] = self.proof.to_dict(schema)
        if self.recipe is not None:
            out["recipe"] = self.recipe
        return out


def _recipe(sigma: ConstraintSet, consts: ConstantSet, phi: Constraint) -> dict:
    schema = sigma.schema
    n = len(sigma.ias)
    return {
        "generator": "theorem2_prefix",
        "case": "key" if isinstance(phi, Key) else "independence",
        "target": phi.format(schema),
        "constant_set": schema.ordered(consts.attrs),
        "schedule": [c.format(schema) for c in sigma.ias],
        "rounds": 3 * n,
    }


def key_implied(sigma: ConstraintSet, k: Key, consts: ConstantSet | None = None) -> ImplicationAnswer:
    check_constraint(sigma.schema, k)
    consts = consts or constant_attributes(sigma)
    schema = sigma.schema
    r1 = consts.attrs
    candidates = [c.attrs for c in sigma.keys] + [schema.all_attributes]
    for b in candidates:
        if b - r1 <= k.attrs:
            p = consts.stripped_key_proof(b, b & r1)
            core = b - r1
            if core != k.attrs:
                p = derive(Rule.R7, (p,), schema, X=core, Y=k.attrs - core)
            return ImplicationAnswer(k, True, proof=p)
    return ImplicationAnswer(k, False, recipe=_recipe(sigma, consts, k))


def ia_implied(sigma: ConstraintSet, ia: IA, consts: ConstantSet | None = None) -> ImplicationAnswer:
    check_constraint(sigma.schema, ia)
    schema = sigma.schema
    if not ia.left:
        return ImplicationAnswer(ia, True, proof=derive(Rule.R1, (), schema, X=ia.right))
    if not ia.right:
        p = derive(Rule.R1, (), schema, X=ia.left)
        return ImplicationAnswer(ia, True, proof=derive(Rule.R2, (p,), schema, X=(), Y=ia.left))
    if not ia.is_unary:
        raise UnsupportedConstraint(f"{ia.format(schema)} is not unary (use derivation.saturate instead)")
    consts = consts or constant_attributes(sigma)
    if ia in sigma:
        return ImplicationAnswer(ia, True, proof=hypothesis(ia))
    if ia.flipped() in sigma:
        p = derive(Rule.R2, (hypothesis(ia.flipped()),), schema, X=ia.right, Y=ia.left)
        return ImplicationAnswer(ia, True, proof=p)
    (a,), (b,) = tuple(ia.left), tuple(ia.right)
    if a in consts:
        return ImplicationAnswer(ia, True, proof=_from_constant(consts, a, b))
    if b in consts:
        p = _from_constant(consts, b, a)
        return ImplicationAnswer(ia, True, proof=derive(Rule.R2, (p,), schema, X={b}, Y={a}))
    return ImplicationAnswer(ia, False, recipe=_recipe(sigma, consts, ia))


def _from_constant(consts: ConstantSet, a: str, b: str) -> ProofTree:
    """``a ⊥ b`` from ``a ⊥ a`` via R1 and R3."""
    aa = consts.constancy_proof(a)
    if a == b:
        return aa
    schema = consts.schema
    triv = derive(Rule.R1, (), schema, X={b})
    return derive(Rule.R3, (aa, triv), schema, X={a}, Y=(), Z={b})


def implies_general(sigma: ConstraintSet, phi: Constraint) -> ImplicationAnswer:
    """Decide ``Σ ⊨ φ`` for keys and unary IAs (trivial IAs also accepted)."""
    _check_sigma(sigma)
    if isinstance(phi, Key):
        return key_implied(sigma, phi)
    if not (phi.is_unary or phi.is_trivial):
        raise UnsupportedConstraint(
            f"{phi.format(sigma.schema)} is not unary; completeness is only established for unary atoms "
            "(use derivation.saturate for a sound check on small schemas)"
        )
    return ia_implied(sigma, phi)
