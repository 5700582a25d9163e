"""A constraint that holds in every finite model but not in every model.

Σ_2 has two independent pairs (A1, B1), (A2, B2) tied together by the keys
B1 A2 and B2 A1.  Counting distinct values shows that every finite model
also satisfies key(A1 B1); an ever-growing chain of relations shows that
infinite models need not.

Run:  python3 demos/03_finite_versus_infinite.py
"""

from pathlib import Path

from iakr import Relation, bounded_search, counting_chain, implies_general, key, lemma2_prefix_holds, parse_constraint_file
from iakr.countermodel import iter_lemma2_chain

schema, sigma = parse_constraint_file((Path(__file__).parent / "data" / "sigma2.iak").read_text())
target = key("A1 B1")

print("general implication:", implies_general(sigma, target).verdict)
print("finite search up to 3 tuples / 4 values:", bounded_search(sigma, target, 3, 4) or "no counterexample")

print("\nthe growing chain (each prefix keeps both keys and the atom it just repaired):")
for prefix in iter_lemma2_chain(5):
    checks = lemma2_prefix_holds(prefix)
    print(f"  r_{prefix.rounds_done}: {len(prefix.relation):5} tuples  " + "  ".join(f"{k}={'yes' if v else 'no'}" for k, v in checks.items()))

print("\nwhy finite models cannot do this, on a concrete model:")
r = Relation.from_rows(schema, [(0, 0, 0, 0), (0, 1, 0, 1), (1, 0, 1, 0), (1, 1, 1, 1)])
report = counting_chain(r, 2)
for step in report.steps:
    print(f"  {step.claim:34} {step.lhs} {step.op} {step.rhs}   ({step.reason})")
print(" ", report.conclusion)
