"""Finite countermodels for Σ_n once one of its members is dropped.

Dropping key(B_n A1) breaks the counting argument, and a relation of size
M = (m+3)! can then violate key(D) for any D outside the upward closure.
The column sizes are fixed by a short recursion.

Run:  python3 demos/04_cardinality_schedule.py
"""

from iakr import cardinality_schedule, lemma3_model, projection_size, sigma_n, theorem3_countermodel, verify_countermodel
from iakr.core import Key, ind, key

D = "A1 B1 A3 B3 A5 B5 A7"
sched = cardinality_schedule(7, D)
print(f"n = 7, D = {D}: m = {sched.m}, M = {sched.M}")
print("  a =", sched.a)
print("  b =", sched.b)

r = lemma3_model(7, D)
s7 = sigma_n(7)
print(f"\nbuilt {len(r)} tuples; measured column sizes:")
print("  A:", tuple(projection_size(r, [f"A{i}"]) for i in range(1, 8)))
print("  B:", tuple(projection_size(r, [f"B{i}"]) for i in range(1, 8)))
check = verify_countermodel(r, s7.without(s7.key(7)), Key(frozenset(D.split())))
print("  satisfies Σ_7 without key(B7 A1) and violates key(D):", check.ok)
print("  first rows:")
for row in r.rows()[:4]:
    print("   ", row)

print("\nother members can be dropped too; symmetry moves them into place:")
for psi, phi in [(key("B1 A2"), key("A1 B1")), (ind("A2", "B2"), ind("A1", "A2")), (ind("A1", "B1"), key("B2"))]:
    res = theorem3_countermodel(2, psi, phi)
    R2 = res.relation.schema
    print(f"  drop {psi.format(R2):12} refute {phi.format(R2):12}"
          f" -> construction {res.lemma}{res.part and ' ' + res.part}, {len(res.relation)} tuples, verified {res.check.ok}")
