"""Building a relation that refutes a non-implied constraint.

The chase starts from two tuples that already violate the target and then
repairs one independence atom per round by adding the missing value
combinations with fresh values everywhere else.

Run:  python3 demos/02_chase_countermodel.py
"""

from iakr import ConstraintSet, bounded_search, Schema, finite_chase_model, ind, key, theorem2_chain, verify_countermodel

R = Schema("R", ("A", "B", "C"))
sigma = ConstraintSet(R, [ind("A", "B"), key("A C")])
phi = ind("A", "C")
print("constraints:", ", ".join(c.format(R) for c in sigma), "| target:", phi.format(R), "\n")

for prefix in theorem2_chain(sigma, phi):
    atom = prefix.scheduled_atom()
    note = f"after repairing {atom.format(R)}" if atom else "seed"
    print(f"round {prefix.rounds_done} ({note}): {len(prefix.relation)} tuples")
    for row in prefix.relation.rows():
        print("   ", row)
    if prefix.rounds_done == 1:
        break

check = verify_countermodel(prefix.relation, sigma, phi)
print("\nthis prefix is a finite countermodel:", check.ok)

# Here the chase never settles: every repair of one atom breaks the other.
sigma2 = ConstraintSet(R, [ind("A", "B"), ind("B", "C")])
target = key("A")
print(f"\n{', '.join(c.format(R) for c in sigma2)} against {target.format(R)}:")
for prefix in theorem2_chain(sigma2, target):
    holds = verify_countermodel(prefix.relation, sigma2, target).ok
    print(f"  round {prefix.rounds_done}: {len(prefix.relation):6} tuples, whole constraint set holds: {holds}")
    if prefix.rounds_done == 6:
        break
print("no finite stopping point within 20 rounds:", finite_chase_model(sigma2, target, max_rounds=20) is None)
small = bounded_search(sigma2, target, 4, 2)
print("a small search still finds a finite countermodel:", small.rows())
print("\nmanifest of the last prefix:")
for g in prefix.manifest()["guarantees"]:
    print("  -", g)
