"""Checking data against keys and independence atoms, then asking what follows.

Run:  python3 demos/01_check_and_imply.py
"""

from pathlib import Path

from iakr import check_proof, implies_general, load_relation, parse_constraint, parse_constraint_file, satisfies_all

HERE = Path(__file__).parent / "data"

schema, sigma = parse_constraint_file((HERE / "employees.iak").read_text())
print(f"schema {schema.name}({', '.join(schema.attributes)}) with {len(sigma)} constraints\n")

for name in ("employees.csv", "employees_bad.csv"):
    r = load_relation((HERE / name).read_text(), schema)
    report = satisfies_all(r, sigma)
    print(f"{name}: {len(r)} tuples, all constraints hold: {report.all_hold}")
    for v in report.violations:
        print(f"  {v.constraint.format(schema)} fails, witness {v.witness}")
print()

# A key on badge makes every superset a key; the independence atom says nothing about shift alone.
for text in ("key(badge shift)", "ind(shift ; office)", "key(office shift)", "ind(badge ; office)"):
    phi = parse_constraint(text, schema)
    answer = implies_general(sigma, phi)
    line = f"{text:22} {answer.verdict}"
    if answer.implied:
        line += f"  (proof with {answer.proof.size()} steps, checks: {check_proof(answer.proof, sigma).ok})"
    print(line)

# Constancy interacts with keys: if A is constant, key(A B) shrinks to key(B).
schema2, sigma2 = parse_constraint_file("schema R: A B; ind(A ; A); key(A B);")
answer = implies_general(sigma2, parse_constraint("key(B)", schema2))
print("\nwith A constant, key(A B) gives key(B):", answer.verdict)
steps = list(answer.proof.nodes())
number = {id(n): k for k, n in enumerate(steps, start=1)}
for k, node in enumerate(steps, start=1):
    via = "given" if node.is_hypothesis else f"{node.rule.value} from " + ", ".join(str(number[id(p)]) for p in node.premises)
    print(f"  {k}. {node.conclusion.format(schema2):12} {via}")
