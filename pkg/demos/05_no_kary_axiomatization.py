"""Why no fixed-arity rule set captures finite implication here.

A rule with k premises applied to Σ_n only ever sees k of its 2n members.
For k < 2n some member ψ is unused, and every finite consequence of Σ_n
without ψ already lies in the upward closure C↑(Σ_n).  This script checks
that second fact exhaustively for n = 2 and n = 3, building and verifying a
countermodel for every pair (ψ, φ) with φ outside the closure.

Run:  python3 demos/05_no_kary_axiomatization.py
"""

import json

from iakr import kary_demo

for n in (2, 3):
    rep = kary_demo(n)
    print(f"n = {n}: {rep.verified}/{rep.pairs} countermodels verified, largest {rep.max_model_size} tuples")
    print("   by construction:", json.dumps({str(k): v for k, v in sorted(rep.by_lemma.items())}))
    print(f"   |C↑(Σ_{n})| = {rep.closure_size}; {rep.gap_atom} in the closure: {rep.gap_in_closure}")
    print(f"   bounded search for a finite model of Σ_{n} violating {rep.gap_atom}: {rep.gap_bounded_search}")
print()
print(rep.reduction)
