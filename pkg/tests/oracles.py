"""Reference implementations taken straight from the definitions.

They loop over tuples in plain Python and share no code with the library,
so agreement with them is real evidence rather than a tautology.
"""

from __future__ import annotations

from itertools import product


def cols(schema, attrs):
    return [schema.attributes.index(a) for a in attrs]


def key_holds(rows, schema, attrs):
    """No two distinct tuples agree on all of ``attrs``."""
    xs = cols(schema, attrs)
    rows = list(set(rows))
    for t, u in product(rows, rows):
        if t != u and all(t[j] == u[j] for j in xs):
            return False
    return True


def ia_holds(rows, schema, left, right):
    """For all t, t' some t'' copies t on ``left`` and t' on ``right``."""
    xs, ys = cols(schema, left), cols(schema, right)
    rows = list(set(rows))
    for t, u in product(rows, rows):
        if not any(all(w[j] == t[j] for j in xs) and all(w[j] == u[j] for j in ys) for w in rows):
            return False
    return True


def holds(rows, schema, c):
    from iakr.core import Key

    if isinstance(c, Key):
        return key_holds(rows, schema, c.attrs)
    return ia_holds(rows, schema, c.left, c.right)


def projection(rows, schema, attrs):
    xs = sorted(cols(schema, attrs))
    return {tuple(t[j] for j in xs) for t in rows}


def schedule(n, doubled):
    """Cardinality recursion with exact rational arithmetic; ``doubled[i-1]`` says ``A_i B_i ⊆ D``."""
    from fractions import Fraction
    from math import factorial

    m = sum(doubled)
    M = factorial(m + 3)
    a, b = [Fraction(2)], []
    for i in range(n):
        b.append(Fraction(M) / (a[i] + 1 if doubled[i] else a[i]))
        if i < n - 1:
            a.append(Fraction(M) / b[i])
    assert all(x.denominator == 1 for x in a + b)
    return M, [int(x) for x in a], [int(x) for x in b]
