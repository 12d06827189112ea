"""Conformal-block dimensions: the subset sum, its terms, and the weight-sum cross-check."""

from loom import VerlindeQuery, smatrix_oracle, verlinde_number, verlinde_terms

q = VerlindeQuery(r=2, c=2, g=2)
print(f"dim for r={q.r}, c={q.c}, g={q.g}: {verlinde_number(q)}")

# each subset contributes a certified interval; the exact values here are 8 and 4
for subset, term in verlinde_terms(q):
    print(f"  S = {subset}: [{float(term.lo):.12f}, {float(term.hi):.12f}]")

print("\nr\\g " + " ".join(f"{g:>6}" for g in range(5)))
for r in (2, 3, 4):
    row = [verlinde_number(VerlindeQuery(r, 3, g), "exact") for g in range(5)]
    print(f"{r:>3} " + " ".join(f"{x:>6}" for x in row))

assert smatrix_oracle(VerlindeQuery(3, 3, 3)) == verlinde_number(VerlindeQuery(3, 3, 3))
