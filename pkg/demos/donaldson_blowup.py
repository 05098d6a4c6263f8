"""Donaldson invariants of a blowup, reduced to the base surface.

We start on the blowup of a surface X at a point, with the class p^*c pulled back
from c = (2, H, c2), and integrate mu([C])^k against an arbitrary class pulled
back from X.  The reduction walks the Gieseker chamber down to the pullback
locus and leaves a single number per k.

    python3 demos/donaldson_blowup.py
"""
from blowupcalc.engine import donaldson_reduction

print("k   coefficient of the base integral")
for k in range(5):
    coeff, res = donaldson_reduction(k)
    print(f"{k}   {coeff}")

# Only k = 4 produces a wall term.  The audit log shows how it travels: a term on
# M^0(p^*c - e), a twist by O(C), then the projective-bundle pushdown.
_, res = donaldson_reduction(4)
print("\naudit for k = 4:")
for rec in res.audit:
    print(f"  {rec['rule']:<10} {rec['labelBefore']}")
    for lab, poly in rec["coefficientDelta"].items():
        print(f"             -> {lab}: {poly}")
