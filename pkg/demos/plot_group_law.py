"""
The group law from the Campbell-Hausdorff series
================================================

For a nilpotent algebra the series is a polynomial, so the product of two
rational vectors is again rational and can be computed exactly.
"""

from nilflow import heisenberg, make_family
from nilflow.group import bch_product, group_axioms_check, lattice_closure_report

def show(vec):
    return "(" + ", ".join(str(c) for c in vec) + ")"


print(show(bch_product(heisenberg(), [1, 0, 0], [0, 1, 0])))
print(show(bch_product(make_family("Vn", 5), [1, 0, 0, 0, 0], [0, 1, 0, 0, 0])))

print(group_axioms_check(make_family("Vn", 6), samples=5))

# Integer points are not closed under the product in these coordinates.
report = lattice_closure_report(heisenberg())
print(report["closed"], report["witness"])
