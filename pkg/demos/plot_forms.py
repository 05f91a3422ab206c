"""
Invariant forms on V_n
======================

The differential of the dual basis has a simple pairing pattern.  It gives
a symplectic form in even dimensions and a contact form in odd ones.
"""

from nilflow import make_family
from nilflow.forms import ce_differential, check_contact, check_symplectic, cohomology_dims, omega, symplectic_form_V

g = make_family("Vn", 7)
for k in range(1, 8):
    print(f"d w{k} =", ce_differential(g, omega(7, k)) or 0)

for m in range(2, 6):
    form = symplectic_form_V(m)
    print(f"V{2 * m}:", form, check_symplectic(make_family("Vn", 2 * m), form))

for m in range(1, 5):
    print(f"V{2 * m + 1}: w{2 * m + 1} contact ->", check_contact(make_family("Vn", 2 * m + 1)))

print("Betti numbers of V5:", cohomology_dims(make_family("Vn", 5), 5))
