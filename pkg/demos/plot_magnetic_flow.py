"""
Euler flows and their magnetic reading
======================================

Extending V_3 by the central cocycle 2 w1^w3 gives V_4.  The Euler flow of
the extended kinetic energy keeps the new coordinate fixed, and with that
value as a charge it is the magnetic flow on V_3*.
"""

from fractions import Fraction

import numpy as np

from nilflow import make_family, quadratic_hamiltonian
from nilflow.coadjoint import casimir_basis
from nilflow.flows import MagneticSetup, equivalence_checks, euler_field, integrate, magnetic_field_equations
from nilflow.liealg import family_cocycle

g3 = make_family("Vn", 3)
B = family_cocycle("Vn", 4)
H = quadratic_hamiltonian(3)
print(equivalence_checks(g3, B, H))

# Integrate the flow on V_4* and the magnetic flow with the matching charge.
g4 = make_family("Vn", 4)
charge = Fraction(3, 4)
x0 = np.array([1.0, 0.5, -1.0, float(charge)])
monitors = {"H": quadratic_hamiltonian(4)}
for i, F in enumerate(casimir_basis(g4).generators):
    monitors[f"C{i + 1}"] = F
full = integrate(euler_field(g4, quadratic_hamiltonian(4)), x0, 1e-3, 5000, monitors)
mag = integrate(magnetic_field_equations(MagneticSetup(g3, H, B, charge)), x0[:3], 1e-3, 5000)

print("max |difference| =", np.max(np.abs(full.states[:, :3] - mag.states)))
print("relative drift:", full.summary())
