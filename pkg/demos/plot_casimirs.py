"""
Casimir polynomials of the V_n family
=====================================

On the dual of V_n the Poisson matrix is linear in the coordinates.  Its
kernel at a generic point is spanned by the gradients of the Casimirs.
"""

from nilflow import casimir_basis, casimir_solver_V_even, generic_rank, is_casimir, make_family

# Odd dimensions have a single Casimir (the top coordinate), even ones two.
for n in range(3, 11):
    g = make_family("Vn", n)
    r = generic_rank(g)
    print(f"V{n}: rank {r.rank}, {r.nu} Casimir(s)")

# The second Casimir of V_{2q+2} comes from integrating a triangular system
# for its partial derivatives.
for q in (1, 2, 3):
    F = casimir_solver_V_even(q)
    print(f"F{2 * q + 2} =", F.canonical())

# Every generator is checked exactly against all coordinate brackets.
g = make_family("Vn", 10)
cs = casimir_basis(g)
print([is_casimir(g, F) is None for F in cs.generators])

# The Q_n family behaves very differently: rank 2, so n - 2 Casimirs.
q6 = casimir_basis(make_family("Qn", 6))
for F in q6.generators:
    print("Q6:", F.canonical())
