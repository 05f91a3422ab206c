"""
Coadjoint orbits of V_n
=======================

Orbits through points with a nonzero top coordinate are cut out by the
Casimirs.  When trailing coordinates vanish the point lives in the dual of
a smaller quotient and the classification recurses.
"""

from nilflow import classify_orbit, make_family

g = make_family("Vn", 6)
for point in ([1, 2, 3, 4, 5, 6], [1, 2, 3, 4, 5, 0], [1, 2, 3, 4, 0, 0], [1, 2, 0, 0, 0, 0]):
    orbit = classify_orbit(g, point)
    eqs = ", ".join(f"{P.canonical()} = {v}" for P, v in orbit.equations)
    print(f"{point}: {orbit.kind} of dimension {orbit.dimension} ({eqs})")
