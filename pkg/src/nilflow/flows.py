"""Euler equations on the dual of a Lie algebra, magnetic variants, and RK4 integration.

Fields are derived exactly (Poly arithmetic); only the time stepping is
done in binary64.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from .coadjoint import lie_poisson_bracket, poisson_matrix
from .exactmath import Poly, as_rat
from .liealg import Cocycle2, LieAlgebra, NotClosed, central_extension


class NonFinite(FloatingPointError):
    """The state left the representable range; the step is too large."""


def quadratic_hamiltonian(n: int, metric: Optional[Sequence[Sequence]] = None) -> Poly:
    """H = 1/2 sum g^{ik} x_i x_k; the identity metric by default."""
    x = [Poly.var(n, i) for i in range(n)]
    H = Poly.zero(n)
    if metric is None:
        for xi in x:
            H = H + xi * xi
        return H.scale(Fraction(1, 2))
    g = [[as_rat(v) for v in row] for row in metric]
    if len(g) != n or any(len(r) != n for r in g):
        raise ValueError(f"metric must be {n}x{n}")
    if any(g[i][k] != g[k][i] for i in range(n) for k in range(n)):
        raise ValueError("metric must be symmetric")
    for i in range(n):
        for k in range(n):
            if g[i][k]:
                H = H + x[i] * x[k] * g[i][k]
    return H.scale(Fraction(1, 2))


@dataclass
class HamiltonianSystem:
    algebra: Optional[LieAlgebra]
    H: Poly
    field: List[Poly]

    @property
    def dim(self) -> int:
        return len(self.field)

    def compile(self) -> "CompiledField":
        return CompiledField(self.field)


def euler_field(g: LieAlgebra, H: Poly) -> HamiltonianSystem:
    """dx_i/dt = {x_i, H}."""
    n = g.dim
    A = poisson_matrix(g)
    x = [Poly.var(n, i) for i in range(n)]
    return HamiltonianSystem(g, H, [lie_poisson_bracket(g, xi, H, A) for xi in x])


@dataclass
class MagneticSetup:
    algebra: LieAlgebra
    H: Poly
    cocycle: Cocycle2
    charge: Fraction = Fraction(1)


def magnetic_field_equations(setup: MagneticSetup) -> HamiltonianSystem:
    """dx_i/dt = {x_i, H}_g + c sum_k B_ik dH/dx_k with the charge c held fixed.

    For H = 1/2 sum x_i^2 this is the familiar + c sum_k B_ik x_k.
    """
    g, H, B = setup.algebra, setup.H, setup.cocycle
    if not B.is_closed(g):
        raise NotClosed("magnetic 2-form is not closed")
    n = g.dim
    c = as_rat(setup.charge)
    base = euler_field(g, H).field
    grad = H.gradient()
    out = []
    for i in range(n):
        acc = base[i]
        for k in range(n):
            b = B(i, k)
            if b and grad[k]:
                acc = acc + grad[k].scale(c * b)
        out.append(acc)
    return HamiltonianSystem(g, H, out)


def extended_hamiltonian(H: Poly) -> Poly:
    """H + 1/2 x_{n+1}^2 on the extension."""
    n = H.nvars + 1
    xe = Poly.var(n, n - 1)
    return H.embed(n) + (xe * xe).scale(Fraction(1, 2))


def equivalence_checks(g: LieAlgebra, B: Cocycle2, H: Poly, charges: Sequence = (0, 1, Fraction(-3, 2), 7)) -> dict:
    """Exact checks that the extended Euler equations are the sub-Riemannian and magnetic ones.

    (a) {x_i, H^} = {x_i, H} on the extension,
    (b) fixing x_{n+1} = c in the extended field gives the magnetic field with charge c,
    (c) dx_{n+1}/dt = 0.
    """
    gB = central_extension(g, B)
    n = g.dim
    Hh = extended_hamiltonian(H)
    H_ext = H.embed(n + 1)
    full = euler_field(gB, Hh).field
    sub = euler_field(gB, H_ext).field
    report = {"sub_riemannian": all(a == b for a, b in zip(full, sub))}
    ok = True
    for c in charges:
        c = as_rat(c)
        mag = magnetic_field_equations(MagneticSetup(g, H, B, c)).field
        for i in range(n):
            reduced = full[i].substitute({n: c})
            # drop the (now absent) last variable
            reduced = Poly(n, {e[:n]: v for e, v in reduced.terms.items()})
            if reduced != mag[i]:
                ok = False
    report["magnetic"] = ok
    report["charge_conserved"] = full[n].is_zero()
    report["all"] = all(report.values())
    return report


# ---------------------------------------------------------------------------
# numerics
# ---------------------------------------------------------------------------


class CompiledField:
    """Polynomial vector field flattened to exponent/coefficient arrays for numpy."""

    def __init__(self, polys: Sequence[Poly]):
        self.n = polys[0].nvars if polys else 0
        exps, coefs, rows = [], [], []
        for r, p in enumerate(polys):
            for e, c in p.terms.items():
                exps.append(e)
                coefs.append(float(c))
                rows.append(r)
        self.dim = len(polys)
        self.exps = np.array(exps, dtype=float).reshape(-1, self.n)
        self.coefs = np.array(coefs)
        self.rows = np.array(rows, dtype=int)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if not len(self.coefs):
            return np.zeros(self.dim)
        vals = self.coefs * np.prod(np.power(x, self.exps), axis=1)
        return np.bincount(self.rows, weights=vals, minlength=self.dim)


def evaluate_many(poly: Poly, states: np.ndarray) -> np.ndarray:
    """Evaluate one Poly on every row of ``states``."""
    comp = CompiledField([poly])
    if not len(comp.coefs):
        return np.zeros(len(states))
    return np.power(states[:, None, :], comp.exps[None]).prod(axis=2) @ comp.coefs


def rk4_step(f, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    monitors: Dict[str, np.ndarray] = field(default_factory=dict)

    def drift(self, name: str) -> float:
        """max |m(t) - m(0)| / |m(0)|; absolute when m(0) = 0."""
        vals = self.monitors[name]
        dev = float(np.max(np.abs(vals - vals[0])))
        ref = abs(float(vals[0]))
        return dev / ref if ref > 0 else dev

    def summary(self) -> dict:
        return {name: self.drift(name) for name in self.monitors}

    def to_csv(self, path) -> None:
        n = self.states.shape[1]
        names = list(self.monitors)
        header = ["t"] + [f"x_{i + 1}" for i in range(n)] + names
        cols = [self.times[:, None], self.states] + [self.monitors[k][:, None] for k in names]
        data = np.hstack(cols)
        np.savetxt(path, data, delimiter=",", header=",".join(header), comments="", fmt="%.17g")


def integrate(
    system: HamiltonianSystem,
    x0: Sequence[float],
    dt: float,
    steps: int,
    monitors: Optional[Dict[str, Poly]] = None,
) -> Trajectory:
    """Classical fixed-step RK4; monitors are logged at every step."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    x = np.array(x0, dtype=float)
    if x.shape != (system.dim,):
        raise ValueError(f"x0 must have {system.dim} entries")
    f = system.compile()
    states = np.empty((steps + 1, system.dim))
    states[0] = x
    # overflow is reported through NonFinite instead of numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for s in range(steps):
            x = rk4_step(f, x, dt)
            if not np.all(np.isfinite(x)):
                raise NonFinite(f"state is not finite after step {s + 1}")
            states[s + 1] = x
    times = dt * np.arange(steps + 1)
    logs = {name: evaluate_many(p, states) for name, p in (monitors or {}).items()}
    return Trajectory(times, states, logs)


def reversed_system(system: HamiltonianSystem) -> HamiltonianSystem:
    return HamiltonianSystem(system.algebra, -system.H, [-p for p in system.field])
