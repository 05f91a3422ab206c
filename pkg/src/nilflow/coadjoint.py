"""Lie-Poisson structure on the dual space, Casimir polynomials and orbits."""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import List, Optional, Sequence

from .exactmath import Poly, as_rat, integrate_exact_form, poly_det, rank_exact
from .liealg import LieAlgebra, identify_family, make_family

DEFAULT_SEED = 0xC0FFEE
RANK_SAMPLES = 8
INDEPENDENCE_SAMPLES = 4


class IncompleteBasis(RuntimeError):
    def __init__(self, found: int, nu: int):
        self.found, self.nu = found, nu
        super().__init__(f"found {found} independent Casimirs, generic corank is {nu}")


class PoissonMatrix:
    """A_ik = {x_i, x_k} = sum_m c^m_ik x_m as a skew matrix of linear Polys."""

    def __init__(self, n: int, entries: List[List[Poly]]):
        self.n = n
        self.entries = entries

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def at(self, point: Sequence) -> List[List[Fraction]]:
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] = None) -> List[List[Poly]]:
        cols = rows if cols is None else cols
        return [[self.entries[i][j] for j in cols] for i in rows]

    def is_skew(self) -> bool:
        n = self.n
        return all(
            self.entries[i][j] == -self.entries[j][i] for i in range(n) for j in range(n)
        )

    def is_linear(self) -> bool:
        return all(
            e.is_zero() or (e.degree() == 1 and e.is_homogeneous())
            for row in self.entries
            for e in row
        )


def poisson_matrix(g: LieAlgebra) -> PoissonMatrix:
    n = g.dim
    zero = Poly.zero(n)
    entries = [[zero] * n for _ in range(n)]
    for (i, j), vec in g.sc.items():
        p = Poly(n, {_unit(n, k): c for k, c in vec.items()})
        entries[i][j] = p
        entries[j][i] = -p
    return PoissonMatrix(n, entries)


def _unit(n: int, k: int):
    e = [0] * n
    e[k] = 1
    return tuple(e)


def lie_poisson_bracket(g: LieAlgebra, f: Poly, h: Poly, A: PoissonMatrix = None) -> Poly:
    """{f, h} = sum_ij df/dx_i dh/dx_j {x_i, x_j}."""
    n = g.dim
    if f.nvars != n or h.nvars != n:
        raise ValueError("polynomials must live on the dual of the algebra")
    if A is None:
        A = poisson_matrix(g)
    df = [f.diff(i) for i in range(n)]
    dh = [h.diff(j) for j in range(n)]
    out = Poly.zero(n)
    for (i, j) in g.sc:
        if df[i] and dh[j]:
            out = out + A.entries[i][j] * df[i] * dh[j]
        if df[j] and dh[i]:
            out = out + A.entries[j][i] * df[j] * dh[i]
    return out


def is_casimir(g: LieAlgebra, F: Poly, A: PoissonMatrix = None) -> Optional[int]:
    """None if {x_i, F} = 0 for every i, otherwise the first failing index i."""
    n = g.dim
    if A is None:
        A = poisson_matrix(g)
    grad = F.gradient()
    for i in range(n):
        acc = Poly.zero(n)
        for k in range(n):
            if A.entries[i][k] and grad[k]:
                acc = acc + A.entries[i][k] * grad[k]
        if acc:
            return i
    return None


# ---------------------------------------------------------------------------
# ranks
# ---------------------------------------------------------------------------


def sample_points(n: int, count: int, seed: int = DEFAULT_SEED) -> List[List[Fraction]]:
    """Deterministic random rationals with numerators in [-20, 20], denominators in [1, 10]."""
    rng = random.Random(seed)
    return [
        [Fraction(rng.randint(-20, 20), rng.randint(1, 10)) for _ in range(n)]
        for _ in range(count)
    ]


@dataclass
class RankResult:
    rank: int
    nu: int
    point: List[Fraction]
    minor: Optional[List[int]] = None
    minor_det: Optional[Poly] = None
    kernel_generators: Optional[List[Poly]] = None
    certified: bool = False

    def as_dict(self) -> dict:
        out = {"rank": self.rank, "nu": self.nu}
        if self.minor is not None:
            out["minor"] = [i + 1 for i in self.minor]
            out["minor_det"] = self.minor_det.canonical()
            out["certified"] = self.certified
        return out


def _independent_rows(m: List[List[Fraction]]) -> List[int]:
    chosen: List[int] = []
    for r in range(len(m)):
        if rank_exact([m[i] for i in chosen + [r]]) > len(chosen):
            chosen.append(r)
    return chosen


def generic_rank(
    g: LieAlgebra,
    samples: int = RANK_SAMPLES,
    seed: int = DEFAULT_SEED,
    symbolic: bool = False,
) -> RankResult:
    """Rank of the Poisson matrix at a generic point, and nu = n - rank.

    The sampled value is a lower bound that is exact with overwhelming
    probability.  With ``symbolic=True`` the bound is certified: a principal
    minor of that size is expanded into a nonzero polynomial, and when
    nu functionally independent Casimirs are known their gradients show
    that the rank cannot be larger.
    """
    n = g.dim
    A = poisson_matrix(g)
    if n == 0:
        return RankResult(0, 0, [])
    best, best_pt = -1, None
    for pt in sample_points(n, samples, seed):
        r = rank_exact(A.at(pt))
        if r > best:
            best, best_pt = r, pt
    result = RankResult(best, n - best, best_pt)
    if symbolic:
        _certify(g, A, result, seed)
    return result


def _certify(g: LieAlgebra, A: PoissonMatrix, result: RankResult, seed: int) -> None:
    n = g.dim
    if result.rank == 0:
        result.minor, result.minor_det = [], Poly.const(n, 1)
        lower_ok = True
    else:
        rows = _independent_rows(A.at(result.point))
        # for skew matrices the principal minor on a maximal independent row set is nonsingular
        result.minor = rows
        result.minor_det = poly_det(A.submatrix(rows))
        lower_ok = not result.minor_det.is_zero()
    try:
        gens = _known_casimirs(g)
    except NotImplementedError:
        gens = None
    upper_ok = False
    if result.nu == 0:
        upper_ok = True
    elif gens is not None and all(is_casimir(g, F, A) is None for F in gens):
        # nu independent kernel vectors force rank <= n - nu
        upper_ok = jacobian_rank(gens, seed) >= result.nu
        result.kernel_generators = gens
    result.certified = lower_ok and upper_ok


def jacobian_rank(polys: Sequence[Poly], seed: int = DEFAULT_SEED, samples: int = INDEPENDENCE_SAMPLES) -> int:
    """Max rank of the Jacobian over a few sampled points."""
    if not polys:
        return 0
    n = polys[0].nvars
    grads = [F.gradient() for F in polys]
    best = 0
    for pt in sample_points(n, samples, seed + 1):
        best = max(best, rank_exact([[d.evaluate(pt) for d in grad] for grad in grads]))
        if best == len(polys):
            break
    return best


# ---------------------------------------------------------------------------
# Casimirs of V_{2q+2}
# ---------------------------------------------------------------------------


def B_matrix(q: int) -> List[List[Poly]]:
    """The q x (q+1) block of A: rows 1..q, columns q+1..2q+1 of V_{2q+2}."""
    n = 2 * q + 2
    A = poisson_matrix(make_family("Vn", n))
    return A.submatrix(list(range(q)), list(range(q, 2 * q + 1)))


def B_tilde(q: int) -> List[List[Poly]]:
    """B with the row (1, 0, ..., 0) appended at the bottom."""
    n = 2 * q + 2
    extra = [Poly.const(n, 1)] + [Poly.zero(n)] * q
    return B_matrix(q) + [extra]


def det_Btilde(q: int) -> Poly:
    if q < 1:
        raise ValueError("q must be at least 1")
    return poly_det(B_tilde(q))


def casimir_partials_V_even(q: int) -> List[Poly]:
    """dF/dx_{q+1}, ..., dF/dx_{2q+1} for F_{2q+2} from the triangular recursion.

    dF/dx_{q+1} = x_{2q+2}^q and, for m = 0..q-1,
    dF/dx_{q+m+2} = -1/((2m+2) x_{2q+2}) sum_{l=1}^{m+1} (l+m) x_{2q+l-m} dF/dx_{q+l}.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    n = 2 * q + 2
    x = [Poly.var(n, i) for i in range(n)]
    top = x[n - 1]
    w = [top ** q]  # w[l-1] = dF/dx_{q+l}
    for m in range(q):
        acc = Poly.zero(n)
        for l in range(1, m + 2):
            acc = acc + x[2 * q + l - m - 1] * w[l - 1] * (l + m)
        w.append(acc.exact_div(top).scale(Fraction(-1, 2 * m + 2)))
    return w


def casimir_solver_V_even(q: int) -> Poly:
    """The second Casimir F_{2q+2} of V_{2q+2}, normalised without pure x_{2q+2} terms."""
    n = 2 * q + 2
    w = casimir_partials_V_even(q)
    idx = list(range(q, 2 * q + 1))
    # integrate over x_{q+1}..x_{2q+1} with x_{2q+2} as a parameter, then read off
    # dF/dx_{2q+2} and re-integrate the full gradient so compatibility is checked
    partial = integrate_exact_form(w, idx)
    phi = partial.diff(n - 1)
    return integrate_exact_form(w + [phi], idx + [n - 1])


def leading_coefficient_V_even(q: int) -> Fraction:
    """(-1)^q prod_{m<q}(2m+1) / (2^q (q+1)!), the x_{2q+1}^{q+1} coefficient of F_{2q+2}."""
    num = 1
    for m in range(q):
        num *= 2 * m + 1
    return Fraction((-1) ** q * num, 2 ** q * factorial(q + 1))


def casimir_decomposition(q: int):
    """Split F_{2q+2} = c x_{2q+1}^{q+1} + x_{2q+2} G by exact division."""
    n = 2 * q + 2
    F = casimir_solver_V_even(q)
    exp = [0] * n
    exp[n - 2] = q + 1
    c = F.coefficient(exp)
    rest = F - Poly(n, {tuple(exp): c})
    G = rest.exact_div(Poly.var(n, n - 1))
    return c, G


# ---------------------------------------------------------------------------
# Casimirs of Q_n
# ---------------------------------------------------------------------------


def casimirs_Q(n: int) -> List[Poly]:
    """x_n and, for k = 2..n-2, the polynomial invariants linear in x_k.

    On Q_n* the brackets act through D = sum_k x_{k+1} d/dx_k (k = 2..n-1),
    whose flow shifts x_k(t) = sum_j x_{k+j} t^j / j!.  Evaluating at
    t = -x_{n-1}/x_n and clearing denominators by x_n^{n-1-k} gives
    I_k = sum_{j<n-k} x_{k+j} (-x_{n-1})^j x_n^{n-1-k-j} / j! + (-x_{n-1})^{n-k}/(n-k)!.
    """
    if n < 3:
        return [Poly.var(n, i) for i in range(n)] if n else []
    x = [Poly.var(n, i) for i in range(n)]
    xn, xm = x[n - 1], x[n - 2]
    gens = [xn]
    for k in range(2, n - 1):  # 1-based k
        acc = Poly.zero(n)
        for j in range(n - k):
            acc = acc + x[k + j - 1] * (-xm) ** j * xn ** (n - 1 - k - j) * Fraction(1, factorial(j))
        acc = acc + (-xm) ** (n - k) * Fraction(1, factorial(n - k))
        gens.append(acc.primitive())
    return gens


def _known_casimirs(g: LieAlgebra) -> List[Poly]:
    fam = identify_family(g)
    n = g.dim
    if fam is None or n < 3:
        if n <= 2 and g.is_abelian():
            return [Poly.var(n, i) for i in range(n)]
        raise NotImplementedError("no closed-form Casimirs for this algebra")
    if fam == "Qn":
        return casimirs_Q(n)
    if n % 2:
        return [Poly.var(n, n - 1)]
    return [Poly.var(n, n - 1), casimir_solver_V_even((n - 2) // 2)]


# ---------------------------------------------------------------------------
# general polynomial ansatz
# ---------------------------------------------------------------------------


def _monomials(n: int, d: int):
    if n == 0:
        if d == 0:
            yield ()
        return
    if n == 1:
        yield (d,)
        return
    for a in range(d, -1, -1):
        for rest in _monomials(n - 1, d - a):
            yield (a,) + rest


def homogeneous_casimirs(g: LieAlgebra, degree: int) -> List[Poly]:
    """Basis of the homogeneous Casimir polynomials of one degree (linear algebra on coefficients)."""
    from .exactmath import nullspace

    n = g.dim
    A = poisson_matrix(g)
    monos = list(_monomials(n, degree))
    rows = {}
    for col, e in enumerate(monos):
        m = Poly(n, {e: 1})
        grad = m.gradient()
        for i in range(n):
            acc = Poly.zero(n)
            for k in range(n):
                if grad[k] and A.entries[i][k]:
                    acc = acc + A.entries[i][k] * grad[k]
            for e2, c in acc.terms.items():
                rows.setdefault((i, e2), {})[col] = c
    matrix = [[row.get(c, 0) for c in range(len(monos))] for row in rows.values()]
    if not matrix:
        kernel = [[Fraction(int(c == r)) for c in range(len(monos))] for r in range(len(monos))]
    else:
        kernel = nullspace(matrix, len(monos))
    return [Poly(n, dict(zip(monos, v))).primitive() for v in kernel]


@dataclass
class CasimirSet:
    generators: List[Poly]
    nu: int
    complete: bool = True
    method: str = ""

    def canonical(self) -> List[str]:
        return [F.canonical() for F in self.generators]


def _select_independent(candidates: Sequence[Poly], limit: int, seed: int) -> List[Poly]:
    chosen: List[Poly] = []
    for F in candidates:
        if len(chosen) == limit:
            break
        if jacobian_rank(chosen + [F], seed) > len(chosen):
            chosen.append(F)
    return chosen


def casimir_basis(
    g: LieAlgebra,
    max_degree: int = 2,
    seed: int = DEFAULT_SEED,
    strict: bool = False,
) -> CasimirSet:
    """Functionally independent polynomial Casimirs.

    For V_n and Q_n the generators are closed-form (and verified).  Other
    algebras are handled by a homogeneous ansatz of degree <= max_degree;
    if that finds fewer than nu generators the set is flagged incomplete
    (or :class:`IncompleteBasis` is raised when ``strict``).
    """
    nu = generic_rank(g, seed=seed).nu
    A = poisson_matrix(g)
    try:
        gens = _known_casimirs(g)
        method = "closed-form"
    except NotImplementedError:
        candidates = []
        for d in range(1, max_degree + 1):
            candidates.extend(homogeneous_casimirs(g, d))
        gens = _select_independent(candidates, nu, seed)
        method = f"ansatz(deg<={max_degree})"
    for F in gens:
        if is_casimir(g, F, A) is not None:  # pragma: no cover - closed forms are proven
            raise AssertionError(f"generator {F} is not a Casimir")
    independent = jacobian_rank(gens, seed) == len(gens)
    complete = independent and len(gens) == nu
    if not complete:
        if strict:
            raise IncompleteBasis(len(gens), nu)
        warnings.warn(f"only {len(gens)} of {nu} Casimir generators found", RuntimeWarning)
    return CasimirSet(gens, nu, complete, method)


# ---------------------------------------------------------------------------
# orbits of V_n
# ---------------------------------------------------------------------------


@dataclass
class OrbitDescriptor:
    point: List[Fraction]
    dimension: int
    equations: List[tuple] = field(default_factory=list)  # (Poly, value)
    depth: int = 0
    stratum_dim: int = 0  # dimension of the V_m whose generic orbit this is
    kind: str = ""

    def as_dict(self) -> dict:
        return {
            "point": [str(p) for p in self.point],
            "dimension": self.dimension,
            "equations": [{"poly": P.canonical(), "value": str(v)} for P, v in self.equations],
            "depth": self.depth,
            "stratum": f"V{self.stratum_dim}",
            "kind": self.kind,
        }


def classify_orbit(g: LieAlgebra, point: Sequence) -> OrbitDescriptor:
    """Coadjoint orbit through ``point`` for an algebra of the V_n family.

    Trailing zero coordinates are stripped (the orbit then lives in the
    dual of V_{n-1}); the first nonzero top coordinate fixes the type.
    """
    n = g.dim
    if identify_family(g) != "Vn" and not (n <= 2 and g.is_abelian()):
        raise ValueError("orbit classification is implemented for the V_n family")
    pt = [as_rat(p) for p in point]
    if len(pt) != n:
        raise ValueError(f"point has {len(pt)} coordinates, expected {n}")
    m = n
    equations = []
    while m > 2 and pt[m - 1] == 0:
        equations.append((Poly.var(n, m - 1), Fraction(0)))
        m -= 1
    depth = n - m
    if m <= 2:
        # abelian base: every point is an orbit
        for i in reversed(range(m)):
            equations.append((Poly.var(n, i), pt[i]))
        equations.reverse()
        return OrbitDescriptor(pt, 0, equations, depth, m, "point")
    top = Poly.var(n, m - 1)
    if m % 2:
        eqs = [(top, pt[m - 1])]
        kind, dim = "hyperplane", m - 1
    else:
        F = casimir_solver_V_even((m - 2) // 2).embed(n)
        eqs = [(top, pt[m - 1]), (F, F.evaluate(pt))]
        kind, dim = "level set", m - 2
    equations.reverse()
    return OrbitDescriptor(pt, dim, eqs + equations, depth, m, kind)
