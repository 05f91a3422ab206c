import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from nilflow.coadjoint import (
    IncompleteBasis,
    casimir_basis,
    casimir_decomposition,
    casimir_partials_V_even,
    casimir_solver_V_even,
    casimirs_Q,
    classify_orbit,
    det_Btilde,
    generic_rank,
    homogeneous_casimirs,
    is_casimir,
    leading_coefficient_V_even,
    lie_poisson_bracket,
    poisson_matrix,
    sample_points,
)
from nilflow.exactmath import Poly, rank_exact, variables
from nilflow.liealg import LieAlgebra, abelian, heisenberg, make_family

from oracles import minor_rank, sympy_poisson, to_sympy, vn_pairs

F4 = "x2*x4 - 1/4*x3^2"
F6 = "x3*x6^2 - 1/2*x4*x5*x6 + 1/8*x5^3"
F8_CONSISTENT = "x4*x8^3 - 1/2*x5*x7*x8^2 - 1/4*x6^2*x8^2 + 3/8*x6*x7^2*x8 - 5/64*x7^4"


def P(text, n):
    return Poly.parse(text, n)


# Poisson matrix -------------------------------------------------------------


def test_poisson_matrix_V4():
    A = poisson_matrix(make_family("Vn", 4))
    x = variables(4)
    assert A[0, 1] == x[2] and A[0, 2] == 2 * x[3]
    for i, j in [(0, 3), (1, 2), (1, 3), (2, 3)]:
        assert A[i, j].is_zero()


def test_poisson_matrix_abelian_is_zero():
    A = poisson_matrix(abelian(4))
    assert all(e.is_zero() for row in A.entries for e in row)


def test_poisson_matrix_Q5():
    A = poisson_matrix(make_family("Qn", 5))
    x = variables(5)
    for k in range(1, 4):
        assert A[0, k] == x[k + 1]
    for j in range(1, 5):
        for k in range(1, 5):
            assert A[j, k].is_zero()


@pytest.mark.parametrize("fam", ["Qn", "Vn"])
@pytest.mark.parametrize("n", [1, 2, 5, 13, 27, 40])
def test_poisson_matrix_skew_and_linear(fam, n):
    A = poisson_matrix(make_family(fam, n))
    assert A.is_skew() and A.is_linear()
    assert all(A[i, i].is_zero() for i in range(n))


def test_poisson_matrix_against_sympy():
    n = 7
    x, S = sympy_poisson(n, vn_pairs(n))
    A = poisson_matrix(make_family("Vn", n))
    for i in range(n):
        for j in range(n):
            assert sp.expand(to_sympy(A[i, j], x) - S[i, j]) == 0


# brackets -------------------------------------------------------------------


def test_F4_bracket_with_x1_vanishes():
    g = make_family("Vn", 4)
    assert lie_poisson_bracket(g, Poly.var(4, 0), P(F4, 4)).is_zero()


def test_V5_bracket_x2_x3():
    g = make_family("Vn", 5)
    assert lie_poisson_bracket(g, Poly.var(5, 1), Poly.var(5, 2)) == Poly.var(5, 4)


@st.composite
def small_polys(draw, n=5):
    terms = draw(
        st.dictionaries(
            st.tuples(*[st.integers(0, 2)] * n),
            st.fractions(min_value=-5, max_value=5, max_denominator=3),
            max_size=3,
        )
    )
    return Poly(n, terms)


G5 = make_family("Vn", 5)


@given(small_polys(), small_polys(), small_polys())
@settings(max_examples=40, deadline=None)
def test_bracket_antisymmetry_leibniz_jacobi(f, h, k):
    br = lambda a, b: lie_poisson_bracket(G5, a, b)
    assert br(f, f).is_zero()
    assert br(f, h) == -br(h, f)
    assert br(f, h * k) == br(f, h) * k + h * br(f, k)
    assert (br(f, br(h, k)) + br(h, br(k, f)) + br(k, br(f, h))).is_zero()


def test_bracket_against_sympy():
    n = 6
    x, S = sympy_poisson(n, vn_pairs(n))
    rng = random.Random(11)
    g = make_family("Vn", n)
    for _ in range(5):
        f = Poly(n, {tuple(rng.randint(0, 2) for _ in range(n)): rng.randint(-3, 3) for _ in range(3)})
        h = Poly(n, {tuple(rng.randint(0, 2) for _ in range(n)): rng.randint(-3, 3) for _ in range(3)})
        fs, hs = to_sympy(f, x), to_sympy(h, x)
        ref = sum(sp.diff(fs, x[i]) * sp.diff(hs, x[j]) * S[i, j] for i in range(n) for j in range(n))
        assert sp.expand(to_sympy(lie_poisson_bracket(g, f, h), x) - ref) == 0


def test_bracket_rejects_wrong_arity():
    with pytest.raises(ValueError):
        lie_poisson_bracket(G5, Poly.var(4, 0), Poly.var(5, 0))


# ranks ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "fam,n,rank", [("Vn", 7, 6), ("Vn", 8, 6), ("Qn", 6, 2), ("Vn", 3, 2), ("Vn", 1, 0)]
)
def test_generic_rank_examples(fam, n, rank):
    r = generic_rank(make_family(fam, n))
    assert (r.rank, r.nu) == (rank, n - rank)


def test_generic_rank_abelian_zero():
    assert generic_rank(abelian(3)).rank == 0


@pytest.mark.parametrize("n", range(3, 16))
def test_rank_tables(n):
    assert generic_rank(make_family("Vn", n)).rank == (n - 1 if n % 2 else n - 2)
    assert generic_rank(make_family("Qn", n)).rank == 2


@pytest.mark.parametrize("fam,n", [("Vn", 6), ("Vn", 7), ("Qn", 6), ("Vn", 10)])
def test_symbolic_rank_certified(fam, n):
    sampled = generic_rank(make_family(fam, n))
    r = generic_rank(make_family(fam, n), symbolic=True)
    assert r.certified and r.rank == sampled.rank
    assert not r.minor_det.is_zero()


def test_rank_against_minor_oracle():
    g = make_family("Vn", 6)
    A = poisson_matrix(g)
    for pt in sample_points(6, 3, seed=5):
        assert rank_exact(A.at(pt)) == minor_rank(A.at(pt))


def test_sample_points_are_deterministic():
    assert sample_points(4, 3) == sample_points(4, 3)
    for pt in sample_points(4, 10, seed=1):
        for c in pt:
            assert 1 <= c.denominator <= 10 and abs(c) <= 20


@pytest.mark.parametrize("fam", ["Qn", "Vn"])
@pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9])
def test_rank_at_points_with_top_coordinate(fam, n):
    g = make_family(fam, n)
    generic = generic_rank(g).rank
    A = poisson_matrix(g)
    for pt in sample_points(n, 6, seed=77):
        if pt[-1] != 0:
            assert rank_exact(A.at(pt)) == generic
        pt[-1] = Fraction(0)
        assert rank_exact(A.at(pt)) <= generic


# Casimirs -------------------------------------------------------------------


def test_is_casimir_examples():
    assert is_casimir(make_family("Vn", 9), Poly.var(9, 8)) is None
    assert is_casimir(make_family("Vn", 6), P(F6, 6)) is None
    assert is_casimir(make_family("Vn", 4), Poly.var(4, 0)) == 1  # {x2, x1} = -x3


@pytest.mark.parametrize("q,expected", [(1, F4), (2, F6), (3, F8_CONSISTENT)])
def test_solver_examples(q, expected):
    assert casimir_solver_V_even(q) == P(expected, 2 * q + 2)


def test_printed_quartic_coefficient_is_not_a_casimir():
    printed = P(F8_CONSISTENT.replace("5/64", "15/48"), 8)
    g = make_family("Vn", 8)
    assert is_casimir(g, printed) == 0
    x = sp.symbols("x1:9")
    _, S = sympy_poisson(8, vn_pairs(8))
    ps = to_sympy(printed, x)
    residual = sp.expand(sum(S[0, k] * sp.diff(ps, x[k]) for k in range(8)))
    assert residual == sp.Rational(-45, 8) * x[6] ** 3 * x[7]


def test_partials_start_with_power_of_top():
    w = casimir_partials_V_even(3)
    assert w[0] == Poly.var(8, 7) ** 3
    assert len(w) == 4


@pytest.mark.parametrize("q", range(1, 7))
def test_solver_properties(q):
    n = 2 * q + 2
    g = make_family("Vn", n)
    F = casimir_solver_V_even(q)
    assert is_casimir(g, F) is None
    for i in range(q):
        assert F.diff(i).is_zero()
    lead = [0] * n
    lead[n - 2] = q + 1
    assert F.coefficient(lead) == leading_coefficient_V_even(q)
    assert F.diff(q) == Poly.var(n, n - 1) ** q


def test_leading_coefficients():
    assert [leading_coefficient_V_even(q) for q in (1, 2, 3)] == [
        Fraction(-1, 4), Fraction(1, 8), Fraction(-5, 64)
    ]


def test_solver_rejects_q0():
    with pytest.raises(ValueError):
        casimir_solver_V_even(0)


@pytest.mark.parametrize("q,expected", [(1, "-2*x4"), (2, "-8*x6^2"), (3, "48*x8^3")])
def test_det_Btilde(q, expected):
    assert det_Btilde(q).canonical() == expected


@pytest.mark.parametrize("q", [1, 2, 3, 4, 5])
def test_decomposition(q):
    n = 2 * q + 2
    c, G = casimir_decomposition(q)
    lead = Poly.var(n, n - 2) ** (q + 1)
    assert c * lead + Poly.var(n, n - 1) * G == casimir_solver_V_even(q)
    assert c == leading_coefficient_V_even(q)


def test_casimir_basis_families():
    assert casimir_basis(make_family("Vn", 7)).canonical() == ["x7"]
    cs = casimir_basis(make_family("Vn", 8))
    assert cs.canonical() == ["x8", F8_CONSISTENT] and cs.complete
    assert casimir_basis(make_family("Qn", 4)).canonical() == ["x4", "2*x2*x4 - x3^2"]


@pytest.mark.parametrize("n", range(3, 11))
def test_Q_casimirs_complete(n):
    g = make_family("Qn", n)
    gens = casimirs_Q(n)
    assert len(gens) == n - 2
    assert all(is_casimir(g, F) is None for F in gens)
    cs = casimir_basis(g)
    assert cs.complete and cs.nu == n - 2


def test_quadratic_ansatz_underfills_beyond_Q4():
    # a rescaled copy of Q5, so the closed form is not recognised
    relabelled = LieAlgebra(5, {(0, 1): {2: 2}, (0, 2): {3: 1}, (0, 3): {4: 1}})
    with pytest.warns(RuntimeWarning):
        cs = casimir_basis(relabelled, max_degree=2)
    assert cs.nu == 3 and len(cs.generators) == 2 and not cs.complete
    with pytest.raises(IncompleteBasis):
        casimir_basis(relabelled, strict=True)
    assert casimir_basis(relabelled, max_degree=3).complete


def test_homogeneous_casimirs_heisenberg():
    assert [F.canonical() for F in homogeneous_casimirs(heisenberg(), 2)] == ["x3^2"]


# orbits ---------------------------------------------------------------------


def test_orbit_hyperplane():
    o = classify_orbit(make_family("Vn", 5), [1, 2, 3, 4, 5])
    assert o.kind == "hyperplane" and o.dimension == 4
    assert [(p.canonical(), v) for p, v in o.equations] == [("x5", 5)]


def test_orbit_level_set():
    o = classify_orbit(make_family("Vn", 4), [1, 1, 1, 2])
    assert o.dimension == 2 and o.depth == 0
    assert [(p.canonical(), v) for p, v in o.equations] == [("x4", 2), (F4, Fraction(7, 4))]


def test_orbit_point_stratum():
    o = classify_orbit(make_family("Vn", 4), [1, 1, 0, 0])
    assert o.kind == "point" and o.dimension == 0 and o.depth == 2
    assert len(o.equations) == 4


def test_orbit_requires_Vn():
    with pytest.raises(ValueError):
        classify_orbit(make_family("Qn", 5), [1] * 5)


@pytest.mark.parametrize("n", range(3, 10))
def test_orbit_dimension_is_rank(n):
    g = make_family("Vn", n)
    A = poisson_matrix(g)
    rng = random.Random(n)
    for _ in range(6):
        pt = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
        for k in range(rng.randint(0, n - 1)):
            pt[n - 1 - k] = Fraction(0)
        o = classify_orbit(g, pt)
        assert o.dimension == rank_exact(A.at(pt))
        if o.depth == 0 and o.stratum_dim > 2:
            assert o.dimension + len(o.equations) == n
        assert all(p.evaluate(pt) == v for p, v in o.equations)
