import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nilflow.exactmath import ExtForm
from nilflow.liealg import (
    Cocycle2,
    JacobiViolation,
    LieAlgebra,
    NotClosed,
    Subspace,
    abelian,
    central_extension,
    center,
    derived_series,
    family_cocycle,
    heisenberg,
    identify_family,
    invariant_profile,
    is_filiform,
    is_graded_by_index,
    jacobi_check,
    lower_central_series,
    make_family,
    nilpotency_class,
    solvable_step,
)

from oracles import jacobi_violations, vn_pairs


def test_V5_brackets():
    g = make_family("Vn", 5)
    assert g.bracket_basis(0, 3) == {4: 3}
    assert g.bracket_basis(1, 2) == {4: 1}
    assert g.bracket_basis(1, 3) == {}
    assert g.bracket_basis(3, 0) == {4: -3}


def test_Q3_is_V3_is_heisenberg():
    assert make_family("Qn", 3) == make_family("Vn", 3) == heisenberg()
    assert heisenberg().sc == {(0, 1): {2: 1}}


def test_Q4_and_V4_differ_by_rescaling_e4():
    q, v = make_family("Qn", 4), make_family("Vn", 4)
    assert q.sc[(0, 2)] == {3: 1} and v.sc[(0, 2)] == {3: 2}
    # e4 -> 2 e4 maps one onto the other
    rescaled = {k: {m: (c * 2 if m == 3 else c) for m, c in vec.items()} for k, vec in q.sc.items()}
    assert rescaled == v.sc


def test_V1_is_abelian():
    assert make_family("Vn", 1).is_abelian()
    assert make_family("Qn", 2).is_abelian()


def test_unknown_family():
    with pytest.raises(ValueError):
        make_family("Wn", 4)


def test_identify_family():
    assert identify_family(make_family("Qn", 6)) == "Qn"
    assert identify_family(make_family("Vn", 6)) == "Vn"
    assert identify_family(LieAlgebra(6, {})) is None


# Jacobi ---------------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 9))
def test_jacobi_vn_matches_dense_oracle(n):
    assert jacobi_violations(n, vn_pairs(n)) == []
    assert jacobi_check(make_family("Vn", n)) is None


def test_jacobi_abelian():
    assert jacobi_check(abelian(5)) is None


def test_rescaling_c3_12_alone_keeps_jacobi():
    # c^3_12 only meets brackets [e3, e_k] with k >= 3, which vanish in V6
    pairs = vn_pairs(6)
    pairs[(0, 1)] = {2: 2}
    assert jacobi_violations(6, pairs) == []
    assert jacobi_check(LieAlgebra(6, pairs, check=False)) is None


def test_perturbed_V6_violates_jacobi():
    pairs = vn_pairs(6)
    pairs[(1, 2)] = {4: 2}  # c^5_23: 1 -> 2
    bad = jacobi_violations(6, pairs)
    assert bad
    witness = jacobi_check(LieAlgebra(6, pairs, check=False))
    assert witness is not None and witness in bad
    with pytest.raises(JacobiViolation):
        LieAlgebra(6, pairs)


# central extensions ---------------------------------------------------------


def test_extension_of_plane_is_heisenberg():
    alpha = Cocycle2.from_pairs(2, {(0, 1): 1})
    assert central_extension(abelian(2), alpha) == heisenberg()


@pytest.mark.parametrize("fam", ["Vn", "Qn"])
@pytest.mark.parametrize("n", range(2, 10))
def test_family_towers_are_central_extensions(fam, n):
    alpha = family_cocycle(fam, n)
    assert central_extension(make_family(fam, n - 1), alpha) == make_family(fam, n)


def test_Vn_cocycle_formula():
    # alpha(e_i, e_j) = (j - i) when i + j = n
    n = 7
    alpha = family_cocycle("Vn", n)
    for i in range(1, n - 1):
        for j in range(i + 1, n - 1):
            assert alpha(i - 1, j - 1) == ((j - i) if i + j == n else 0)


def test_zero_cocycle_gives_direct_sum():
    g = make_family("Vn", 4)
    ext = central_extension(g, ExtForm(4))
    assert ext.dim == 5 and ext.sc == g.sc


def test_extension_restricts_and_is_central():
    g = make_family("Vn", 5)
    ext = central_extension(g, family_cocycle("Vn", 6))
    for (i, j), vec in g.sc.items():
        assert {k: c for k, c in ext.bracket_basis(i, j).items() if k < 5} == vec
    for i in range(6):
        assert ext.bracket_basis(i, 5) == {}


def test_non_closed_cocycle_rejected():
    g = make_family("Vn", 4)
    alpha = Cocycle2.from_pairs(4, {(1, 3): 1})  # d(w2^w4) = 2 w1^w2^w3
    assert not alpha.is_closed(g)
    with pytest.raises(NotClosed):
        central_extension(g, alpha)


two_forms = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda t: t[0] < t[1]),
    st.integers(-2, 2),
    max_size=6,
)


@given(two_forms)
@settings(max_examples=80, deadline=None)
def test_jacobi_of_extension_iff_closed(values):
    g = make_family("Vn", 5)
    alpha = Cocycle2.from_pairs(5, values)
    ext = central_extension(g, alpha, check=False)
    assert (jacobi_check(ext) is None) == alpha.is_closed(g)


# series ---------------------------------------------------------------------


def test_derived_series_V7():
    ds = derived_series(make_family("Vn", 7))
    assert ds[1] == Subspace.span_of_basis(7, range(2, 7))
    assert ds[2] == Subspace.span_of_basis(7, [6])
    assert ds[3].dim == 0
    assert solvable_step(make_family("Vn", 7)) == 3


def test_solvable_step_V6():
    assert solvable_step(make_family("Vn", 6)) == 2


def test_lcs_abelian():
    lcs = lower_central_series(abelian(4))
    assert [s.dim for s in lcs] == [4, 0]


@pytest.mark.parametrize("n", range(3, 41))
def test_Vn_derived_series_spans(n):
    ds = derived_series(make_family("Vn", n))
    k = len(ds) - 1
    for level in range(1, k + 1):
        start = 2 ** (level + 1) - 1
        assert ds[level] == Subspace.span_of_basis(n, range(start - 1, n))
    assert 2 ** k - 1 <= n < 2 ** (k + 1) - 1


@pytest.mark.parametrize("fam", ["Qn", "Vn"])
@pytest.mark.parametrize("n", range(3, 11))
def test_families_filiform_and_graded(fam, n):
    g = make_family(fam, n)
    assert nilpotency_class(g) == n - 1
    assert is_filiform(g)
    assert is_graded_by_index(g)


def test_V8_lcs_dims():
    assert [s.dim for s in lower_central_series(make_family("Vn", 8))] == [8, 6, 5, 4, 3, 2, 1, 0]


def test_non_nilpotent_detected():
    # the 2-dim non-abelian algebra [e1, e2] = e2
    g = LieAlgebra(2, {(0, 1): {1: 1}})
    assert nilpotency_class(g) is None
    assert solvable_step(g) == 2  # D^1 = span(e2), D^2 = 0


def test_center():
    assert center(heisenberg()) == Subspace.span_of_basis(3, [2])
    assert center(abelian(3)).dim == 3


def test_subspace_canonical():
    a = Subspace(3, [{0: 1, 1: 1}, {1: 2}])
    b = Subspace(3, [{0: 3}, {0: 1, 1: -1}])
    assert a == b
    assert a.basis() == [[1, 0, 0], [0, 1, 0]]


# profiles -------------------------------------------------------------------


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_profiles_coincide_small(k):
    assert invariant_profile(make_family("Qn", k)) == invariant_profile(make_family("Vn", k))


@pytest.mark.parametrize("k", [5, 6])
def test_profiles_separate_Q_and_V(k):
    pq = invariant_profile(make_family("Qn", k))
    pv = invariant_profile(make_family("Vn", k))
    assert (pq.generic_poisson_rank, pv.generic_poisson_rank) == (2, 4)
    assert pq != pv


def test_profile_fields_V8():
    p = invariant_profile(make_family("Vn", 8))
    assert p.is_filiform and p.is_graded and p.rational_sc
    assert p.lcs_dims == (8, 6, 5, 4, 3, 2, 1, 0)
    assert p.center_dim == 1


# JSON -----------------------------------------------------------------------


def test_json_round_trip(tmp_path):
    g = make_family("Vn", 6)
    path = tmp_path / "vn6.json"
    g.dump(path)
    data = json.loads(path.read_text())
    assert data["dim"] == 6
    assert {"i": 1, "j": 2, "terms": [{"k": 3, "c": "1"}]} in data["brackets"]
    assert LieAlgebra.load(path) == g


def test_json_loader_rejects_non_lie(tmp_path):
    data = make_family("Vn", 6).to_dict()
    for b in data["brackets"]:
        if (b["i"], b["j"]) == (2, 3):
            b["terms"] = [{"k": 5, "c": "2"}]
    with pytest.raises(JacobiViolation):
        LieAlgebra.from_dict(data)


def test_json_loader_rejects_floats():
    with pytest.raises(ValueError):
        LieAlgebra.from_dict({"dim": 3, "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "c": 0.5}]}]})


def test_json_rationals():
    g = LieAlgebra.from_dict({"dim": 3, "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "c": "3/7"}]}]})
    assert g.structure_constant(0, 1, 2) == Fraction(3, 7)
    assert g.digest() == LieAlgebra.from_dict(g.to_dict()).digest()
