"""Chevalley-Eilenberg complex of left-invariant forms.

Sign convention: on 1-forms ``dw_k = sum_{i<j} c^k_ij w_i ^ w_j``, i.e.
``dphi(x, y) = phi([x, y])``, extended as an antiderivation.  With it the
V_n family gets ``dw_k = (k-2) w_1^w_{k-1} + (k-4) w_2^w_{k-2} + ...``
with positive coefficients.  The opposite convention only flips the sign
of d, so closedness and cohomology are unaffected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Sequence

from .exactmath import ExtForm, rank_exact
from .liealg import LieAlgebra, make_family


def _d_one_forms(g: LieAlgebra) -> List[ExtForm]:
    n = g.dim
    acc: List[Dict] = [dict() for _ in range(n)]
    for (i, j), vec in g.sc.items():
        for k, c in vec.items():
            acc[k][(i, j)] = acc[k].get((i, j), 0) + c
    return [ExtForm(n, a) for a in acc]


def ce_differential(g: LieAlgebra, phi: ExtForm) -> ExtForm:
    """d of a (possibly inhomogeneous) constant-coefficient form."""
    if phi.nvars != g.dim:
        raise ValueError("form and algebra dimensions differ")
    d1 = _d_one_forms(g)
    n = g.dim
    out = ExtForm(n)
    for idx, c in phi.terms.items():
        for pos, k in enumerate(idx):
            if not d1[k]:
                continue
            left = ExtForm(n, {idx[:pos]: 1})
            right = ExtForm(n, {idx[pos + 1:]: 1})
            term = left.wedge(d1[k]).wedge(right)
            out = out + term.scale(c if pos % 2 == 0 else -c)
    return out


def omega(n: int, k: int) -> ExtForm:
    """The dual basis 1-form w_k (1-based k, as in the text formats)."""
    return ExtForm.basis(n, k - 1)


def differential_matrix(g: LieAlgebra, p: int):
    """Matrix of d: Lambda^p -> Lambda^{p+1} in the lexicographic bases."""
    n = g.dim
    src = list(itertools.combinations(range(n), p))
    dst = list(itertools.combinations(range(n), p + 1))
    index = {t: r for r, t in enumerate(dst)}
    mat = [[0] * len(src) for _ in dst]
    for col, t in enumerate(src):
        for key, c in ce_differential(g, ExtForm(n, {t: 1})).terms.items():
            mat[index[key]][col] = c
    return mat


def _rank(mat) -> int:
    if not mat or not mat[0]:
        return 0
    return rank_exact(mat)


def cohomology_dims(g: LieAlgebra, p_max: int) -> List[int]:
    """Betti numbers b_0..b_{p_max} of the Chevalley-Eilenberg complex."""
    n = g.dim
    if not 0 <= p_max <= n:
        raise ValueError("p_max must lie in 0..dim")
    ranks = [_rank(differential_matrix(g, p)) if p < n else 0 for p in range(p_max + 1)]
    betti = []
    for p in range(p_max + 1):
        incoming = ranks[p - 1] if p > 0 else 0
        betti.append(comb(n, p) - ranks[p] - incoming)
    return betti


def check_d_squared(g: LieAlgebra) -> bool:
    """d o d = 0 on every basis form of every degree."""
    n = g.dim
    for p in range(n + 1):
        for t in itertools.combinations(range(n), p):
            if ce_differential(g, ce_differential(g, ExtForm(n, {t: 1}))):
                return False
    return True


@dataclass
class CEComplex:
    algebra: LieAlgebra
    matrices: Dict[int, list] = field(default_factory=dict)

    @classmethod
    def build(cls, g: LieAlgebra) -> "CEComplex":
        return cls(g, {p: differential_matrix(g, p) for p in range(g.dim)})

    def dims(self) -> List[int]:
        return [comb(self.algebra.dim, p) for p in range(self.algebra.dim + 1)]


def top_coefficient(form: ExtForm) -> int:
    n = form.nvars
    return form.terms.get(tuple(range(n)), 0)


def check_symplectic(g: LieAlgebra, form: ExtForm) -> dict:
    """closed: dOmega = 0; nondegenerate: Omega^m is a nonzero top form."""
    if form.terms and form.degree != 2:
        raise ValueError("a symplectic form has degree 2")
    n = g.dim
    if n % 2:
        return {"closed": ce_differential(g, form).is_zero(), "nondegenerate": False}
    top = top_coefficient(form.power(n // 2))
    return {"closed": ce_differential(g, form).is_zero(), "nondegenerate": top != 0}


def check_contact(g: LieAlgebra, form: ExtForm = None) -> dict:
    """w ^ (dw)^m != 0 for dim 2m+1.  Defaults to the last dual basis form."""
    n = g.dim
    if n % 2 == 0:
        raise ValueError("contact forms live in odd dimension")
    if form is None:
        form = omega(n, n)
    m = n // 2
    top = top_coefficient(form.wedge(ce_differential(g, form).power(m)))
    return {"contact": top != 0, "top_coefficient": str(top)}


def paired_form(n: int, total: int) -> ExtForm:
    """sum over i < j, i + j = total of (j - i) w_i ^ w_j on an n-dimensional algebra."""
    terms = {}
    for i in range(1, total):
        j = total - i
        if i < j <= n:
            terms[(i - 1, j - 1)] = j - i
    return ExtForm(n, terms)


def symplectic_form_V(m: int) -> ExtForm:
    """(2m-1) w_1^w_{2m} + (2m-3) w_2^w_{2m-1} + ... + w_m^w_{m+1} on V_{2m}."""
    return paired_form(2 * m, 2 * m + 1)


def bundle_curvature(n: int) -> ExtForm:
    """Curvature of M(n+1) -> M(n): (n-1) w_1^w_n + (n-3) w_2^w_{n-1} + ... on V_n."""
    return paired_form(n, n + 1)


def expected_dw_V(n: int, k: int) -> ExtForm:
    """The closed-form d w_k on V_n, written out term by term."""
    return paired_form(n, k)


def certificates_V(dims: Sequence[int] = range(2, 13)) -> dict:
    """Symplectic certificates for even members and contact ones for odd members."""
    out = {}
    for n in dims:
        g = make_family("Vn", n)
        if n % 2 == 0 and n >= 4:
            out[f"V{n}"] = {"kind": "symplectic", **check_symplectic(g, symplectic_form_V(n // 2))}
        elif n % 2 == 1 and n >= 3:
            out[f"V{n}"] = {"kind": "contact", **check_contact(g)}
    return out
