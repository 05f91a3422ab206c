"""Lie algebras given by exact structure constants.

Basis elements are e_1..e_n in the text formats and 0..n-1 in the Python
API.  Only brackets [e_i, e_j] with i < j are stored; the others are
synthesised by antisymmetry.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exactmath import ExtForm, as_rat

Vector = Dict[int, Fraction]  # sparse vector: basis index -> coefficient


class JacobiViolation(ValueError):
    def __init__(self, triple):
        self.triple = triple
        i, j, k = (t + 1 for t in triple)
        super().__init__(f"Jacobi identity fails on (e{i}, e{j}, e{k})")


class NotClosed(ValueError):
    """The 2-form is not a cocycle, so the extension would break Jacobi."""


def _add_into(acc: Vector, vec: Mapping[int, Fraction], c: Fraction = Fraction(1)):
    for k, v in vec.items():
        s = acc.get(k, 0) + c * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


class LieAlgebra:
    """Finite-dimensional Lie algebra over Q.

    ``brackets`` maps ``(i, j)`` with ``i < j`` to a sparse vector
    ``{k: c^k_ij}``.  The Jacobi identity is checked on construction
    unless ``check=False``.
    """

    def __init__(
        self,
        dim: int,
        brackets: Mapping[Tuple[int, int], Mapping[int, object]] = None,
        labels: Optional[Sequence[str]] = None,
        name: str = "",
        check: bool = True,
    ):
        self.dim = dim
        self.name = name
        self.labels = list(labels) if labels else [f"e{i + 1}" for i in range(dim)]
        sc: Dict[Tuple[int, int], Vector] = {}
        for (i, j), vec in (brackets or {}).items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise IndexError(f"bracket index ({i}, {j}) out of range")
            if i == j:
                if any(as_rat(c) for c in vec.values()):
                    raise ValueError("[e_i, e_i] must vanish")
                continue
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            acc = sc.setdefault((i, j), {})
            for k, c in vec.items():
                if not 0 <= k < dim:
                    raise IndexError(f"bracket output index {k} out of range")
                _add_into(acc, {k: as_rat(c)}, Fraction(sign))
        self.sc = {key: v for key, v in sc.items() if v}
        if check:
            witness = jacobi_check(self)
            if witness is not None:
                raise JacobiViolation(witness)

    def __repr__(self):
        label = self.name or "LieAlgebra"
        return f"<{label} dim={self.dim} nonzero brackets={len(self.sc)}>"

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.dim == other.dim and self.sc == other.sc

    def __hash__(self):
        return hash(self.canonical_json())

    def structure_constant(self, i: int, j: int, k: int) -> Fraction:
        return self.bracket_basis(i, j).get(k, Fraction(0))

    def bracket_basis(self, i: int, j: int) -> Vector:
        if i < j:
            return self.sc.get((i, j), {})
        if i > j:
            return {k: -c for k, c in self.sc.get((j, i), {}).items()}
        return {}

    def bracket(self, u: Mapping[int, object], v: Mapping[int, object]) -> Vector:
        """Bracket of two sparse vectors."""
        out: Vector = {}
        for i, a in u.items():
            a = as_rat(a)
            if not a:
                continue
            for j, b in v.items():
                b = as_rat(b)
                if b and i != j:
                    _add_into(out, self.bracket_basis(i, j), a * b)
        return out

    def bracket_dense(self, u: Sequence, v: Sequence) -> List[Fraction]:
        res = self.bracket(_sparse(u), _sparse(v))
        return [res.get(k, Fraction(0)) for k in range(self.dim)]

    def is_abelian(self) -> bool:
        return not self.sc

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        brackets = []
        for (i, j) in sorted(self.sc):
            terms = [{"k": k + 1, "c": str(c)} for k, c in sorted(self.sc[(i, j)].items())]
            brackets.append({"i": i + 1, "j": j + 1, "terms": terms})
        return {"dim": self.dim, "brackets": brackets}

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "LieAlgebra":
        """Load the JSON algebra format; invalid algebras are rejected."""
        try:
            dim = int(data["dim"])
            raw = data.get("brackets", [])
            brackets: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
            for entry in raw:
                i, j = int(entry["i"]) - 1, int(entry["j"]) - 1
                vec = brackets.setdefault((i, j), {})
                for term in entry["terms"]:
                    c = term["c"]
                    if isinstance(c, float):
                        raise ValueError("structure constants must be exact 'p/q' strings")
                    k = int(term["k"]) - 1
                    vec[k] = vec.get(k, 0) + as_rat(str(c))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed algebra file: {exc}") from exc
        return cls(dim, brackets, name=name or data.get("name", ""))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "LieAlgebra":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _sparse(vec: Sequence) -> Vector:
    return {i: as_rat(v) for i, v in enumerate(vec) if as_rat(v)}


# ---------------------------------------------------------------------------
# families and constructions
# ---------------------------------------------------------------------------


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(n, {}, name=f"R{n}")


def heisenberg() -> LieAlgebra:
    return LieAlgebra(3, {(0, 1): {2: 1}}, name="H3")


def make_family(family: str, n: int) -> LieAlgebra:
    """Build Q_n or V_n.

    Q_n: [e_1, e_k] = e_{k+1} for k = 2..n-1.
    V_n: [e_i, e_j] = (j - i) e_{i+j} when i + j <= n.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    fam = family.lower()
    brackets: Dict[Tuple[int, int], Dict[int, int]] = {}
    if fam in ("qn", "q"):
        for k in range(2, n):
            brackets[(0, k - 1)] = {k: 1}
        name = f"Q{n}"
    elif fam in ("vn", "v"):
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1 - i):
                brackets[(i - 1, j - 1)] = {i + j - 1: j - i}
        name = f"V{n}"
    else:
        raise ValueError(f"unknown family {family!r}; expected 'Qn' or 'Vn'")
    return LieAlgebra(n, brackets, name=name, check=False)


def identify_family(g: LieAlgebra) -> Optional[str]:
    """Return 'Qn' or 'Vn' if ``g`` has exactly that family's structure constants."""
    for fam in ("Vn", "Qn"):
        if g.sc == make_family(fam, g.dim).sc:
            return fam
    return None


def jacobi_check(g: LieAlgebra) -> Optional[Tuple[int, int, int]]:
    """Exhaustive Jacobi test; returns a violating triple or None."""
    n = g.dim
    for i, j, k in itertools.combinations(range(n), 3):
        total: Vector = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            _add_into(total, g.bracket(g.bracket_basis(a, b), {c: Fraction(1)}))
        if total:
            return (i, j, k)
    return None


class Cocycle2:
    """A 2-form on g meant to be used as an extension cocycle."""

    def __init__(self, form: ExtForm):
        if form.terms and form.degree != 2:
            raise ValueError("a 2-cocycle must be a 2-form")
        self.form = form

    @classmethod
    def from_pairs(cls, n: int, values: Mapping[Tuple[int, int], object]) -> "Cocycle2":
        return cls(ExtForm(n, {(i, j): v for (i, j), v in values.items()}))

    def __call__(self, i: int, j: int) -> Fraction:
        return self.form.coefficient(i, j)

    def is_closed(self, g: LieAlgebra) -> bool:
        from .forms import ce_differential

        return ce_differential(g, self.form).is_zero()


def central_extension(g: LieAlgebra, alpha, check: bool = True) -> LieAlgebra:
    """[u, v] on the extension is [u, v]_g + alpha(u, v) e_{n+1}.

    Raises :class:`NotClosed` if alpha is not a cocycle (``check=False``
    skips this and builds the possibly non-Lie bracket table as is).
    """
    if isinstance(alpha, ExtForm):
        alpha = Cocycle2(alpha)
    if alpha.form.nvars != g.dim:
        raise ValueError("cocycle lives on an algebra of different dimension")
    if check and not alpha.is_closed(g):
        raise NotClosed("d(alpha) != 0: the extension would violate the Jacobi identity")
    n = g.dim
    brackets: Dict[Tuple[int, int], Dict[int, Fraction]] = {k: dict(v) for k, v in g.sc.items()}
    for (i, j), c in alpha.form.terms.items():
        brackets.setdefault((i, j), {})[n] = c
    return LieAlgebra(n + 1, brackets, name=f"{g.name}+", check=False)


def family_cocycle(family: str, n: int) -> Cocycle2:
    """Cocycle on the (n-1)-dimensional family member whose extension is the n-dimensional one."""
    top = make_family(family, n)
    values = {}
    for (i, j), vec in top.sc.items():
        if n - 1 in vec:
            values[(i, j)] = vec[n - 1]
    return Cocycle2.from_pairs(n - 1, values)


# ---------------------------------------------------------------------------
# subspaces and series
# ---------------------------------------------------------------------------


class Subspace:
    """Subspace of Q^n kept in reduced row-echelon form (sparse rows)."""

    def __init__(self, n: int, vectors: Iterable[Mapping[int, object]] = ()):
        self.n = n
        self._rows: Dict[int, Vector] = {}
        for v in vectors:
            self.add(v)

    def add(self, vec: Mapping[int, object]) -> bool:
        """Insert a vector; returns True if the dimension grew."""
        v: Vector = {k: as_rat(c) for k, c in vec.items() if as_rat(c)}
        for p in sorted(self._rows):
            c = v.get(p)
            if c:
                _add_into(v, self._rows[p], -c)
        if not v:
            return False
        lead = min(v)
        inv = 1 / v[lead]
        v = {k: c * inv for k, c in v.items()}
        for p, row in self._rows.items():
            c = row.get(lead)
            if c:
                _add_into(row, v, -c)
        self._rows[lead] = v
        return True

    @property
    def dim(self) -> int:
        return len(self._rows)

    def basis(self) -> List[List[Fraction]]:
        return [[self._rows[p].get(k, Fraction(0)) for k in range(self.n)] for p in sorted(self._rows)]

    def sparse_basis(self) -> List[Vector]:
        return [dict(self._rows[p]) for p in sorted(self._rows)]

    def pivots(self) -> List[int]:
        return sorted(self._rows)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.n == other.n and self._rows == other._rows

    def __repr__(self):
        return f"<Subspace dim={self.dim} of Q^{self.n} pivots={[p + 1 for p in self.pivots()]}>"

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, ({i: 1} for i in range(n)))

    @classmethod
    def span_of_basis(cls, n: int, indices: Iterable[int]) -> "Subspace":
        return cls(n, ({i: 1} for i in indices))


def bracket_subspaces(g: LieAlgebra, a: Subspace, b: Subspace) -> Subspace:
    out = Subspace(g.dim)
    basis_b = b.sparse_basis()
    for u in a.sparse_basis():
        for v in basis_b:
            w = g.bracket(u, v)
            if w:
                out.add(w)
                if out.dim == g.dim:
                    return out
    return out


def lower_central_series(g: LieAlgebra) -> List[Subspace]:
    """g_1 = g, g_{k+1} = [g, g_k], until the series stabilises (last entry repeats nothing)."""
    series = [Subspace.full(g.dim)]
    while series[-1].dim:
        nxt = bracket_subspaces(g, series[0], series[-1])
        if nxt.dim == series[-1].dim:
            break
        series.append(nxt)
    return series


def derived_series(g: LieAlgebra) -> List[Subspace]:
    """D^0 = g, D^k = [D^{k-1}, D^{k-1}], until it stabilises."""
    series = [Subspace.full(g.dim)]
    while series[-1].dim:
        nxt = bracket_subspaces(g, series[-1], series[-1])
        if nxt.dim == series[-1].dim:
            break
        series.append(nxt)
    return series


def nilpotency_class(g: LieAlgebra) -> Optional[int]:
    """Smallest c with g_{c+1} = 0, or None if g is not nilpotent."""
    lcs = lower_central_series(g)
    if lcs[-1].dim:
        return None
    return len(lcs) - 1


def solvable_step(g: LieAlgebra) -> Optional[int]:
    """Smallest k with D^k g = 0, or None if g is not solvable."""
    ds = derived_series(g)
    if ds[-1].dim:
        return None
    return len(ds) - 1


def center(g: LieAlgebra) -> Subspace:
    """Kernel of ad, computed exactly."""
    from .exactmath import nullspace

    n = g.dim
    rows = []
    for j in range(n):
        # coefficient of e_k in [x, e_j] = sum_i x_i c^k_ij
        for k in range(n):
            rows.append([g.structure_constant(i, j, k) for i in range(n)])
    return Subspace(n, (_sparse(v) for v in nullspace(rows, n)))


def is_graded_by_index(g: LieAlgebra) -> bool:
    """True when deg e_i = i makes g N-graded: [e_i, e_j] only involves e_{i+j}."""
    return all(set(vec) <= {i + j + 1} for (i, j), vec in g.sc.items())


def is_filiform(g: LieAlgebra) -> bool:
    """Nilpotent of maximal class: lower central series dims n, n-2, n-3, ..., 1, 0."""
    n = g.dim
    if n < 3:
        return False
    dims = [s.dim for s in lower_central_series(g)]
    return dims == [n] + list(range(n - 2, -1, -1))


@dataclass(frozen=True)
class Profile:
    dim: int
    lcs_dims: Tuple[int, ...]
    derived_dims: Tuple[int, ...]
    center_dim: int
    is_filiform: bool
    is_graded: bool
    generic_poisson_rank: int
    b1: int
    b2: int
    rational_sc: bool

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "lcs_dims": list(self.lcs_dims),
            "derived_dims": list(self.derived_dims),
            "center_dim": self.center_dim,
            "is_filiform": self.is_filiform,
            "is_N_graded": self.is_graded,
            "generic_poisson_rank": self.generic_poisson_rank,
            "b1": self.b1,
            "b2": self.b2,
            "rational_sc": self.rational_sc,
        }


def invariant_profile(g: LieAlgebra) -> Profile:
    """Isomorphism invariants.  Different profiles certify non-isomorphism;
    equal profiles prove nothing.

    ``is_graded`` refers to the fixed basis (deg e_i = i), so it is a
    property of the presentation rather than a true invariant.
    """
    from .coadjoint import generic_rank
    from .forms import cohomology_dims

    betti = cohomology_dims(g, min(2, g.dim))
    betti = list(betti) + [0] * (3 - len(betti))
    return Profile(
        dim=g.dim,
        lcs_dims=tuple(s.dim for s in lower_central_series(g)),
        derived_dims=tuple(s.dim for s in derived_series(g)),
        center_dim=center(g).dim,
        is_filiform=is_filiform(g),
        is_graded=is_graded_by_index(g),
        generic_poisson_rank=generic_rank(g).rank,
        b1=betti[1],
        b2=betti[2],
        rational_sc=all(isinstance(c, Fraction) for vec in g.sc.values() for c in vec.values()),
    )
