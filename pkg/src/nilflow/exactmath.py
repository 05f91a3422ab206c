"""Exact arithmetic: rationals, sparse polynomials, matrices and exterior forms.

Everything here works over :class:`fractions.Fraction` and never rounds.
Indices are 0-based in the Python API; text renderings use 1-based names
(``x1``, ``w1``) so that ``x1*x3`` means the first and third coordinates.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

Rat = Fraction
Number = Union[int, Fraction]
Monomial = Tuple[int, ...]


class CompatibilityError(ValueError):
    """Raised when a family of partial derivatives is not a gradient."""


def as_rat(value) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: silently importing binary64 rounding into exact
    code is how wrong answers get in.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def rat_str(q: Fraction) -> str:
    return str(q)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


def _grlex_key(exp: Monomial):
    # descending total degree, then lexicographic with x1 > x2 > ...
    return (-sum(exp), tuple(-e for e in exp))


class Poly:
    """Sparse multivariate polynomial with exact rational coefficients.

    ``terms`` maps exponent tuples (length ``nvars``) to nonzero Fractions.
    Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, Number] = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} has wrong length for {nvars} variables")
                c = as_rat(c)
                if c:
                    clean[tuple(exp)] = c
        self.terms: Dict[Monomial, Fraction] = clean
        self._hash = None

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c: Number) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Number = 1) -> "Poly":
        return cls(len(exp), {tuple(exp): c})

    # basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def support(self) -> set:
        """Indices of the variables that actually occur."""
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exp), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def to_rat(self) -> Fraction:
        """The value of a degree <= 0 polynomial."""
        if self.degree() > 0:
            raise ValueError("polynomial is not constant")
        return self.constant_term()

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    # arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Poly.const(self.nvars, as_rat(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c: Number) -> "Poly":
        c = as_rat(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce(other)
        out: Dict[Monomial, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return self.exact_div(other)
        return self.scale(1 / as_rat(other))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.degree() <= 0 and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # calculus ----------------------------------------------------------------

    def diff(self, i: int) -> "Poly":
        """Formal partial derivative with respect to variable ``i``."""
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly(self.nvars, out)

    def antiderivative(self, i: int) -> "Poly":
        """Termwise antiderivative in variable ``i`` with zero constant."""
        out = {}
        for e, c in self.terms.items():
            ne = list(e)
            ne[i] += 1
            out[tuple(ne)] = c / ne[i]
        return Poly(self.nvars, out)

    def gradient(self) -> List["Poly"]:
        return [self.diff(i) for i in range(self.nvars)]

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact value at a rational point."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [as_rat(p) for p in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for p, a in zip(pt, e):
                if a:
                    v *= p ** a
            total += v
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for e, c in self.terms.items():
            v = float(c)
            for p, a in zip(point, e):
                if a:
                    v *= p ** a
            total += v
        return total

    def substitute(self, values: Mapping[int, Number]) -> "Poly":
        """Replace the listed variables by constants (the variable count is kept)."""
        vals = {i: as_rat(v) for i, v in values.items()}
        out: Dict[Monomial, Fraction] = {}
        for e, c in self.terms.items():
            ne = list(e)
            for i, v in vals.items():
                if ne[i]:
                    c = c * v ** ne[i]
                    ne[i] = 0
            if c:
                key = tuple(ne)
                out[key] = out.get(key, 0) + c
        return Poly(self.nvars, out)

    def embed(self, nvars: int, mapping: Sequence[int] = None) -> "Poly":
        """Re-home into ``nvars`` variables; variable i goes to ``mapping[i]``."""
        if mapping is None:
            mapping = range(self.nvars)
        mapping = list(mapping)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, a in enumerate(e):
                if a:
                    ne[mapping[i]] += a
            out[tuple(ne)] = out.get(tuple(ne), 0) + c
        return Poly(nvars, out)

    def exact_div(self, divisor: "Poly") -> "Poly":
        """Quotient of an exact division; raises ValueError if a remainder is left."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead_e, lead_c = divisor.sorted_terms()[0]
        rem = self
        quot: Dict[Monomial, Fraction] = {}
        while rem:
            e, c = rem.sorted_terms()[0]
            qe = tuple(a - b for a, b in zip(e, lead_e))
            if min(qe) < 0:
                raise ValueError("polynomial division is not exact")
            qc = c / lead_c
            quot[qe] = qc
            rem = rem - Poly(self.nvars, {qe: qc}) * divisor
        return Poly(self.nvars, quot)

    def primitive(self) -> "Poly":
        """Scale to coprime integer coefficients with a positive leading term."""
        if not self.terms:
            return self
        den = reduce(math.lcm, (c.denominator for c in self.terms.values()), 1)
        num = reduce(math.gcd, (c.numerator for c in self.terms.values()), 0)
        factor = Fraction(den, num)
        if self.sorted_terms()[0][1] < 0:
            factor = -factor
        return self.scale(factor)

    # text ------------------------------------------------------------------

    def __str__(self):
        return self.canonical()

    def __repr__(self):
        return f"Poly({self.nvars}, {self.canonical()!r})"

    def canonical(self) -> str:
        """Graded-lex sorted rendering such as ``x2*x4 - 1/4*x3^2``."""
        if not self.terms:
            return "0"
        parts = []
        for idx, (e, c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}" for i, a in enumerate(e) if a
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if idx == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    @classmethod
    def parse(cls, text: str, nvars: int) -> "Poly":
        """Inverse of :meth:`canonical` (accepts any order of terms)."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls.zero(nvars)
        if s[0] not in "+-":
            s = "+" + s
        out: Dict[Monomial, Fraction] = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", s):
            coef = Fraction(1)
            exp = [0] * nvars
            for factor in body.split("*"):
                m = re.fullmatch(r"x(\d+)(?:\^(\d+))?", factor)
                if m:
                    i = int(m.group(1)) - 1
                    if not 0 <= i < nvars:
                        raise ValueError(f"variable x{i + 1} out of range")
                    exp[i] += int(m.group(2) or 1)
                else:
                    coef *= Fraction(factor)
            if sign == "-":
                coef = -coef
            key = tuple(exp)
            out[key] = out.get(key, 0) + coef
        return cls(nvars, out)


def variables(nvars: int) -> List[Poly]:
    """The coordinate polynomials x1..xn, handy for unpacking."""
    return [Poly.var(nvars, i) for i in range(nvars)]


def integrate_exact_form(partials: Sequence[Poly], indices: Sequence[int]) -> Poly:
    """Recover F from prescribed partials ``dF/dx_i = partials[k]`` (i = indices[k]).

    Variables outside ``indices`` are treated as parameters.  The constant of
    integration (a function of the parameters only) is fixed to zero, so the
    result has no constant term and no monomial free of the integrated
    variables.
    """
    if len(partials) != len(indices):
        raise ValueError("one partial derivative per index is required")
    if len(set(indices)) != len(indices):
        raise ValueError("repeated index")
    if not partials:
        raise ValueError("nothing to integrate")
    nvars = partials[0].nvars
    if any(p.nvars != nvars for p in partials):
        raise ValueError("variable count mismatch")
    for (a, i), (b, k) in itertools.combinations(zip(partials, indices), 2):
        if a.diff(k) != b.diff(i):
            raise CompatibilityError(
                f"mixed partials differ for x{i + 1}, x{k + 1}: not a gradient"
            )
    F = Poly.zero(nvars)
    for s, i in zip(partials, indices):
        F = F + (s - F.diff(i)).antiderivative(i)
    for s, i in zip(partials, indices):
        if F.diff(i) != s:  # pragma: no cover - guarded by the mixed-partial test
            raise CompatibilityError(f"integration failed to reproduce dF/dx{i + 1}")
    return F


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


def _integer_rows(rows: Sequence[Sequence]) -> Tuple[List[List[int]], Fraction]:
    """Clear denominators row by row; returns the rows and the product of the scalings."""
    out = []
    scale = Fraction(1)
    for row in rows:
        row = [as_rat(v) for v in row]
        den = reduce(math.lcm, (v.denominator for v in row), 1)
        out.append([int(v * den) for v in row])
        scale *= den
    return out, scale


def _bareiss(m: List[List[int]]) -> Tuple[int, int]:
    """In-place fraction-free elimination; returns (rank, signed last pivot)."""
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    prev = 1
    rank = 0
    sign = 1
    for col in range(ncols):
        if rank == nrows:
            break
        piv = next((r for r in range(rank, nrows) if m[r][col]), None)
        if piv is None:
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
            sign = -sign
        p = m[rank][col]
        for r in range(rank + 1, nrows):
            f = m[r][col]
            row_r = m[r]
            row_p = m[rank]
            for c in range(col + 1, ncols):
                row_r[c] = (p * row_r[c] - f * row_p[c]) // prev
            row_r[col] = 0
        prev = p
        rank += 1
    return rank, sign * prev


def rank_exact(matrix: Sequence[Sequence]) -> int:
    """Exact rank of a rational matrix by Bareiss elimination."""
    if not matrix or not len(matrix[0]):
        return 0
    rows, _ = _integer_rows(matrix)
    rank, _ = _bareiss(rows)
    return rank


def det_exact(matrix: Sequence[Sequence]) -> Fraction:
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    rows, scale = _integer_rows(matrix)
    rank, last = _bareiss(rows)
    if rank < n:
        return Fraction(0)
    return Fraction(last) / scale


def transpose(matrix: Sequence[Sequence]) -> List[list]:
    return [list(col) for col in zip(*matrix)]


def nullspace(matrix: Sequence[Sequence], ncols: int = None) -> List[List[Fraction]]:
    """Basis of the right kernel, one vector per free column of the RREF."""
    rows = [[as_rat(v) for v in row] for row in matrix]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for row, pc in zip(rows, pivots):
            v[pc] = -row[fcol]
        basis.append(v)
    return basis


def poly_det(matrix: Sequence[Sequence[Poly]]) -> Poly:
    """Symbolic determinant by memoised Laplace expansion.

    Rows are visited sparsest first, which keeps the expansion tiny for the
    triangular-looking Poisson matrices this package deals with.
    """
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        raise ValueError("empty matrix")
    nvars = matrix[0][0].nvars
    order = sorted(range(n), key=lambda r: sum(1 for v in matrix[r] if v))
    # sign of the row permutation
    perm_sign = 1
    seen = [False] * n
    for start in range(n):
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length and length % 2 == 0:
            perm_sign = -perm_sign
    memo: Dict[int, Poly] = {}

    def expand(k: int, used: int) -> Poly:
        if k == n:
            return Poly.const(nvars, 1)
        if used in memo:
            return memo[used]
        row = matrix[order[k]]
        total = Poly.zero(nvars)
        position = 0
        for c in range(n):
            if used >> c & 1:
                continue
            if row[c]:
                sub = expand(k + 1, used | (1 << c))
                if sub:
                    term = row[c] * sub
                    total = total - term if position % 2 else total + term
            position += 1
        memo[used] = total
        return total

    det = expand(0, 0)
    return det if perm_sign > 0 else -det


# ---------------------------------------------------------------------------
# exterior forms
# ---------------------------------------------------------------------------


def _sort_sign(idx: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sign of the sorting permutation, or 0 if an index repeats."""
    if len(set(idx)) != len(idx):
        return 0, ()
    arr = list(idx)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


class ExtForm:
    """Constant-coefficient exterior form on the dual basis w1..wn.

    ``terms`` maps strictly increasing 0-based index tuples to Fractions.
    A form may mix degrees (only sums of wedges of homogeneous forms do).
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], Number] = None):
        self.nvars = nvars
        clean: Dict[Tuple[int, ...], Fraction] = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if any(not 0 <= i < nvars for i in idx):
                raise IndexError(f"form index {idx} out of range for dimension {nvars}")
            sign, key = _sort_sign(idx)
            c = as_rat(c) * sign
            if c:
                clean[key] = clean.get(key, 0) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def basis(cls, nvars: int, *idx: int) -> "ExtForm":
        return cls(nvars, {tuple(idx): 1})

    @property
    def degree(self) -> int:
        degs = {len(k) for k in self.terms}
        if len(degs) > 1:
            raise ValueError("form is not homogeneous")
        return degs.pop() if degs else 0

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, *idx: int) -> Fraction:
        sign, key = _sort_sign(idx)
        return sign * self.terms.get(key, Fraction(0))

    def __add__(self, other: "ExtForm") -> "ExtForm":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return ExtForm(self.nvars, out)

    def __neg__(self):
        return ExtForm(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Number) -> "ExtForm":
        c = as_rat(c)
        return ExtForm(self.nvars, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def wedge(self, other: "ExtForm") -> "ExtForm":
        out: Dict[Tuple[int, ...], Fraction] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                sign, key = _sort_sign(k1 + k2)
                if sign:
                    out[key] = out.get(key, 0) + sign * v1 * v2
        return ExtForm(self.nvars, out)

    __xor__ = wedge

    def power(self, k: int) -> "ExtForm":
        result = ExtForm(self.nvars, {(): 1})
        for _ in range(k):
            result = result.wedge(self)
        return result

    def __eq__(self, other):
        return isinstance(other, ExtForm) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda t: (len(t), t)):
            v = self.terms[k]
            name = "^".join(f"w{i + 1}" for i in k) or "1"
            coef = "" if abs(v) == 1 and k else f"{abs(v)}*" if k else str(abs(v))
            parts.append(("-" if v < 0 else "+", coef + name if k else coef))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f" {s} {b}" for s, b in parts[1:])

    __repr__ = __str__

    @classmethod
    def parse(cls, text: str, nvars: int) -> "ExtForm":
        """Parse sums like ``3*w1^w4 + w2^w3`` (1-based indices)."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls(nvars)
        if s[0] not in "+-":
            s = "+" + s
        terms: Dict[Tuple[int, ...], Fraction] = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", s):
            coef = Fraction(1)
            idx: Tuple[int, ...] = ()
            for factor in body.split("*"):
                if factor.startswith("w"):
                    idx = tuple(int(p[1:]) - 1 for p in factor.split("^"))
                else:
                    coef *= Fraction(factor)
            form = cls(nvars, {idx: -coef if sign == "-" else coef})
            for k, v in form.terms.items():
                terms[k] = terms.get(k, 0) + v
        return cls(nvars, terms)
