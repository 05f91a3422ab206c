"""Group law on R^n ~ g from the truncated Campbell-Hausdorff series.

Elements are coordinate vectors of Fractions in exponential coordinates of
the first kind.  The homogeneous degree-k part of log(e^X e^Y) is written
with the Dynkin-Specht-Wever projection

    Z_k = (1/k) sum_w c_w [w_1, [w_2, ... [w_{k-1}, w_k]]]

where c_w is the coefficient of the word w in the associative series
log(e^X e^Y).  For a nilpotent algebra of class m the series stops at k = m.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, List, Sequence, Tuple

from .exactmath import as_rat
from .liealg import LieAlgebra, nilpotency_class

MAX_CLASS = 12


class NotNilpotent(ValueError):
    pass


class ClassTooHigh(ValueError):
    pass


@lru_cache(maxsize=None)
def word_coefficients(k: int) -> Dict[str, Fraction]:
    """c_w for all words of length k over {'x', 'y'} (zeros dropped)."""
    out = {}
    for letters in itertools.product("xy", repeat=k):
        w = "".join(letters)
        c = _log_coefficient(w)
        if c:
            out[w] = c
    return out


def _log_coefficient(w: str) -> Fraction:
    # split w into blocks x^p y^q (p + q >= 1); m blocks weigh (-1)^(m-1)/m * prod 1/(p! q!)
    k = len(w)
    # ways[pos][m]: summed block weights for w[:pos] using m blocks
    ways = [dict() for _ in range(k + 1)]
    ways[0][0] = Fraction(1)
    for pos in range(k):
        if not ways[pos]:
            continue
        for end in range(pos + 1, k + 1):
            block = w[pos:end]
            p = len(block) - len(block.lstrip("x"))
            if "x" in block[p:]:
                break
            q = len(block) - p
            weight = Fraction(1, factorial(p) * factorial(q))
            for m, v in ways[pos].items():
                ways[end][m + 1] = ways[end].get(m + 1, 0) + v * weight
    return sum(
        (Fraction((-1) ** (m - 1), m) * v for m, v in ways[k].items()), Fraction(0)
    )


def _check_nilpotent(g: LieAlgebra) -> int:
    m = nilpotency_class(g)
    if m is None:
        raise NotNilpotent("the Campbell-Hausdorff series does not terminate")
    if m > MAX_CLASS:
        raise ClassTooHigh(f"nilpotency class {m} exceeds the supported {MAX_CLASS}")
    return max(m, 1)


def _sparse(v: Sequence) -> Dict[int, Fraction]:
    return {i: c for i, c in enumerate(map(as_rat, v)) if c}


def bch_product(g: LieAlgebra, u: Sequence, v: Sequence, order: int = None) -> List[Fraction]:
    """u x v = u + v + 1/2 [u, v] + 1/12 ([u, [u, v]] + [v, [v, u]]) + ...

    ``order`` overrides the truncation degree (defaults to the nilpotency class).
    """
    if len(u) != g.dim or len(v) != g.dim:
        raise ValueError("element length differs from the algebra dimension")
    m = _check_nilpotent(g)
    if order is not None:
        if order > MAX_CLASS + 1:
            raise ClassTooHigh(f"truncation order {order} is not supported")
        m = order
    su, sv = _sparse(u), _sparse(v)
    letters = {"x": su, "y": sv}
    memo: Dict[str, Dict[int, Fraction]] = {}

    def nested(word: str) -> Dict[int, Fraction]:
        if word in memo:
            return memo[word]
        if len(word) == 1:
            val = letters[word]
        else:
            inner = nested(word[1:])
            val = g.bracket(letters[word[0]], inner) if inner else {}
        memo[word] = val
        return val

    total = [Fraction(0)] * g.dim
    for i, c in su.items():
        total[i] += c
    for i, c in sv.items():
        total[i] += c
    for k in range(2, m + 1):
        for w, c in word_coefficients(k).items():
            if w[-1] == w[-2]:
                continue
            val = nested(w)
            for i, a in val.items():
                total[i] += c * a / k
    return total


def inverse(u: Sequence) -> List[Fraction]:
    return [-as_rat(c) for c in u]


def identity(n: int) -> List[Fraction]:
    return [Fraction(0)] * n


def _random_element(rng: random.Random, n: int) -> List[Fraction]:
    return [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)]


def group_axioms_check(g: LieAlgebra, samples: int = 20, seed: int = 0xC0FFEE) -> dict:
    """Associativity, identity and inverse-by-negation on seeded random triples (exact)."""
    rng = random.Random(seed)
    n = g.dim
    e = identity(n)
    report = {"associativity": True, "identity": True, "inverse": True, "samples": samples}
    for _ in range(samples):
        a, b, c = (_random_element(rng, n) for _ in range(3))
        if bch_product(g, bch_product(g, a, b), c) != bch_product(g, a, bch_product(g, b, c)):
            report["associativity"] = False
            report.setdefault("witness", [list(map(str, t)) for t in (a, b, c)])
        if bch_product(g, a, e) != a or bch_product(g, e, a) != a:
            report["identity"] = False
        if bch_product(g, inverse(a), a) != e or bch_product(g, a, inverse(a)) != e:
            report["inverse"] = False
    report["ok"] = report["associativity"] and report["identity"] and report["inverse"]
    return report


def lattice_closure_report(g: LieAlgebra, box_radius: int = 1, max_pairs: int = 20000, seed: int = 0xC0FFEE) -> dict:
    """Are integer points of the box closed under the product in these coordinates?

    This reports facts; it does not decide whether some other coordinates
    make the integer points a lattice.
    """
    integer_sc = all(c.denominator == 1 for vec in g.sc.values() for c in vec.values())
    rng_vals = range(-box_radius, box_radius + 1)
    points = [list(map(Fraction, p)) for p in itertools.product(rng_vals, repeat=g.dim)]
    pairs = len(points) ** 2
    if pairs <= max_pairs:
        it = itertools.product(points, points)
        exhaustive = True
    else:
        rng = random.Random(seed)
        it = ((rng.choice(points), rng.choice(points)) for _ in range(max_pairs))
        exhaustive = False
    denominators: Counter = Counter()
    witness = None
    checked = 0
    for a, b in it:
        prod = bch_product(g, a, b)
        checked += 1
        den = max(c.denominator for c in prod) if prod else 1
        denominators[den] += 1
        if den != 1 and witness is None:
            witness = {"u": [str(c) for c in a], "v": [str(c) for c in b], "product": [str(c) for c in prod]}
    return {
        "integer_structure_constants": integer_sc,
        "closed": witness is None,
        "witness": witness,
        "denominators": {str(k): v for k, v in sorted(denominators.items())},
        "pairs_checked": checked,
        "exhaustive": exhaustive,
    }
