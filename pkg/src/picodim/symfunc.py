"""Symmetric-group data and the cocharacter of an algebra.

Partitions are plain tuples of positive integers in weakly decreasing order.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

from .algebra import DEFAULT_PRIMES, AlgebraSpec, Element, build_W, product_chain
from .codim import image_trace, row_space
from .freepoly import WITNESS_DEGREE, evaluate_witness


def partitions(n: int, max_part: int | None = None, max_len: int | None = None):
    """Partitions of n in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first, None if max_len is None else max_len - 1):
            yield (first,) + rest


def validate_partition(lam) -> tuple:
    lam = tuple(int(x) for x in lam if x)
    if any(x < 0 for x in lam) or any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError(f"{lam} is not a partition")
    return lam


def conjugate(lam) -> tuple:
    return tuple(sum(1 for x in lam if x > j) for j in range(lam[0])) if lam else ()


def hook_lengths(lam) -> list:
    lam = validate_partition(lam)
    conj = conjugate(lam)
    return [lam[i] - j + conj[j] - i - 1 for i in range(len(lam)) for j in range(lam[i])]


def hook_degree(lam) -> int:
    """deg chi_lambda = n! / prod of hook lengths."""
    lam = validate_partition(lam)
    return factorial(sum(lam)) // prod(hook_lengths(lam))


def _beta(lam, length: int) -> tuple:
    lam = tuple(lam) + (0,) * (length - len(lam))
    return tuple(lam[i] + length - 1 - i for i in range(length))


def _from_beta(beta) -> tuple:
    beta = sorted(beta, reverse=True)
    k = len(beta)
    return tuple(x for x in (beta[i] - (k - 1 - i) for i in range(k)) if x)


@lru_cache(maxsize=None)
def _mn(lam: tuple, cls: tuple) -> int:
    if not cls:
        return 1 if not lam else 0
    r, rest = cls[0], cls[1:]
    length = len(lam) + r
    beta = _beta(lam, length)
    beads = set(beta)
    total = 0
    for b in beta:
        if b - r >= 0 and b - r not in beads:
            between = sum(1 for x in beta if b - r < x < b)
            new = _from_beta((beads - {b}) | {b - r})
            total += (-1) ** between * _mn(new, rest)
    return total


def mn_character(lam, cls) -> int:
    """chi_lambda at the class of cycle type ``cls`` (Murnaghan-Nakayama)."""
    lam, cls = validate_partition(lam), validate_partition(cls)
    if sum(lam) != sum(cls):
        raise ValueError("partition and class must have the same size")
    return _mn(lam, tuple(sorted(cls, reverse=True)))


def class_size(cls) -> int:
    cls = validate_partition(cls)
    z = prod(r ** c * factorial(c) for r, c in Counter(cls).items())
    return factorial(sum(cls)) // z


def class_representative(cls) -> tuple:
    """Permutation (as image tuple) with cycles on consecutive integers."""
    sigma, start = [], 0
    for r in cls:
        sigma.extend(range(start + 1, start + r))
        sigma.append(start)
        start += r
    return tuple(sigma)


def cycle_type(sigma) -> tuple:
    seen, out = set(), []
    for i in range(len(sigma)):
        if i not in seen:
            length, j = 0, i
            while j not in seen:
                seen.add(j)
                j = sigma[j]
                length += 1
            out.append(length)
    return tuple(sorted(out, reverse=True))


def _lift(x: int, p: int) -> int:
    return x - p if x > p // 2 else x


def quotient_character(A: AlgebraSpec, n: int, p: int, override: bool = False) -> dict:
    """Character of S_n on P_n / (P_n cap Id(A)), one trace per cycle type."""
    ech, layout = row_space(A, n, p, override)
    return {cls: _lift(image_trace(ech, layout, class_representative(cls)), p)
            for cls in partitions(n)}


class MultiplicityError(ArithmeticError):
    pass


@dataclass
class CocharacterDecomp:
    n: int
    mult: dict = field(default_factory=dict)
    character: dict = field(default_factory=dict, repr=False)

    def nonzero(self) -> dict:
        return {lam: m for lam, m in self.mult.items() if m}

    def degree_sum(self) -> int:
        return sum(m * hook_degree(lam) for lam, m in self.mult.items())


def decompose_character(chi: dict, n: int) -> dict:
    out = {}
    for lam in partitions(n):
        s = sum(Fraction(class_size(c) * v * mn_character(lam, c)) for c, v in chi.items())
        m = s / factorial(n)
        if m.denominator != 1 or m < 0:
            raise MultiplicityError(f"multiplicity of {lam} came out as {m}")
        out[lam] = int(m)
    return out


def multiplicities(A: AlgebraSpec, n: int, primes=DEFAULT_PRIMES, override: bool = False) -> CocharacterDecomp:
    chars = [quotient_character(A, n, p, override) for p in primes]
    if any(c != chars[0] for c in chars[1:]):
        raise MultiplicityError(f"quotient characters disagree across primes {list(primes)}")
    return CocharacterDecomp(n, decompose_character(chars[0], n), chars[0])


def colength(dec: CocharacterDecomp) -> int:
    return sum(dec.mult.values())


def colength_bound(d: int, n: int) -> int:
    return d * (n + 1) ** (d * d + d)


# --- the (k, l, m, t) coordinates on four-row partitions ---------------------

@dataclass(frozen=True)
class KlmtDecomposition:
    k: int
    l: int
    m: int
    t: int

    @property
    def partition(self) -> tuple:
        k, l, m, t = self.k, self.l, self.m, self.t
        return validate_partition((k + l + m + t, k + l + m, k + l, k))

    @property
    def n(self) -> int:
        return 4 * self.k + 3 * self.l + 2 * self.m + self.t


def decompose_klmt(lam) -> KlmtDecomposition:
    lam = validate_partition(lam)
    if len(lam) > 4:
        raise ValueError(f"{lam} has more than four parts")
    a, b, c, d = tuple(lam) + (0,) * (4 - len(lam))
    return KlmtDecomposition(d, c - d, b - c, a - b)


def lemma4_failures(dec: KlmtDecomposition) -> list:
    """Names of the violated hypotheses m+t >= 2k, m <= 2k."""
    bad = []
    if dec.m + dec.t < 2 * dec.k:
        bad.append(f"m+t >= 2k fails ({dec.m}+{dec.t} < {2 * dec.k})")
    if dec.m > 2 * dec.k:
        bad.append(f"m <= 2k fails ({dec.m} > {2 * dec.k})")
    return bad


def lemma4_witness(dec: KlmtDecomposition, A: AlgebraSpec | None = None) -> tuple[Element, dict]:
    """Evaluate the composite witness for the partition with coordinates ``dec``.

    Every e_{-1} inside the factors becomes e_{-1} + e_0, and the product is
    then multiplied on the right by enough copies of e_{-1} + e_0 to reach
    degree n. The e_0 coordinate of the result must be +-1.
    """
    bad = lemma4_failures(dec)
    if bad:
        raise ValueError("; ".join(bad))
    k, l, m, t = dec.k, dec.l, dec.m, dec.t
    if dec.n == 0:
        raise ValueError("empty partition")
    W = build_W() if A is None else A
    shifted = W.basis(0) + W.basis(1)
    value = {name: evaluate_witness(name, W, m1=shifted) for name in ("f1", "f2", "f3", "f4")}
    if k == 0:
        factors = ["f2"] * l
        t0 = 0
    elif m % 2 == 0:
        q = m // 2
        factors = ["f1"] * (k - q) + ["f2"] * l + ["f4"] * q
        t0 = 2 * (k - q)
    else:
        q = (m - 1) // 2
        factors = ["f1"] * (k - q - 1) + ["f2"] * l + ["f3"] + ["f4"] * q
        t0 = 2 * (k - q) - 1
    tail = t - t0
    seq = [value[f] for f in factors] + [shifted] * tail
    result = product_chain(W, seq)
    degree = sum(WITNESS_DEGREE[f] for f in factors) + tail
    e0 = result.coeffs[1]
    grades = W.grades or (-1, 0, 1, 2)
    report = {
        "klmt": [k, l, m, t],
        "partition": list(dec.partition),
        "factors": factors,
        "tail_factors": tail,
        "degree": degree,
        "degree_matches": degree == dec.n,
        "coordinates": [str(c) for c in result.coeffs],
        "e0_coordinate": str(e0),
        "e0_is_unit": abs(e0) == 1,
        "remainder_grades": [g for g, c in zip(grades, result.coeffs) if c and g != 0],
        "nonzero": not result.is_zero(),
    }
    return result, report
