"""Structure-constant algebras over Q or a prime field, and the algebra W.

W is four-dimensional with basis e_{-1}, e_0, e_1, e_2 stored at indices
0..3. Products of basis elements are either zero or a single basis vector:

* e_0 is a two-sided unit;
* for i, j != 0, e_i e_j = 0 when i > j, i + j < -1 or i + j > 2;
* otherwise e_i e_j = e_{i+j}.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence, Union

import numpy as np

P1 = 2**31 - 1
P2 = 2**31 - 19
DEFAULT_PRIMES = (P1, P2)


@dataclass(frozen=True)
class Residue:
    """An element of Z/pZ, stored in [0, p)."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.p != self.p:
                raise ValueError(f"mixed moduli {self.p} and {other.p}")
            return other.value
        return to_residue(other, self.p)

    def __add__(self, other):
        return Residue(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return Residue(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return Residue(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return Residue(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.p)

    def __truediv__(self, other):
        return self * pow(self._coerce(other), -1, self.p)

    def __eq__(self, other):
        if isinstance(other, Residue):
            return self.p == other.p and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == to_residue(other, self.p)
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


Scalar = Union[Fraction, Residue]


def to_residue(q, p: int) -> int:
    """Reduce an integer or rational into [0, p)."""
    q = Fraction(q)
    if q.denominator % p == 0:
        raise ZeroDivisionError(f"denominator {q.denominator} vanishes mod {p}")
    return q.numerator * pow(q.denominator, -1, p) % p


@dataclass(frozen=True)
class Element:
    coeffs: tuple

    @classmethod
    def zero(cls, d: int, p: int | None = None) -> "Element":
        z = Fraction(0) if p is None else Residue(0, p)
        return cls((z,) * d)

    @classmethod
    def basis(cls, d: int, i: int, p: int | None = None) -> "Element":
        c = [Fraction(0)] * d
        c[i] = Fraction(1)
        e = cls(tuple(c))
        return e if p is None else e.reduce(p)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def reduce(self, p: int) -> "Element":
        return Element(tuple(Residue(to_residue(c, p), p) for c in self.coeffs))

    def _check(self, other: "Element"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Element":
        return Element(tuple(-a for a in self.coeffs))

    def scale(self, c) -> "Element":
        return Element(tuple(c * a for a in self.coeffs))

    def __rmul__(self, c) -> "Element":
        return self.scale(c)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self):
        return f"Element({[str(c) for c in self.coeffs]})"


@dataclass(frozen=True)
class AlgebraSpec:
    """Finite-dimensional algebra given by structure constants.

    ``table[i][j]`` is the coefficient vector of ``b_i * b_j``.
    """

    dim: int
    basis_labels: tuple
    table: tuple
    grades: tuple | None = None
    unit_index: int | None = None

    def __post_init__(self):
        d = self.dim
        if d < 1:
            raise ValueError("dimension must be positive")
        if len(self.basis_labels) != d:
            raise ValueError("basis_labels length differs from dim")
        if len(self.table) != d or any(len(row) != d for row in self.table):
            raise ValueError("table must be d x d")
        for row in self.table:
            for vec in row:
                if len(vec) != d:
                    raise ValueError("structure constant vectors must have length d")
                if not all(isinstance(c, Fraction) for c in vec):
                    raise TypeError("structure constants must be Fractions")
        if self.grades is not None and len(self.grades) != d:
            raise ValueError("grades length differs from dim")
        if self.unit_index is not None and not 0 <= self.unit_index < d:
            raise ValueError("unit_index out of range")

    @classmethod
    def from_products(cls, labels: Sequence[str], products: dict, grades=None, unit_index=None):
        """Build from a sparse map ``(i, j) -> {k: coeff}``."""
        d = len(labels)
        table = []
        for i in range(d):
            row = []
            for j in range(d):
                vec = [Fraction(0)] * d
                for k, c in products.get((i, j), {}).items():
                    vec[k] = Fraction(c)
                row.append(tuple(vec))
            table.append(tuple(row))
        return cls(d, tuple(labels), tuple(table),
                   None if grades is None else tuple(grades), unit_index)

    def basis(self, i: int, p: int | None = None) -> Element:
        return Element.basis(self.dim, i, p)

    def tensor(self) -> np.ndarray:
        """Structure constants as an object array ``T[i, j, k]`` of Fractions."""
        d = self.dim
        T = np.empty((d, d, d), dtype=object)
        for i, j, k in product(range(d), repeat=3):
            T[i, j, k] = self.table[i][j][k]
        return T

    def tensor_mod(self, p: int) -> np.ndarray:
        d = self.dim
        T = np.zeros((d, d, d), dtype=np.int64)
        for i, j, k in product(range(d), repeat=3):
            c = self.table[i][j][k]
            if c:
                T[i, j, k] = to_residue(c, p)
        return T

    def is_zero_product(self) -> bool:
        return not any(c for row in self.table for vec in row for c in vec)

    def to_json(self) -> dict:
        table = [
            [[[k, f"{c.numerator}/{c.denominator}"] for k, c in enumerate(vec) if c]
             for vec in row]
            for row in self.table
        ]
        return {
            "dim": self.dim,
            "basis": list(self.basis_labels),
            "grades": None if self.grades is None else list(self.grades),
            "unit": self.unit_index,
            "table": table,
        }

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def multiply(A: AlgebraSpec, x: Element, y: Element) -> Element:
    d = A.dim
    if x.dim != d or y.dim != d:
        raise ValueError(f"dimension mismatch: algebra has dim {d}, got {x.dim} and {y.dim}")
    out = list(Element.zero(d).coeffs)
    residue = isinstance(x.coeffs[0], Residue) or isinstance(y.coeffs[0], Residue)
    if residue:
        p = (x.coeffs[0] if isinstance(x.coeffs[0], Residue) else y.coeffs[0]).p
        out = [Residue(0, p)] * d
    for i, a in enumerate(x.coeffs):
        if not a:
            continue
        for j, b in enumerate(y.coeffs):
            if not b:
                continue
            ab = a * b
            for k, c in enumerate(A.table[i][j]):
                if c:
                    out[k] = out[k] + ab * c
    return Element(tuple(out))


def product_chain(A: AlgebraSpec, elems: Iterable[Element]) -> Element:
    """Left-normed product ``((a b) c) ...``."""
    it = iter(elems)
    acc = next(it)
    for e in it:
        acc = multiply(A, acc, e)
    return acc


W_LABELS = ("e-1", "e0", "e1", "e2")
W_GRADES = (-1, 0, 1, 2)


def build_W() -> AlgebraSpec:
    products = {}
    for i, gi in enumerate(W_GRADES):
        for j, gj in enumerate(W_GRADES):
            if gi == 0:
                products[(i, j)] = {j: 1}
            elif gj == 0:
                products[(i, j)] = {i: 1}
            elif gi > gj or gi + gj < -1 or gi + gj > 2:
                continue
            else:
                products[(i, j)] = {W_GRADES.index(gi + gj): 1}
    return AlgebraSpec.from_products(W_LABELS, products, grades=W_GRADES, unit_index=1)


def direct_sum(A: AlgebraSpec, B: AlgebraSpec) -> AlgebraSpec:
    dA = A.dim
    products = {}
    for src, off in ((A, 0), (B, dA)):
        for i in range(src.dim):
            for j in range(src.dim):
                vec = {k + off: c for k, c in enumerate(src.table[i][j]) if c}
                if vec:
                    products[(i + off, j + off)] = vec
    labels = [f"{l}'" for l in A.basis_labels] + [f"{l}''" for l in B.basis_labels]
    grades = None
    if A.grades is not None and B.grades is not None:
        grades = list(A.grades) + list(B.grades)
    return AlgebraSpec.from_products(labels, products, grades=grades)


def check_unit(A: AlgebraSpec, u: Element) -> bool:
    if u.dim != A.dim:
        raise ValueError("unit candidate has wrong dimension")
    for i in range(A.dim):
        b = A.basis(i)
        if multiply(A, u, b) != b or multiply(A, b, u) != b:
            return False
    return True


def check_grading(A: AlgebraSpec, grades: Sequence[int]) -> bool:
    if len(grades) != A.dim:
        raise ValueError("need one grade per basis element")
    for i, j in product(range(A.dim), repeat=2):
        target = grades[i] + grades[j]
        for k, c in enumerate(A.table[i][j]):
            if c and grades[k] != target:
                return False
    return True


def _rref_insert(basis: list, pivots: list, v: list) -> bool:
    """Reduce ``v`` against an RREF basis of Fraction rows; append if new."""
    v = list(v)
    for row, piv in zip(basis, pivots):
        c = v[piv]
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    lead = next((i for i, a in enumerate(v) if a), None)
    if lead is None:
        return False
    inv = 1 / v[lead]
    v = [a * inv for a in v]
    for idx, row in enumerate(basis):
        c = row[lead]
        if c:
            basis[idx] = [a - c * b for a, b in zip(row, v)]
    basis.append(v)
    pivots.append(lead)
    return True


def multiplication_operators(A: AlgebraSpec) -> list:
    """Left and right multiplication matrices ``M[k][i]`` (column i = image of b_i)."""
    d = A.dim
    ops = []
    for a in range(d):
        L = [[A.table[a][i][k] for i in range(d)] for k in range(d)]
        R = [[A.table[i][a][k] for i in range(d)] for k in range(d)]
        ops.extend([L, R])
    return ops


def _matmul(X, Y):
    d = len(X)
    return [[sum((X[i][t] * Y[t][j] for t in range(d)), Fraction(0)) for j in range(d)]
            for i in range(d)]


def multiplication_algebra_dim(A: AlgebraSpec) -> int:
    """Dimension of the unital associative algebra generated by all L_a, R_a."""
    d = A.dim
    flat = lambda M: [c for row in M for c in row]
    gens = [g for g in multiplication_operators(A) if any(c for row in g for c in row)]
    ident = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    basis, pivots = [], []
    _rref_insert(basis, pivots, flat(ident))
    frontier = [ident]
    while frontier and len(basis) < d * d:
        new = []
        for M in frontier:
            for g in gens:
                P = _matmul(g, M)
                if _rref_insert(basis, pivots, flat(P)):
                    new.append(P)
        frontier = new
    return len(basis)


def check_simple(A: AlgebraSpec) -> bool:
    """Certify simplicity via irreducibility under the multiplication algebra.

    Returns False for algebras with zero multiplication.
    """
    if A.is_zero_product():
        return False
    return multiplication_algebra_dim(A) == A.dim ** 2


class SchemaError(ValueError):
    pass


def _parse_coeff(raw, where: str) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise SchemaError(f"{where}: coefficient must be a 'num/den' string or integer, got {raw!r}")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{where}: bad coefficient {raw!r} ({exc})") from None


def algebra_from_json(data) -> AlgebraSpec:
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object")
    for key in ("dim", "basis", "table"):
        if key not in data:
            raise SchemaError(f"missing field '{key}'")
    d = data["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise SchemaError(f"dim: expected positive integer, got {d!r}")
    basis = data["basis"]
    if not isinstance(basis, list) or len(basis) != d or not all(isinstance(b, str) for b in basis):
        raise SchemaError(f"basis: expected {d} strings")
    grades = data.get("grades")
    if grades is not None and (not isinstance(grades, list) or len(grades) != d
                               or not all(isinstance(g, int) for g in grades)):
        raise SchemaError(f"grades: expected null or {d} integers")
    unit = data.get("unit")
    if unit is not None and (not isinstance(unit, int) or not 0 <= unit < d):
        raise SchemaError(f"unit: expected null or index in [0, {d})")
    table = data["table"]
    if not isinstance(table, list) or len(table) != d:
        raise SchemaError(f"table: expected {d} rows")
    products = {}
    for i, row in enumerate(table):
        if not isinstance(row, list) or len(row) != d:
            raise SchemaError(f"table[{i}]: expected {d} entries (table must be square)")
        for j, entry in enumerate(row):
            if not isinstance(entry, list):
                raise SchemaError(f"table[{i}][{j}]: expected list of [index, coeff] pairs")
            vec = {}
            for t, pair in enumerate(entry):
                where = f"table[{i}][{j}][{t}]"
                if not isinstance(pair, list) or len(pair) != 2:
                    raise SchemaError(f"{where}: expected [index, coeff]")
                k, raw = pair
                if not isinstance(k, int) or not 0 <= k < d:
                    raise SchemaError(f"{where}: basis index {k!r} out of range")
                if k in vec:
                    raise SchemaError(f"{where}: duplicate basis index {k}")
                c = _parse_coeff(raw, where)
                if c:
                    vec[k] = c
            if vec:
                products[(i, j)] = vec
    return AlgebraSpec.from_products(basis, products, grades=grades, unit_index=unit)


def algebra_to_file(A: AlgebraSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(A.to_json(), fh, indent=1)
        fh.write("\n")
