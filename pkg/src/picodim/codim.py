"""Codimensions as ranks of evaluation matrices.

Row (b, L) of the evaluation matrix is the monomial with bracketing ``b`` and
labeling ``L``; column (tau, k) is coordinate ``k`` of its value when x_i is
replaced by basis element ``tau[i]``. Tuples ``tau`` are ordered
lexicographically, ``tau[0]`` most significant.

For a bracketing ``b`` the values at all positional tuples form one tensor
``B_b`` of shape ``(d,)*n + (d,)``; every row of ``b`` is a gather from it, and
the gather index depends only on the labeling. Columns that vanish in every
row are dropped before elimination.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from math import factorial

import numpy as np

from .algebra import DEFAULT_PRIMES, AlgebraSpec
from .freepoly import LEAF, catalan, enumerate_bracketings, enumerate_monomials
from .rank import ModpEchelon, left_nullspace_mod_p

log = logging.getLogger(__name__)

ROW_BUDGET = 1_000_000
COL_BUDGET = 1 << 20
DENSE_BUDGET = 1 << 26
COMPRESS_THRESHOLD = 1 << 14


class BudgetExceeded(RuntimeError):
    pass


def matrix_shape(A: AlgebraSpec, n: int) -> tuple[int, int]:
    return factorial(n) * catalan(n - 1), A.dim ** n * A.dim


def check_budget(A: AlgebraSpec, n: int, override: bool = False) -> None:
    if n < 1:
        raise ValueError("degree must be positive")
    rows, cols = matrix_shape(A, n)
    if override:
        return
    if rows > ROW_BUDGET or cols > COL_BUDGET:
        raise BudgetExceeded(
            f"degree {n} needs a {rows} x {cols} evaluation matrix "
            f"(budget {ROW_BUDGET} rows, {COL_BUDGET} columns); pass override to force")


@lru_cache(maxsize=2048)
def _bracketing_tensor(A: AlgebraSpec, b, p: int) -> np.ndarray:
    d = A.dim
    if b is LEAF:
        return np.eye(d, dtype=np.int64)
    L = _bracketing_tensor(A, b[0], p)
    R = _bracketing_tensor(A, b[1], p)
    T = A.tensor_mod(p)
    shape = L.shape[:-1] + R.shape[:-1]
    out = np.zeros(shape + (d,), dtype=np.int64)
    for i, j, k in zip(*np.nonzero(T)):
        outer = np.multiply.outer(L[..., i], R[..., j]) % p
        out[..., k] = (out[..., k] + outer * int(T[i, j, k])) % p
    return out


def bracketing_tensors(A: AlgebraSpec, n: int, p: int) -> list:
    return [_bracketing_tensor(A, b, p) for b in enumerate_bracketings(n)]


def _tuple_digits(d: int, n: int) -> np.ndarray:
    """Row t holds the base-d digits of tuple index t (most significant first)."""
    idx = np.arange(d ** n)
    return np.stack([(idx // d ** (n - 1 - q)) % d for q in range(n)], axis=1)


@dataclass
class ColumnLayout:
    """Active columns of the degree-n evaluation matrix and their gather maps."""

    d: int
    n: int
    active: np.ndarray  # flat column indices tau_index * d + k
    gather: np.ndarray = field(repr=False)  # (n!, K): row (b, L) = B_b.flat[gather[L]]
    perms: list = field(repr=False)

    @property
    def ncols(self) -> int:
        return self.active.size

    def column_permutation(self, sigma) -> np.ndarray:
        """Index map c -> column of (tau o sigma, k) within the active set."""
        d, n = self.d, self.n
        tau_idx, k = np.divmod(self.active, d)
        digits = _tuple_digits(d, n)[tau_idx]
        moved = digits[:, list(sigma)]
        flat = (moved @ (d ** np.arange(n - 1, -1, -1))) * d + k
        pos = np.searchsorted(self.active, flat)
        if not np.array_equal(self.active[pos], flat):
            raise AssertionError("active column set is not permutation invariant")
        return pos


def column_layout(A: AlgebraSpec, n: int, p: int, prune: bool = True) -> ColumnLayout:
    d = A.dim
    tensors = bracketing_tensors(A, n, p)
    if prune:
        support = np.zeros((d,) * n + (d,), dtype=bool)
        for B in tensors:
            support |= B != 0
        closed = np.zeros_like(support)
        for perm in permutations(range(n)):
            closed |= np.transpose(support, list(perm) + [n])
        active = np.flatnonzero(closed.reshape(-1))
    else:
        active = np.arange(d ** n * d)
    perms = list(permutations(range(n)))
    tau_idx, k = np.divmod(active, d)
    digits = _tuple_digits(d, n)[tau_idx]
    weights = d ** np.arange(n - 1, -1, -1) * d
    gather = np.empty((len(perms), active.size), dtype=np.int64)
    for r, L in enumerate(perms):
        # leaf q carries variable L[q], hence the basis index tau[L[q]]
        gather[r] = digits[:, list(L)] @ weights + k
    return ColumnLayout(d, n, active, gather, perms)


def iter_row_blocks(A: AlgebraSpec, n: int, p: int, layout: ColumnLayout):
    """Yield one (n!, K) block of residue rows per bracketing, in monomial order."""
    for B in bracketing_tensors(A, n, p):
        yield B.reshape(-1)[layout.gather]


@dataclass
class EvalMatrix:
    n: int
    p: int
    rows: int
    cols: int
    layout: ColumnLayout = field(repr=False)
    algebra: AlgebraSpec = field(repr=False)

    def iter_blocks(self):
        return iter_row_blocks(self.algebra, self.n, self.p, self.layout)

    def dense(self) -> np.ndarray:
        """Full matrix over all d^n * d columns (pruned columns are zero)."""
        if self.rows * self.cols > DENSE_BUDGET:
            raise BudgetExceeded(f"dense {self.rows} x {self.cols} matrix exceeds {DENSE_BUDGET} entries")
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        out[:, self.layout.active] = np.vstack(list(self.iter_blocks()))
        return out


def build_eval_matrix(A: AlgebraSpec, n: int, p: int, override: bool = False,
                      prune: bool = True) -> EvalMatrix:
    check_budget(A, n, override)
    rows, cols = matrix_shape(A, n)
    return EvalMatrix(n, p, rows, cols, column_layout(A, n, p, prune), A)


def row_space(A: AlgebraSpec, n: int, p: int, override: bool = False) -> tuple[ModpEchelon, ColumnLayout]:
    """RREF basis of the evaluation image over the active columns."""
    E = build_eval_matrix(A, n, p, override)
    ech = ModpEchelon(E.layout.ncols, p)
    for block in E.iter_blocks():
        ech.add_rows(block)
    return ech, E.layout


def _compressed_rank(A: AlgebraSpec, n: int, p: int, layout: ColumnLayout, width: int, seed: int) -> int:
    rng = np.random.default_rng(seed)
    K = layout.ncols
    # sparse random sketch: three nonzeros per input column
    S = np.zeros((K, width), dtype=np.int64)
    for _ in range(3):
        S[np.arange(K), rng.integers(0, width, K)] = rng.integers(1, p, K)
    from .rank import matmul_mod
    ech = ModpEchelon(width, p)
    for block in iter_row_blocks(A, n, p, layout):
        ech.add_rows(matmul_mod(block, S, p))
    return ech.rank


def rank_for_prime(A: AlgebraSpec, n: int, p: int, override: bool = False,
                   seeds: tuple = (1, 2)) -> dict:
    t0 = time.perf_counter()
    check_budget(A, n, override)
    layout = column_layout(A, n, p)
    note = ""
    rows = matrix_shape(A, n)[0]
    if layout.ncols > COMPRESS_THRESHOLD:
        width = min(rows, COMPRESS_THRESHOLD) + 64
        ranks = [_compressed_rank(A, n, p, layout, width, s) for s in seeds]
        if ranks[0] == ranks[1] and ranks[0] < width - 64:
            return {"rank": ranks[0], "seconds": time.perf_counter() - t0,
                    "seeds": list(seeds), "note": f"compressed {layout.ncols}->{width} columns"}
        note = f"compression inconclusive {ranks}; exact run"
    ech = ModpEchelon(layout.ncols, p)
    for block in iter_row_blocks(A, n, p, layout):
        ech.add_rows(block)
    return {"rank": ech.rank, "seconds": time.perf_counter() - t0, "seeds": [], "note": note}


@dataclass
class CodimResult:
    n: int
    rank_per_prime: dict
    c_n: int
    method_notes: str = ""
    seconds: float = 0.0

    @property
    def consensus(self) -> bool:
        return len(set(self.rank_per_prime.values())) == 1


def codim(A: AlgebraSpec, n: int, primes=DEFAULT_PRIMES, override: bool = False,
          cache=None) -> CodimResult:
    """c_n(A) as the consensus rank of the evaluation matrix over several primes."""
    primes = tuple(primes)
    if len(primes) < 2:
        raise ValueError("at least two primes are required for consensus")
    for p in primes:
        if p <= n:
            raise ValueError(f"prime {p} must exceed the degree {n}")
    ranks, notes, total = {}, [], 0.0
    for p in primes:
        key = {"op": "codim", "n": n, "p": p}
        entry = cache.get(A, key) if cache is not None else None
        if entry is None:
            entry = rank_for_prime(A, n, p, override)
            if cache is not None:
                cache.put(A, key, entry)
        ranks[p] = entry["rank"]
        total += entry["seconds"]
        if entry.get("note"):
            notes.append(f"p={p}: {entry['note']}")
    c_n = max(ranks.values())
    if len(set(ranks.values())) > 1:
        notes.append(f"rank disagreement across primes {ranks}; reporting max")
        log.warning("rank disagreement for n=%d: %s", n, ranks)
    notes.append("rank over F_p lower-bounds rank over Q; accepted on consensus")
    return CodimResult(n, ranks, c_n, "; ".join(notes), total)


def identities_nullspace(A: AlgebraSpec, n: int, p: int, override: bool = False) -> list:
    """Multilinear identities of degree n as {Monomial: residue} dicts (left nullspace)."""
    E = build_eval_matrix(A, n, p, override)
    M = E.dense()[:, E.layout.active] if E.layout.ncols else np.zeros((E.rows, 0), dtype=np.int64)
    null = left_nullspace_mod_p(M, p)
    monos = enumerate_monomials(n)
    out = []
    for vec in null:
        out.append({monos[i]: int(c) for i in np.flatnonzero(vec) for c in [vec[i]]})
    return out


def image_trace(ech: ModpEchelon, layout: ColumnLayout, sigma) -> int:
    """Trace of sigma on the row space, as a residue."""
    if ech.rank == 0:
        return 0
    pos = layout.column_permutation(sigma)
    piv = np.array(ech.pivots)
    # row i of R moved by sigma has its i-th coordinate at column pivot_i of the moved row
    vals = ech.R[np.arange(ech.rank), pos[piv]]
    return int(vals.sum() % ech.p)
