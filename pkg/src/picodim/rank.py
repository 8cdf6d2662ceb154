"""Incremental row reduction over a prime field.

Rows are int64 numpy arrays with entries in [0, p), p < 2**31. The basis is
kept in reduced row echelon form so that coordinates of any vector in the
row space can be read off at the pivot columns.
"""
from __future__ import annotations

import numpy as np

_LIMB_BITS = 8
_LIMBS = 4  # 4 x 8 bits covers residues < 2**32
_CHUNK = 1 << 13  # limb (< 2**8) * residue (< 2**31) * 2**13 terms < 2**52


def matmul_mod(X: np.ndarray, Y: np.ndarray, p: int) -> np.ndarray:
    """Exact ``X @ Y mod p`` for residue matrices, via float64 BLAS on byte limbs."""
    if X.shape[1] != Y.shape[0]:
        raise ValueError("shape mismatch")
    out = np.zeros((X.shape[0], Y.shape[1]), dtype=np.int64)
    if X.shape[1] == 0:
        return out
    for start in range(0, X.shape[1], _CHUNK):
        Xc = X[:, start:start + _CHUNK]
        Yc = Y[start:start + _CHUNK].astype(np.float64)
        for limb in range(_LIMBS):
            part = (Xc >> (_LIMB_BITS * limb)) & ((1 << _LIMB_BITS) - 1)
            if not part.any():
                continue
            prod = (part.astype(np.float64) @ Yc).astype(np.int64) % p
            out = (out + prod * pow(2, _LIMB_BITS * limb, p)) % p
    return out


def _reduce_dense(M: np.ndarray, p: int) -> tuple[np.ndarray, list]:
    """In-place style Gauss-Jordan on a small dense block; returns (rref rows, pivots)."""
    M = M % p
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        inv = pow(int(M[r, c]), -1, p)
        M[r] = M[r] * inv % p
        f = M[:, c].copy()
        f[r] = 0
        hit = np.nonzero(f)[0]
        if hit.size:
            M[hit] = (M[hit] - f[hit, None] * M[r]) % p
        pivots.append(c)
        r += 1
    return M[:r], pivots


class ModpEchelon:
    """Reduced row echelon basis grown one batch of rows at a time."""

    def __init__(self, ncols: int, p: int):
        self.p = p
        self.ncols = ncols
        self.R = np.zeros((0, ncols), dtype=np.int64)
        self.pivots: list = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64) % self.p
        if self.rank == 0 or rows.shape[0] == 0:
            return rows
        coeff = rows[:, self.pivots]
        return (rows - matmul_mod(coeff, self.R, self.p)) % self.p

    def add_rows(self, rows: np.ndarray) -> int:
        """Insert rows; returns how many were independent of the current basis."""
        if self.rank == self.ncols:
            return 0
        red = self.reduce(rows)
        red = red[red.any(axis=1)]
        if red.shape[0] == 0:
            return 0
        new, piv = _reduce_dense(red, self.p)
        if not piv:
            return 0
        if self.rank:
            c = self.R[:, piv]
            self.R = (self.R - matmul_mod(c, new, self.p)) % self.p
        R = np.vstack([self.R, new])
        pivots = self.pivots + piv
        order = np.argsort(pivots, kind="stable")
        self.R = R[order]
        self.pivots = [pivots[i] for i in order]
        return len(piv)

    def coordinates(self, v: np.ndarray) -> np.ndarray:
        """Coordinates of a row-space vector in the basis (its pivot entries)."""
        return np.asarray(v)[..., self.pivots] % self.p


def rank_mod_p(M, p: int, batch: int = 1024) -> int:
    M = np.asarray(M, dtype=np.int64)
    ech = ModpEchelon(M.shape[1], p)
    for s in range(0, M.shape[0], batch):
        ech.add_rows(M[s:s + batch])
    return ech.rank


def left_nullspace_mod_p(M, p: int) -> np.ndarray:
    """Basis (as rows) of {y : y M = 0 mod p}."""
    M = np.asarray(M, dtype=np.int64) % p
    m = M.shape[0]
    aug = np.hstack([M, np.eye(m, dtype=np.int64)])
    R, piv = _reduce_dense(aug, p)
    ncols = M.shape[1]
    # rows whose pivot lies in the identity block have zero M-part
    null = [R[i, ncols:] for i, c in enumerate(piv) if c >= ncols]
    if not null:
        return np.zeros((0, m), dtype=np.int64)
    return np.array(null, dtype=np.int64)
