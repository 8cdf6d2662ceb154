"""The function Phi on partitions and on the simplex, and the inequality checks.

For lambda |- n, Phi(lambda)^n = n^n / prod(lambda_i^lambda_i) is rational,
so every inequality between powers of Phi and integers is decided exactly
with big integers. Floating values are only produced for reporting and for
the vectorised maximisation in ``sandwich``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .symfunc import hook_degree, partitions, validate_partition

PREC_BITS = 113
D = 4


def _pow_prod(lam) -> int:
    out = 1
    for x in lam:
        out *= x ** x
    return out


def phi_power(lam) -> Fraction:
    """Phi(lambda)^n as an exact rational."""
    lam = validate_partition(lam)
    if not lam:
        raise ValueError("empty partition")
    n = sum(lam)
    return Fraction(n ** n, _pow_prod(lam))


def phi_partition(lam, d: int = D) -> mpmath.mpf:
    lam = validate_partition(lam)
    if not lam:
        raise ValueError("empty partition")
    if len(lam) > d:
        raise ValueError(f"{lam} has more than {d} parts")
    return phi_any(lam)


def phi_any(lam) -> mpmath.mpf:
    """Phi for a partition with any number of rows."""
    lam = validate_partition(lam)
    n = sum(lam)
    with mpmath.workprec(PREC_BITS):
        log_phi = mpmath.log(n) - mpmath.fsum(x * mpmath.log(x) for x in lam) / n
        return +mpmath.exp(log_phi)


def phi_point(x) -> mpmath.mpf:
    with mpmath.workprec(PREC_BITS):
        xs = [mpmath.mpf(v) for v in x]
        if any(v < 0 for v in xs):
            raise ValueError("coordinates must be nonnegative")
        if abs(mpmath.fsum(xs) - 1) > mpmath.mpf("1e-12"):
            raise ValueError("coordinates must sum to 1")
        return +mpmath.exp(-mpmath.fsum(v * mpmath.log(v) for v in xs if v > 0))


def weight(lam) -> int:
    lam = validate_partition(lam)
    if len(lam) > 4:
        raise ValueError("weight is defined here for at most four rows")
    lam = lam + (0,) * (4 - len(lam))
    return -lam[0] + lam[2] + 2 * lam[3]


def necessary_ok(lam) -> bool:
    lam = validate_partition(lam)
    return len(lam) <= 4 and weight(lam) <= 2


def sufficient_ok(lam) -> bool:
    lam = validate_partition(lam)
    if len(lam) > 4:
        raise ValueError("at most four rows")
    a, b, c, d = lam + (0,) * (4 - len(lam))
    k, m, t = d, b - c, a - b
    return m + t >= 2 * k and m <= 2 * k


def push_down(lam, i: int, j: int) -> tuple:
    """Move one cell from row i to a lower row j (1-based; j may open a new row)."""
    lam = list(validate_partition(lam))
    if not 1 <= i < j <= len(lam) + 1:
        raise ValueError(f"need 1 <= i < j <= {len(lam) + 1}")
    if j == len(lam) + 1:
        lam.append(0)
    lam[i - 1] -= 1
    lam[j - 1] += 1
    if any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError("move breaks monotonicity")
    return tuple(x for x in lam if x)


def legal_push_downs(lam):
    lam = validate_partition(lam)
    for i in range(1, len(lam) + 1):
        for j in range(i + 1, len(lam) + 2):
            try:
                yield (i, j), push_down(lam, i, j)
            except ValueError:
                continue


def strip_partitions(n: int, d: int = D):
    return partitions(n, max_len=d)


def check_eq0(n: int, d: int = D) -> list:
    """Phi^n / n^(d^2+d) <= deg chi <= n Phi^n for all lambda |- n with <= d rows."""
    if n < 100:
        raise ValueError("the degree bounds are stated for n >= 100")
    e = d * d + d
    nn = n ** n
    violations = []
    for lam in strip_partitions(n, d):
        deg = hook_degree(lam)
        den = _pow_prod(lam)
        if nn > deg * den * n ** e:
            violations.append({"lambda": lam, "side": "lower", "deg": deg})
        if deg * den > n * nn:
            violations.append({"lambda": lam, "side": "upper", "deg": deg})
    return violations


def push_down_ratio_ok(lam, mu) -> bool:
    """Phi(lam) >= Phi(mu) / n^((q^2+3q+4)/n), q = number of rows of lam."""
    q = len(lam)
    n = sum(lam)
    # Phi(mu)^n <= n^(q^2+3q+4) Phi(lam)^n  <=>  prod(lam^lam) <= n^e prod(mu^mu)
    return _pow_prod(lam) <= n ** (q * q + 3 * q + 4) * _pow_prod(mu)


def check_lemma7(n: int, pairs=None, d: int = D) -> list:
    if pairs is None:
        pairs = ((lam, mu) for lam in strip_partitions(n, d) for _, mu in legal_push_downs(lam))
    return [{"lambda": lam, "mu": mu} for lam, mu in pairs if not push_down_ratio_ok(lam, mu)]


def _removal_ratio_exact(lam, mu, d: int) -> bool:
    n = sum(mu)
    # both sides raised to the power n(n-1) so that everything is an integer
    lhs = ((n - 1) ** (n - 1)) ** n * _pow_prod(mu) ** (n - 1)
    rhs = n ** ((d * d + d + 2) * (n - 1)) * (n ** n) ** (n - 1) * _pow_prod(lam) ** n
    return lhs <= rhs


def removal_ratio_ok(lam, mu, d: int = D) -> bool:
    """Phi(lam) <= n^((d^2+d+2)/n) Phi(mu) for lam |- n-1 inside mu |- n.

    Decided on n*log of both sides at 113 bits; near-ties fall back to the
    exact integer comparison.
    """
    n = sum(mu)
    with mpmath.workprec(PREC_BITS):
        log = mpmath.log
        lhs = mpmath.mpf(n) / (n - 1) * ((n - 1) * log(n - 1) - mpmath.fsum(x * log(x) for x in lam))
        rhs = (d * d + d + 2) * log(n) + n * log(n) - mpmath.fsum(x * log(x) for x in mu)
        margin = rhs - lhs
        if abs(margin) > mpmath.mpf(2) ** (-60) * (abs(lhs) + abs(rhs) + 1):
            return bool(margin > 0)
    return _removal_ratio_exact(lam, mu, d)


def box_removals(mu):
    mu = validate_partition(mu)
    for i in range(len(mu)):
        if i + 1 == len(mu) or mu[i] > mu[i + 1]:
            lam = list(mu)
            lam[i] -= 1
            yield tuple(x for x in lam if x)


def check_lemma7a(n: int, d: int = D) -> list:
    if n < d:
        raise ValueError("need n >= d")
    out = []
    for mu in strip_partitions(n, d):
        for lam in box_removals(mu):
            if lam and not removal_ratio_ok(lam, mu, d):
                out.append({"lambda": lam, "mu": mu})
    return out


def check_push_down_monotone(n: int, d: int = D) -> list:
    """Phi(mu) >= Phi(lam) for every push-down, decided on Phi^n exactly."""
    out = []
    for lam in strip_partitions(n, d):
        for move, mu in legal_push_downs(lam):
            # same n, so Phi(mu) >= Phi(lam)  <=>  prod(lam^lam) >= prod(mu^mu)
            if _pow_prod(mu) > _pow_prod(lam):
                out.append({"lambda": lam, "move": move, "mu": mu})
    return out


# --- the sandwich sequences ----------------------------------------------------

@dataclass
class SandwichRow:
    n: int
    b_weight0: mpmath.mpf
    a_upper: mpmath.mpf
    argmax_b: tuple
    argmax_a: tuple
    fallback: bool = False
    notes: list = field(default_factory=list)

    def as_csv(self) -> str:
        fmt = lambda lam: " ".join(map(str, lam))
        return (f"{self.n},{mpmath.nstr(self.b_weight0, 15)},{mpmath.nstr(self.a_upper, 15)},"
                f"{fmt(self.argmax_b)},{fmt(self.argmax_a)}")


def _log_phi_np(parts: np.ndarray, n: int) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(parts > 0, parts * np.log(np.maximum(parts, 1)), 0.0)
    return np.log(n) - terms.sum(axis=0) / n


def _best(candidates: np.ndarray, n: int, top: int = 8) -> tuple:
    """Exact argmax among the float-best few candidates (columns are partitions)."""
    if candidates.shape[1] == 0:
        return None
    scores = _log_phi_np(candidates.astype(np.float64), n)
    idx = np.argsort(scores)[::-1][:top]
    best = max((tuple(int(v) for v in candidates[:, i] if v) for i in idx), key=phi_power)
    return best


def weight0_argmax(n: int) -> tuple | None:
    """argmax Phi over lambda |- n with <= 4 rows, weight 0 (all such satisfy the sufficient test)."""
    l4 = np.arange(0, n // 4 + 1)
    L4, L3 = np.meshgrid(l4, np.arange(0, n // 3 + 1), indexing="ij")
    L4, L3 = L4.ravel(), L3.ravel()
    L1 = L3 + 2 * L4
    L2 = n - L1 - L3 - L4
    ok = (L3 >= L4) & (L2 >= L3) & (L1 >= L2)
    cand = np.stack([L1[ok], L2[ok], L3[ok], L4[ok]])
    return _best(cand, n)


def necessary_argmax(n: int) -> tuple:
    """argmax Phi over lambda |- n with <= 4 rows and weight <= 2.

    For fixed (lambda_3, lambda_4) the remaining mass s = lambda_1 + lambda_2 is
    split as evenly as allowed, since Phi is Schur-concave in (lambda_1, lambda_2).
    """
    l4 = np.arange(0, n // 4 + 1)
    L4, L3 = np.meshgrid(l4, np.arange(0, n // 3 + 1), indexing="ij")
    L4, L3 = L4.ravel(), L3.ravel()
    S = n - L3 - L4
    L1 = np.maximum((S + 1) // 2, L3 + 2 * L4 - 2)
    L2 = S - L1
    ok = (L3 >= L4) & (L2 >= L3) & (L1 >= L2)
    cand = np.stack([L1[ok], L2[ok], L3[ok], L4[ok]])
    return _best(cand, n)


def sandwich(n: int, _memo: dict | None = None) -> SandwichRow:
    if n < 6:
        raise ValueError("the sandwich sequences start at n = 6")
    arg_a = necessary_argmax(n)
    a = phi_partition(arg_a)
    arg_b = weight0_argmax(n)
    if arg_b is not None:
        return SandwichRow(n, phi_partition(arg_b), a, arg_b, arg_a)
    prev = sandwich(n - 1)
    b = min(prev.b_weight0, a)
    return SandwichRow(n, b, a, prev.argmax_b, arg_a, fallback=True,
                       notes=["no weight-0 partition; b_n = min(b_(n-1), a_upper(n))"])


def necessary_argmax_weight(n: int) -> dict:
    """Weight of the Phi-maximiser over the necessary set (expected in {0, 1, 2})."""
    lam = necessary_argmax(n)
    w = weight(lam)
    return {"n": n, "argmax": lam, "weight": w, "ok": w in (0, 1, 2)}
