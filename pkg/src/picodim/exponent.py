"""exp(W) = max of Phi(x) = 1 / prod x_i^x_i over the region

    T = {x in R^4 : x1 >= x2 >= x3 >= x4 >= 0, sum x = 1, x1 - x3 = 2 x4},

computed three independent ways.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .phi import phi_point

DPS = 40
REFERENCE_VALUE = mpmath.mpf("3.610718614")
REFERENCE_BETA4 = mpmath.mpf("0.276953179")
CUBIC = (16, -24, 11, -1)  # 16 t^3 - 24 t^2 + 11 t - 1
STATIONARY_CUBIC = (1, 0, -1, -2)  # t^3 - t - 2
AGREEMENT_TOL = 1e-8


class ExponentError(ArithmeticError):
    pass


def _horner(coeffs, t):
    acc = 0
    for c in coeffs:
        acc = acc * t + c
    return acc


def _derivative(coeffs):
    deg = len(coeffs) - 1
    return [c * (deg - i) for i, c in enumerate(coeffs[:-1])]


def _polyrem(a, b):
    a = [Fraction(c) for c in a]
    while len(a) >= len(b):
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return a


def sturm_count(coeffs, lo, hi) -> int:
    """Number of distinct real roots in (lo, hi], by an exact Sturm sequence."""
    seq = [[Fraction(c) for c in coeffs], [Fraction(c) for c in _derivative(coeffs)]]
    while True:
        r = _polyrem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])

    def changes(x):
        vals = [v for v in (_horner(p, Fraction(x)) for p in seq) if v != 0]
        return sum(1 for a, b in zip(vals, vals[1:]) if (a < 0) != (b < 0))

    return changes(lo) - changes(hi)


def certified_root(coeffs, lo, hi, tol=Fraction(1, 10 ** 15)) -> tuple:
    """Isolate the unique root in (lo, hi) and polish it with Newton.

    Returns (root as mpf, exact bracket (a, b) with a sign change and b - a <= tol).
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if sturm_count(coeffs, lo, hi) != 1:
        raise ExponentError(f"expected exactly one root in ({lo}, {hi})")
    flo = _horner(coeffs, lo)
    if flo == 0 or _horner(coeffs, hi) == 0:
        raise ExponentError("root sits on the bracket endpoint")
    a, b = lo, hi
    while b - a > Fraction(1, 2 ** 24):
        mid = (a + b) / 2
        fm = _horner(coeffs, mid)
        if fm == 0:
            a = b = mid
            break
        if (fm < 0) == (flo < 0):
            a = mid
        else:
            b = mid
    with mpmath.workdps(DPS):
        t = mpmath.mpf(a.numerator) / a.denominator
        dcoeffs = _derivative(coeffs)
        for _ in range(60):
            step = _horner(coeffs, t) / _horner(dcoeffs, t)
            t -= step
            if abs(step) < mpmath.mpf(10) ** (-DPS + 5):
                break
        # certify: exact sign change across a tiny rational bracket around t
        centre = Fraction(mpmath.nstr(t, DPS - 5, strip_zeros=False))
        a2, b2 = centre - tol / 4, centre + tol / 4
        fa, fb = _horner(coeffs, a2), _horner(coeffs, b2)
        if fa == 0 or fb == 0 or (fa < 0) == (fb < 0):
            raise ExponentError("Newton iterate failed the sign-change certificate")
        return +t, (a2, b2)


def solve_cubic() -> mpmath.mpf:
    """The real root of 16t^3 - 24t^2 + 11t - 1 (the only one in (0, 1))."""
    if sturm_count(CUBIC, -10, 10) != 1:
        raise ExponentError("cubic should have a single real root")
    root, _ = certified_root(CUBIC, Fraction(11, 100), Fraction(13, 100))
    return root


@dataclass
class FeasiblePoint:
    x: tuple

    def residuals(self) -> dict:
        x1, x2, x3, x4 = self.x
        return {
            "sum": abs(x1 + x2 + x3 + x4 - 1),
            "x1-x3-2x4": abs(x1 - x3 - 2 * x4),
            "order": max(0, x2 - x1, x3 - x2, x4 - x3, -x4),
        }

    def validate(self, tol: float = 1e-12) -> "FeasiblePoint":
        for name, r in self.residuals().items():
            if r > tol:
                raise ExponentError(f"point violates constraint {name}: residual {mpmath.nstr(r, 5)}")
        return self

    def as_floats(self) -> list:
        return [float(v) for v in self.x]


def beta_point(beta4) -> FeasiblePoint:
    """Chain beta3 = 2b4 - 4b4^2, beta2 = beta3^2/b4, beta1 = beta3^3/b4^2."""
    with mpmath.workdps(DPS):
        b4 = mpmath.mpf(beta4)
        if not 0 < b4 < 0.5:
            raise ExponentError("beta4 must lie in (0, 1/2)")
        b3 = 2 * b4 - 4 * b4 ** 2
        b2 = b3 ** 2 / b4
        b1 = b3 ** 3 / b4 ** 2
        pt = FeasiblePoint(tuple(sorted((b1, b2, b3, b4), reverse=True)))
        pt.validate(1e-8)
        return pt


@dataclass
class ExponentEstimate:
    method: str
    value: mpmath.mpf
    point: FeasiblePoint
    residuals: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "value": mpmath.nstr(self.value, 20),
            "point": [mpmath.nstr(v, 20) for v in self.point.x],
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            **self.extra,
        }


def cubic_estimate() -> ExponentEstimate:
    r = solve_cubic()
    pt = beta_point(r)
    with mpmath.workdps(DPS):
        return ExponentEstimate("cubic", phi_point(pt.x), pt, pt.residuals(),
                                {"beta4": mpmath.nstr(r, 20)})


def lagrange_estimate() -> ExponentEstimate:
    """Stationary points of sum -x log x under the two linear constraints are
    geometric, x = c (t, 1, 1/t, 1/t^2); the constraint x1 - x3 = 2 x4 becomes
    t^3 - t - 2 = 0, and the maximum equals 1/c = t + 1 + 1/t + 1/t^2."""
    t, _ = certified_root(STATIONARY_CUBIC, 1, 2)
    with mpmath.workdps(DPS):
        M = t + 1 + 1 / t + 1 / t ** 2
        pt = FeasiblePoint((t / M, 1 / M, 1 / (t * M), 1 / (t * t * M)))
        pt.validate(1e-30)
        return ExponentEstimate("lagrange", +M, pt, pt.residuals(), {"t": mpmath.nstr(t, 20)})


# --- direct maximisation on the reduced region -----------------------------------
# Coordinates (u, s) = (x3, x4): x1 = u + 2s, x2 = 1 - 2u - 3s.
# Feasible: 3u + 5s >= 1 (x1 >= x2), 3u + 3s <= 1 (x2 >= x3), u >= s >= 0.
_DU = (1, -2, 1, 0)
_DS = (2, -3, 0, 1)


def reduced_point(u, s) -> tuple:
    return (u + 2 * s, 1 - 2 * u - 3 * s, u, s)


def _feasible(u, s, slack=0.0) -> bool:
    return 3 * u + 5 * s >= 1 - slack and 3 * u + 3 * s <= 1 + slack and u >= s - slack and s >= -slack


def _grid_argmax(steps: int) -> tuple:
    u, s = np.meshgrid(np.linspace(0, 1 / 3, steps), np.linspace(0, 1 / 6, steps), indexing="ij")
    u, s = u.ravel(), s.ravel()
    ok = (3 * u + 5 * s >= 1) & (3 * u + 3 * s <= 1) & (u >= s) & (s >= 0)
    if not ok.any():
        raise ExponentError("infeasible region")
    u, s = u[ok], s[ok]
    X = np.stack(reduced_point(u, s))
    with np.errstate(divide="ignore", invalid="ignore"):
        H = -np.where(X > 0, X * np.log(np.where(X > 0, X, 1)), 0).sum(axis=0)
    i = int(np.argmax(H))
    return float(u[i]), float(s[i])


def entropy_reduced(u, s):
    x = reduced_point(u, s)
    return -mpmath.fsum(v * mpmath.log(v) for v in x if v > 0)


def numeric_maximize(grid_steps: int = 600, tol: float = 1e-12) -> ExponentEstimate:
    """Grid search then damped Newton on the concave reduced entropy."""
    u0, s0 = _grid_argmax(grid_steps)
    with mpmath.workdps(DPS):
        u, s = mpmath.mpf(u0), mpmath.mpf(s0)
        iters = 0
        for iters in range(1, 200):
            x = reduced_point(u, s)
            lx = [mpmath.log(v) for v in x]
            gu = -mpmath.fsum(a * l for a, l in zip(_DU, lx))
            gs = -mpmath.fsum(a * l for a, l in zip(_DS, lx))
            huu = -mpmath.fsum(a * a / v for a, v in zip(_DU, x))
            hus = -mpmath.fsum(a * b / v for a, b, v in zip(_DU, _DS, x))
            hss = -mpmath.fsum(b * b / v for b, v in zip(_DS, x))
            det = huu * hss - hus * hus
            du = -(hss * gu - hus * gs) / det
            ds = -(-hus * gu + huu * gs) / det
            step = 1
            f0 = entropy_reduced(u, s)
            while step > 1e-12:
                un, sn = u + step * du, s + step * ds
                if _feasible(un, sn) and all(v > 0 for v in reduced_point(un, sn)) \
                        and entropy_reduced(un, sn) >= f0 - mpmath.mpf(10) ** (-DPS + 5):
                    break
                step /= 2
            u, s = u + step * du, s + step * ds
            if max(abs(du), abs(ds)) * step < mpmath.mpf(10) ** (-30):
                break
        pt = FeasiblePoint(reduced_point(u, s)).validate(tol)
        value = mpmath.exp(entropy_reduced(u, s))
        return ExponentEstimate("numeric", +value, pt, pt.residuals(),
                                {"grid_start": [u0, s0], "newton_iterations": iters})


def facet_maxima(samples: int = 2001) -> dict:
    """Max of Phi along each facet of T (grid evaluation)."""
    out = {}
    with mpmath.workdps(20):
        def best(points):
            vals = [phi_point(reduced_point(u, s)) for u, s in points if _feasible(u, s, 1e-15)]
            return max(vals) if vals else None

        ts = [mpmath.mpf(i) / (samples - 1) for i in range(samples)]
        # x3 = x4: u = s in [1/8, 1/6]
        out["x3=x4"] = best([(a, a) for a in (mpmath.mpf(1) / 8 + t * (mpmath.mpf(1) / 6 - mpmath.mpf(1) / 8) for t in ts)])
        # x1 = x2: 3u + 5s = 1, s in [0, 1/8]
        out["x1=x2"] = best([((1 - 5 * b) / 3, b) for b in (t / 8 for t in ts)])
        # x2 = x3: 3u + 3s = 1, s in [0, 1/6]
        out["x2=x3"] = best([((1 - 3 * b) / 3, b) for b in (t / 6 for t in ts)])
        out["x4=0"] = phi_point((mpmath.mpf(1) / 3,) * 3 + (0,))
    return out


def erratum_note(root=None, value=None) -> dict:
    root = solve_cubic() if root is None else root
    value = lagrange_estimate().value if value is None else value
    with mpmath.workdps(DPS):
        ref_residual = _horner(CUBIC, REFERENCE_BETA4)
        return {
            "reference_beta4": "0.276953179",
            "reference_beta4_cubic_residual": float(ref_residual),
            "cubic_real_root": mpmath.nstr(root, 15),
            "inverse_exponent": mpmath.nstr(1 / value, 15),
            "reference_beta4_equals_inverse_exponent": bool(abs(REFERENCE_BETA4 - 1 / value) < 1e-9),
            "text": ("The reference value beta4 = 0.276953179 is not a root of 16t^3-24t^2+11t-1; "
                     "the real root is %s. That number equals beta2 = 1/exp(W) = %s."
                     % (mpmath.nstr(root, 10), mpmath.nstr(1 / value, 10))),
        }


def exp_estimate(sandwich_n: int | None = 6000, slack: float = 1e-3) -> dict:
    """Run all three methods, require pairwise agreement, cross-check the sandwich rows."""
    ests = [cubic_estimate(), lagrange_estimate(), numeric_maximize()]
    diffs = {}
    for i in range(3):
        for j in range(i + 1, 3):
            d = abs(ests[i].value - ests[j].value)
            diffs[f"{ests[i].method}-{ests[j].method}"] = float(d)
            if d > AGREEMENT_TOL:
                raise ExponentError(f"{ests[i].method} and {ests[j].method} disagree by {d}")
    canon = ests[1]
    report = {
        "value": mpmath.nstr(canon.value, 20),
        "canonical_method": canon.method,
        "estimates": [e.to_json() for e in ests],
        "pairwise_differences": diffs,
        "reference_value_difference": float(abs(canon.value - REFERENCE_VALUE)),
        "below_dimension": bool(canon.value < 4),
        "distance_to_integers": float(min(abs(canon.value - 3), abs(4 - canon.value))),
        "erratum": erratum_note(mpmath.mpf(ests[0].extra["beta4"]), canon.value),
    }
    if sandwich_n is not None:
        from .phi import sandwich
        row = sandwich(sandwich_n)
        report["sandwich"] = {
            "n": sandwich_n,
            "b_weight0": mpmath.nstr(row.b_weight0, 15),
            "a_upper": mpmath.nstr(row.a_upper, 15),
            "inside": bool(row.b_weight0 - slack <= canon.value <= row.a_upper + slack),
        }
    return report
