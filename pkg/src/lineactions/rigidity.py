"""Conjugacy solver for perturbations of the standard BS(1, n) action.

The standard action on R is generated by g0(x) = n x and h0(x) = x + 1.
Given a perturbed pair (g, h) satisfying g h g^{-1} = h^n with g uniformly
expanding, the conjugacy phi solving phi o g = g0 o phi and phi o h = h0 o phi
is the fixed point of the rigidity operator phi -> g0^{-1} o phi o g, a
contraction with ratio 1/n in the sup norm.  The solver iterates it on a
grid over [-W, W], extending phi beyond the window through the relation
phi(h(x)) = phi(x) + 1.

detect_nonstandard checks the obstruction in the other direction: an
attracting fixed point of g is a conjugacy invariant incompatible with
g0(x) = n x, whose single fixed point is repelling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import InconclusiveError, PreconditionError
from .maps import MapTree, invert


def _relation_residual(g: MapTree, h: MapTree, n: int, window: float,
                       samples: int = 257) -> float:
    """sup |g(h(x)) - h^n(g(x))| over an even sample of [-window, window]."""
    worst = 0.0
    for i in range(samples):
        x = -window + 2 * window * i / (samples - 1)
        lhs = g.eval_float(h.eval_float(x))
        rhs = g.eval_float(x)
        for _ in range(n):
            rhs = h.eval_float(rhs)
        worst = max(worst, abs(lhs - rhs))
    return worst


def _min_slope(g: MapTree, window: float, samples: int = 2001) -> float:
    xs = np.linspace(-window, window, samples)
    ys = np.array([g.eval_float(float(x)) for x in xs])
    return float(np.min(np.diff(ys) / np.diff(xs)))


def _expanding_fixed_point(g: MapTree, window: float) -> float:
    """Unique fixed point of an expanding g, by bisection on g(x) - x."""
    lo, hi = -window, window
    f_lo = g.eval_float(lo) - lo
    f_hi = g.eval_float(hi) - hi
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise PreconditionError(
            f"g(x) - x has no sign change on [-{window}, {window}]; "
            "cannot normalize the fixed point")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = g.eval_float(mid) - mid
        if f_mid == 0 or hi - lo < 1e-15:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class ConjugacyResult:
    """Discretized conjugacy with residuals and contraction diagnostics.

    phi is sampled at xs (coordinates translated so the fixed point of g
    sits at 0); x_star records the translation.  When verdict is
    "converged", both conjugacy residuals are at most tol and phi is
    strictly increasing on the grid.
    """

    n: int
    xs: np.ndarray
    phi: np.ndarray
    x_star: float
    iterations: int
    residual_h: float
    residual_g: float
    contraction_ratios: list
    verdict: str
    tol: float
    monotone_all_iterations: bool = True
    deviations: list = field(default_factory=list)
    detect_report: Optional[dict] = None

    def phi_at(self, x: float) -> float:
        """phi in the translated coordinates, linearly interpolated."""
        return float(np.interp(x, self.xs, self.phi))

    def phi_csv(self) -> str:
        lines = ["x,phi"]
        lines += [f"{x!r},{p!r}" for x, p in zip(self.xs, self.phi)]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"n": self.n, "verdict": self.verdict,
                "iterations": self.iterations, "x_star": repr(self.x_star),
                "residual_h": repr(self.residual_h),
                "residual_g": repr(self.residual_g),
                "tol": repr(self.tol),
                "contraction_ratios": [repr(r) for r in self.contraction_ratios],
                "monotone_all_iterations": self.monotone_all_iterations,
                "grid_points": len(self.xs),
                "window": repr(float(self.xs[-1])),
                "detect_report": self.detect_report}


class _Extension:
    """Decompose query points as h^k(s) with s inside the window, so that
    phi-values extend by phi(query) = phi(s) + k."""

    def __init__(self, h: MapTree, window: float):
        self.h = h
        self.h_inv = invert(h)
        self.window = window

    def decompose(self, t: float) -> tuple[float, int]:
        k = 0
        guard = 0
        while t > self.window:
            t = self.h_inv.eval_float(t)
            k += 1
            guard += 1
            if guard > 10000:
                raise PreconditionError("h does not translate points back into the window")
        while t < -self.window:
            t = self.h.eval_float(t)
            k -= 1
            guard += 1
            if guard > 10000:
                raise PreconditionError("h does not translate points back into the window")
        return t, k

    def decompose_array(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ss = np.empty_like(ts)
        ks = np.empty(len(ts), dtype=np.int64)
        for i, t in enumerate(ts):
            s, k = self.decompose(float(t))
            ss[i] = s
            ks[i] = k
        return ss, ks


def solve_conjugacy(g: MapTree, h: MapTree, n: int, grid_step: float = 1e-3,
                    window: float = 10.0, tol: float = 1e-8,
                    max_iters: int = 200, relation_tol: Optional[float] = None,
                    detect_on_failure: bool = True) -> ConjugacyResult:
    """Iterate the rigidity operator to the conjugacy with the standard action.

    Preconditions: the relation g h g^{-1} = h^n holds on samples within
    relation_tol (default tol), and g is uniformly expanding on the window.
    Convergence requires the successive sup-change to fall below tol and both
    conjugacy residuals to reach tol.
    """
    if n < 2:
        raise PreconditionError(f"need n >= 2, got {n}")
    if relation_tol is None:
        relation_tol = tol
    residual = _relation_residual(g, h, n, window)
    if residual > max(relation_tol, 1e-12):
        raise PreconditionError(
            f"relation residual {residual:.3g} exceeds {max(relation_tol, 1e-12):.3g}")
    slope = _min_slope(g, window)
    if slope <= 1.0:
        raise PreconditionError(
            f"not in the perturbation regime: min slope estimate {slope:.4g} <= 1")

    x_star = _expanding_fixed_point(g, window)
    h_hat_tree = _shift_conjugate(h, x_star)
    ext = _Extension(h_hat_tree, window)

    def g_hat(x):
        return g.eval_float(x + x_star) - x_star

    npts = int(round(2 * window / grid_step)) + 1
    xs = np.linspace(-window, window, npts)
    g_of_xs = np.array([g_hat(float(x)) for x in xs])
    s_arr, k_arr = ext.decompose_array(g_of_xs)

    # for the h-residual: phi(h(x_i)) needs its own decomposition
    h_of_xs = np.array([h_hat_tree.eval_float(float(x)) for x in xs])
    hs_arr, hk_arr = ext.decompose_array(h_of_xs)

    phi = xs.copy()
    deviations = []
    ratios = []
    monotone = True
    verdict = "diverged"
    iterations = 0
    res_h = math.inf
    res_g = math.inf
    for it in range(1, max_iters + 1):
        phi_new = (np.interp(s_arr, xs, phi) + k_arr) / n
        change = float(np.max(np.abs(phi_new - phi)))
        if not np.all(np.diff(phi_new) > 0):
            monotone = False
        if deviations and deviations[-1] > 0:
            ratios.append(change / deviations[-1])
        deviations.append(change)
        phi = phi_new
        iterations = it
        if change <= tol:
            res_g = float(np.max(np.abs(n * phi - (np.interp(s_arr, xs, phi) + k_arr))))
            res_h = float(np.max(np.abs(phi + 1 - (np.interp(hs_arr, xs, phi) + hk_arr))))
            if res_g <= tol and res_h <= tol:
                verdict = "converged"
                break

    detect_report = None
    if verdict != "converged" and detect_on_failure:
        try:
            detect_report = detect_nonstandard(g, h, n, window=window)
            if detect_report["classification"] == "not_conjugate_to_standard":
                verdict = "not-conjugate-detected"
        except (PreconditionError, InconclusiveError):
            pass
    return ConjugacyResult(n, xs, phi, x_star, iterations, res_h, res_g,
                           ratios, verdict, tol, monotone, deviations,
                           detect_report)


def _shift_conjugate(f: MapTree, x_star: float) -> MapTree:
    """f conjugated by the translation moving g's fixed point to 0."""
    if x_star == 0.0:
        return f
    from .maps import AffineMap, compose
    return compose(AffineMap(1, -Fraction(x_star)), f, AffineMap(1, Fraction(x_star)))


def _orbit_classification(g: MapTree, x_star: float, eps: float = 1e-4,
                          max_iter: int = 500) -> str:
    """attracting / repelling / semi-stable by two-sided orbit convergence."""
    outcomes = []
    for side in (1.0, -1.0):
        x = x_star + side * eps
        verdict = "stays"
        for _ in range(max_iter):
            x = g.eval_float(x)
            if abs(x - x_star) < eps * 1e-4:
                verdict = "converges"
                break
            if abs(x - x_star) > 100 * eps:
                verdict = "escapes"
                break
        outcomes.append(verdict)
    if all(o == "converges" for o in outcomes):
        return "attracting"
    if all(o == "escapes" for o in outcomes):
        return "repelling"
    return "semi-stable"


def detect_nonstandard(g: MapTree, h: MapTree, n: int, window: float = 5.0,
                       samples: int = 4001, relation_tol: float = 1e-9) -> dict:
    """Classify whether g's fixed-point structure obstructs conjugacy to g0 = n x.

    Locates fixed points of g by sign-change bisection and tests each for
    attraction with two-sided orbits.  Any attracting fixed point certifies
    "not conjugate to standard" with that witness; otherwise the action is
    "consistent with standard".  Raises InconclusiveError when no fixed point
    is found in the window.
    """
    residual = _relation_residual(g, h, n, window)
    if residual > relation_tol:
        raise PreconditionError(
            f"relation residual {residual:.3g} exceeds {relation_tol:.3g}")
    xs = np.linspace(-window, window, samples)
    ds = np.array([g.eval_float(float(x)) - float(x) for x in xs])
    fixed_points = []
    for i in range(len(xs) - 1):
        if ds[i] == 0.0:
            fixed_points.append(float(xs[i]))
        elif ds[i] * ds[i + 1] < 0:
            lo, hi = float(xs[i]), float(xs[i + 1])
            f_lo = ds[i]
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                f_mid = g.eval_float(mid) - mid
                if (f_mid > 0) == (f_lo > 0):
                    lo, f_lo = mid, f_mid
                else:
                    hi = mid
            fixed_points.append(0.5 * (lo + hi))
    if ds[-1] == 0.0:
        fixed_points.append(float(xs[-1]))
    if not fixed_points:
        raise InconclusiveError(
            f"no fixed point of g found in [-{window}, {window}]; "
            "cannot classify (reported, not guessed)")
    report = {"fixed_points": [], "classification": "consistent_with_standard",
              "witness": None}
    for x_star in fixed_points:
        kind = _orbit_classification(g, x_star)
        report["fixed_points"].append({"x": x_star, "type": kind})
        if kind == "attracting" and report["witness"] is None:
            report["classification"] = "not_conjugate_to_standard"
            report["witness"] = x_star
    return report
