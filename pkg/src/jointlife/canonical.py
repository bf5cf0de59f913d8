"""Canonical finite-sum form of distortion risk measures.

For a monotone payoff L = g(K), K the first- or last-death year, every
distortion risk measure factors through the copula values on an annual grid:

    rho_h(C) = z0 + sum_{m=1..mbar} z_m * h(A_m + B_m * C(u_m, v_m))

with weights z_m > 0 equal to consecutive distinct-payoff differences,
points (u_m, v_m) the survival pair at the first death year reaching payoff
level m, and (A_m, B_m) fixed by the payoff's direction and statistic:

    increasing, first death:  (0, +1)
    increasing, last death:   (u_m + v_m, -1)
    decreasing, first death:  (1, -1)
    decreasing, last death:   (1 - u_m - v_m, +1)

Limited lifespans truncate the sum: terms where the statistic's tail
probability vanishes are dropped, and for decreasing payoffs the constant z0
absorbs the truncated tail (z0 equals the last retained payoff level).

The evaluation index is the first year of each payoff plateau.  For strictly
monotone payoff sequences this is the familiar one-point-per-year grid; with
plateaus (e.g. pure endowments) it is what makes the form agree with the
exact distribution of L.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contracts import FIRST_DEATH, PayoffSpec
from .copulas import CopulaEvaluator
from .marginals import GompertzMarginal
from .riskmeasures import DistortionFunction, distortion_integral, h_eval

_ZERO_TOL = 1e-15


@dataclass(frozen=True)
class CanonicalForm:
    z0: float
    z: tuple
    u: tuple
    v: tuple
    a: tuple
    b: tuple
    statistic: str
    monotonicity: str

    def __post_init__(self) -> None:
        z = np.asarray(self.z)
        u, v = np.asarray(self.u), np.asarray(self.v)
        a, b = np.asarray(self.a), np.asarray(self.b)
        if not (len(z) == len(u) == len(v) == len(a) == len(b)):
            raise ValueError("canonical arrays must share one length")
        if self.z0 < 0.0 or np.any(z <= 0.0):
            raise ValueError("weights must be positive (z0 nonnegative)")
        if np.any(np.diff(u) > _ZERO_TOL) or np.any(np.diff(v) > _ZERO_TOL):
            raise ValueError("grid points must be nonincreasing in m")
        if not np.all(np.isin(b, (-1.0, 1.0))):
            raise ValueError("B coefficients must be +-1")
        if self.monotonicity not in ("increasing", "decreasing"):
            raise ValueError("canonical form requires a monotone payoff")
        # A_m + B_m * c stays in [0, 1] across the Frechet-Hoeffding range
        w = np.maximum(0.0, u + v - 1.0)
        mmax = np.minimum(u, v)
        for c in (w, mmax):
            arg = a + b * c
            if np.any(arg < -1e-12) or np.any(arg > 1.0 + 1e-12):
                raise ValueError("affine coefficients leave [0, 1]")

    @property
    def m_bar(self) -> int:
        return len(self.z)

    def r_values(self, c: CopulaEvaluator) -> np.ndarray:
        """The transformed copula values r_m = A_m + B_m * C(u_m, v_m)."""
        if self.m_bar == 0:
            return np.zeros(0)
        u, v = np.asarray(self.u), np.asarray(self.v)
        vals = np.asarray(c(u, v), dtype=float)
        return np.asarray(self.a) + np.asarray(self.b) * vals

    def total_weight(self) -> float:
        return float(self.z0 + np.sum(self.z))


def _distinct_levels(values: np.ndarray):
    """Distinct payoff levels and the first index attaining each (exact ties)."""
    keep = np.concatenate([[True], values[1:] != values[:-1]])
    starts = np.nonzero(keep)[0]
    return values[starts], starts


def build_canonical(spec: PayoffSpec, fbar: GompertzMarginal,
                    gbar: GompertzMarginal) -> CanonicalForm:
    """Construct the canonical form of a monotone payoff.

    The payoff sequence is collapsed to its distinct levels (exact equality;
    schedules are finite arithmetic so no epsilon is involved), weights are
    consecutive level differences, and the truncation index is the first
    level whose tail probability is identically zero: for the first-death
    statistic the first m with u_m = 0 or v_m = 0, for the last-death
    statistic the first m with u_m = 0 and v_m = 0.
    """
    if spec.monotonicity == "non_monotone":
        raise ValueError("canonical form requires a monotone payoff")
    values = np.asarray(spec.values, dtype=float)
    levels, starts = _distinct_levels(values)

    increasing = spec.monotonicity == "increasing"
    z0 = float(levels[0])
    if increasing:
        z = np.diff(levels)
        points_k = starts[1:]
    else:
        z = -np.diff(levels)
        points_k = starts[1:]
        z0 = 0.0

    u = fbar.survival(points_k.astype(float)) if len(points_k) else np.zeros(0)
    v = gbar.survival(points_k.astype(float)) if len(points_k) else np.zeros(0)
    u, v = np.atleast_1d(u), np.atleast_1d(v)

    if spec.statistic == FIRST_DEATH:
        dead = (u <= _ZERO_TOL) | (v <= _ZERO_TOL)
    else:
        dead = (u <= _ZERO_TOL) & (v <= _ZERO_TOL)
    cut = int(np.argmax(dead)) if np.any(dead) else len(z)

    if not increasing and cut < len(levels):
        # tail below the last reachable level has zero probability; folding it
        # into the constant keeps the form exact
        z0 = float(levels[cut])
    z, u, v = z[:cut], u[:cut], v[:cut]
    u = np.where(u <= _ZERO_TOL, 0.0, u)
    v = np.where(v <= _ZERO_TOL, 0.0, v)

    pos = z > 0.0
    z, u, v = z[pos], u[pos], v[pos]

    if increasing and spec.statistic == FIRST_DEATH:
        a, b = np.zeros_like(z), np.ones_like(z)
    elif increasing:
        a, b = u + v, -np.ones_like(z)
    elif spec.statistic == FIRST_DEATH:
        a, b = np.ones_like(z), -np.ones_like(z)
    else:
        a, b = 1.0 - u - v, np.ones_like(z)

    return CanonicalForm(z0, tuple(z), tuple(u), tuple(v), tuple(a), tuple(b),
                         spec.statistic, spec.monotonicity)


def evaluate(form: CanonicalForm, h: DistortionFunction,
             c: CopulaEvaluator) -> float:
    """rho_h at a (quasi-)copula through the canonical sum."""
    if form.m_bar == 0:
        return form.z0
    r = np.clip(form.r_values(c), 0.0, 1.0)
    return float(form.z0 + np.dot(np.asarray(form.z), h_eval(h, r)))


def statistic_tail(spec_statistic: str, fbar: GompertzMarginal,
                   gbar: GompertzMarginal, c: CopulaEvaluator,
                   k: np.ndarray) -> np.ndarray:
    """P(K >= k) for the first- or last-death year under survival copula c."""
    k = np.asarray(k, dtype=float)
    fb = np.atleast_1d(fbar.survival(k))
    gb = np.atleast_1d(gbar.survival(k))
    joint = np.asarray(c(fb, gb), dtype=float)
    if spec_statistic == FIRST_DEATH:
        return joint
    return fb + gb - joint


def payoff_distribution(spec: PayoffSpec, fbar: GompertzMarginal,
                        gbar: GompertzMarginal, c: CopulaEvaluator):
    """Exact atoms (values, probabilities) of the payoff under copula c."""
    kmax = max(fbar.horizon, gbar.horizon)
    ks = np.arange(0, kmax + 2)
    tail = statistic_tail(spec.statistic, fbar, gbar, c, ks)
    tail = np.clip(tail, 0.0, 1.0)
    tail[-1] = 0.0
    pmf = tail[:-1] - tail[1:]
    pmf = np.clip(pmf, 0.0, None)
    pmf = pmf / pmf.sum()
    return spec.payoff_at(ks[:-1]), pmf


def direct_risk_oracle(spec: PayoffSpec, fbar: GompertzMarginal,
                       gbar: GompertzMarginal, c: CopulaEvaluator,
                       h: DistortionFunction) -> float:
    """rho_h computed from the exact distribution of the payoff.

    Independent of the canonical-form path: it sums h(tail probability)
    across the payoff's distinct levels.  Serves as the oracle for
    :func:`evaluate`.
    """
    values, pmf = payoff_distribution(spec, fbar, gbar, c)
    return distortion_integral(h, values, pmf)
