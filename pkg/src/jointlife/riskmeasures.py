"""Distortion functions and risk measures of discrete laws.

A distortion function h maps [0, 1] to [0, 1] with h(0) = 0, h(1) = 1,
nondecreasing.  The induced risk measure of a nonnegative payoff L is
``integral of h(P(L > x)) dx``.  Three distortions are supported:

* mean:                h(beta) = beta
* value-at-risk (VaR): h(beta) = 1 if beta > 1 - alpha else 0  (strict)
* expected shortfall:  h(beta) = min(1, beta / (1 - alpha))

The VaR indicator is strict at beta = 1 - alpha; the index formulas used by
the bound computations depend on that convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_KINDS = ("mean", "var", "es")


@dataclass(frozen=True)
class DistortionFunction:
    kind: str
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown distortion kind {self.kind!r}")
        if self.kind == "mean":
            if self.alpha is not None:
                raise ValueError("mean distortion takes no confidence level")
        else:
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError(f"confidence level must lie in (0, 1), got {self.alpha}")

    @property
    def label(self) -> str:
        if self.kind == "mean":
            return "mean"
        return f"{self.kind}{self.alpha:g}"


def mean_measure() -> DistortionFunction:
    return DistortionFunction("mean")


def var_measure(alpha: float) -> DistortionFunction:
    return DistortionFunction("var", alpha)


def es_measure(alpha: float) -> DistortionFunction:
    return DistortionFunction("es", alpha)


def h_eval(h: DistortionFunction, beta):
    """Evaluate the distortion at tail probability ``beta`` (scalar or array)."""
    beta = np.asarray(beta, dtype=float)
    if h.kind == "mean":
        out = beta
    elif h.kind == "var":
        out = (beta > 1.0 - h.alpha).astype(float)
    else:
        out = np.minimum(1.0, beta / (1.0 - h.alpha))
    if out.ndim == 0:
        return float(out)
    return out


def _merge_atoms(values, probs):
    values = np.asarray(values, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if values.shape != probs.shape or values.ndim != 1 or values.size == 0:
        raise ValueError("atoms must be two equal-length nonempty 1-d arrays")
    if np.any(probs < -1e-15):
        raise ValueError("atom probabilities must be nonnegative")
    total = probs.sum()
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"atom probabilities must sum to 1, got {total}")
    order = np.argsort(values, kind="stable")
    values, probs = values[order], probs[order]
    uniq, inverse = np.unique(values, return_inverse=True)
    merged = np.zeros_like(uniq)
    np.add.at(merged, inverse, probs)
    return uniq, merged


def distortion_integral(h: DistortionFunction, values, probs) -> float:
    """``integral of h(P(L > x)) dx`` for a discrete nonnegative law, exactly.

    Independent of the quantile-based formulas below; used as their oracle.
    """
    values, probs = _merge_atoms(values, probs)
    if np.any(values < 0):
        raise ValueError("payoff values must be nonnegative")
    # survival after each atom: S_i = P(L > values[i])
    surv = 1.0 - np.cumsum(probs)
    total = values[0]  # h(1) * measure of [0, min support)
    for i in range(len(values) - 1):
        total += (values[i + 1] - values[i]) * h_eval(h, max(surv[i], 0.0))
    return float(total)


def measures_from_discrete(values, probs, alpha_var: float, alpha_es: float):
    """Mean, VaR and ES of a discrete law given as atoms (value, probability).

    VaR is the generalized inverse ``inf{l : P(L <= l) >= alpha}``.  ES is the
    tail average ``(1/(1-alpha)) * integral_alpha^1 VaR_beta dbeta``, which
    splits the atom at the quantile so that it agrees with the distortion
    integral.
    """
    if not 0.0 < alpha_var < 1.0 or not 0.0 < alpha_es < 1.0:
        raise ValueError("confidence levels must lie in (0, 1)")
    values, probs = _merge_atoms(values, probs)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0

    mean = float(np.dot(values, probs))

    q_var = int(np.searchsorted(cdf, alpha_var))
    var = float(values[q_var])

    q_es = int(np.searchsorted(cdf, alpha_es))
    tail = (cdf[q_es] - alpha_es) * values[q_es]
    if q_es + 1 < len(values):
        tail += np.dot(values[q_es + 1:], probs[q_es + 1:])
    es = float(tail / (1.0 - alpha_es))

    return {"mean": mean, "var": var, "es": es}
