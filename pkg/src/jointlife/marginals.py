"""Truncated Gompertz lifetime distributions.

The remaining lifetime of an insured aged ``t`` follows a Gompertz law with
mode ``m`` and dispersion ``sigma``, truncated so that no one outlives the
maximum remaining lifetime ``omega``.  With

    base(x) = 1 - exp[exp((t - m)/sigma) * (1 - exp(x/sigma))],

the truncated cdf is ``F(x) = base(x) / base(omega)`` on ``[0, omega]`` and
the survival function is ``1 - F``.  All ages and durations are in years.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GompertzMarginal:
    """Remaining-lifetime law of one insured at contract inception.

    Parameters
    ----------
    entry_age : float
        Age at the start of the contract (years, >= 0).
    mode : float
        Mode of the underlying Gompertz law (years of age).
    dispersion : float
        Dispersion parameter (years, > 0).
    max_lifetime : float
        Upper truncation point for the remaining lifetime (years, > 0).
    """

    entry_age: float
    mode: float
    dispersion: float
    max_lifetime: float

    def __post_init__(self) -> None:
        if not self.entry_age >= 0.0:
            raise ValueError(f"entry_age must be >= 0, got {self.entry_age}")
        if not self.dispersion > 0.0:
            raise ValueError(f"dispersion must be > 0, got {self.dispersion}")
        if not self.max_lifetime > 0.0:
            raise ValueError(f"max_lifetime must be > 0, got {self.max_lifetime}")

    def _log_tail(self, x):
        # log of the untruncated Gompertz survival exp[c * (1 - e^{x/sigma})],
        # c = exp((t - m)/sigma); always <= 0.
        c = np.exp((self.entry_age - self.mode) / self.dispersion)
        return -c * np.expm1(np.asarray(x, dtype=float) / self.dispersion)

    def survival(self, x):
        """P(remaining lifetime > x), clamped to [0, omega].

        Accepts a scalar or an ndarray; returns the matching shape.
        Returns 1 for x < 0 and 0 for x > omega.
        """
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.max_lifetime)
        tail_x = np.exp(self._log_tail(x))
        tail_om = np.exp(self._log_tail(self.max_lifetime))
        out = (tail_x - tail_om) / (1.0 - tail_om)
        if out.ndim == 0:
            return float(out)
        return out

    def quantile_survival(self, p):
        """Inverse of :meth:`survival`: the x in [0, omega] with survival(x) = p.

        Closed-form inversion of the truncated law.  Raises ``ValueError``
        for p outside [0, 1].
        """
        p = np.asarray(p, dtype=float)
        if np.any((p < 0.0) | (p > 1.0)):
            raise ValueError("survival probability must lie in [0, 1]")
        c = np.exp((self.entry_age - self.mode) / self.dispersion)
        tail_om = np.exp(self._log_tail(self.max_lifetime))
        # survival(x) = p  <=>  exp(log_tail(x)) = tail_om + p*(1 - tail_om)
        tail_x = tail_om + p * (1.0 - tail_om)
        x = self.dispersion * np.log1p(-np.log(tail_x) / c)
        x = np.clip(x, 0.0, self.max_lifetime)
        if x.ndim == 0:
            return float(x)
        return x

    def curtate_survival(self, k):
        """P(curtate remaining lifetime >= k) for integer k >= 0.

        Equals ``survival(k)`` because the lifetime is continuous.
        """
        k = np.asarray(k)
        if np.any(k < 0) or not np.issubdtype(k.dtype, np.integer) and np.any(k != np.floor(k)):
            raise ValueError("curtate ages must be nonnegative integers")
        return self.survival(np.asarray(k, dtype=float))

    @property
    def horizon(self) -> int:
        """Smallest integer k with survival(k) = 0."""
        return int(np.ceil(self.max_lifetime))
