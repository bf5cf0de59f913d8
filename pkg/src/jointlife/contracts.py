"""Joint life contract catalog: payoffs, price forms, calibration.

Six standard two-life contracts are supported.  Four of them pay off through
a single curtate statistic (the first or last death year) and admit a payoff
sequence; the reversionary annuity and the widow's pension do not, but their
prices are still linear in the copula values on the annual grid.

Payments occur at integer times only.  Discount factors are non-random; the
constant-rate constructors fill ``v_k = 1/(1+rate)`` for every year.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .copulas import CopulaEvaluator
from .marginals import GompertzMarginal

FIRST_DEATH = "first_death"
LAST_DEATH = "last_death"

KINDS = (
    "joint_life_annuity",
    "last_survivor_annuity",
    "joint_life_insurance",
    "last_survivor_insurance",
    "reversionary_annuity",
    "widows_pension",
)

_ANNUITY_KINDS = ("joint_life_annuity", "last_survivor_annuity",
                  "reversionary_annuity", "widows_pension")


@dataclass(frozen=True)
class Contract:
    """A two-life contract with annual schedule and discounting.

    ``term`` is the policy term in years; ``None`` means whole-life (the
    horizon is resolved from the marginals as ceil(max lifetime)).  ``level``
    scales a flat unit schedule; an explicit ``schedule`` overrides it.
    """

    kind: str
    level: float = 1.0
    rate: float = 0.05
    term: int | None = None
    schedule: tuple | None = None
    discounts: tuple | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown contract kind {self.kind!r}")
        if self.level < 0.0:
            raise ValueError("level must be nonnegative")
        if self.term is not None and self.term < 1:
            raise ValueError("term must be at least one year")
        if self.schedule is not None and np.any(np.asarray(self.schedule) < 0.0):
            raise ValueError("schedule amounts must be nonnegative")
        if self.discounts is not None:
            d = np.asarray(self.discounts)
            if np.any((d <= 0.0) | (d >= 1.0)):
                raise ValueError("discount factors must lie in (0, 1)")
        if self.rate <= 0.0 and self.discounts is None:
            raise ValueError("annual rate must be positive")

    def with_level(self, level: float) -> "Contract":
        return Contract(self.kind, level, self.rate, self.term,
                        self.schedule, self.discounts)

    def resolve(self, n: int):
        """Amounts and k-year discount factors v_k^k for k = 1..n."""
        if self.schedule is not None:
            amounts = np.zeros(n)
            given = np.asarray(self.schedule, dtype=float)
            amounts[: min(n, len(given))] = given[:n]
        else:
            amounts = np.full(n, float(self.level))
        if self.discounts is not None:
            vk = np.ones(n)
            given = np.asarray(self.discounts, dtype=float)
            vk[: min(n, len(given))] = given[:n]
        else:
            vk = np.full(n, 1.0 / (1.0 + self.rate))
        k = np.arange(1, n + 1)
        return amounts, vk ** k

    def horizon(self, fbar: GompertzMarginal, gbar: GompertzMarginal) -> int:
        if self.term is not None:
            return int(self.term)
        return max(fbar.horizon, gbar.horizon)


def joint_life_annuity(level=1.0, rate=0.05, term=None) -> Contract:
    return Contract("joint_life_annuity", level, rate, term)


def last_survivor_annuity(level=1.0, rate=0.05, term=None) -> Contract:
    return Contract("last_survivor_annuity", level, rate, term)


def joint_life_insurance(level=1.0, rate=0.05, term=None) -> Contract:
    return Contract("joint_life_insurance", level, rate, term)


def last_survivor_insurance(level=1.0, rate=0.05, term=None) -> Contract:
    return Contract("last_survivor_insurance", level, rate, term)


def reversionary_annuity(level=1.0, rate=0.05, term=None) -> Contract:
    return Contract("reversionary_annuity", level, rate, term)


def widows_pension(level=1.0, rate=0.05, term=None) -> Contract:
    return Contract("widows_pension", level, rate, term)


def _classify(values: np.ndarray) -> str:
    diffs = np.diff(values)
    if np.all(diffs >= 0.0):
        return "increasing"
    if np.all(diffs <= 0.0):
        return "decreasing"
    return "non_monotone"


@dataclass(frozen=True)
class PayoffSpec:
    """Payoff sequence of a single-statistic contract.

    ``values[k]`` is the payoff when the statistic (first or last death year)
    equals k, for k = 0..len(values)-1.  Beyond the stored range the payoff
    is constant at ``values[-1]``; the range always covers the joint lifetime
    horizon, so the extension never carries probability mass.
    """

    statistic: str
    values: tuple
    monotonicity: str

    def __post_init__(self) -> None:
        if self.statistic not in (FIRST_DEATH, LAST_DEATH):
            raise ValueError(f"unknown statistic {self.statistic!r}")
        vals = np.asarray(self.values, dtype=float)
        if np.any(vals < 0.0):
            raise ValueError("payoffs must be nonnegative")
        if self.monotonicity != _classify(vals):
            raise ValueError("monotonicity flag inconsistent with the sequence")

    def payoff_at(self, k) -> np.ndarray:
        vals = np.asarray(self.values, dtype=float)
        idx = np.minimum(np.asarray(k, dtype=int), len(vals) - 1)
        return vals[idx]


def payoff_spec(contract: Contract, fbar: GompertzMarginal,
                gbar: GompertzMarginal) -> PayoffSpec:
    """Payoff sequence of a single-statistic contract over k = 0..horizon+1.

    Annuities accumulate discounted payments up to the death year; insurances
    pay the scheduled benefit at the end of the death year (capped at the
    term).  Raises ``ValueError`` for the two contracts whose payoff depends
    on both lifetimes.
    """
    if contract.kind in ("reversionary_annuity", "widows_pension"):
        raise ValueError(
            f"{contract.kind} has no single-statistic payoff; "
            "price it through price_linear_form")
    n = contract.horizon(fbar, gbar)
    amounts, disc = contract.resolve(n)
    kmax = max(fbar.horizon, gbar.horizon) + 1
    ks = np.arange(kmax + 1)

    if contract.kind in ("joint_life_annuity", "last_survivor_annuity"):
        paid = np.concatenate([[0.0], np.cumsum(amounts * disc)])
        values = paid[np.minimum(ks, n)]
        stat = FIRST_DEATH if contract.kind == "joint_life_annuity" else LAST_DEATH
    else:
        benefit = amounts * disc  # b_k v_k^k, k = 1..n
        values = benefit[np.minimum(ks + 1, n) - 1]
        stat = FIRST_DEATH if contract.kind == "joint_life_insurance" else LAST_DEATH

    return PayoffSpec(stat, tuple(values), _classify(values))


@dataclass(frozen=True)
class PriceLinearForm:
    """Price of a contract as ``c0 + sum of c_m * C(u_m, v_m)``.

    Holds for every copula C; coefficients may be of either sign.  Points are
    the survival pairs on the annual grid, nonincreasing in both coordinates.
    """

    c0: float
    coeffs: tuple
    u: tuple
    v: tuple

    def __post_init__(self) -> None:
        if not len(self.coeffs) == len(self.u) == len(self.v):
            raise ValueError("coefficients and points must have equal length")

    def price(self, c: CopulaEvaluator) -> float:
        if len(self.coeffs) == 0:
            return float(self.c0)
        cv = np.asarray(c(np.asarray(self.u), np.asarray(self.v)), dtype=float)
        return float(self.c0 + np.dot(np.asarray(self.coeffs), cv))


def price_linear_form(contract: Contract, fbar: GompertzMarginal,
                      gbar: GompertzMarginal) -> PriceLinearForm:
    """Copula-linear price decomposition of any catalog contract."""
    n = contract.horizon(fbar, gbar)
    amounts, disc = contract.resolve(n)
    w = amounts * disc  # a_k v_k^k or b_k v_k^k, k = 1..n
    ks = np.arange(1, n + 1)
    fb = fbar.survival(ks.astype(float))
    gb = gbar.survival(ks.astype(float))

    kind = contract.kind
    if kind == "joint_life_annuity":
        return PriceLinearForm(0.0, tuple(w), tuple(fb), tuple(gb))
    if kind == "last_survivor_annuity":
        return PriceLinearForm(float(np.dot(w, fb + gb)), tuple(-w),
                               tuple(fb), tuple(gb))
    if kind == "reversionary_annuity":
        return PriceLinearForm(float(np.dot(w, fb + gb)), tuple(-2.0 * w),
                               tuple(fb), tuple(gb))
    if kind == "widows_pension":
        return PriceLinearForm(float(np.dot(w, fb)), tuple(-w),
                               tuple(fb), tuple(gb))

    # Insurances pay w_{K+1} = b_{K+1} v^{K+1} at the death year, frozen at
    # w_n from year n on (the payoff stays monotone at the term end).  The
    # mean telescopes to w_1 + sum_j (w_{j+1} - w_j) * P(K >= j), so the
    # coefficient of the survival pair at j is d_j = w_{j+1} - w_j for
    # j = 1..n-1; the pair at the term end cancels out.
    d = w[1:] - w[: n - 1]
    fbj, gbj = fb[: n - 1], gb[: n - 1]
    if kind == "joint_life_insurance":
        return PriceLinearForm(float(w[0]), tuple(d), tuple(fbj), tuple(gbj))
    # last_survivor_insurance: g(KX) + g(KY) = g(Kmin) + g(Kmax) turns the
    # copula-dependent part into the joint-life one with opposite sign
    c0 = float(w[0] + np.dot(d, fbj + gbj))
    return PriceLinearForm(c0, tuple(-d), tuple(fbj), tuple(gbj))


def calibrate_levels(entries, anchor_index: int = 0):
    """Scale each contract's level so all prices match at independence.

    ``entries`` is a sequence of (contract, fbar, gbar) triples.  The anchor
    contract keeps its level; every other level is solved in closed form from
    the price's linearity in the level.  Returns the list of levels.
    """
    from .copulas import independence

    entries = list(entries)
    if not entries:
        raise ValueError("no contracts to calibrate")
    if not 0 <= anchor_index < len(entries):
        raise ValueError("anchor index out of range")
    pi = independence()

    def unit_price(contract, fbar, gbar):
        return price_linear_form(contract.with_level(1.0), fbar, gbar).price(pi)

    anchor_contract, afb, agb = entries[anchor_index]
    target = unit_price(anchor_contract, afb, agb) * anchor_contract.level

    levels = []
    for i, (contract, fbar, gbar) in enumerate(entries):
        if i == anchor_index:
            levels.append(float(contract.level))
            continue
        if contract.schedule is not None:
            raise ValueError("calibration requires level-scaled contracts")
        unit = unit_price(contract, fbar, gbar)
        if abs(unit) < 1e-300:
            raise ValueError(
                f"cannot calibrate {contract.kind}: zero price at unit level")
        levels.append(float(target / unit))
    return levels
