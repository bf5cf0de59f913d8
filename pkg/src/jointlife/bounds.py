"""Best- and worst-case risk over a norm ball of copulas.

The uncertainty set consists of all copulas whose value vector on the
canonical grid lies within an L1 or L-infinity ball of radius epsilon around
the reference copula's vector.  A value vector theta is attainable by some
copula exactly when it satisfies, on the grid ordered by decreasing
coordinates,

  (monotone chain)   0 <= theta_mbar <= ... <= theta_1 <= 1
  (reverse chain)    u_m + v_m - theta_m nonincreasing in m
  (pointwise FH)     W(u_m, v_m) <= theta_m <= M(u_m, v_m)
  (norm ball)        || theta - theta_ref || <= epsilon

so each bound reduces to linear programming over this polytope: directly for
the mean, through monotone index searches for VaR, and through at most
mbar + 1 slice programs for ES.

Implementation notes.  The L-infinity ball and the FH bounds are kept as
variable boxes; the L1 ball uses auxiliary variables s_m >= |theta_m -
theta_ref_m| with a budget row (the Lemma-style block count is reported by
``FeasibleRegion.block_row_count``).  Chain rows that are implied by the
variable boxes are pruned before solving; the pruned count is tracked.
Solves on one region share a warm-start basis, and coordinate extremes are
cached, which the VaR/ES searches exploit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lp
from .canonical import CanonicalForm
from .contracts import PriceLinearForm
from .copulas import CopulaEvaluator
from .riskmeasures import DistortionFunction, h_eval

L1 = "l1"
LINF = "linf"
NORMS = (L1, LINF)

# LP optima carry ~1e-9 noise; strict comparisons in the index searches must
# not flip on it.
_STRICT_TOL = 1e-9
_WINDOW_TOL = 1e-7


class FeasibleRegion:
    """LP encoding of the attainable value vectors within the epsilon ball."""

    def __init__(self, u, v, a, b, theta_ref, norm: str, epsilon: float):
        if norm not in NORMS:
            raise ValueError(f"norm must be one of {NORMS}, got {norm!r}")
        if epsilon < 0.0:
            raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
        self.u = np.asarray(u, dtype=float)
        self.v = np.asarray(v, dtype=float)
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.theta_ref = np.asarray(theta_ref, dtype=float)
        self.norm = norm
        self.epsilon = float(epsilon)
        self.m_bar = len(self.u)
        self.r_ref = self.a + self.b * self.theta_ref
        self._warm = None
        self._coord_cache: dict = {}
        self._build()

    # -- construction -----------------------------------------------------

    def _build(self) -> None:
        """Assemble the LP data.

        The L-infinity ball and the pointwise bounds are plain boxes on the
        theta variables, leaving only the two chain families as rows.  For
        the L1 ball the deviation from the reference is split into its
        positive and negative parts, theta = theta_ref + p - q with
        p, q >= 0 and sum(p + q) <= epsilon: the split region projects onto
        exactly the same set of theta vectors as the auxiliary-variable
        encoding of ``block_row_count`` (any theta maps to its canonical
        split, and any split satisfies the budget a fortiori), while keeping
        the reference point a natural feasible start.  Chain rows already
        implied by the boxes are pruned; the LP is indifferent to redundancy
        but the sweeps are not indifferent to its cost.
        """
        m = self.m_bar
        w = np.maximum(0.0, self.u + self.v - 1.0)
        mm = np.minimum(self.u, self.v)
        # per-coordinate envelope of the ball (for L1 the implied relaxation
        # |theta_m - ref_m| <= epsilon; exact for L-infinity)
        lo = np.maximum(w, self.theta_ref - self.epsilon)
        hi = np.minimum(mm, self.theta_ref + self.epsilon)
        lo = np.minimum(lo, hi)  # FP dust; the ball always contains the reference
        self._box_lo, self._box_hi = lo, hi

        split = self.norm == L1
        n_vars = 2 * m if split else m
        rows, rhs = [], []
        self._pruned_rows = 0

        def chain_row(i_pos, i_neg, bound):
            # theta_{i_pos} - theta_{i_neg} <= bound, pruned when the boxes
            # already imply it
            if hi[i_pos] - lo[i_neg] <= bound + 1e-14:
                self._pruned_rows += 1
                return
            row = np.zeros(n_vars)
            if split:
                row[i_pos], row[m + i_pos] = 1.0, -1.0
                row[i_neg], row[m + i_neg] = -1.0, 1.0
                rows.append(row)
                rhs.append(bound - (self.theta_ref[i_pos] - self.theta_ref[i_neg]))
            else:
                row[i_pos], row[i_neg] = 1.0, -1.0
                rows.append(row)
                rhs.append(bound)

        gaps = (self.u + self.v)[:-1] - (self.u + self.v)[1:] if m > 1 else []
        for i in range(m - 1):
            chain_row(i + 1, i, 0.0)           # monotone chain
            chain_row(i, i + 1, float(gaps[i]))  # reverse chain

        if split:
            budget = np.ones(n_vars)
            rows.append(budget)
            rhs.append(self.epsilon)
            self._lower = np.zeros(2 * m)
            self._upper = np.concatenate([
                np.minimum(self.epsilon, hi - self.theta_ref),
                np.minimum(self.epsilon, self.theta_ref - lo)])
            self._upper = np.maximum(self._upper, 0.0)
        else:
            self._lower, self._upper = lo.copy(), hi.copy()

        self._a_ub = np.asarray(rows, dtype=float).reshape(len(rows), n_vars)
        self._b_ub = np.asarray(rhs, dtype=float)

    @property
    def block_row_count(self) -> int:
        """Constraint count of the structured encoding (boxes counted as rows).

        6*mbar - 2 for the L-infinity ball, 6*mbar - 1 for the L1 ball.
        """
        m = self.m_bar
        chains = 2 * (m - 1) if m > 1 else 0
        fh_rows = 2 * m
        ball_rows = 2 * m if self.norm == LINF else 2 * m + 1
        return chains + fh_rows + ball_rows

    @property
    def pruned_row_count(self) -> int:
        return self._pruned_rows

    # -- solving ----------------------------------------------------------

    def optimize_r(self, r_coeffs, sense: str, extra_r_bounds=None):
        """Optimize ``sum(r_coeffs * r)`` over the region.

        ``extra_r_bounds`` maps coordinate index to an (lo, hi) pair in
        r-space (used by the ES slices).  Returns ``(value, r_vector)`` or
        ``None`` when the restricted region is empty.  Raises
        :class:`lp.SolverFailure` on numerical failure.
        """
        if self.m_bar == 0:
            return 0.0, np.zeros(0)
        m = self.m_bar
        r_coeffs = np.asarray(r_coeffs, dtype=float)
        c_theta = r_coeffs * self.b
        const = float(np.dot(r_coeffs, self.a))
        split = self.norm == L1
        if split:
            const += float(np.dot(c_theta, self.theta_ref))
            c_vars = np.concatenate([c_theta, -c_theta])
        else:
            c_vars = c_theta

        lower, upper = self._lower, self._upper
        if extra_r_bounds:
            lower, upper = lower.copy(), upper.copy()
            for idx, (rlo, rhi) in extra_r_bounds.items():
                # r = a + b*theta; theta bounds flip orientation with b
                if self.b[idx] > 0:
                    tlo, thi = rlo - self.a[idx], rhi - self.a[idx]
                else:
                    tlo, thi = self.a[idx] - rhi, self.a[idx] - rlo
                tlo = max(tlo, self._box_lo[idx])
                thi = min(thi, self._box_hi[idx])
                if tlo > thi + 1e-12:
                    return None
                if split:
                    ref = self.theta_ref[idx]
                    # theta in [tlo, thi] <=> p in [(tlo-ref)+, (thi-ref)+]
                    # and q in [(ref-thi)+, (ref-tlo)+]
                    lower[idx] = max(lower[idx], max(tlo - ref, 0.0))
                    upper[idx] = min(upper[idx], max(thi - ref, 0.0))
                    lower[m + idx] = max(lower[m + idx], max(ref - thi, 0.0))
                    upper[m + idx] = min(upper[m + idx], max(ref - tlo, 0.0))
                    if lower[idx] > upper[idx] + 1e-12 or \
                            lower[m + idx] > upper[m + idx] + 1e-12:
                        return None
                else:
                    lower[idx] = max(lower[idx], tlo)
                    upper[idx] = min(upper[idx], thi)
                    if lower[idx] > upper[idx] + 1e-12:
                        return None
        program = lp.LinearProgram(c=c_vars, sense=sense, a_ub=self._a_ub,
                                   b_ub=self._b_ub, lower=lower, upper=upper)
        result = lp.solve(program, start=self._warm)
        if result.status == "infeasible":
            return None
        if result.status != "optimal":
            raise lp.SolverFailure(f"lp terminated with status {result.status}")
        self._warm = result.basis
        if split:
            theta = self.theta_ref + result.x[:m] - result.x[m:]
        else:
            theta = result.x[:m]
        return result.value + const, self.a + self.b * theta

    def coordinate_extreme(self, m_index: int, sense: str):
        """Cached max/min of r_m over the region, with the attaining vector."""
        key = (m_index, sense)
        if key not in self._coord_cache:
            coeffs = np.zeros(self.m_bar)
            coeffs[m_index] = 1.0
            out = self.optimize_r(coeffs, sense)
            if out is None:
                raise lp.SolverFailure("region unexpectedly empty")
            self._coord_cache[key] = out
        return self._coord_cache[key]

    def coordinate_max(self, m_index: int) -> float:
        return self.coordinate_extreme(m_index, "max")[0]

    def coordinate_min(self, m_index: int) -> float:
        return self.coordinate_extreme(m_index, "min")[0]


def build_region(form: CanonicalForm, c_ref: CopulaEvaluator, norm: str,
                 epsilon: float) -> FeasibleRegion:
    """Feasible region of a canonical form around a reference copula."""
    u, v = np.asarray(form.u), np.asarray(form.v)
    theta_ref = np.asarray(c_ref(u, v), dtype=float) if form.m_bar else np.zeros(0)
    return FeasibleRegion(u, v, form.a, form.b, theta_ref, norm, epsilon)


def build_value_region(u, v, c_ref: CopulaEvaluator, norm: str,
                       epsilon: float) -> FeasibleRegion:
    """Region over raw copula values (identity transform r = theta)."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    theta_ref = np.asarray(c_ref(u, v), dtype=float) if len(u) else np.zeros(0)
    ones = np.ones(len(u))
    return FeasibleRegion(u, v, np.zeros(len(u)), ones, theta_ref, norm, epsilon)


@dataclass(frozen=True)
class BoundResult:
    measure: DistortionFunction
    norm: str
    epsilon: float
    lower: float
    upper: float
    lower_point: np.ndarray | None = None
    upper_point: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.lower > self.upper + 1e-7:
            raise ValueError("lower bound exceeds upper bound")


def mean_bounds(region: FeasibleRegion, form: CanonicalForm) -> BoundResult:
    """Sharp expectation bounds: a single LP in each direction."""
    z = np.asarray(form.z)
    meas = DistortionFunction("mean")
    if form.m_bar == 0:
        return BoundResult(meas, region.norm, region.epsilon, form.z0, form.z0)
    lo_val, lo_pt = region.optimize_r(z, "min")
    hi_val, hi_pt = region.optimize_r(z, "max")
    return BoundResult(meas, region.norm, region.epsilon,
                       form.z0 + lo_val, form.z0 + hi_val, lo_pt, hi_pt)


def mean_bounds_linear(plf: PriceLinearForm, c_ref: CopulaEvaluator,
                       norm: str, epsilon: float) -> BoundResult:
    """Expectation bounds for a copula-linear price with sign-mixed weights."""
    region = build_value_region(plf.u, plf.v, c_ref, norm, epsilon)
    meas = DistortionFunction("mean")
    coeffs = np.asarray(plf.coeffs)
    if len(coeffs) == 0 or np.all(coeffs == 0.0):
        return BoundResult(meas, norm, epsilon, plf.c0, plf.c0)
    lo_val, lo_pt = region.optimize_r(coeffs, "min")
    hi_val, hi_pt = region.optimize_r(coeffs, "max")
    return BoundResult(meas, norm, epsilon, plf.c0 + lo_val, plf.c0 + hi_val,
                       lo_pt, hi_pt)


# -- monotone index searches ----------------------------------------------


class _ExtremeSeries:
    """Lazy 1-based view of m -> max/min of r_m, with a probe log.

    The chain constraints make the sequence nonincreasing in m for
    increasing payoffs and nondecreasing for decreasing payoffs, which the
    bisections below rely on; the probe log lets callers verify that and
    fall back to a full scan if LP noise ever contradicts it.
    """

    def __init__(self, region: FeasibleRegion, sense: str):
        self.region = region
        self.sense = sense
        self.seen: dict = {}

    def __call__(self, m_index_1b: int) -> float:
        if m_index_1b not in self.seen:
            value = self.region.coordinate_extreme(m_index_1b - 1, self.sense)[0]
            self.seen[m_index_1b] = value
        return self.seen[m_index_1b]

    def probes_consistent(self, nonincreasing: bool) -> bool:
        seq = [val for _, val in sorted(self.seen.items())]
        if nonincreasing:
            return all(a >= b - 1e-7 for a, b in zip(seq, seq[1:]))
        return all(a <= b + 1e-7 for a, b in zip(seq, seq[1:]))

    def scan(self):
        return np.array([self(i) for i in range(1, self.region.m_bar + 1)])


def _first_true(lo: int, hi: int, pred) -> int:
    """Smallest index in [lo, hi] where the monotone predicate holds; hi+1 if none."""
    result = hi + 1
    while lo <= hi:
        mid = (lo + hi) // 2
        if pred(mid):
            result = mid
            hi = mid - 1
        else:
            lo = mid + 1
    return result


def _first_leq(series: _ExtremeSeries, threshold: float, nonincreasing: bool) -> int:
    """min{m : series(m) <= threshold}, or mbar+1 if none (1-based).

    Defined for a nonincreasing series, where the set is a suffix.
    """
    m = series.region.m_bar
    assert nonincreasing
    out = _first_true(1, m, lambda i: series(i) <= threshold + _STRICT_TOL)
    if not series.probes_consistent(True):
        hits = np.nonzero(series.scan() <= threshold + _STRICT_TOL)[0]
        out = int(hits[0]) + 1 if hits.size else m + 1
    return out


def _last_gt(series: _ExtremeSeries, threshold: float, nonincreasing: bool) -> int:
    """max{m : series(m) > threshold}, or 0 if none (1-based), nonincreasing series."""
    m = series.region.m_bar
    assert nonincreasing
    out = _first_true(1, m, lambda i: not series(i) > threshold + _STRICT_TOL) - 1
    if not series.probes_consistent(True):
        hits = np.nonzero(series.scan() > threshold + _STRICT_TOL)[0]
        out = int(hits[-1]) + 1 if hits.size else 0
    return out


def _last_leq(series: _ExtremeSeries, threshold: float) -> int:
    """max{m : series(m) <= threshold}, or 0 if none; nondecreasing series."""
    m = series.region.m_bar
    out = _first_true(1, m, lambda i: series(i) > threshold + _STRICT_TOL) - 1
    if not series.probes_consistent(False):
        hits = np.nonzero(series.scan() <= threshold + _STRICT_TOL)[0]
        out = int(hits[-1]) + 1 if hits.size else 0
    return out


def _first_gt(series: _ExtremeSeries, threshold: float) -> int:
    """min{m : series(m) > threshold}, or mbar+1 if none; nondecreasing series."""
    m = series.region.m_bar
    out = _first_true(1, m, lambda i: series(i) > threshold + _STRICT_TOL)
    if not series.probes_consistent(False):
        hits = np.nonzero(series.scan() > threshold + _STRICT_TOL)[0]
        out = int(hits[0]) + 1 if hits.size else m + 1
    return out


def var_bounds(region: FeasibleRegion, form: CanonicalForm,
               alpha: float) -> BoundResult:
    """VaR bounds through the monotone index formulas.

    Each side needs one boundary index of the coordinate min/max series
    against 1 - alpha, found by bisection (at most ceil(log2 mbar) + 1
    coordinate LPs per index).  The bound values are partial sums of the
    canonical weights; the witnesses come from the defining coordinate LPs.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    meas = DistortionFunction("var", alpha)
    z0, z = form.z0, np.asarray(form.z)
    m = form.m_bar
    if m == 0:
        return BoundResult(meas, region.norm, region.epsilon, z0, z0)
    thr = 1.0 - alpha
    rmin = _ExtremeSeries(region, "min")
    rmax = _ExtremeSeries(region, "max")

    if form.monotonicity == "increasing":
        m_l = _first_leq(rmin, thr, True)
        m_u = _last_gt(rmax, thr, True)
        lower = float(z0 + np.sum(z[: m_l - 1]))
        upper = float(z0 + np.sum(z[:m_u]))
        lo_wit = region.coordinate_extreme(m_l - 1, "min")[1] if m_l <= m else None
        hi_wit = region.coordinate_extreme(m_u - 1, "max")[1] if m_u >= 1 else None
    else:
        m_l = _last_leq(rmin, thr)
        m_u = _first_gt(rmax, thr)
        lower = float(z0 + np.sum(z[m_l:]))
        upper = float(z0 + np.sum(z[m_u - 1:]))
        lo_wit = region.coordinate_extreme(m_l - 1, "min")[1] if m_l >= 1 else None
        hi_wit = region.coordinate_extreme(m_u - 1, "max")[1] if m_u <= m else None
    return BoundResult(meas, region.norm, region.epsilon, lower, upper,
                       lo_wit, hi_wit)


def es_bounds(region: FeasibleRegion, form: CanonicalForm,
              alpha: float) -> BoundResult:
    """ES bounds: linear programs over the quantile-position slices.

    The region splits by where 1 - alpha falls in the ordered r sequence;
    each nonempty slice contributes a linear objective, and the bounds are
    the min/max over slices.  Slices outside the necessary window implied by
    the coordinate extremes are skipped; slice infeasibility is detected by
    the solver.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    meas = DistortionFunction("es", alpha)
    z0, z = form.z0, np.asarray(form.z)
    m = form.m_bar
    if m == 0:
        return BoundResult(meas, region.norm, region.epsilon, z0, z0)
    thr = 1.0 - alpha
    increasing = form.monotonicity == "increasing"
    scale = 1.0 / (1.0 - alpha)

    # Necessary slice window from the monotone coordinate extremes; the
    # window tolerance only loosens it, the slice LPs settle feasibility.
    rmin = _ExtremeSeries(region, "min")
    rmax = _ExtremeSeries(region, "max")
    if increasing:
        # slice m needs r_{m+1} <= thr and r_m >= thr for some feasible r
        lo_idx = _first_leq(rmin, thr + _WINDOW_TOL, True)
        hi_idx = _last_gt(rmax, thr - _WINDOW_TOL, True)
        window = range(max(0, lo_idx - 1), min(m, hi_idx) + 1)
    else:
        # slice m needs r_m <= thr and r_{m+1} >= thr for some feasible r
        last_leq_idx = _last_leq(rmin, thr + _WINDOW_TOL)
        first_gt_idx = _first_gt(rmax, thr - _WINDOW_TOL)
        window = range(max(0, first_gt_idx - 1), min(m, last_leq_idx) + 1)

    best_lo, best_hi = np.inf, -np.inf
    lo_pt = hi_pt = None
    for slice_m in window:
        coeffs = np.zeros(m)
        if increasing:
            const = float(z0 + np.sum(z[:slice_m]))
            coeffs[slice_m:] = z[slice_m:] * scale
            extra = {}
            if slice_m < m:
                extra[slice_m] = (-np.inf, thr)   # r_{m+1} <= 1 - alpha
            if slice_m > 0:
                extra[slice_m - 1] = (thr, np.inf)  # r_m >= 1 - alpha
        else:
            const = float(z0 + np.sum(z[slice_m:]))
            coeffs[:slice_m] = z[:slice_m] * scale
            extra = {}
            if slice_m > 0:
                extra[slice_m - 1] = (-np.inf, thr)  # r_m <= 1 - alpha
            if slice_m < m:
                extra[slice_m] = (thr, np.inf)       # r_{m+1} >= 1 - alpha
        out = region.optimize_r(coeffs, "min", extra)
        if out is not None and const + out[0] < best_lo:
            best_lo, lo_pt = const + out[0], out[1]
        out = region.optimize_r(coeffs, "max", extra)
        if out is not None and const + out[0] > best_hi:
            best_hi, hi_pt = const + out[0], out[1]

    if not np.isfinite(best_lo) or not np.isfinite(best_hi):
        raise lp.SolverFailure("no feasible quantile slice found")
    return BoundResult(meas, region.norm, region.epsilon, best_lo, best_hi,
                       lo_pt, hi_pt)


def compute_bounds(region: FeasibleRegion, form: CanonicalForm,
                   measure: DistortionFunction) -> BoundResult:
    if measure.kind == "mean":
        return mean_bounds(region, form)
    if measure.kind == "var":
        return var_bounds(region, form, measure.alpha)
    return es_bounds(region, form, measure.alpha)


# -- epsilon scales ---------------------------------------------------------


@dataclass(frozen=True)
class EpsilonMax:
    value: float
    is_exact: bool
    coordinate_spans: np.ndarray = field(repr=False, default=None)


def epsilon_max(form: CanonicalForm, c_ref: CopulaEvaluator,
                norm: str) -> EpsilonMax:
    """Largest distance from the reference attainable by any copula.

    Exact for the L-infinity norm; for L1 the coordinatewise sum is an upper
    bound (the exact value would need vertex enumeration) and is flagged
    ``is_exact=False``.
    """
    region = build_value_region(form.u, form.v, c_ref, norm="linf",
                                epsilon=2.0)  # slack ball: plain value region
    m = region.m_bar
    if m == 0:
        return EpsilonMax(0.0, norm == LINF, np.zeros(0))
    spans = np.empty(m)
    for i in range(m):
        hi = region.coordinate_max(i)
        lo = region.coordinate_min(i)
        ref = region.theta_ref[i]
        spans[i] = max(abs(hi - ref), abs(lo - ref))
    if norm == LINF:
        return EpsilonMax(float(spans.max()), True, spans)
    return EpsilonMax(float(spans.sum()), False, spans)


def epsilon_for_family(candidates, c_ref: CopulaEvaluator,
                       form: CanonicalForm, norm: str) -> float:
    """Radius needed to cover a candidate family of copulas on the grid."""
    candidates = list(candidates)
    if not candidates:
        raise ValueError("candidate family must be nonempty")
    if norm not in NORMS:
        raise ValueError(f"norm must be one of {NORMS}, got {norm!r}")
    u, v = np.asarray(form.u), np.asarray(form.v)
    if len(u) == 0:
        return 0.0
    ref = np.asarray(c_ref(u, v), dtype=float)
    best = 0.0
    for cand in candidates:
        diff = np.abs(np.asarray(cand(u, v), dtype=float) - ref)
        dist = float(diff.sum()) if norm == L1 else float(diff.max())
        best = max(best, dist)
    return best


def r_curve(form: CanonicalForm, c: CopulaEvaluator) -> np.ndarray:
    """The transformed value sequence r_m at a (quasi-)copula."""
    return form.r_values(c)


def sweep(form: CanonicalForm, c_ref: CopulaEvaluator, norm: str,
          eps_grid, measures) -> list:
    """Bounds for every (epsilon, measure) pair, in grid-major order."""
    eps_grid = list(eps_grid)
    if any(e2 < e1 for e1, e2 in zip(eps_grid, eps_grid[1:])):
        raise ValueError("epsilon grid must be sorted ascending")
    results = []
    for eps in eps_grid:
        region = build_region(form, c_ref, norm, eps)
        for measure in measures:
            results.append(compute_bounds(region, form, measure))
    return results
