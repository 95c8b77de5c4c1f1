"""Incubation-time model: nonparametric MLE via iterative convex minorants.

Observations are pairs (e, s): exposure-window length and symptom time,
with the infection uniform on [0, e]. The log likelihood of a candidate
CDF F is the average of log{F(s_i) - F(s_i - e_i)}; the maximizer over
distributions with mass restricted to the symptom times is computed by
an iterative convex minorant scheme with self-induced weights, damped
by a backtracking line search so the likelihood never decreases.

Optimality is certified through the marginal-value process W: the MLE
is characterized by nonpositive tail sums of dW together with the
complementarity identity that W integrates to zero against the fitted
masses (evaluated with left limits).
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .gcm import _pava_core
from .stepdist import StepDistribution

__all__ = [
    "IncubationData",
    "IntervalCensoredView",
    "WProcessSample",
    "IcmError",
    "reduce_to_interval_censoring",
    "inc_loglikelihood",
    "w_process",
    "g_process",
    "fenchel_gap",
    "inc_mle",
    "load_incubation_csv",
]

log = logging.getLogger("shapefit.incubation")

DELTA_FLOOR = 1e-10


class IcmError(RuntimeError):
    """Raised when the minorant iteration cannot certify optimality.

    Carries the last Fenchel gap as ``max_violation`` / ``complementarity``.
    """

    def __init__(self, message, max_violation=np.nan, complementarity=np.nan):
        super().__init__(message)
        self.max_violation = max_violation
        self.complementarity = complementarity


@dataclass(frozen=True)
class IncubationData:
    """Exposure lengths and symptom times, both positive."""

    e: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        e = np.ascontiguousarray(self.e, dtype=np.float64)
        s = np.ascontiguousarray(self.s, dtype=np.float64)
        if e.ndim != 1 or s.ndim != 1 or e.shape != s.shape:
            raise ValueError("e and s must be 1-d arrays of equal length")
        if e.size == 0:
            raise ValueError("empty data")
        if np.any(e <= 0) or not np.all(np.isfinite(e)):
            raise ValueError("exposure lengths must be finite and positive")
        if np.any(s <= 0) or not np.all(np.isfinite(s)):
            raise ValueError("symptom times must be finite and positive")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "s", s)

    def __len__(self):
        return self.e.size

    @classmethod
    def create(cls, e, s, incubation_upper=None, separation=None) -> "IncubationData":
        """Validating constructor for raw records.

        Records with s - e beyond ``incubation_upper`` contribute a
        deterministic likelihood factor under a support-bounded truth
        and are dropped with a warning. A ``separation`` threshold only
        warns: exposure lengths below it break the usual asymptotics
        but not the estimator itself.
        """
        e = np.asarray(e, dtype=np.float64)
        s = np.asarray(s, dtype=np.float64)
        if incubation_upper is not None:
            drop = (s - e) >= incubation_upper
            if drop.any():
                warnings.warn(
                    f"dropping {int(drop.sum())} record(s) with s - e >= {incubation_upper}",
                    stacklevel=2,
                )
                e, s = e[~drop], s[~drop]
        if separation is not None and e.size and e.min() < separation:
            warnings.warn(
                f"exposure lengths below the separation threshold {separation}", stacklevel=2
            )
        return cls(e, s)


@dataclass(frozen=True)
class IntervalCensoredView:
    """Wrapped-time view: t = s - j*e with t in [0, e) and s = t + j*e."""

    t: np.ndarray
    j: np.ndarray
    e: np.ndarray

    def cell_boundaries(self, i: int, upto: int) -> np.ndarray:
        return self.t[i] + self.e[i] * np.arange(upto + 1)


def reduce_to_interval_censoring(data: IncubationData) -> IntervalCensoredView:
    """Fold each symptom time back into its exposure window."""
    j = np.floor(data.s / data.e).astype(np.int64)
    t = data.s - j * data.e
    return IntervalCensoredView(t=t, j=j, e=data.e)


@dataclass(frozen=True)
class WProcessSample:
    """W evaluated on the pooled jump set inside [min s, max(s - e)]."""

    eval_points: np.ndarray
    values: np.ndarray


class _Problem:
    """Index bookkeeping shared by the likelihood, W/G and the ICM."""

    def __init__(self, data: IncubationData):
        self.n = len(data)
        self.atoms = np.unique(data.s)
        self.r_idx = np.searchsorted(self.atoms, data.s)
        left = data.s - data.e
        self.p_idx = np.searchsorted(self.atoms, left, side="right") - 1
        self.left = left
        self.s = data.s
        self.min_s = self.atoms[0]
        self.max_se = left.max()
        # jump bookkeeping for W/G: +1 jumps at s_i within the window,
        # -1 jumps at (s_i - e_i) at or above min s
        pos_mask = self.s <= self.max_se
        neg_mask = left >= self.min_s
        positions = np.concatenate([self.s[pos_mask], left[neg_mask]])
        record = np.concatenate([np.where(pos_mask)[0], np.where(neg_mask)[0]])
        sign = np.concatenate([np.ones(pos_mask.sum()), -np.ones(neg_mask.sum())])
        order = np.argsort(positions, kind="stable")
        self.jump_pos = positions[order]
        self.jump_rec = record[order]
        self.jump_sign = sign[order]
        # tail sums are constant between jumps; group starts mark the
        # distinct evaluation points
        self.group_start = np.ones(self.jump_pos.size, dtype=bool)
        self.group_start[1:] = self.jump_pos[1:] > self.jump_pos[:-1]

    def gaps(self, y: np.ndarray) -> np.ndarray:
        base = np.where(self.p_idx >= 0, y[np.maximum(self.p_idx, 0)], 0.0)
        return y[self.r_idx] - base

    def group_values(self, jumps: np.ndarray) -> np.ndarray:
        """Cumulative jump sums at the last jump of each distinct position."""
        if jumps.size == 0:
            return jumps
        ends = np.append(np.flatnonzero(self.group_start)[1:], jumps.size) - 1
        return np.cumsum(jumps)[ends]

    def loglik(self, y: np.ndarray) -> float:
        d = self.gaps(y)
        if np.any(d <= 0.0):
            return -np.inf
        return float(np.mean(np.log(d)))

    def inv_gaps(self, y, floor):
        d = self.gaps(y)
        return np.where(d > floor, 1.0 / np.maximum(d, floor), 0.0)

    def w_jumps(self, y, floor):
        inv = self.inv_gaps(y, floor)
        return self.jump_sign * inv[self.jump_rec] / self.n

    def fenchel(self, y, floor=DELTA_FLOOR):
        """(max tail-sum violation, |integral of W(t-) dF|) at the CDF values y."""
        jumps = self.w_jumps(y, floor)
        if jumps.size == 0:
            return 0.0, 0.0
        tails = np.cumsum(jumps[::-1])[::-1]
        max_violation = float(max(tails[self.group_start].max(), 0.0))
        masses = np.diff(y, prepend=0.0)
        before = np.searchsorted(self.jump_pos, self.atoms, side="left")
        w_left = np.concatenate(([0.0], np.cumsum(jumps)))[before]
        complementarity = float(abs(np.dot(masses, w_left)))
        return max_violation, complementarity

    def marginal_values(self, y, floor=DELTA_FLOOR) -> np.ndarray:
        """Per-atom derivative of the log likelihood in the direction of
        moving mass onto that atom; at the MLE it is <= 1 everywhere and
        exactly 1 on the support (the window-free optimality check).
        """
        inv = self.inv_gaps(y, floor)
        m = self.atoms.size
        by_r = np.bincount(self.r_idx, weights=inv, minlength=m)
        pos = self.p_idx >= 0
        by_p = np.bincount(self.p_idx[pos], weights=inv[pos], minlength=m)
        suffix_r = np.cumsum(by_r[::-1])[::-1]
        suffix_p = np.cumsum(by_p[::-1])[::-1]
        return (suffix_r - suffix_p) / self.n


def _check_atom_support(F: StepDistribution, prob: _Problem):
    extra = np.setdiff1d(F.points[F.masses > 1e-12], prob.atoms)
    if extra.size:
        log.debug("evaluating W/G with %d atoms off the symptom times", extra.size)


def _cdf_at_atoms(F: StepDistribution, prob: _Problem) -> np.ndarray:
    return F.cdf(prob.atoms)


def w_process(F: StepDistribution, data: IncubationData, delta_floor: float = DELTA_FLOOR) -> WProcessSample:
    """Marginal-value process of the likelihood at F.

    Jumps up by 1/(n (F(s)-F(s-e))) at each symptom time inside the
    window and down by the same amount at each window start above
    min(s); terms with a gap at or below ``delta_floor`` contribute 0.
    """
    prob = _Problem(data)
    _check_atom_support(F, prob)
    d = F.cdf(prob.s) - F.cdf(prob.left)
    inv = np.where(d > delta_floor, 1.0 / np.maximum(d, delta_floor), 0.0)
    jumps = prob.jump_sign * inv[prob.jump_rec] / prob.n
    pts = prob.jump_pos[prob.group_start]
    return WProcessSample(eval_points=pts, values=prob.group_values(jumps))


def g_process(F: StepDistribution, data: IncubationData, delta_floor: float = DELTA_FLOOR):
    """Weight process: same windows as W, squared gaps, all jumps positive.

    Returns (eval_points, values); values are nondecreasing.
    """
    prob = _Problem(data)
    _check_atom_support(F, prob)
    d = F.cdf(prob.s) - F.cdf(prob.left)
    inv2 = np.where(d > delta_floor, 1.0 / np.maximum(d, delta_floor) ** 2, 0.0)
    jumps = inv2[prob.jump_rec] / prob.n
    pts = prob.jump_pos[prob.group_start]
    return pts, prob.group_values(jumps)


def fenchel_gap(F: StepDistribution, data: IncubationData, delta_floor: float = DELTA_FLOOR):
    """Optimality certificate for a candidate CDF with mass on the symptom times.

    Returns ``(max_violation, complementarity)``: the largest positive
    tail sum of dW over the pooled jump set, and |∫ W(t-) dF(t)|. Both
    vanish (to tolerance) exactly at the MLE.
    """
    prob = _Problem(data)
    _check_atom_support(F, prob)
    y = _cdf_at_atoms(F, prob)
    return prob.fenchel(y, delta_floor)


def inc_loglikelihood(F: StepDistribution, data: IncubationData) -> float:
    """Average log interval mass, -inf when a record has no mass in its window."""
    d = F.cdf(data.s) - F.cdf(data.s - data.e)
    if np.any(d <= 0.0):
        return -np.inf
    return float(np.mean(np.log(d)))


def inc_mle(
    data: IncubationData,
    tol: float = 1e-8,
    max_iter: int = 5000,
    delta_floor: float = DELTA_FLOOR,
    init_masses=None,
    on_iterate=None,
) -> StepDistribution:
    """Nonparametric MLE over distributions with mass at the symptom times.

    Iterates the self-induced convex-minorant update: isotonic fit of
    y + grad/weight with the diagonal weights, clipped to [0, 1], with a
    halving line search so the accepted step always increases the log
    likelihood. Stops when the Fenchel certificate is below ``tol``.

    ``init_masses`` overrides the uniform start (one mass per distinct
    symptom time, must give a finite likelihood); ``on_iterate`` is a
    diagnostics callback receiving the CDF values and log likelihood of
    each accepted iterate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    prob = _Problem(data)
    m = prob.atoms.size
    if init_masses is None:
        y = np.cumsum(np.full(m, 1.0 / m))
        y[-1] = 1.0
    else:
        init_masses = np.asarray(init_masses, dtype=np.float64)
        if init_masses.shape != (m,) or np.any(init_masses < 0):
            raise ValueError(f"init_masses must be {m} nonnegative values")
        y = np.clip(np.cumsum(init_masses), 0.0, 1.0)
    ll = prob.loglik(y)
    if not np.isfinite(ll):
        raise IcmError("likelihood unbounded/degenerate at the starting point")

    def gap_parts(y):
        # the tail-sum window can be empty on tiny samples, so the
        # window-free marginal-value check is required as well
        violation, complement = prob.fenchel(y, delta_floor)
        kkt = max(float(prob.marginal_values(y, delta_floor).max()) - 1.0, 0.0)
        return max(violation, kkt), complement

    def finish(y):
        masses = np.diff(y, prepend=0.0)
        return StepDistribution(prob.atoms, np.clip(masses, 0.0, None)).pruned()

    pos = prob.p_idx >= 0
    violation, complement = gap_parts(y)
    if on_iterate is not None:
        on_iterate(y.copy(), ll)
    for _ in range(max_iter):
        if violation <= tol and complement <= tol:
            return finish(y)
        inv = prob.inv_gaps(y, delta_floor)
        grad = np.bincount(prob.r_idx, weights=inv, minlength=m)
        grad -= np.bincount(prob.p_idx[pos], weights=inv[pos], minlength=m)
        inv2 = inv * inv
        w = np.bincount(prob.r_idx, weights=inv2, minlength=m)
        w += np.bincount(prob.p_idx[pos], weights=inv2[pos], minlength=m)
        w = np.maximum(w, 1e-12)
        target = y + grad / w
        y_iso = np.clip(_pava_core(np.ascontiguousarray(target), np.ascontiguousarray(w)), 0.0, 1.0)
        step = y_iso - y
        # likelihood change of a damped step, written as log1p of exact
        # gap perturbation ratios so improvements far below float
        # resolution of the log likelihood itself remain visible
        d = prob.gaps(y)
        ratio = (step[prob.r_idx] - np.where(pos, step[np.maximum(prob.p_idx, 0)], 0.0)) / d
        accepted = False
        lam = 1.0
        while lam > 1e-14:
            scaled = lam * ratio
            if np.all(scaled > -1.0):
                delta_ll = float(np.mean(np.log1p(scaled)))
                if delta_ll > 0.0:
                    y = y + lam * step
                    ll = ll + delta_ll
                    violation, complement = gap_parts(y)
                    if on_iterate is not None:
                        on_iterate(y.copy(), ll)
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            if violation <= tol and complement <= tol:
                return finish(y)
            raise IcmError(
                "line search stalled before reaching the optimality tolerance",
                max_violation=violation,
                complementarity=complement,
            )

    if violation <= tol and complement <= tol:
        return finish(y)
    raise IcmError(
        f"no convergence after {max_iter} iterations",
        max_violation=violation,
        complementarity=complement,
    )


def load_incubation_csv(path) -> IncubationData:
    """Read ``e,s`` records; raises ValueError naming the bad row."""
    e, s = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["e", "s"]:
            raise ValueError(f"{path}: expected header 'e,s'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                e.append(float(row[0]))
                s.append(float(row[1]))
            except (ValueError, IndexError):
                raise ValueError(f"{path}: malformed row {lineno}: {row!r}") from None
    return IncubationData(np.array(e), np.array(s))
