"""Covariance statistics, linear-model MLE, information-flow rates, and CIs.

The flow rate from x2 to x1 is

    t21 = (C12 / C11) * (-C12 * C1d1 + C11 * C2d1) / (C11 * C22 - C12**2)

in nats per unit time, where Cij are the sample covariances of the two series
on the aligned window and Cidj their covariances with the forward-difference
series. The second factor is exactly the least-squares estimate of the
cross-drift coefficient a12 of the underlying 2-D linear SDE, so t21 equals
(C12 / C11) * a12_hat bitwise. t12 is the same construction with the series
roles switched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from statistics import NormalDist

import numpy as np

from .errors import (
    CollinearSeries,
    DegenerateSeries,
    SingularFisher,
    WindowTooShort,
)
from .series import AlignedPair, StationaryWindow, detrend_values

# Relative determinant floor: below det <= DET_FLOOR * c11 * c22 the two
# series are treated as collinear instead of producing an unstable flow.
DET_FLOOR = 1e-12

_VAR_FLOOR = 1e-300


class Variant(str, Enum):
    STATIONARY = "stationary"
    NONSTATIONARY_STAR = "nonstationary_star"


@dataclass(frozen=True)
class CovarianceStats:
    """The sample covariances and means on the aligned window (divisor m-1)."""

    c11: float
    c12: float
    c22: float
    c1d1: float
    c2d1: float
    c1d2: float
    c2d2: float
    mean_x1: float
    mean_x2: float
    mean_d1: float
    mean_d2: float
    m: int

    @property
    def det(self) -> float:
        return self.c11 * self.c22 - self.c12**2


@dataclass(frozen=True)
class ModelEstimate:
    """MLE of the linear SDE dX = (f + A X) dt + diag(b1, b2) dW."""

    f1_hat: float
    f2_hat: float
    a11_hat: float
    a12_hat: float
    a21_hat: float
    a22_hat: float
    b1_hat: float
    b2_hat: float
    q1: float
    q2: float


@dataclass(frozen=True)
class FlowEstimate:
    """Both flow rates with standard errors and confidence intervals.

    Fisher intervals are symmetric t +- z(alpha) * se; bootstrap intervals are
    percentile intervals and se is the bootstrap standard deviation.
    n_discarded counts bootstrap resamples redrawn due to collinearity.
    """

    t21: float
    t12: float
    se21: float
    se12: float
    ci21: tuple[float, float]
    ci12: tuple[float, float]
    alpha: float
    variant: Variant
    m: int
    dt: float
    n_discarded: int = 0

    def significant21(self) -> bool:
        return self.ci21[0] > 0 or self.ci21[1] < 0

    def significant12(self) -> bool:
        return self.ci12[0] > 0 or self.ci12[1] < 0


def covariances(pair: AlignedPair) -> CovarianceStats:
    """Centered two-pass sample covariances on the aligned window."""
    m = pair.m
    w1, w2, d1, d2 = pair.x1w, pair.x2w, pair.d1, pair.d2
    mean_x1 = float(w1.mean())
    mean_x2 = float(w2.mean())
    mean_d1 = float(d1.mean())
    mean_d2 = float(d2.mean())
    cw1 = w1 - mean_x1
    cw2 = w2 - mean_x2
    cd1 = d1 - mean_d1
    cd2 = d2 - mean_d2
    denom = m - 1
    stats = CovarianceStats(
        c11=float(cw1 @ cw1) / denom,
        c12=float(cw1 @ cw2) / denom,
        c22=float(cw2 @ cw2) / denom,
        c1d1=float(cw1 @ cd1) / denom,
        c2d1=float(cw2 @ cd1) / denom,
        c1d2=float(cw1 @ cd2) / denom,
        c2d2=float(cw2 @ cd2) / denom,
        mean_x1=mean_x1,
        mean_x2=mean_x2,
        mean_d1=mean_d1,
        mean_d2=mean_d2,
        m=m,
    )
    if stats.c11 < _VAR_FLOOR or stats.c22 < _VAR_FLOOR:
        raise DegenerateSeries(f"degenerate variance: c11={stats.c11}, c22={stats.c22}")
    return stats


def _checked_det(cov: CovarianceStats) -> float:
    det = cov.det
    if det <= DET_FLOOR * cov.c11 * cov.c22:
        raise CollinearSeries(f"covariance determinant {det} below the collinearity floor")
    return det


# The drift-row closed forms. flow() and fit_mle() must share these exact
# expressions so that t21 == (c12/c11) * a12_hat holds bitwise.


def _a_row1(cov: CovarianceStats, det: float) -> tuple[float, float]:
    a11 = (cov.c22 * cov.c1d1 - cov.c12 * cov.c2d1) / det
    a12 = (-cov.c12 * cov.c1d1 + cov.c11 * cov.c2d1) / det
    return a11, a12


def _a_row2(cov: CovarianceStats, det: float) -> tuple[float, float]:
    a21 = (-cov.c12 * cov.c2d2 + cov.c22 * cov.c1d2) / det
    a22 = (cov.c11 * cov.c2d2 - cov.c12 * cov.c1d2) / det
    return a21, a22


def fit_mle(pair: AlignedPair, cov: CovarianceStats) -> ModelEstimate:
    """Closed-form MLE of (f, A, B) from the decoupled normal equations."""
    det = _checked_det(cov)
    a11, a12 = _a_row1(cov, det)
    a21, a22 = _a_row2(cov, det)
    f1 = cov.mean_d1 - a11 * cov.mean_x1 - a12 * cov.mean_x2
    f2 = cov.mean_d2 - a21 * cov.mean_x1 - a22 * cov.mean_x2
    r1 = pair.d1 - (f1 + a11 * pair.x1w + a12 * pair.x2w)
    r2 = pair.d2 - (f2 + a21 * pair.x1w + a22 * pair.x2w)
    q1 = float(r1 @ r1)
    q2 = float(r2 @ r2)
    dt = pair.dt
    return ModelEstimate(
        f1_hat=f1,
        f2_hat=f2,
        a11_hat=a11,
        a12_hat=a12,
        a21_hat=a21,
        a22_hat=a22,
        b1_hat=math.sqrt(q1 * dt / pair.m),
        b2_hat=math.sqrt(q2 * dt / pair.m),
        q1=q1,
        q2=q2,
    )


def flow(cov: CovarianceStats) -> tuple[float, float]:
    """Information-flow rates (t21, t12) in nats per unit time."""
    det = _checked_det(cov)
    _, a12 = _a_row1(cov, det)
    a21, _ = _a_row2(cov, det)
    t21 = (cov.c12 / cov.c11) * a12
    t12 = (cov.c12 / cov.c22) * a21
    return t21, t12


def _star_ratios(
    pair: AlignedPair, star_window: StationaryWindow, detrend_star: bool
) -> tuple[float, float]:
    """(c12*/c11*, c12*/c22*) computed on the stationary slab only."""
    if star_window.end_index > pair.m:
        raise WindowTooShort(
            f"star window [{star_window.start_index}, {star_window.end_index}) "
            f"exceeds the aligned sample of {pair.m} points"
        )
    s1 = pair.x1w[star_window.start_index : star_window.end_index]
    s2 = pair.x2w[star_window.start_index : star_window.end_index]
    if detrend_star:
        s1 = detrend_values(s1)
        s2 = detrend_values(s2)
    c1 = s1 - s1.mean()
    c2 = s2 - s2.mean()
    denom = len(star_window) - 1
    c11s = float(c1 @ c1) / denom
    c22s = float(c2 @ c2) / denom
    c12s = float(c1 @ c2) / denom
    if c11s < _VAR_FLOOR or c22s < _VAR_FLOOR:
        raise DegenerateSeries(f"degenerate star-window variance: c11*={c11s}, c22*={c22s}")
    return c12s / c11s, c12s / c22s


def flow_nonstationary(
    pair: AlignedPair, star_window: StationaryWindow, detrend_star: bool = False
) -> tuple[float, float]:
    """Flow rates with the leading covariance ratio taken on a stationary slab.

    The drift-coefficient factor keeps the full aligned window with original
    (never detrended) data; only the c12/c11 and c12/c22 ratios move to the
    slab, optionally after removing a linear trend from the slab.
    """
    cov = covariances(pair)
    det = _checked_det(cov)
    _, a12 = _a_row1(cov, det)
    a21, _ = _a_row2(cov, det)
    r21, r12 = _star_ratios(pair, star_window, detrend_star)
    return r21 * a12, r12 * a21


def z_quantile(alpha: float) -> float:
    """Two-sided standard-normal quantile (1.959964 at alpha=0.05)."""
    return NormalDist().inv_cdf(1.0 - alpha / 2.0)


def observed_information(pair: AlignedPair, model: ModelEstimate, component: int = 1) -> np.ndarray:
    """Observed information over theta = (f_i, a_i1, a_i2, b_i) at the MLE.

    The 4x4 matrix of negated second derivatives of the summed per-step log
    transition density, assembled analytically. Its (f, a_i1, a_i2) block is
    (dt / b_i**2) times the Gram matrix of (1, x1, x2); the b-row couplings
    involve the residual sums and vanish up to rounding at the MLE.
    """
    if component == 1:
        b, f, ai1, ai2, di = model.b1_hat, model.f1_hat, model.a11_hat, model.a12_hat, pair.d1
    else:
        b, f, ai1, ai2, di = model.b2_hat, model.f2_hat, model.a21_hat, model.a22_hat, pair.d2
    if b <= 0 or not math.isfinite(b):
        raise SingularFisher(f"residual noise estimate b={b}; no likelihood curvature scale")
    resid = di - (f + ai1 * pair.x1w + ai2 * pair.x2w)
    m, dt = pair.m, pair.dt
    w1, w2 = pair.x1w, pair.x2w
    c = dt / b**2
    d = 2.0 * dt / b**3
    ni = np.empty((4, 4))
    ni[0, 0] = m * c
    ni[0, 1] = c * float(w1.sum())
    ni[0, 2] = c * float(w2.sum())
    ni[1, 1] = c * float(w1 @ w1)
    ni[1, 2] = c * float(w1 @ w2)
    ni[2, 2] = c * float(w2 @ w2)
    ni[0, 3] = d * float(resid.sum())
    ni[1, 3] = d * float(resid @ w1)
    ni[2, 3] = d * float(resid @ w2)
    ni[3, 3] = 3.0 * dt / b**4 * float(resid @ resid) - m / b**2
    idx = np.tril_indices(4, -1)
    ni[idx] = ni.T[idx]
    return ni


def _fisher_sigma(pair: AlignedPair, model: ModelEstimate, component: int) -> float:
    """Standard deviation of the cross-drift coefficient from (NI)^-1."""
    ni = observed_information(pair, model, component)
    try:
        inv = np.linalg.inv(ni)
    except np.linalg.LinAlgError:
        raise SingularFisher("observed information matrix is singular")
    # a_i2 sits at theta index 2 for component 1; a_i1 at index 1 for component 2
    var = inv[2, 2] if component == 1 else inv[1, 1]
    if not math.isfinite(var) or var < 0:
        raise SingularFisher(f"non-finite or negative coefficient variance {var}")
    return math.sqrt(var)


def fisher_ci(
    pair: AlignedPair,
    model: ModelEstimate,
    cov: CovarianceStats,
    alpha: float = 0.05,
    star_window: StationaryWindow | None = None,
    detrend_star: bool = False,
) -> FlowEstimate:
    """Flow rates with standard errors from the observed information matrix.

    With a star_window the nonstationary variant is used: the point estimates
    and the leading ratios in the standard errors come from the slab,
    while the coefficient uncertainty still reflects the full window.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    sigma_a12 = _fisher_sigma(pair, model, component=1)
    sigma_a21 = _fisher_sigma(pair, model, component=2)
    if star_window is None:
        t21, t12 = flow(cov)
        r21 = cov.c12 / cov.c11
        r12 = cov.c12 / cov.c22
        variant = Variant.STATIONARY
    else:
        r21, r12 = _star_ratios(pair, star_window, detrend_star)
        t21 = r21 * model.a12_hat
        t12 = r12 * model.a21_hat
        variant = Variant.NONSTATIONARY_STAR
    se21 = abs(r21) * sigma_a12
    se12 = abs(r12) * sigma_a21
    z = z_quantile(alpha)
    return FlowEstimate(
        t21=t21,
        t12=t12,
        se21=se21,
        se12=se12,
        ci21=(t21 - z * se21, t21 + z * se21),
        ci12=(t12 - z * se12, t12 + z * se12),
        alpha=alpha,
        variant=variant,
        m=pair.m,
        dt=pair.dt,
    )


def default_block_len(m: int) -> int:
    """Moving-block default: ceil(m ** (1/3)) to respect temporal dependence."""
    return max(1, math.ceil(m ** (1.0 / 3.0)))


def bootstrap_ci(
    pair: AlignedPair,
    alpha: float = 0.05,
    n_boot: int = 1000,
    block_len: int | None = None,
    seed: int = 0,
) -> FlowEstimate:
    """Moving-block bootstrap percentile intervals for both flow rates.

    Rows (x1, x2, d1, d2) are resampled jointly in contiguous blocks of
    block_len aligned indices. Collinear resamples are discarded and redrawn;
    the count is reported in n_discarded. Deterministic for a fixed seed.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if n_boot < 100:
        raise ValueError(f"n_boot must be >= 100, got {n_boot}")
    m = pair.m
    if block_len is None:
        block_len = default_block_len(m)
    if not 1 <= block_len <= m:
        raise ValueError(f"block_len must be in [1, {m}], got {block_len}")

    cov = covariances(pair)
    t21, t12 = flow(cov)

    w1, w2, d1, d2 = pair.x1w, pair.x2w, pair.d1, pair.d2
    n_blocks = -(-m // block_len)
    n_starts = m - block_len + 1
    offsets = np.arange(block_len)
    rng = np.random.default_rng(seed)

    t21s = np.empty(n_boot)
    t12s = np.empty(n_boot)
    n_discarded = 0
    max_draws = 10 * n_boot
    draws = 0
    i = 0
    while i < n_boot:
        if draws >= max_draws:
            raise CollinearSeries(
                f"{n_discarded} of {draws} bootstrap resamples were collinear; giving up"
            )
        draws += 1
        starts = rng.integers(0, n_starts, size=n_blocks)
        idx = (starts[:, None] + offsets[None, :]).ravel()[:m]
        b1, b2 = w1[idx], w2[idx]
        bd1, bd2 = d1[idx], d2[idx]
        c1 = b1 - b1.mean()
        c2 = b2 - b2.mean()
        cd1 = bd1 - bd1.mean()
        cd2 = bd2 - bd2.mean()
        denom = m - 1
        c11 = float(c1 @ c1) / denom
        c12 = float(c1 @ c2) / denom
        c22 = float(c2 @ c2) / denom
        det = c11 * c22 - c12**2
        if c11 < _VAR_FLOOR or c22 < _VAR_FLOOR or det <= DET_FLOOR * c11 * c22:
            n_discarded += 1
            continue
        c1d1 = float(c1 @ cd1) / denom
        c2d1 = float(c2 @ cd1) / denom
        c1d2 = float(c1 @ cd2) / denom
        c2d2 = float(c2 @ cd2) / denom
        t21s[i] = (c12 / c11) * ((-c12 * c1d1 + c11 * c2d1) / det)
        t12s[i] = (c12 / c22) * ((-c12 * c2d2 + c22 * c1d2) / det)
        i += 1

    lo = 100.0 * alpha / 2.0
    hi = 100.0 * (1.0 - alpha / 2.0)
    ci21 = tuple(float(v) for v in np.percentile(t21s, [lo, hi]))
    ci12 = tuple(float(v) for v in np.percentile(t12s, [lo, hi]))
    return FlowEstimate(
        t21=t21,
        t12=t12,
        se21=float(t21s.std(ddof=1)),
        se12=float(t12s.std(ddof=1)),
        ci21=ci21,
        ci12=ci12,
        alpha=alpha,
        variant=Variant.STATIONARY,
        m=m,
        dt=pair.dt,
        n_discarded=n_discarded,
    )
