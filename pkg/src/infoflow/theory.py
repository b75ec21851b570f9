"""Ground-truth engine for 2-D linear SDEs dX = (f + A X) dt + diag(b1, b2) dW.

Under a Gaussian initial state the density stays Gaussian; its mean and
covariance obey

    dmu/dt    = f + A mu
    dSigma/dt = A Sigma + Sigma A^T + B B^T

and the analytic flow rates are t21 = (s12 / s11) a12, t12 = (s12 / s22) a21.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVariance, NonPositiveVariance, NotHurwitz


@dataclass(frozen=True)
class LinearModel2D:
    """Coefficients (f, A, b1, b2) of the 2-D linear SDE."""

    f: np.ndarray
    a: np.ndarray
    b1: float
    b2: float

    def __post_init__(self):
        f = np.array(self.f, dtype=float)
        a = np.array(self.a, dtype=float)
        if f.shape != (2,):
            raise ValueError(f"f must be a 2-vector, got shape {f.shape}")
        if a.shape != (2, 2):
            raise ValueError(f"a must be 2x2, got shape {a.shape}")
        if not (np.isfinite(f).all() and np.isfinite(a).all()):
            raise ValueError("model coefficients must be finite")
        if not (math.isfinite(self.b1) and math.isfinite(self.b2)):
            raise ValueError("diffusion coefficients must be finite")
        if self.b1 < 0 or self.b2 < 0:
            raise ValueError(f"diffusion coefficients must be >= 0, got {self.b1}, {self.b2}")
        f.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "a", a)

    @property
    def bbt_diag(self) -> tuple[float, float]:
        return self.b1**2, self.b2**2


@dataclass(frozen=True)
class MomentState:
    """Mean vector and symmetric covariance of the Gaussian state at time t."""

    mu: np.ndarray
    sigma: np.ndarray
    t: float

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        sigma = np.array(self.sigma, dtype=float)
        if mu.shape != (2,) or sigma.shape != (2, 2):
            raise ValueError("mu must be a 2-vector and sigma a 2x2 matrix")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


def _rhs(model: LinearModel2D, y: np.ndarray) -> np.ndarray:
    """Time derivative of the stacked state (mu1, mu2, s11, s12, s22)."""
    (a11, a12), (a21, a22) = model.a
    mu1, mu2, s11, s12, s22 = y
    b11, b22 = model.bbt_diag
    return np.array(
        [
            model.f[0] + a11 * mu1 + a12 * mu2,
            model.f[1] + a21 * mu1 + a22 * mu2,
            2.0 * (a11 * s11 + a12 * s12) + b11,
            a21 * s11 + (a11 + a22) * s12 + a12 * s22,
            2.0 * (a21 * s12 + a22 * s22) + b22,
        ]
    )


def integrate_moments(
    model: LinearModel2D, init: MomentState, t_end: float, dt: float = 1e-3
) -> list[MomentState]:
    """Fixed-step fourth-order integration of the coupled moment equations.

    The covariance is carried as (s11, s12, s22), so symmetry holds by
    construction at every step.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end <= init.t:
        raise ValueError(f"t_end={t_end} must exceed the initial time {init.t}")
    n_steps = int(round((t_end - init.t) / dt))
    y = np.array([init.mu[0], init.mu[1], init.sigma[0, 0], init.sigma[0, 1], init.sigma[1, 1]])
    out = [init]
    t = init.t
    for step in range(n_steps):
        k1 = _rhs(model, y)
        k2 = _rhs(model, y + 0.5 * dt * k1)
        k3 = _rhs(model, y + 0.5 * dt * k2)
        k4 = _rhs(model, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = init.t + (step + 1) * dt
        if y[2] < -1e-12 or y[4] < -1e-12:
            raise NonPositiveVariance(
                f"variance went negative at t={t}: s11={y[2]}, s22={y[4]}"
            )
        out.append(
            MomentState(
                mu=np.array([y[0], y[1]]),
                sigma=np.array([[y[2], y[3]], [y[3], y[4]]]),
                t=t,
            )
        )
    return out


def is_hurwitz(a: np.ndarray) -> bool:
    """2-D stability criterion: trace < 0 and determinant > 0."""
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return tr < 0 and det > 0


def stationary_covariance(model: LinearModel2D) -> np.ndarray:
    """Stationary covariance: the exact solve of A S + S A^T + B B^T = 0.

    Written as a 3x3 linear system in (s11, s12, s22); the residual of the
    returned matrix is checked against a scaled 1e-12 floor.
    """
    a = model.a
    if not is_hurwitz(a):
        raise NotHurwitz(f"drift matrix {a.tolist()} is not Hurwitz; no stationary state")
    (a11, a12), (a21, a22) = a
    b11, b22 = model.bbt_diag
    lhs = np.array(
        [
            [2.0 * a11, 2.0 * a12, 0.0],
            [a21, a11 + a22, a12],
            [0.0, 2.0 * a21, 2.0 * a22],
        ]
    )
    s11, s12, s22 = np.linalg.solve(lhs, -np.array([b11, 0.0, b22]))
    sigma = np.array([[s11, s12], [s12, s22]])
    bbt = np.diag([b11, b22])
    residual = np.abs(a @ sigma + sigma @ a.T + bbt).max()
    scale = max(1.0, float(np.abs(bbt).max()))
    if residual > 1e-12 * scale:
        raise NotHurwitz(f"stationary solve residual {residual} exceeds tolerance")
    return sigma


def analytic_flows(model: LinearModel2D, sigma: np.ndarray) -> tuple[float, float]:
    """Analytic flow rates (t21, t12) for a given state covariance."""
    sigma = np.asarray(sigma, dtype=float)
    s11, s12, s22 = sigma[0, 0], sigma[0, 1], sigma[1, 1]
    if s11 <= 0 or s22 <= 0:
        raise DegenerateVariance(f"variances must be positive, got s11={s11}, s22={s22}")
    return s12 / s11 * model.a[0, 1], s12 / s22 * model.a[1, 0]
