"""Market model, derived constants, and price transforms.

The pricing problem couples two value functions R0 (liquid state) and
R1 (illiquid state).  After the substitution u = gamma*R0, v = gamma*R1
and the time reversal tau = T - t, the pair solves

    u_tau = (1/2) sigma^2 S^2 u_SS - a e^(u-v) + b,
    v_tau = -c e^(v-u) + c,

with a = nu01, b = d0 + nu01, c = nu10 and d0 = mu^2 / (2 sigma^2).
Indifference prices are recovered through two auxiliary functions of
calendar time,

    F0(t) = c1 e^(lam1 t) + c2 e^(lam2 t),
    F1(t) = [c1 (d0+nu01-lam1) e^(lam1 t) + c2 (d0+nu01-lam2) e^(lam2 t)] / nu01,

where lam1/lam2 are the roots of lam^2 - (d0+nu01+nu10) lam + d0*nu10 = 0
and c1, c2 are fixed by the normalization F0(T) = F1(T) = 1.  Prices are
p = R0 + ln(F0)/gamma and q = R1 + ln(F1)/gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "ModelParams",
    "DerivedConstants",
    "derive_constants",
    "evaluate_f",
    "payoff_call",
    "payoff_zero",
    "to_prices",
]


@dataclass(frozen=True)
class ModelParams:
    """Market and utility inputs.

    sigma    volatility of the underlying (per sqrt(year))
    mu       drift of the underlying (per year)
    gamma    exponential-utility risk aversion
    nu01     transition intensity liquid -> illiquid (per year)
    nu10     transition intensity illiquid -> liquid (per year)
    strike   option strike K
    horizon  expiry T in years
    s_min    left edge of the computational price domain
    s_max    right edge of the computational price domain
    """

    sigma: float
    mu: float
    gamma: float
    nu01: float
    nu10: float
    strike: float
    horizon: float
    s_min: float = 0.0
    s_max: float = 5.0

    def __post_init__(self):
        checks = [
            (self.sigma > 0, "sigma must be > 0"),
            (self.gamma > 0, "gamma must be > 0"),
            (self.nu01 > 0, "nu01 must be > 0"),
            (self.nu10 > 0, "nu10 must be > 0"),
            (self.strike > 0, "strike must be > 0"),
            (self.horizon > 0, "horizon must be > 0"),
            (self.s_min >= 0, "s_min must be >= 0"),
            (self.s_min < self.strike < self.s_max,
             "domain must satisfy s_min < strike < s_max"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValidationError(msg)
        for name in ("sigma", "mu", "gamma", "nu01", "nu10", "strike",
                     "horizon", "s_min", "s_max"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")


@dataclass(frozen=True)
class DerivedConstants:
    """Reaction-term constants and the coefficients feeding F0, F1.

    lambda1 carries the plus branch of the root formula and lambda2 the
    minus branch, so lambda1 > lambda2 > 0.  ``coef_c1``/``coef_c2`` are
    the normalized exponential weights c1, c2 (they already include the
    e^(-lam T) factors).  ``sigma`` and ``horizon`` are carried along so
    the steppers and F0/F1 evaluation need no second look at the inputs;
    in particular F0/F1 are computed from exponents lam*(t-T) <= 0 instead
    of cancellation-prone exp(+lam t) * exp(-lam T) products.
    """

    d0: float
    a: float
    b: float
    c: float
    lambda1: float
    lambda2: float
    coef_c1: float
    coef_c2: float
    sigma: float
    horizon: float


def derive_constants(params: ModelParams) -> DerivedConstants:
    """Compute the reaction constants and F0/F1 coefficients.

    lambda2 is obtained from the product identity lambda1*lambda2 = d0*nu10
    rather than the minus-branch formula; the two agree analytically but the
    product form avoids cancellation when 4*d0*nu10 << (d0+nu01+nu10)^2.
    """
    d0 = params.mu ** 2 / (2.0 * params.sigma ** 2)
    a = params.nu01
    b = d0 + params.nu01
    c = params.nu10
    trace = d0 + params.nu01 + params.nu10
    disc = trace * trace - 4.0 * d0 * params.nu10
    if disc <= 0.0:
        # Algebraically impossible for positive intensities; a zero or
        # negative discriminant therefore signals corrupted inputs.
        raise ValidationError("degenerate root pair: discriminant <= 0")
    lam1 = 0.5 * (trace + math.sqrt(disc))
    lam2 = (d0 * params.nu10) / lam1 if d0 > 0.0 else 0.5 * (trace - math.sqrt(disc))
    if lam1 == lam2:
        raise ValidationError("degenerate root pair: lambda1 == lambda2")
    T = params.horizon
    coef_c1 = (lam2 - d0) / (lam2 - lam1) * math.exp(-lam1 * T)
    coef_c2 = (lam1 - d0) / (lam1 - lam2) * math.exp(-lam2 * T)
    return DerivedConstants(d0=d0, a=a, b=b, c=c, lambda1=lam1, lambda2=lam2,
                            coef_c1=coef_c1, coef_c2=coef_c2,
                            sigma=params.sigma, horizon=T)


def evaluate_f(dc: DerivedConstants, t: float) -> tuple[float, float]:
    """Evaluate (F0(t), F1(t)) for calendar time t in [0, T].

    Internally uses exponents lam*(t - T) <= 0, which keeps both values
    finite and positive for arbitrarily large rates and enforces
    F0(T) = F1(T) = 1 up to roundoff.
    """
    T = dc.horizon
    if t < -1e-12 or t > T * (1.0 + 1e-12):
        raise ValidationError(f"t={t} outside [0, {T}]")
    q1 = (dc.lambda2 - dc.d0) / (dc.lambda2 - dc.lambda1)
    q2 = (dc.lambda1 - dc.d0) / (dc.lambda1 - dc.lambda2)
    e1 = math.exp(dc.lambda1 * (t - T))
    e2 = math.exp(dc.lambda2 * (t - T))
    f0 = q1 * e1 + q2 * e2
    nu01 = dc.a
    f1 = (q1 * (dc.d0 + nu01 - dc.lambda1) * e1
          + q2 * (dc.d0 + nu01 - dc.lambda2) * e2) / nu01
    return f0, f1


def payoff_call(s, strike):
    """Call payoff max(s - strike, 0); accepts scalars or arrays."""
    return np.maximum(np.asarray(s, dtype=float) - strike, 0.0)


def payoff_zero(s, strike):
    """Identically zero payoff, used as comparison data in audits."""
    return np.zeros_like(np.asarray(s, dtype=float))


def to_prices(u, v, t: float, params: ModelParams,
              dc: DerivedConstants) -> tuple[np.ndarray, np.ndarray]:
    """Map transformed unknowns (u, v) at calendar time t to prices (p, q).

    p = u/gamma + ln(F0(t))/gamma and q = v/gamma + ln(F1(t))/gamma,
    applied pointwise; u and v must share a shape.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValidationError("u and v must share a shape")
    f0, f1 = evaluate_f(dc, t)
    g = params.gamma
    p = u / g + math.log(f0) / g
    q = v / g + math.log(f1) / g
    return p, q
