"""
Peaks over threshold: GPD fitting and the three-piece semiparametric margin.

The semiparametric margin has GPD tails beyond the empirical
``tail_frac`` and ``1 - tail_frac`` quantiles and the empirical cdf in
between::

    F(x) = N_L/N (1 + xi_L (u_L - x)/beta_L)^(-1/xi_L)        x < u_L
         = Ecdf(x)                                            u_L <= x <= u_R
         = 1 - N_R/N (1 + xi_R (x - u_R)/beta_R)^(-1/xi_R)    x > u_R
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .distributions import (
    Gpd,
    Marginal,
    _as_out,
    _check_prob,
    _continuous_quantile_integral,
)
from .errors import DegenerateSample, DensityUnavailable, DomainError, NonConvergence, NonintegrableTail, NonPositivePrice

__all__ = [
    "log_losses",
    "GpdFit",
    "fit_gpd",
    "gpd_loglik",
    "SemiParametricMarginal",
    "build_semiparametric",
    "XI_BOUNDS",
]

#: Search range for the GPD shape.
XI_BOUNDS = (-0.5, 2.0)
_XI_ZERO = 1e-7
_MIN_EXCEED = 10
_WARN_EXCEED = 30


def log_losses(prices) -> np.ndarray:
    """Percentage log losses ``L_t = -100 log(p_t / p_{t-1})``."""
    p = np.asarray(prices, dtype=float).ravel()
    if p.size < 2:
        raise DomainError("need at least two prices")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise NonPositivePrice("prices must be finite and strictly positive")
    return -100.0 * np.diff(np.log(p))


def gpd_loglik(xi: float, scale: float, y) -> float:
    """GPD log-likelihood of excesses ``y``; ``-inf`` outside the support."""
    y = np.asarray(y, float)
    if scale <= 0:
        return -math.inf
    w = y / scale
    if abs(xi) < _XI_ZERO:
        # second-order expansion around the exponential limit
        return float(-y.size * math.log(scale) - np.sum(w) + xi * np.sum(w * w / 2.0 - w))
    z = xi * w
    if np.any(z <= -1.0):
        return -math.inf
    return float(-y.size * math.log(scale) - (1.0 + 1.0 / xi) * np.sum(np.log1p(z)))


def _grad(xi, log_scale, y):
    """Gradient of the log-likelihood in ``(xi, log scale)``."""
    scale = math.exp(log_scale)
    w = y / scale
    n = y.size
    if abs(xi) < _XI_ZERO:
        d_xi = float(np.sum(w * w / 2.0 - w))
        d_s = float(-n + np.sum(w))
        return np.array([d_xi, d_s])
    z = xi * w
    d_xi = float(np.sum(np.log1p(z)) / xi**2 - (1.0 + 1.0 / xi) * np.sum(w / (1.0 + z)))
    d_s = float(-n + (1.0 + 1.0 / xi) * np.sum(z / (1.0 + z)))
    return np.array([d_xi, d_s])


@dataclass(frozen=True)
class GpdFit:
    """Fitted GPD for the excesses over ``threshold``."""

    xi: float
    scale: float
    threshold: float
    n_exceed: int
    loglik: float
    grad_norm: float = field(default=0.0, compare=False)

    def marginal(self) -> Gpd:
        """The fitted law of ``threshold + excess``."""
        return Gpd(self.xi, self.scale, self.threshold)


def _profile_scale(xi, y):
    """Scale maximizing the likelihood for fixed ``xi`` (root of the scale score)."""
    if abs(xi) < _XI_ZERO:
        return float(y.mean())
    ymax = float(y.max())
    score = lambda log_s: _grad(xi, log_s, y)[1]
    # the score is positive at the lower end of the support and tends to -n
    if xi > 0:
        lo = math.log(ymax) - 30.0
        while score(lo) <= 0:
            lo -= 30.0
    else:
        lo = math.log(-xi * ymax) + 1e-10
    hi = math.log(ymax) + 5.0
    while score(hi) > 0:
        hi += 5.0
    if score(lo) <= 0:
        return math.exp(lo)
    return math.exp(optimize.brentq(score, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500))


def fit_gpd(excesses, threshold: float = 0.0) -> GpdFit:
    """Maximum-likelihood GPD fit to positive excesses.

    The shape is found by maximizing the profile likelihood over
    ``XI_BOUNDS`` and the result is polished by Newton steps on
    ``(xi, log scale)``.

    Raises
    ------
    DomainError
        Fewer than 10 excesses or a non-positive excess.
    DegenerateSample
        All excesses equal.
    NonConvergence
        The optimizer fails to reach a finite likelihood.
    """
    y = np.asarray(excesses, dtype=float).ravel()
    if y.size < _MIN_EXCEED:
        raise DomainError(f"need at least {_MIN_EXCEED} excesses, got {y.size}")
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise DomainError("excesses must be finite and strictly positive")
    if np.ptp(y) == 0:
        raise DegenerateSample("all excesses are equal")
    if y.size < _WARN_EXCEED:
        warnings.warn(f"only {y.size} excesses; GPD estimates are unreliable", RuntimeWarning)

    def neg_profile(xi):
        return -gpd_loglik(xi, _profile_scale(xi, y), y)

    res = optimize.minimize_scalar(neg_profile, bounds=XI_BOUNDS, method="bounded",
                                   options={"xatol": 1e-10, "maxiter": 500})
    xi = float(res.x)
    if not math.isfinite(res.fun):
        raise NonConvergence("GPD profile likelihood is not finite")
    log_s = math.log(_profile_scale(xi, y))
    xi, log_s = _newton_polish(xi, log_s, y)
    scale = math.exp(log_s)
    ll = gpd_loglik(xi, scale, y)
    if not math.isfinite(ll):
        raise NonConvergence("GPD fit left the support")
    g = _grad(xi, log_s, y)
    on_bound = xi <= XI_BOUNDS[0] + 1e-9 or xi >= XI_BOUNDS[1] - 1e-9
    gnorm = float(abs(g[1]) if on_bound else np.hypot(*g))
    return GpdFit(xi, scale, float(threshold), int(y.size), ll, gnorm)


def _newton_polish(xi, log_s, y, steps=8):
    """Newton iterations with a finite-difference Hessian of the analytic gradient."""
    x = np.array([xi, log_s])
    ll = gpd_loglik(x[0], math.exp(x[1]), y)
    for _ in range(steps):
        g = _grad(x[0], x[1], y)
        if np.hypot(*g) < 1e-9:
            break
        h = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = 1e-6
            h[:, j] = (_grad(*(x + e), y) - _grad(*(x - e), y)) / 2e-6
        h = 0.5 * (h + h.T)
        try:
            step = -np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            break
        cand = x + step
        cand[0] = min(max(cand[0], XI_BOUNDS[0]), XI_BOUNDS[1])
        ll_c = gpd_loglik(cand[0], math.exp(cand[1]), y)
        if not ll_c >= ll - 1e-9 * abs(ll):
            break
        x, ll = cand, max(ll, ll_c)
    return float(x[0]), float(x[1])


@dataclass(frozen=True)
class _Reflected(Marginal):
    """Law of ``shift - X`` for a GPD excess ``X``; used for the lower tail."""

    base: Gpd
    shift: float

    def cdf(self, x):
        return _as_out(1.0 - np.asarray(self.base.cdf(self.shift - np.asarray(x, float))), x)

    def quantile(self, p):
        return _as_out(self.shift - np.asarray(self.base.isf(np.asarray(p, float))), p)

    def isf(self, q):
        return _as_out(self.shift - np.asarray(self.base.quantile(np.asarray(q, float))), q)

    def mean(self):
        return self.shift - self.base.mean()

    def upper_tail_finite(self):
        return True

    def lower_tail_finite(self):
        return self.base.upper_tail_finite()

    def _quantile_integral_lower(self, q):
        return self.shift * q - self.base._isf_integral(q)

    def _isf_integral(self, q):
        return q * (self.shift - self.base.threshold)


@dataclass(frozen=True, eq=False)
class SemiParametricMarginal(Marginal):
    """GPD lower tail, empirical body and GPD upper tail.

    Attributes
    ----------
    sample : ndarray
        Sorted sample.
    lower, upper : GpdFit
        Fits to ``u_L - x`` below ``u_L`` and ``x - u_R`` above ``u_R``.
    """

    sample: np.ndarray = field(repr=False)
    lower: GpdFit
    upper: GpdFit
    u_l: float
    u_r: float
    n_l: int
    n_r: int

    continuous = False

    @property
    def n(self) -> int:
        return self.sample.size

    @property
    def p_lower(self) -> float:
        return self.n_l / self.n

    @property
    def p_upper(self) -> float:
        """Mass above ``u_R``."""
        return self.n_r / self.n

    def _upper_gpd(self):
        return Gpd(self.upper.xi, self.upper.scale, self.u_r)

    def _lower_excess(self):
        return Gpd(self.lower.xi, self.lower.scale, 0.0)

    def cdf(self, x):
        x = np.asarray(x, float)
        ecdf = np.searchsorted(self.sample, x, side="right") / self.n
        lo = self.p_lower * (1.0 - np.asarray(self._lower_excess().cdf(np.maximum(self.u_l - x, 0.0))))
        hi = 1.0 - self.p_upper * (1.0 - np.asarray(self._upper_gpd().cdf(np.maximum(x, self.u_r))))
        return _as_out(np.where(x < self.u_l, lo, np.where(x > self.u_r, hi, ecdf)), x)

    def _body_quantile(self, p):
        idx = np.clip(np.ceil(p * self.n - 1e-9).astype(int), 1, self.n) - 1
        return np.maximum(self.sample[idx], self.u_l)

    def quantile(self, p):
        p = _check_prob(p)
        pl, pu = self.p_lower, self.p_upper
        with np.errstate(divide="ignore", invalid="ignore"):
            q_lo = self.u_l - np.asarray(self._lower_excess().isf(np.where(p < pl, p / max(pl, 1e-300), 1.0)))
            q_hi = np.asarray(self._upper_gpd().isf(np.where(p > 1 - pu, (1.0 - p) / max(pu, 1e-300), 1.0)))
        out = np.where(p < pl, q_lo, np.where(p > 1.0 - pu, q_hi, self._body_quantile(p)))
        return _as_out(out, p)

    def isf(self, q):
        q = np.asarray(q, float)
        pu = self.p_upper
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.asarray(self._upper_gpd().isf(np.where(q < pu, q / max(pu, 1e-300), 1.0)))
        return _as_out(np.where(q < pu, tail, np.asarray(self.quantile(np.clip(1.0 - q, 1e-300, 1.0 - 1e-16)))), q)

    def density(self, x):
        raise DensityUnavailable("the empirical body has no density")

    def upper_tail_finite(self):
        return self.upper.xi < 1.0

    def lower_tail_finite(self):
        return self.lower.xi < 1.0

    def mean(self):
        return self.quantile_integral(lambda t: np.asarray(t, float), lambda t: np.ones_like(np.asarray(t, float)))

    def quantile_integral(self, h, dh, lo=0.0, points=()):
        """Exact on the step body; adaptive quadrature on the two GPD tails."""
        if not self.upper_tail_finite():
            raise NonintegrableTail(f"upper tail shape {self.upper.xi:.4g} >= 1: infinite mean")
        if lo == 0.0 and not self.lower_tail_finite():
            raise NonintegrableTail(f"lower tail shape {self.lower.xi:.4g} >= 1: infinite mean")
        n = self.n
        pl, pu = self.p_lower, self.p_upper
        b = 1.0 - pu
        total = 0.0
        if lo < pl:
            # t = pl * s on the lower tail
            refl = _Reflected(self._lower_excess(), self.u_l)
            dh_l = lambda s: pl * np.asarray(dh(pl * np.asarray(s, float)))
            pts = [p / pl for p in points if lo < p < pl]
            total += _continuous_quantile_integral(refl, dh_l, lo / pl, pts)
        k = np.arange(self.n_l + 1, n - self.n_r + 1)
        if k.size:
            hk = np.asarray(h(np.concatenate([[(k[0] - 1) / n], k / n])), float)
            total += float(np.dot(self._body_quantile(k / n), np.diff(hk)))
        # t = b + pu * s on the upper tail
        dh_u = lambda s: pu * np.asarray(dh(np.minimum(b + pu * np.asarray(s, float), 1.0)))
        pts = [(p - b) / pu for p in points if max(lo, b) < p < 1.0]
        total += _continuous_quantile_integral(self._upper_gpd(), dh_u, max(lo - b, 0.0) / pu, pts)
        return total


def _type1(sorted_x, p):
    return float(sorted_x[max(int(math.ceil(p * sorted_x.size - 1e-9)), 1) - 1])


def build_semiparametric(sample, tail_frac: float = 0.1) -> SemiParametricMarginal:
    """Fit GPD tails beyond the empirical ``tail_frac`` quantiles of ``sample``.

    Thresholds are type-1 empirical quantiles; the lower tail is fitted to
    ``u_L - x`` for observations strictly below ``u_L``.
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    if x.size < 100:
        raise DomainError(f"need at least 100 observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("sample must be finite")
    if not 0.0 < tail_frac < 0.5:
        raise DomainError("tail_frac must lie in (0, 0.5)")
    u_l = _type1(x, tail_frac)
    u_r = _type1(x, 1.0 - tail_frac)
    below = x[x < u_l]
    above = x[x > u_r]
    lower = fit_gpd(u_l - below, threshold=u_l)
    upper = fit_gpd(above - u_r, threshold=u_r)
    x.setflags(write=False)
    return SemiParametricMarginal(x, lower, upper, u_l, u_r, int(below.size), int(above.size))
