"""
Univariate marginal models and the scalar risk functionals built on them.

Every model exposes ``cdf``, ``quantile`` (the left-continuous generalized
inverse), ``isf`` (the quantile evaluated at ``1 - q``, computed without the
cancellation in ``1 - q``), ``density``, ``mean`` and ``es``.  The workhorse
for all conditional measures is :meth:`Marginal.quantile_integral`, which
evaluates the Stieltjes integral of the quantile function against a
distortion supported on ``[lo, 1]``.
"""
from __future__ import annotations

import math
import warnings
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, special

from .errors import (
    DensityUnavailable,
    DomainError,
    NonintegrableTail,
    QuadratureWarning,
    ZeroQuantile,
)

__all__ = [
    "QUAD_SETTINGS",
    "PGrid",
    "Marginal",
    "Normal",
    "LogNormal",
    "StudentT",
    "Gamma",
    "Gpd",
    "Empirical",
    "ShiftScale",
    "ComonotoneSum",
    "es",
    "excess_wealth",
    "epw",
]

#: Quadrature settings shared by every quantile integral; recorded in reports.
QUAD_SETTINGS = {
    "epsabs": 1e-13,
    "epsrel": 1e-11,
    "limit": 500,
    "s_split": 40.0,
    "s_max": 700.0,
}

_Weight = Callable[[np.ndarray], np.ndarray]


def _as_out(x, like):
    """Return a python float when the input was scalar."""
    if np.ndim(like) == 0:
        return float(np.asarray(x).reshape(()))
    return np.asarray(x, dtype=float)


def _check_prob(p, *, closed_low=False):
    p = np.asarray(p, dtype=float)
    low_ok = p >= 0.0 if closed_low else p > 0.0
    if not np.all(low_ok & (p < 1.0)):
        interval = "[0, 1)" if closed_low else "(0, 1)"
        raise DomainError(f"probability must lie in {interval}, got {p}")
    return p


def _quad(f, a, b, points=None):
    opts = dict(
        epsabs=QUAD_SETTINGS["epsabs"],
        epsrel=QUAD_SETTINGS["epsrel"],
        limit=QUAD_SETTINGS["limit"],
    )
    if points:
        opts["points"] = sorted(points)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, **opts)
    if caught and abs(err) > 1e-7 * max(1.0, abs(val)):
        warnings.warn(
            f"quadrature on [{a}, {b}] reported error {err:.2e}", QuadratureWarning
        )
    return val


def _segments(knots):
    knots = sorted(set(float(k) for k in knots))
    return list(zip(knots[:-1], knots[1:]))


@dataclass(frozen=True)
class PGrid:
    """Strictly increasing probabilities inside (0, 1)."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("grid must be a non-empty 1-d sequence")
        if np.any(pts <= 0.0) or np.any(pts >= 1.0):
            raise DomainError("grid points must lie in the open interval (0, 1)")
        if np.any(np.diff(pts) <= 0.0):
            raise DomainError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def default(cls) -> PGrid:
        """199 uniform interior points plus 20 log-spaced points at each end."""
        interior = np.linspace(0.005, 0.995, 199)
        edge = np.logspace(-6.0, -2.5, 20)
        return cls(np.unique(np.concatenate([edge, interior, 1.0 - edge])))

    @classmethod
    def uniform(cls, n: int, lo: float = 0.01, hi: float = 0.99) -> PGrid:
        return cls(np.linspace(lo, hi, n))

    def refine(self) -> PGrid:
        """Insert midpoints between all neighbouring points."""
        mids = 0.5 * (self.points[1:] + self.points[:-1])
        return PGrid(np.sort(np.concatenate([self.points, mids])))

    def __len__(self):
        return self.points.size

    def __iter__(self):
        return iter(self.points)


class Marginal(ABC):
    """Base class for univariate marginal models.

    Subclasses implement ``cdf``, ``quantile`` and ``mean``; ``isf`` and the
    quantile integral have generic fallbacks.  Instances are immutable.
    """

    #: False for models whose quantile function is a step function.
    continuous: bool = True

    @abstractmethod
    def cdf(self, x):
        ...

    @abstractmethod
    def quantile(self, p):
        ...

    def isf(self, q):
        """Quantile at ``1 - q``; override for accuracy in the far tail."""
        return self.quantile(1.0 - np.asarray(q, dtype=float))

    def density(self, x):
        raise DensityUnavailable(f"{type(self).__name__} has no density")

    @abstractmethod
    def mean(self) -> float:
        ...

    def upper_tail_finite(self) -> bool:
        return True

    def lower_tail_finite(self) -> bool:
        return True

    def _isf_integral(self, q: float) -> float:
        """Integral of ``isf`` over ``(0, q]``, used past the truncation point."""
        return 0.0

    def _quantile_integral_lower(self, q: float) -> float:
        return 0.0

    def es(self, p) -> float:
        """Expected shortfall, the average of VaR over ``[p, 1)``."""
        p = float(_check_prob(p, closed_low=True))
        if not self.upper_tail_finite():
            raise NonintegrableTail(f"{self!r} has an infinite upper tail mean")
        if p == 0.0:
            return self.mean()
        return self.quantile_integral(
            lambda t: np.clip((np.asarray(t) - p) / (1.0 - p), 0.0, 1.0),
            lambda t: np.where(np.asarray(t) > p, 1.0 / (1.0 - p), 0.0),
            lo=p,
        )

    def quantile_integral(
        self,
        h: Callable,
        dh: _Weight,
        lo: float = 0.0,
        points: Sequence[float] = (),
    ) -> float:
        """Integrate the quantile function against the distortion ``h``.

        Parameters
        ----------
        h : callable
            Distortion (a cdf on [0, 1]) constant on ``[0, lo]``.
        dh : callable
            Its density; must be finite on ``(lo, 1)``.
        lo : float
            Left end of the support of ``dh``.
        points : sequence of float
            Locations of kinks in ``dh``.

        Returns
        -------
        float
            ``int_lo^1 quantile(t) dh(t)``.
        """
        if not self.upper_tail_finite():
            raise NonintegrableTail(f"{self!r} has an infinite upper tail mean")
        if lo == 0.0 and not self.lower_tail_finite():
            raise NonintegrableTail(f"{self!r} has an infinite lower tail mean")
        return _continuous_quantile_integral(self, dh, lo, points)


def _continuous_quantile_integral(m: Marginal, dh: _Weight, lo: float, points) -> float:
    s_split, s_max = QUAD_SETTINGS["s_split"], QUAD_SETTINGS["s_max"]
    mid = max(lo, 0.5)
    pts = [float(p) for p in points if lo < p < 1.0]
    total = 0.0

    if lo < 0.5:
        low_pts = [p for p in pts if p < 0.5]
        if lo == 0.0:
            # t = exp(-s) resolves the quantile's singularity at zero
            def f_low(s):
                t = math.exp(-s)
                return float(m.quantile(t)) * float(dh(t)) * t

            knots = [math.log(2.0), math.log(2.0) + s_split, s_max]
            knots += [-math.log(p) for p in low_pts]
            for a, b in _segments(knots):
                total += _quad(f_low, a, b)
            total += float(dh(0.0)) * m._quantile_integral_lower(math.exp(-s_max))
        else:
            def f_mid(t):
                return float(m.quantile(t)) * float(dh(t))

            total += _quad(f_mid, lo, 0.5, points=low_pts or None)

    # 1 - t = exp(-s); the quantile is read through isf to keep the far tail exact
    def f_up(s):
        q = math.exp(-s)
        return float(m.isf(q)) * float(dh(-math.expm1(-s))) * q

    s0 = -math.log1p(-mid)
    knots = [s0, s0 + s_split, max(s_max, s0 + s_split + 1.0)]
    knots += [-math.log1p(-p) for p in pts if p > mid]
    for a, b in _segments(knots):
        total += _quad(f_up, a, b)
    total += float(dh(1.0)) * m._isf_integral(math.exp(-max(knots)))
    return total


@dataclass(frozen=True)
class Normal(Marginal):
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")

    def cdf(self, x):
        return _as_out(special.ndtr((np.asarray(x, float) - self.mu) / self.sigma), x)

    def quantile(self, p):
        p = _check_prob(p)
        return _as_out(self.mu + self.sigma * special.ndtri(p), p)

    def isf(self, q):
        return _as_out(self.mu - self.sigma * special.ndtri(np.asarray(q, float)), q)

    def density(self, x):
        z = (np.asarray(x, float) - self.mu) / self.sigma
        return _as_out(np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi)), x)

    def mean(self):
        return float(self.mu)

    def es(self, p):
        p = float(_check_prob(p, closed_low=True))
        if p == 0.0:
            return self.mean()
        z = special.ndtri(p)
        return self.mu + self.sigma * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi) / (1 - p)


@dataclass(frozen=True)
class LogNormal(Marginal):
    """Law of ``exp(N(mu, sigma^2))``."""

    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")

    def cdf(self, x):
        x = np.asarray(x, float)
        with np.errstate(divide="ignore"):
            z = (np.log(np.where(x > 0, x, 1.0)) - self.mu) / self.sigma
        return _as_out(np.where(x > 0, special.ndtr(z), 0.0), x)

    def quantile(self, p):
        p = _check_prob(p)
        return _as_out(np.exp(self.mu + self.sigma * special.ndtri(p)), p)

    def isf(self, q):
        return _as_out(np.exp(self.mu - self.sigma * special.ndtri(np.asarray(q, float))), q)

    def density(self, x):
        x = np.asarray(x, float)
        xs = np.where(x > 0, x, 1.0)
        z = (np.log(xs) - self.mu) / self.sigma
        d = np.exp(-0.5 * z * z) / (xs * self.sigma * math.sqrt(2 * math.pi))
        return _as_out(np.where(x > 0, d, 0.0), x)

    def mean(self):
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def es(self, p):
        p = float(_check_prob(p, closed_low=True))
        if p == 0.0:
            return self.mean()
        return self.mean() * special.ndtr(self.sigma - special.ndtri(p)) / (1 - p)


@dataclass(frozen=True)
class StudentT(Marginal):
    """Standard Student t (location 0, scale 1) with real ``nu > 0``."""

    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError("nu must be positive")

    def cdf(self, x):
        x = np.asarray(x, float)
        if self.nu == 1:
            return _as_out(0.5 + np.arctan(x) / np.pi, x)
        return _as_out(special.stdtr(self.nu, x), x)

    def quantile(self, p):
        p = _check_prob(p)
        if self.nu == 1:
            out = np.tan(np.pi * (p - 0.5))
        elif self.nu == 2:
            out = math.sqrt(2.0) * (p - 0.5) / np.sqrt(p - p * p)
        else:
            out = special.stdtrit(self.nu, p)
        return _as_out(out, p)

    def isf(self, q):
        q = np.asarray(q, float)
        if self.nu == 1:
            out = 1.0 / np.tan(np.pi * q)
        elif self.nu == 2:
            out = math.sqrt(2.0) * (0.5 - q) / np.sqrt(q * (1.0 - q))
        else:
            out = -special.stdtrit(self.nu, q)
        return _as_out(out, q)

    def density(self, x):
        x = np.asarray(x, float)
        nu = self.nu
        logc = special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * math.log(nu * math.pi)
        return _as_out(np.exp(logc - (nu + 1) / 2 * np.log1p(x * x / nu)), x)

    def upper_tail_finite(self):
        return self.nu > 1

    lower_tail_finite = upper_tail_finite

    def _isf_integral(self, q):
        # regularly varying tail: isf(r) ~ isf(q) (r/q)^(-1/nu)
        return q * float(self.isf(q)) / (1.0 - 1.0 / self.nu)

    def _quantile_integral_lower(self, q):
        return -self._isf_integral(q)

    def mean(self):
        if self.nu <= 1:
            raise NonintegrableTail("Student t mean diverges for nu <= 1")
        return 0.0

    def es(self, p):
        p = float(_check_prob(p, closed_low=True))
        if self.nu <= 1:
            raise NonintegrableTail("Student t expected shortfall diverges for nu <= 1")
        if p == 0.0:
            return 0.0
        x = float(self.quantile(p))
        return (self.nu + x * x) / (self.nu - 1) * float(self.density(x)) / (1 - p)


@dataclass(frozen=True)
class Gamma(Marginal):
    """Gamma law with ``shape`` a and ``scale`` b (mean a*b)."""

    shape: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise DomainError("gamma shape and scale must be positive")

    def cdf(self, x):
        x = np.asarray(x, float)
        return _as_out(special.gammainc(self.shape, np.maximum(x, 0.0) / self.scale), x)

    def quantile(self, p):
        p = _check_prob(p)
        return _as_out(self.scale * special.gammaincinv(self.shape, p), p)

    def isf(self, q):
        q = np.asarray(q, float)
        return _as_out(self.scale * special.gammainccinv(self.shape, q), q)

    def density(self, x):
        x = np.asarray(x, float)
        a, b = self.shape, self.scale
        xs = np.where(x > 0, x, 1.0)
        logd = (a - 1) * np.log(xs) - xs / b - a * math.log(b) - special.gammaln(a)
        return _as_out(np.where(x > 0, np.exp(logd), 0.0), x)

    def mean(self):
        return self.shape * self.scale

    def es(self, p):
        p = float(_check_prob(p, closed_low=True))
        if p == 0.0:
            return self.mean()
        x = float(self.quantile(p))
        return self.mean() * special.gammaincc(self.shape + 1, x / self.scale) / (1 - p)


@dataclass(frozen=True)
class Gpd(Marginal):
    """Generalized Pareto law of ``threshold + excess``.

    The excess has cdf ``1 - (1 + xi x / scale)^(-1/xi)``; ``xi = 0`` is the
    exponential limit.
    """

    xi: float
    scale: float
    threshold: float = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("GPD scale must be positive")

    def _excess_sf(self, y):
        y = np.maximum(y, 0.0)
        if self.xi == 0.0:
            return np.exp(-y / self.scale)
        base = 1.0 + self.xi * y / self.scale
        return np.where(base > 0, np.power(np.maximum(base, 1e-300), -1.0 / self.xi), 0.0)

    def cdf(self, x):
        x = np.asarray(x, float)
        return _as_out(1.0 - self._excess_sf(x - self.threshold), x)

    def isf(self, q):
        q = np.asarray(q, float)
        if self.xi == 0.0:
            out = -self.scale * np.log(q)
        else:
            out = self.scale / self.xi * np.expm1(-self.xi * np.log(q))
        return _as_out(self.threshold + out, q)

    def quantile(self, p):
        p = _check_prob(p, closed_low=True)
        return _as_out(self.isf(1.0 - p), p)

    def density(self, x):
        x = np.asarray(x, float)
        y = x - self.threshold
        sf = self._excess_sf(y)
        if self.xi == 0.0:
            d = sf / self.scale
        else:
            base = np.maximum(1.0 + self.xi * np.maximum(y, 0.0) / self.scale, 1e-300)
            d = sf / (self.scale * base)
        return _as_out(np.where(y >= 0, d, 0.0), x)

    def upper_tail_finite(self):
        return self.xi < 1

    def _isf_integral(self, q):
        if self.xi == 0.0:
            return q * (self.threshold + self.scale * (1.0 - math.log(q)))
        c = self.scale / self.xi
        return q * (self.threshold - c) + c * q ** (1.0 - self.xi) / (1.0 - self.xi)

    def mean(self):
        if self.xi >= 1:
            raise NonintegrableTail("GPD mean diverges for xi >= 1")
        return self.threshold + self.scale / (1 - self.xi)

    def es(self, p):
        p = float(_check_prob(p, closed_low=True))
        if self.xi >= 1:
            raise NonintegrableTail("GPD expected shortfall diverges for xi >= 1")
        x = float(self.quantile(p))
        return (x + self.scale - self.xi * self.threshold) / (1 - self.xi)


def _step_quantile_integral(sorted_x: np.ndarray, h) -> float:
    """Exact integral of a type-1 empirical quantile against ``h``."""
    n = sorted_x.size
    k = np.arange(n + 1) / n
    hk = np.asarray(h(k), dtype=float)
    return float(np.dot(sorted_x, np.diff(hk)))


@dataclass(frozen=True)
class Empirical(Marginal):
    """Empirical law of a sample; the quantile is the type-1 inverse."""

    sample: np.ndarray = field(repr=False)
    continuous = False

    def __post_init__(self):
        x = np.sort(np.asarray(self.sample, dtype=float).ravel())
        if x.size == 0 or not np.all(np.isfinite(x)):
            raise DomainError("empirical sample must be non-empty and finite")
        x.setflags(write=False)
        object.__setattr__(self, "sample", x)

    @property
    def n(self):
        return self.sample.size

    def cdf(self, x):
        x = np.asarray(x, float)
        return _as_out(np.searchsorted(self.sample, x, side="right") / self.n, x)

    def quantile(self, p):
        p = _check_prob(p)
        idx = np.ceil(p * self.n - 1e-9).astype(int)
        return _as_out(self.sample[np.clip(idx, 1, self.n) - 1], p)

    def mean(self):
        return float(self.sample.mean())

    def es(self, p):
        p = float(_check_prob(p, closed_low=True))
        if p == 0.0:
            return self.mean()
        return self.quantile_integral(
            lambda t: np.clip((np.asarray(t) - p) / (1.0 - p), 0.0, 1.0), None, lo=p
        )

    def quantile_integral(self, h, dh, lo=0.0, points=()):
        return _step_quantile_integral(self.sample, h)


@dataclass(frozen=True)
class ShiftScale(Marginal):
    """Law of ``loc + scale * base`` with ``scale > 0``."""

    base: Marginal
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("scale must be positive")

    @property
    def continuous(self):
        return self.base.continuous

    def cdf(self, x):
        return self.base.cdf((np.asarray(x, float) - self.loc) / self.scale)

    def quantile(self, p):
        return _as_out(self.loc + self.scale * np.asarray(self.base.quantile(p)), p)

    def isf(self, q):
        return _as_out(self.loc + self.scale * np.asarray(self.base.isf(q)), q)

    def density(self, x):
        return _as_out(np.asarray(self.base.density((np.asarray(x, float) - self.loc) / self.scale)) / self.scale, x)

    def upper_tail_finite(self):
        return self.base.upper_tail_finite()

    def lower_tail_finite(self):
        return self.base.lower_tail_finite()

    def mean(self):
        return self.loc + self.scale * self.base.mean()

    def es(self, p):
        return self.loc + self.scale * self.base.es(p)

    def quantile_integral(self, h, dh, lo=0.0, points=()):
        mass = float(h(1.0)) - float(h(lo))
        return self.loc * mass + self.scale * self.base.quantile_integral(h, dh, lo, points)


@dataclass(frozen=True)
class ComonotoneSum(Marginal):
    """Law of a sum of comonotone risks: the quantiles add."""

    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise DomainError("at least one component required")
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def continuous(self):
        return all(m.continuous for m in self.parts)

    def quantile(self, p):
        return _as_out(sum(np.asarray(m.quantile(p)) for m in self.parts), p)

    def isf(self, q):
        return _as_out(sum(np.asarray(m.isf(q)) for m in self.parts), q)

    def cdf(self, x):
        def one(xv):
            f = lambda p: float(self.quantile(p)) - xv
            lo, hi = 1e-15, 1 - 1e-15
            if f(lo) >= 0:
                return 0.0
            if f(hi) <= 0:
                return 1.0
            return optimize.brentq(f, lo, hi, xtol=1e-15)

        x = np.asarray(x, float)
        return _as_out(np.vectorize(one)(x), x)

    def upper_tail_finite(self):
        return all(m.upper_tail_finite() for m in self.parts)

    def lower_tail_finite(self):
        return all(m.lower_tail_finite() for m in self.parts)

    def mean(self):
        return sum(m.mean() for m in self.parts)

    def es(self, p):
        return sum(m.es(p) for m in self.parts)

    def quantile_integral(self, h, dh, lo=0.0, points=()):
        return sum(m.quantile_integral(h, dh, lo, points) for m in self.parts)


def es(m: Marginal, p: float) -> float:
    """Expected shortfall of ``m`` at level ``p``."""
    return m.es(p)


def excess_wealth(m: Marginal, p: float) -> float:
    """``E[(X - VaR_p)_+]``, computed as ``(1 - p)(ES_p - VaR_p)``."""
    p = float(_check_prob(p))
    return (1.0 - p) * (m.es(p) - float(m.quantile(p)))


def epw(m: Marginal, p: float) -> float:
    """Excess proportional wealth ``E[((X - VaR_p) / VaR_p)_+]``."""
    q = float(m.quantile(p))
    if q == 0.0:
        raise ZeroQuantile(f"VaR_{p} is zero; EPW undefined")
    return excess_wealth(m, p) / q
