"""
Bivariate copula families.

Each family provides the copula cdf ``C(u, v)``, the joint tail function
``C̄(u, v) = P(U > u, V > v)``, the conditional distribution
``partial2(u, v) = P(U <= u | V = v)``, a density for likelihood fitting,
closed-form Kendall's tau and tail-dependence coefficients, and exact
samplers.  All methods broadcast over numpy arrays.

The orientation convention is ``U = F(X)``, ``V = G(Y)``.
"""
from __future__ import annotations

import csv
import math
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special, stats

from ._rng import make_rng
from .errors import (
    DensityUnavailable,
    DomainError,
    NonConvergence,
    NumericalDifferentiationWarning,
)

__all__ = [
    "Copula",
    "IndependenceCopula",
    "ComonotoneCopula",
    "FGMCopula",
    "GumbelCopula",
    "GaussianCopula",
    "StudentTCopula",
    "TransposedCopula",
    "FAMILIES",
    "make_copula",
    "pseudo_observations",
    "read_pseudo_csv",
    "write_pseudo_csv",
    "sample_conditional_inversion",
    "loglik",
    "fit_mle",
    "aic_select",
    "aic_table",
]

_V_HI = 1.0 - 2.0**-53
_TINY = 1e-300
_FD_STEP = 1e-6


def _clip_open(x):
    return np.clip(np.asarray(x, dtype=float), _TINY, _V_HI)


def _out(x, *likes):
    if all(np.ndim(a) == 0 for a in likes):
        return float(np.asarray(x).reshape(()))
    return np.asarray(x, dtype=float)


class Copula(ABC):
    """Base class; subclasses are frozen dataclasses."""

    family: str = ""
    n_params: int = 0
    symmetric: bool = True
    radially_symmetric: bool = False

    @property
    def params(self) -> tuple:
        return ()

    @abstractmethod
    def cdf(self, u, v):
        ...

    def tail(self, u, v):
        """Joint tail function ``1 - u - v + C(u, v)``."""
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        if self.radially_symmetric:
            return _out(self.cdf(1.0 - u, 1.0 - v), u, v)
        return _out(np.clip(1.0 - u - v + np.asarray(self.cdf(u, v)), 0.0, 1.0), u, v)

    def partial2(self, u, v):
        """``P(U <= u | V = v)``; central differences unless overridden."""
        warnings.warn(
            f"{type(self).__name__}.partial2 uses central differences",
            NumericalDifferentiationWarning,
            stacklevel=2,
        )
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        lo = np.clip(v - _FD_STEP, 0.0, 1.0)
        hi = np.clip(v + _FD_STEP, 0.0, 1.0)
        d = (np.asarray(self.cdf(u, hi)) - np.asarray(self.cdf(u, lo))) / (hi - lo)
        return _out(np.clip(d, 0.0, 1.0), u, v)

    def partial1(self, u, v):
        """``P(V <= v | U = u)``."""
        if self.symmetric:
            return self.partial2(v, u)
        warnings.warn(
            f"{type(self).__name__}.partial1 uses central differences",
            NumericalDifferentiationWarning,
            stacklevel=2,
        )
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        lo = np.clip(u - _FD_STEP, 0.0, 1.0)
        hi = np.clip(u + _FD_STEP, 0.0, 1.0)
        d = (np.asarray(self.cdf(hi, v)) - np.asarray(self.cdf(lo, v))) / (hi - lo)
        return _out(np.clip(d, 0.0, 1.0), u, v)

    def _partial2_knee(self, u):
        """Location in ``v`` where ``partial2(u, v)`` changes fastest, if known."""
        return None

    def pdf(self, u, v):
        raise DensityUnavailable(f"{type(self).__name__} has no density")

    def logpdf(self, u, v):
        return np.log(self.pdf(u, v))

    @abstractmethod
    def kendall_tau(self) -> float:
        ...

    def tail_dependence(self) -> tuple[float, float]:
        """``(lambda_L, lambda_U)``."""
        return (0.0, 0.0)

    @abstractmethod
    def sample(self, n: int, seed=None) -> tuple[np.ndarray, np.ndarray]:
        ...

    def transposed(self) -> Copula:
        """Copula of ``(V, U)``."""
        return self if self.symmetric else TransposedCopula(self)

    def with_params(self, *params) -> Copula:
        return type(self)(*params)


@dataclass(frozen=True)
class IndependenceCopula(Copula):
    family = "independence"

    def cdf(self, u, v):
        return _out(np.asarray(u, float) * np.asarray(v, float), u, v)

    def tail(self, u, v):
        return _out((1.0 - np.asarray(u, float)) * (1.0 - np.asarray(v, float)), u, v)

    def partial2(self, u, v):
        return _out(np.broadcast_to(np.asarray(u, float), np.broadcast(u, v).shape), u, v)

    def pdf(self, u, v):
        return _out(np.ones(np.broadcast(u, v).shape), u, v)

    def kendall_tau(self):
        return 0.0

    def sample(self, n, seed=None):
        rng = make_rng(seed)
        return rng.random(n), rng.random(n)


@dataclass(frozen=True)
class ComonotoneCopula(Copula):
    """Upper Fréchet bound ``min(u, v)``; has no density."""

    family = "comonotone"

    def cdf(self, u, v):
        return _out(np.minimum(u, v), u, v)

    def tail(self, u, v):
        return _out(1.0 - np.maximum(u, v), u, v)

    def partial2(self, u, v):
        return _out(np.where(np.asarray(v) < np.asarray(u), 1.0, 0.0), u, v)

    def kendall_tau(self):
        return 1.0

    def tail_dependence(self):
        return (1.0, 1.0)

    def sample(self, n, seed=None):
        u = make_rng(seed).random(n)
        return u, u.copy()


@dataclass(frozen=True)
class FGMCopula(Copula):
    """Farlie-Gumbel-Morgenstern copula ``uv(1 + theta(1-u)(1-v))``."""

    theta: float
    family = "fgm"
    n_params = 1
    radially_symmetric = True

    def __post_init__(self):
        if not -1.0 <= self.theta <= 1.0:
            raise DomainError("FGM theta must lie in [-1, 1]")

    @property
    def params(self):
        return (self.theta,)

    def cdf(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        return _out(u * v * (1.0 + self.theta * (1.0 - u) * (1.0 - v)), u, v)

    def tail(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        return _out((1.0 - u) * (1.0 - v) * (1.0 + self.theta * u * v), u, v)

    def partial2(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        return _out(u * (1.0 + self.theta * (1.0 - u) * (1.0 - 2.0 * v)), u, v)

    def pdf(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        return _out(1.0 + self.theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v), u, v)

    def kendall_tau(self):
        return 2.0 * self.theta / 9.0

    def sample(self, n, seed=None):
        rng = make_rng(seed)
        v = rng.random(n)
        w = rng.random(n)
        # invert u(1 + a(1-u)) = w for u, a = theta(1 - 2v)
        a = self.theta * (1.0 - 2.0 * v)
        disc = np.sqrt((1.0 + a) ** 2 - 4.0 * a * w)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(np.abs(a) > 1e-12, 2.0 * w / (1.0 + a + disc), w)
        return u, v


@dataclass(frozen=True)
class GumbelCopula(Copula):
    """Gumbel copula ``exp(-((-log u)^theta + (-log v)^theta)^(1/theta))``."""

    theta: float
    family = "gumbel"
    n_params = 1

    def __post_init__(self):
        if not self.theta >= 1.0:
            raise DomainError("Gumbel theta must be >= 1")

    @property
    def params(self):
        return (self.theta,)

    def _a(self, u, v):
        with np.errstate(divide="ignore"):
            x = -np.log(np.asarray(u, float))
            y = -np.log(np.asarray(v, float))
        return x, y, x**self.theta + y**self.theta

    def cdf(self, u, v):
        _, _, a = self._a(u, v)
        return _out(np.exp(-(a ** (1.0 / self.theta))), u, v)

    def tail(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        with np.errstate(divide="ignore"):
            x = -np.log1p(-(1.0 - u))
            y = -np.log1p(-(1.0 - v))
        one_minus_c = -np.expm1(-((x**self.theta + y**self.theta) ** (1.0 / self.theta)))
        return _out(np.clip((1.0 - u) + (1.0 - v) - one_minus_c, 0.0, 1.0), u, v)

    def partial2(self, u, v):
        u = np.asarray(u, float)
        vc = _clip_open(v)
        th = self.theta
        with np.errstate(divide="ignore", invalid="ignore"):
            x, y, a = self._a(np.maximum(u, _TINY), vc)
            c = np.exp(-(a ** (1.0 / th)))
            d = c * a ** (1.0 / th - 1.0) * y ** (th - 1.0) / vc
        d = np.where(u <= 0.0, 0.0, np.where(u >= 1.0, 1.0, d))
        return _out(np.clip(np.nan_to_num(d, nan=0.0), 0.0, 1.0), u, v)

    def pdf(self, u, v):
        u = _clip_open(u)
        v = _clip_open(v)
        th = self.theta
        x, y, a = self._a(u, v)
        s = a ** (1.0 / th)
        return np.exp(-s) / (u * v) * (x * y) ** (th - 1.0) * a ** (2.0 / th - 2.0) * (1.0 + (th - 1.0) / s)

    def logpdf(self, u, v):
        u = _clip_open(u)
        v = _clip_open(v)
        th = self.theta
        x, y, a = self._a(u, v)
        s = a ** (1.0 / th)
        return (
            -s - np.log(u) - np.log(v) + (th - 1.0) * np.log(x * y)
            + (2.0 / th - 2.0) * np.log(a) + np.log1p((th - 1.0) / s)
        )

    def kendall_tau(self):
        return 1.0 - 1.0 / self.theta

    def tail_dependence(self):
        return (0.0, 2.0 - 2.0 ** (1.0 / self.theta))

    def sample(self, n, seed=None):
        rng = make_rng(seed)
        th = self.theta
        if th == 1.0:
            return rng.random(n), rng.random(n)
        # Marshall-Olkin: positive stable frailty with Laplace transform exp(-s^(1/th))
        alpha = 1.0 / th
        ang = rng.uniform(0.0, math.pi, n)
        w = rng.exponential(size=n)
        frailty = (
            np.sin(alpha * ang) / np.sin(ang) ** (1.0 / alpha)
            * (np.sin((1.0 - alpha) * ang) / w) ** ((1.0 - alpha) / alpha)
        )
        e1 = rng.exponential(size=n)
        e2 = rng.exponential(size=n)
        u = np.exp(-((e1 / frailty) ** alpha))
        v = np.exp(-((e2 / frailty) ** alpha))
        return u, v


def _cdf_by_conditional_integral(cop: Copula, u, v):
    """``C(u, v)`` as the integral of ``partial2(u, s)`` over ``s`` in ``[0, v]``."""

    def one(uu, vv):
        if uu <= 0.0 or vv <= 0.0:
            return 0.0
        if uu >= 1.0:
            return vv
        if vv >= 1.0:
            return uu
        knee = cop._partial2_knee(uu)
        pts = [knee] if knee is not None and 0.0 < knee < vv else None
        with warnings.catch_warnings():
            # roundoff complaints at the 1e-15 floor are harmless here
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(
                lambda s: float(cop.partial2(uu, s)), 0.0, vv,
                epsabs=1e-15, epsrel=1e-12, limit=200, points=pts,
            )
        return min(max(val, 0.0), min(uu, vv))

    u = np.asarray(u, float)
    v = np.asarray(v, float)
    return _out(np.vectorize(one, otypes=[float])(u, v), u, v)


@dataclass(frozen=True)
class GaussianCopula(Copula):
    rho: float
    family = "gaussian"
    n_params = 1
    radially_symmetric = True

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise DomainError("Gaussian rho must lie in (-1, 1)")

    @property
    def params(self):
        return (self.rho,)

    def cdf(self, u, v):
        # Owen's T representation of the bivariate normal cdf
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        h = special.ndtri(u)
        k = special.ndtri(v)
        same_side = (h >= 0) == (k >= 0)
        h = np.where(h == 0, _TINY, h)
        k = np.where(k == 0, _TINY, k)
        s = math.sqrt(1.0 - self.rho**2)
        with np.errstate(over="ignore", invalid="ignore"):
            ah = (k - self.rho * h) / (h * s)
            ak = (h - self.rho * k) / (k * s)
            c = (
                0.5 * (special.ndtr(h) + special.ndtr(k))
                - special.owens_t(h, ah) - special.owens_t(k, ak)
                - np.where(same_side, 0.0, 0.5)
            )
        c = np.clip(c, np.maximum(u + v - 1.0, 0.0), np.minimum(u, v))
        c = np.where((u <= 0) | (v <= 0), 0.0, np.where(u >= 1, v, np.where(v >= 1, u, c)))
        return _out(c, u, v)

    def partial2(self, u, v):
        u = np.asarray(u, float)
        r = self.rho
        z = (special.ndtri(u) - r * special.ndtri(_clip_open(v))) / math.sqrt(1.0 - r * r)
        return _out(special.ndtr(z), u, v)

    def logpdf(self, u, v):
        a = special.ndtri(_clip_open(u))
        b = special.ndtri(_clip_open(v))
        r = self.rho
        q = 1.0 - r * r
        return -0.5 * math.log(q) - (r * r * (a * a + b * b) - 2.0 * r * a * b) / (2.0 * q)

    def pdf(self, u, v):
        return np.exp(self.logpdf(u, v))

    def kendall_tau(self):
        return 2.0 / math.pi * math.asin(self.rho)

    def sample(self, n, seed=None):
        rng = make_rng(seed)
        z1 = rng.standard_normal(n)
        z2 = self.rho * z1 + math.sqrt(1.0 - self.rho**2) * rng.standard_normal(n)
        return special.ndtr(z1), special.ndtr(z2)


def _bvt_cdf(nu, rho, u, v):
    """Bivariate t copula cdf by vectorized adaptive quadrature in the t scale.

    ``C(u, v) = int_{-inf}^{b} T_{nu+1}((a - rho z) / s(z)) f_nu(z) dz`` with
    ``a, b`` the t quantiles of ``u, v``, mapped to [0, 1] by ``z = b - y / (1 - y)``.
    """
    a = special.stdtrit(nu, u)
    b = special.stdtrit(nu, v)
    logc = special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * math.log(nu * math.pi)
    q = 1.0 - rho * rho

    def f(y):
        z = b - y / (1.0 - y)
        s = np.sqrt(q * (nu + z * z) / (nu + 1.0))
        dens = np.exp(logc - (nu + 1) / 2 * np.log1p(z * z / nu))
        return special.stdtr(nu + 1.0, (a - rho * z) / s) * dens / (1.0 - y) ** 2

    val, _ = integrate.quad_vec(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, norm="max", limit=2000)
    return np.clip(val, np.maximum(u + v - 1.0, 0.0), np.minimum(u, v))


@dataclass(frozen=True)
class StudentTCopula(Copula):
    """Student t copula with correlation ``rho`` and real ``nu > 0``."""

    rho: float
    nu: float
    family = "student_t"
    n_params = 2
    radially_symmetric = True

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise DomainError("t-copula rho must lie in (-1, 1)")
        if not self.nu > 0:
            raise DomainError("t-copula nu must be positive")

    @property
    def params(self):
        return (self.rho, self.nu)

    def cdf(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        ub, vb = np.broadcast_arrays(u, v)
        # exchangeable: order the arguments so C(u, v) and C(v, u) agree bitwise
        hi = np.maximum(ub, vb).ravel()
        lo = np.minimum(ub, vb).ravel()
        out = np.where(lo >= 1.0, 1.0, np.where(hi >= 1.0, lo, 0.0))
        inner = (lo > 0.0) & (hi < 1.0)
        if np.any(inner):
            out[inner] = _bvt_cdf(self.nu, self.rho, hi[inner], lo[inner])
        return _out(out.reshape(ub.shape), u, v)

    def partial2(self, u, v):
        u = np.asarray(u, float)
        nu, r = self.nu, self.rho
        a = special.stdtrit(nu, u)
        b = special.stdtrit(nu, _clip_open(v))
        scale = np.sqrt((1.0 - r * r) * (nu + b * b) / (nu + 1.0))
        with np.errstate(invalid="ignore"):
            d = special.stdtr(nu + 1.0, (a - r * b) / scale)
        d = np.where(u <= 0.0, 0.0, np.where(u >= 1.0, 1.0, d))
        return _out(d, u, v)

    def _partial2_knee(self, u):
        if self.rho == 0.0:
            return None
        return float(special.stdtr(self.nu, special.stdtrit(self.nu, u) / self.rho))

    def logpdf(self, u, v):
        nu, r = self.nu, self.rho
        a = special.stdtrit(nu, _clip_open(u))
        b = special.stdtrit(nu, _clip_open(v))
        q = 1.0 - r * r
        log_joint = (
            special.gammaln((nu + 2) / 2) - special.gammaln(nu / 2)
            - math.log(nu * math.pi) - 0.5 * math.log(q)
            - (nu + 2) / 2 * np.log1p((a * a - 2 * r * a * b + b * b) / (nu * q))
        )
        log_marg = (
            special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * math.log(nu * math.pi)
        )
        log_fa = log_marg - (nu + 1) / 2 * np.log1p(a * a / nu)
        log_fb = log_marg - (nu + 1) / 2 * np.log1p(b * b / nu)
        return log_joint - log_fa - log_fb

    def pdf(self, u, v):
        return np.exp(self.logpdf(u, v))

    def kendall_tau(self):
        return 2.0 / math.pi * math.asin(self.rho)

    def tail_dependence(self):
        nu, r = self.nu, self.rho
        lam = 2.0 * special.stdtr(nu + 1.0, -math.sqrt((nu + 1.0) * (1.0 - r) / (1.0 + r)))
        return (float(lam), float(lam))

    def sample(self, n, seed=None):
        rng = make_rng(seed)
        z1 = rng.standard_normal(n)
        z2 = self.rho * z1 + math.sqrt(1.0 - self.rho**2) * rng.standard_normal(n)
        w = np.sqrt(rng.chisquare(self.nu, n) / self.nu)
        return special.stdtr(self.nu, z1 / w), special.stdtr(self.nu, z2 / w)


@dataclass(frozen=True)
class TransposedCopula(Copula):
    """Copula of ``(V, U)`` when ``(U, V) ~ base``."""

    base: Copula

    @property
    def family(self):
        return f"transposed_{self.base.family}"

    @property
    def symmetric(self):
        return self.base.symmetric

    def cdf(self, u, v):
        return self.base.cdf(v, u)

    def tail(self, u, v):
        return self.base.tail(v, u)

    def partial2(self, u, v):
        return self.base.partial1(v, u)

    def partial1(self, u, v):
        return self.base.partial2(v, u)

    def pdf(self, u, v):
        return self.base.pdf(v, u)

    def kendall_tau(self):
        return self.base.kendall_tau()

    def tail_dependence(self):
        return self.base.tail_dependence()

    def sample(self, n, seed=None):
        u, v = self.base.sample(n, seed)
        return v, u

    def transposed(self):
        return self.base


#: Family order; also the deterministic AIC tie-break order.
FAMILIES = {
    "independence": IndependenceCopula,
    "comonotone": ComonotoneCopula,
    "fgm": FGMCopula,
    "gumbel": GumbelCopula,
    "gaussian": GaussianCopula,
    "student_t": StudentTCopula,
}


def make_copula(family: str, *params) -> Copula:
    """Build a copula from a family name such as ``"gumbel"`` and parameters."""
    try:
        cls = FAMILIES[family.lower()]
    except KeyError:
        raise DomainError(f"unknown copula family {family!r}") from None
    return cls(*params)


def sample_conditional_inversion(cop: Copula, n: int, seed=None, iters: int = 60):
    """Sample by drawing ``V`` uniform and inverting ``partial2(., V)`` by bisection.

    Generic and slow; the family ``sample`` methods use exact constructions.
    """
    rng = make_rng(seed)
    v = rng.random(n)
    w = rng.random(n)
    lo = np.zeros(n)
    hi = np.ones(n)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = np.asarray(cop.partial2(mid, v)) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi), v


def pseudo_observations(x, y):
    """Rank-transform paired data into the open unit square (ranks / (n + 1))."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be 1-d arrays of equal length")
    n = x.size
    return stats.rankdata(x) / (n + 1.0), stats.rankdata(y) / (n + 1.0)


def read_pseudo_csv(path):
    """Read a two-column ``u,v`` CSV with header."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames[:2]] != ["u", "v"]:
            raise DomainError(f"{path}: expected header 'u,v'")
        rows = [(float(r["u"]), float(r["v"])) for r in reader]
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    u, v = arr[:, 0], arr[:, 1]
    _check_pseudo(u, v, min_n=1)
    return u, v


def write_pseudo_csv(path, u, v):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "v"])
        for a, b in zip(u, v):
            w.writerow([repr(float(a)), repr(float(b))])


def _check_pseudo(u, v, min_n=50):
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    if u.shape != v.shape or u.ndim != 1:
        raise DomainError("pseudo-observations must be paired 1-d arrays")
    if u.size < min_n:
        raise DomainError(f"need at least {min_n} pseudo-observations, got {u.size}")
    if np.any((u <= 0) | (u >= 1) | (v <= 0) | (v >= 1)):
        raise DomainError("pseudo-observations must lie strictly inside (0, 1)^2")
    return u, v


def loglik(cop: Copula, u, v) -> float:
    """Copula log-likelihood of pseudo-observations."""
    if isinstance(cop, IndependenceCopula):
        return 0.0
    return float(np.sum(cop.logpdf(u, v)))


def _tau_start(family, tau):
    tau = float(np.clip(tau, -0.95, 0.95))
    if family == "fgm":
        return (float(np.clip(4.5 * tau, -1.0, 1.0)),)
    if family == "gumbel":
        return (1.0 / (1.0 - max(tau, 0.0)),)
    if family == "gaussian":
        return (math.sin(math.pi * tau / 2.0),)
    return (math.sin(math.pi * tau / 2.0), 8.0)


_NU_LO, _NU_HI = 2.0, 30.0


def fit_mle(family: str, u, v, *, maxiter: int = 4000) -> Copula:
    """Maximum-likelihood fit of one family to pseudo-observations.

    One-parameter families use bounded Brent search; the Student t copula
    uses Nelder-Mead on ``(atanh rho, logit nu)`` with ``nu`` in [2, 30].
    The returned fit never has lower likelihood than the Kendall-tau start.

    Raises
    ------
    NonConvergence
        When the optimizer stops without converging; ``best`` holds the best
        copula found.
    """
    u, v = _check_pseudo(u, v)
    family = family.lower()
    if family == "independence":
        return IndependenceCopula()
    if family == "comonotone":
        raise DomainError("the comonotone copula has no density and cannot be fitted")
    cls = FAMILIES[family]
    tau = stats.kendalltau(u, v)[0]
    start = cls(*_tau_start(family, tau))
    ll_start = loglik(start, u, v)

    if family in ("fgm", "gumbel", "gaussian"):
        bounds = {"fgm": (-1.0, 1.0), "gumbel": (1.0, 50.0), "gaussian": (-0.999, 0.999)}[family]

        def nll(p):
            return -loglik(cls(p), u, v)

        res = optimize.minimize_scalar(
            nll, bounds=bounds, method="bounded", options={"xatol": 1e-10, "maxiter": maxiter}
        )
        best = cls(float(res.x))
        if not res.success:
            raise NonConvergence(f"{family} MLE did not converge: {res.message}", best=best)
    else:
        def unpack(z):
            rho = math.tanh(z[0])
            nu = _NU_LO + (_NU_HI - _NU_LO) * float(special.expit(z[1]))
            return rho, nu

        def nll(z):
            rho, nu = unpack(z)
            return -loglik(StudentTCopula(rho, nu), u, v)

        r0, nu0 = start.params
        z0 = np.array([math.atanh(r0), special.logit((nu0 - _NU_LO) / (_NU_HI - _NU_LO))])
        res = optimize.minimize(
            nll, z0, method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": maxiter},
        )
        best = StudentTCopula(*unpack(res.x))
        if not res.success:
            raise NonConvergence(f"t-copula MLE did not converge: {res.message}", best=best)

    if loglik(best, u, v) < ll_start:
        return start
    return best


def aic_table(candidates, u, v) -> list[dict]:
    """Fit each candidate family; rows sorted by (AIC, family order).

    Candidates that fail to converge are dropped with a warning.
    """
    order = list(FAMILIES)
    rows = []
    for fam in candidates:
        fam = fam.lower()
        if fam == "comonotone":
            warnings.warn("comonotone copula skipped: no likelihood", RuntimeWarning)
            continue
        try:
            cop = fit_mle(fam, u, v)
        except NonConvergence as exc:
            warnings.warn(f"{fam} excluded from AIC selection: {exc}", RuntimeWarning)
            continue
        ll = loglik(cop, u, v)
        k = cop.n_params
        rows.append({"family": fam, "copula": cop, "loglik": ll, "k": k, "aic": 2 * k - 2 * ll})
    rows.sort(key=lambda r: (r["aic"], order.index(r["family"])))
    return rows


def aic_select(candidates, u, v) -> Copula:
    """Return the AIC-minimizing fitted copula among ``candidates``."""
    rows = aic_table(candidates, u, v)
    if not rows:
        raise NonConvergence("no candidate copula could be fitted")
    return rows[0]["copula"]
