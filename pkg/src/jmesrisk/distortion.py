"""
Conditional distortion curves.

Conditioning on ``{U > alpha, V > beta}`` turns the law of ``V`` into a
distortion of the uniform law:

    hbar(t) = 1 - C̄(alpha, t) / C̄(alpha, beta)    for t > beta, else 0,

so that ``E[Y | U > alpha, V > beta] = int G^{-1}(t) dhbar(t)``.  The
unconditional tail curve ``max((t - beta) / (1 - beta), 0)`` and the dual
``h(t) = 1 - hbar(1 - t)`` are provided as well.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._result import OrderCheckResult
from .copulas import Copula, IndependenceCopula
from .errors import DegenerateConditioning, DomainError

__all__ = ["DistortionCurve", "DEGENERATE_MASS", "compose_convexity_check", "l_alpha"]

#: Joint tail mass below which the conditioning event is treated as empty.
DEGENERATE_MASS = 1e-12

_KINDS = ("joint_tail", "marginal_tail", "dual")


def _out(x, like):
    if np.ndim(like) == 0:
        return float(np.asarray(x).reshape(()))
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class DistortionCurve:
    """One of the conditional distortions induced by ``{U > alpha, V > beta}``.

    Parameters
    ----------
    copula : Copula
        Copula of ``(U, V)``; ignored for ``kind="marginal_tail"``.
    alpha, beta : float
        Conditioning levels in ``[0, 1)``.
    kind : {"joint_tail", "marginal_tail", "dual"}
        ``joint_tail`` is ``hbar_{alpha,beta}``, ``marginal_tail`` is the
        linear ``hbar_beta`` and ``dual`` is ``h_{alpha,beta}``.
    """

    copula: Copula
    alpha: float
    beta: float
    kind: str = "joint_tail"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"kind must be one of {_KINDS}")
        for name in ("alpha", "beta"):
            val = float(getattr(self, name))
            if not 0.0 <= val < 1.0:
                raise DomainError(f"{name} must lie in [0, 1), got {val}")
            object.__setattr__(self, name, val)
        if self.kind == "marginal_tail":
            mass = 1.0 - self.beta
        else:
            mass = float(self.copula.tail(self.alpha, self.beta))
        if mass < DEGENERATE_MASS:
            raise DegenerateConditioning(
                f"P(U > {self.alpha}, V > {self.beta}) = {mass:.3e} is numerically zero"
            )
        object.__setattr__(self, "_mass", mass)

    @property
    def mass(self) -> float:
        """Probability of the conditioning event."""
        return self._mass

    @classmethod
    def marginal(cls, beta: float) -> DistortionCurve:
        return cls(IndependenceCopula(), 0.0, beta, "marginal_tail")

    def _hbar(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "marginal_tail":
            return np.clip((t - self.beta) / (1.0 - self.beta), 0.0, 1.0)
        tt = np.clip(t, self.beta, 1.0)
        val = 1.0 - np.asarray(self.copula.tail(self.alpha, tt)) / self._mass
        return np.where(t <= self.beta, 0.0, np.clip(val, 0.0, 1.0))

    def _dhbar(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "marginal_tail":
            return np.where(t > self.beta, 1.0 / (1.0 - self.beta), 0.0)
        tt = np.clip(t, self.beta, 1.0)
        d = (1.0 - np.asarray(self.copula.partial2(self.alpha, tt))) / self._mass
        return np.where(t > self.beta, np.maximum(d, 0.0), 0.0)

    def eval(self, t):
        """Value of the curve at ``t`` in [0, 1]."""
        self._check_t(t)
        if self.kind == "dual":
            return _out(1.0 - self._hbar(1.0 - np.asarray(t, float)), t)
        return _out(self._hbar(t), t)

    __call__ = eval

    def derivative(self, t):
        """Density of the curve, ``(1 - partial2(alpha, t)) / C̄(alpha, beta)`` for ``hbar``."""
        self._check_t(t)
        if self.kind == "dual":
            return _out(self._dhbar(1.0 - np.asarray(t, float)), t)
        return _out(self._dhbar(t), t)

    def inverse(self, p, tol: float = 1e-12):
        """Generalized inverse ``inf{t >= beta : curve(t) >= p}``.

        For the dual curve the support starts at 0 instead of ``beta``.
        """
        p = np.asarray(p, dtype=float)
        if np.any((p < 0.0) | (p > 1.0)):
            raise DomainError("p must lie in [0, 1]")
        if self.kind == "marginal_tail":
            return _out(self.beta + (1.0 - self.beta) * p, p)
        pp = np.atleast_1d(p)
        if self.kind == "dual":
            lo = np.zeros_like(pp)
            hi = np.full_like(pp, 1.0 - self.beta)
            f = lambda t: 1.0 - self._hbar(1.0 - t)
        else:
            # warm start: split the support at the independence answer
            f = self._hbar
            guess = self.beta + (1.0 - self.beta) * pp
            above = f(guess) >= pp
            lo = np.where(above, self.beta, guess)
            hi = np.where(above, guess, 1.0)
        while np.any(hi - lo > tol):
            mid = 0.5 * (lo + hi)
            ok = f(mid) >= pp
            hi = np.where(ok, mid, hi)
            lo = np.where(ok, lo, mid)
        start = 0.0 if self.kind == "dual" else self.beta
        res = np.where(pp <= f(np.full_like(pp, start)), start, hi)
        return _out(res.reshape(p.shape), p)

    @staticmethod
    def _check_t(t):
        t = np.asarray(t, dtype=float)
        if np.any((t < 0.0) | (t > 1.0)):
            raise DomainError("t must lie in [0, 1]")


def compose_convexity_check(outer: DistortionCurve, inner: DistortionCurve,
                            n: int = 1001, tol: float = 1e-9) -> OrderCheckResult:
    """Midpoint-convexity check of ``outer(inner^{-1}(s))`` on ``n`` points of [0, 1].

    Both curves must share the copula and ``beta``.
    """
    if outer.beta != inner.beta or outer.copula != inner.copula:
        raise DomainError("curves must share the copula and beta")
    s = np.linspace(0.0, 1.0, n)
    f = np.asarray(outer.eval(np.asarray(inner.inverse(s))))
    excess = f[1:-1] - 0.5 * (f[:-2] + f[2:])
    bad = np.flatnonzero(excess > tol)
    witnesses = [
        {"s": [float(s[i]), float(s[i + 1]), float(s[i + 2])],
         "f": [float(f[i]), float(f[i + 1]), float(f[i + 2])],
         "excess": float(excess[i])}
        for i in bad
    ]
    return OrderCheckResult.from_witnesses(
        "convexity", witnesses, s, tol,
        details={"alpha_outer": outer.alpha, "alpha_inner": inner.alpha, "beta": outer.beta},
    )


def l_alpha(c1: Copula, c2: Copula, alpha: float, t):
    """Tail-function ratio ``C̄_2(alpha, t) / C̄_1(alpha, t)``."""
    t = np.asarray(t, dtype=float)
    den = np.asarray(c1.tail(alpha, t), dtype=float)
    if np.any(den < DEGENERATE_MASS):
        raise DegenerateConditioning("C̄_1(alpha, t) is numerically zero")
    return _out(np.asarray(c2.tail(alpha, t)) / den, t)
