"""
Conditional tail risk measures of ``Y`` given stress on ``X``.

All measures are evaluated as quantile integrals of ``Y`` against the
distortion induced by the copula (see :mod:`jmesrisk.distortion`):

* ``JMES_{a,b} = E[Y | X > VaR_a(X), Y > VaR_b(Y)] = int G^{-1} dhbar_{a,b}``
* ``MES_a = JMES_{a,0}``
* ``CoVaR_{a,b} = G^{-1}(t*)`` with ``C̄(a, t*) = (1 - a)(1 - b)``
* ``CoES_{a,b} = JMES_{a,t*}``, the mean of ``Y`` beyond CoVaR given ``X`` stressed.

The comonotone copula is routed to its analytic limit ``ES_{max(a,b)}``.
"""
from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .copulas import ComonotoneCopula, Copula
from .distortion import DistortionCurve
from .distributions import QUAD_SETTINGS, Marginal
from .errors import (
    DegenerateConditioning,
    DomainError,
    JmesError,
    NonintegrableTail,
    QuadratureWarning,
    ZeroDenominator,
)

__all__ = [
    "BivariateModel",
    "RiskReport",
    "MEASURE_NAMES",
    "var_y",
    "es_y",
    "mes",
    "covar",
    "covar_level",
    "coes",
    "jmes",
    "delta_jmes",
    "delta_jmes_simple",
    "delta_r_jmes",
    "delta_r_jmes_simple",
    "median_baseline_variants",
    "full_report",
]

MEASURE_NAMES = (
    "E", "VaR", "ES", "CoVaR", "CoES", "MES", "JMES",
    "dCoVaR", "dmCoVaR", "dMES", "dmMES", "dJMES", "dmJMES",
    "drCoVaR", "drmCoVaR", "drMES", "drmMES", "drJMES", "drmJMES",
)

#: Baselines with absolute value at or below this are treated as zero.
ZERO_DENOMINATOR = 1e-12

_MEDIAN = 0.5


@dataclass(frozen=True)
class BivariateModel:
    """Joint law of ``(X, Y)`` with ``U = F(X)`` as the copula's first argument."""

    x_marginal: Marginal
    y_marginal: Marginal
    copula: Copula

    def swap(self) -> BivariateModel:
        """Model of ``(Y, X)``."""
        return BivariateModel(self.y_marginal, self.x_marginal, self.copula.transposed())


def _check_level(name, p, closed_low=True):
    p = float(p)
    ok = (0.0 <= p < 1.0) if closed_low else (0.0 < p < 1.0)
    if not ok:
        raise DomainError(f"{name} must lie in {'[0, 1)' if closed_low else '(0, 1)'}, got {p}")
    return p


def var_y(b: BivariateModel, p: float) -> float:
    """``VaR_p[Y]``."""
    return float(b.y_marginal.quantile(p))


def es_y(b: BivariateModel, p: float) -> float:
    """``ES_p[Y]``."""
    return float(b.y_marginal.es(p))


def jmes(b: BivariateModel, alpha: float, beta: float) -> float:
    """Joint marginal expected shortfall ``E[Y | U > alpha, V > beta]``.

    Raises
    ------
    DegenerateConditioning
        If ``P(U > alpha, V > beta)`` is numerically zero.
    NonintegrableTail
        If ``Y`` has no finite upper tail mean.
    """
    alpha = _check_level("alpha", alpha)
    beta = _check_level("beta", beta)
    y = b.y_marginal
    if not y.upper_tail_finite():
        raise NonintegrableTail(f"{y!r} has an infinite upper tail mean")
    if isinstance(b.copula, ComonotoneCopula):
        return float(y.es(max(alpha, beta)))
    curve = DistortionCurve(b.copula, alpha, beta)
    kinks = [alpha] if alpha > beta else []
    return float(y.quantile_integral(curve.eval, curve.derivative, lo=beta, points=kinks))


def mes(b: BivariateModel, alpha: float) -> float:
    """Marginal expected shortfall ``E[Y | U > alpha]``."""
    return jmes(b, alpha, 0.0)


def covar_level(b: BivariateModel, alpha: float, beta: float) -> float:
    """Probability level ``t*`` solving ``C̄(alpha, t*) = (1 - alpha)(1 - beta)``.

    ``t*`` is the ``beta``-quantile of ``V`` given ``U > alpha``.
    """
    alpha = _check_level("alpha", alpha)
    beta = _check_level("beta", beta, closed_low=False)
    cop = b.copula
    if 1.0 - alpha < 1e-12:
        raise DegenerateConditioning(f"P(U > {alpha}) is numerically zero")
    target = (1.0 - alpha) * (1.0 - beta)
    if isinstance(cop, ComonotoneCopula):
        return 1.0 - target
    f = lambda t: float(cop.tail(alpha, t)) - target
    lo = beta if f(beta) >= 0.0 else 0.0
    if f(lo) == 0.0:
        return lo
    return float(optimize.brentq(f, lo, 1.0, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500))


def covar(b: BivariateModel, alpha: float, beta: float) -> float:
    """``CoVaR_{alpha,beta}[Y|X] = VaR_beta[Y | X > VaR_alpha[X]]``."""
    return float(b.y_marginal.quantile(covar_level(b, alpha, beta)))


def coes(b: BivariateModel, alpha: float, beta: float) -> float:
    """``CoES_{alpha,beta}[Y|X]``, the average of ``CoVaR_{alpha,s}`` over ``s > beta``."""
    return jmes(b, alpha, covar_level(b, alpha, beta))


def delta_jmes(b: BivariateModel, alpha1: float, alpha2: float, beta: float) -> float:
    """``JMES_{alpha2,beta} - JMES_{alpha1,beta}`` for ``alpha1 <= alpha2``."""
    if not alpha1 <= alpha2:
        raise DomainError("need alpha1 <= alpha2")
    if alpha1 == alpha2:
        return 0.0
    return jmes(b, alpha2, beta) - jmes(b, alpha1, beta)


def delta_jmes_simple(b: BivariateModel, alpha: float, beta: float) -> float:
    """``JMES_{alpha,beta} - ES_beta``."""
    return jmes(b, alpha, beta) - es_y(b, beta)


def _ratio(num, den, what):
    if abs(den) <= ZERO_DENOMINATOR:
        raise ZeroDenominator(f"{what} baseline is zero")
    return num / den


def delta_r_jmes(b: BivariateModel, alpha1: float, alpha2: float, beta: float) -> float:
    """``(JMES_{alpha2,beta} - JMES_{alpha1,beta}) / JMES_{alpha1,beta}``."""
    if not alpha1 <= alpha2:
        raise DomainError("need alpha1 <= alpha2")
    base = jmes(b, alpha1, beta)
    top = base if alpha1 == alpha2 else jmes(b, alpha2, beta)
    return _ratio(top - base, base, f"JMES_{alpha1},{beta}")


def delta_r_jmes_simple(b: BivariateModel, alpha: float, beta: float) -> float:
    """``(JMES_{alpha,beta} - ES_beta) / ES_beta``."""
    base = es_y(b, beta)
    return _ratio(jmes(b, alpha, beta) - base, base, f"ES_{beta}")


# --- reports -----------------------------------------------------------------

# contribution measures: name -> (measure, baseline)
_DELTAS = {
    "dCoVaR": ("CoVaR", "VaR"),
    "dmCoVaR": ("CoVaR", "CoVaR@0.5"),
    "dMES": ("MES", "E"),
    "dmMES": ("MES", "MES@0.5"),
    "dJMES": ("JMES", "ES"),
    "dmJMES": ("JMES", "JMES@0.5"),
}


@dataclass
class RiskReport:
    """All conditional measures of one pair at one ``(alpha, beta)``.

    ``entries`` maps names from :data:`MEASURE_NAMES` to values; a name that
    could not be computed is absent from ``entries`` and explained in
    ``flags``.  ``metadata`` records the model and quadrature settings.
    """

    alpha: float
    beta: float
    entries: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.entries[name]

    def get(self, name, default=None):
        return self.entries.get(name, default)

    def flag(self, measure, kind, message=""):
        self.flags.append({"measure": measure, "flag": kind, "message": message})

    def flags_for(self, measure):
        return [f for f in self.flags if f["measure"] == measure]

    def to_dict(self) -> dict:
        row = {"alpha": self.alpha, "beta": self.beta}
        for name in MEASURE_NAMES:
            row[name] = self.entries.get(name)
        row["flags"] = list(self.flags)
        row["metadata"] = self.metadata
        return row

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def csv_row(self) -> dict:
        row = {"alpha": self.alpha, "beta": self.beta}
        for name in MEASURE_NAMES:
            val = self.entries.get(name)
            row[name] = "" if val is None else repr(float(val))
        row["flags"] = ";".join(f"{f['measure']}:{f['flag']}" for f in self.flags)
        return row

    @staticmethod
    def csv_header():
        return ["alpha", "beta", *MEASURE_NAMES, "flags"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.csv_header(), lineterminator="\n")
        w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()


_FLAG_NAMES = {
    NonintegrableTail: "NonintegrableTail",
    DegenerateConditioning: "DegenerateConditioning",
    ZeroDenominator: "ZeroDenominator",
}


def _flag_name(exc):
    for cls, name in _FLAG_NAMES.items():
        if isinstance(exc, cls):
            return name
    return type(exc).__name__


def _evaluate(report: RiskReport, store: dict, name: str, fn):
    """Compute one entry, converting failures and quadrature warnings into flags."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", QuadratureWarning)
        try:
            store[name] = float(fn())
        except (JmesError, ArithmeticError) as exc:
            report.flag(name, _flag_name(exc), str(exc))
            return
    if any(issubclass(w.category, QuadratureWarning) for w in caught):
        report.flag(name, "QuadratureFallback", str(caught[0].message))


def _model_metadata(b: BivariateModel) -> dict:
    return {
        "x_marginal": repr(b.x_marginal),
        "y_marginal": repr(b.y_marginal),
        "copula": repr(b.copula),
        "quadrature": dict(QUAD_SETTINGS),
        "covar_convention": "X > VaR_alpha(X)",
        "median_baseline": _MEDIAN,
    }


def _fill_deltas(report: RiskReport, values: dict, names):
    for name in names:
        num_key, base_key = _DELTAS[name]
        if num_key not in values or base_key not in values:
            missing = num_key if num_key not in values else base_key
            report.flag(name, "MissingInput", f"{missing} unavailable")
            report.flag("dr" + name[1:], "MissingInput", f"{missing} unavailable")
            continue
        diff = values[num_key] - values[base_key]
        report.entries[name] = diff
        base = values[base_key]
        rname = "dr" + name[1:]
        if abs(base) <= ZERO_DENOMINATOR:
            report.flag(rname, "ZeroDenominator", f"{base_key} = {base!r}")
            continue
        report.entries[rname] = diff / base
        if base < 0:
            report.flag(rname, "NonPositiveDenominator", f"{base_key} = {base!r}")


def median_baseline_variants(b: BivariateModel, alpha: float, beta: float) -> RiskReport:
    """Differences against the median-stress baseline ``alpha = 0.5``.

    Returns a partial report with ``dmCoVaR, drmCoVaR, dmMES, drmMES,
    dmJMES, drmJMES`` plus the plain ``dCoVaR, dMES`` and their ratios.
    """
    report = RiskReport(alpha, beta, metadata=_model_metadata(b))
    values = {}
    _evaluate(report, values, "E", lambda: b.y_marginal.mean())
    _evaluate(report, values, "VaR", lambda: var_y(b, beta))
    _evaluate(report, values, "CoVaR", lambda: covar(b, alpha, beta))
    _evaluate(report, values, "MES", lambda: mes(b, alpha))
    _evaluate(report, values, "JMES", lambda: jmes(b, alpha, beta))
    _evaluate(report, values, "CoVaR@0.5", lambda: covar(b, _MEDIAN, beta))
    _evaluate(report, values, "MES@0.5", lambda: mes(b, _MEDIAN))
    _evaluate(report, values, "JMES@0.5", lambda: jmes(b, _MEDIAN, beta))
    _fill_deltas(report, values, ["dCoVaR", "dmCoVaR", "dMES", "dmMES", "dmJMES"])
    return report


def full_report(b: BivariateModel, alpha: float, beta: float) -> RiskReport:
    """Every measure of :data:`MEASURE_NAMES` at ``(alpha, beta)``.

    Failures never abort the report: each missing entry carries a flag.
    """
    alpha = _check_level("alpha", alpha, closed_low=False)
    beta = _check_level("beta", beta, closed_low=False)
    report = RiskReport(alpha, beta, metadata=_model_metadata(b))
    if not b.y_marginal.continuous:
        report.flag("*", "DiscreteMargin", "quantile-integral representation applied to a step quantile")
    values = {}
    _evaluate(report, values, "E", lambda: b.y_marginal.mean())
    _evaluate(report, values, "VaR", lambda: var_y(b, beta))
    _evaluate(report, values, "ES", lambda: es_y(b, beta))
    _evaluate(report, values, "CoVaR", lambda: covar(b, alpha, beta))
    _evaluate(report, values, "CoES", lambda: coes(b, alpha, beta))
    _evaluate(report, values, "MES", lambda: mes(b, alpha))
    _evaluate(report, values, "JMES", lambda: jmes(b, alpha, beta))
    for name in ("E", "VaR", "ES", "CoVaR", "CoES", "MES", "JMES"):
        if name in values:
            report.entries[name] = values[name]
    _evaluate(report, values, "CoVaR@0.5", lambda: covar(b, _MEDIAN, beta))
    _evaluate(report, values, "MES@0.5", lambda: mes(b, _MEDIAN))
    _evaluate(report, values, "JMES@0.5", lambda: jmes(b, _MEDIAN, beta))
    _fill_deltas(report, values, list(_DELTAS))
    report.entries = {k: report.entries[k] for k in MEASURE_NAMES if k in report.entries}
    return report
