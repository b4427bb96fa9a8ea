import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from jmesrisk.copulas import (
    ComonotoneCopula,
    FGMCopula,
    GaussianCopula,
    GumbelCopula,
    IndependenceCopula,
    StudentTCopula,
)
from jmesrisk.distributions import ComonotoneSum, Gamma, LogNormal, Normal, ShiftScale, StudentT, es
from jmesrisk.errors import DomainError, ZeroDenominator
from jmesrisk.measures import (
    MEASURE_NAMES,
    BivariateModel,
    RiskReport,
    coes,
    covar,
    covar_level,
    delta_jmes,
    delta_jmes_simple,
    delta_r_jmes,
    delta_r_jmes_simple,
    es_y,
    full_report,
    jmes,
    median_baseline_variants,
    mes,
    var_y,
)
from jmesrisk.oracle import mc_covar, mc_jmes

N01 = Normal()


def gauss(rho, y=N01):
    return BivariateModel(N01, y, GaussianCopula(rho))


def brute_jmes(b, alpha, beta):
    """E[Y | U > alpha, V > beta] as a direct integral of G^{-1}(v) P(U > alpha | V = v)."""
    f = lambda v: float(b.y_marginal.quantile(v)) * (1.0 - float(b.copula.partial2(alpha, v)))
    num = integrate.quad(f, beta, 1.0, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    return num / float(b.copula.tail(alpha, beta))


# --- fixtures from closed forms and the oracle -------------------------------------------------

def test_jmes_gaussian_fixture():
    assert jmes(gauss(0.75), 0.95, 0.95) == pytest.approx(2.190, abs=0.005)


def test_mes_gaussian_closed_form():
    z = stats.norm.ppf(0.95)
    assert mes(gauss(0.75), 0.95) == pytest.approx(0.75 * stats.norm.pdf(z) / 0.05, abs=1e-9)
    assert mes(gauss(0.75), 0.95) == pytest.approx(1.5470, abs=1e-4)


@pytest.mark.parametrize("b", [gauss(0.5, Gamma(2.0, 2.5)), BivariateModel(N01, LogNormal(0, 0.5), GumbelCopula(2.0)),
                               BivariateModel(N01, Gamma(3.0, 1.0), StudentTCopula(0.5, 4.0)),
                               BivariateModel(N01, Normal(1, 2), FGMCopula(-0.6))], ids=lambda b: repr(b.copula))
def test_jmes_against_direct_integral(b):
    for a, be in [(0.5, 0.5), (0.9, 0.8), (0.95, 0.97)]:
        assert jmes(b, a, be) == pytest.approx(brute_jmes(b, a, be), rel=1e-8)


def test_independence_report():
    rep = full_report(BivariateModel(N01, N01, IndependenceCopula()), 0.95, 0.95)
    z = stats.norm.ppf(0.95)
    es95 = stats.norm.pdf(z) / 0.05
    assert rep["E"] == 0.0
    assert rep["VaR"] == pytest.approx(1.6449, abs=1e-4)
    assert rep["ES"] == pytest.approx(es95, abs=1e-10)
    assert rep["MES"] == pytest.approx(0.0, abs=1e-10)
    assert rep["JMES"] == pytest.approx(es95, abs=1e-9)
    assert rep["CoVaR"] == pytest.approx(z, abs=1e-9)
    assert rep["CoES"] == pytest.approx(es95, abs=1e-9)
    for name in ("dCoVaR", "dmCoVaR", "dMES", "dmMES", "dJMES", "dmJMES"):
        assert rep[name] == pytest.approx(0.0, abs=1e-8)


def test_independence_values_for_any_alpha():
    b = BivariateModel(N01, Gamma(2.0, 1.0), IndependenceCopula())
    for a in (0.1, 0.6, 0.97):
        assert mes(b, a) == pytest.approx(2.0, abs=1e-9)
        assert covar(b, a, 0.9) == pytest.approx(var_y(b, 0.9), abs=1e-9)
        assert coes(b, a, 0.9) == pytest.approx(es_y(b, 0.9), abs=1e-9)
        assert delta_jmes_simple(b, a, 0.8) == pytest.approx(0.0, abs=1e-9)
        assert delta_r_jmes_simple(b, a, 0.8) == pytest.approx(0.0, abs=1e-9)


def test_comonotone_limits():
    y = Gamma(2.0, 1.5)
    b = BivariateModel(N01, y, ComonotoneCopula())
    assert jmes(b, 0.95, 0.97) == pytest.approx(es(y, 0.97), rel=1e-12)
    assert jmes(b, 0.97, 0.9) == pytest.approx(es(y, 0.97), rel=1e-12)
    assert mes(b, 0.9) == pytest.approx(es(y, 0.9), rel=1e-12)
    a, be = 0.9, 0.8
    assert covar(b, a, be) == pytest.approx(float(y.quantile(1 - (1 - a) * (1 - be))), rel=1e-9)
    ref = integrate.quad(lambda t: float(y.quantile(1 - (1 - a) * (1 - t))), be, 1.0, epsabs=1e-12)[0] / (1 - be)
    assert coes(b, a, be) == pytest.approx(ref, rel=1e-8)
    assert delta_r_jmes_simple(b, 0.95, 0.9) == pytest.approx(es(y, 0.95) / es(y, 0.9) - 1, rel=1e-10)


def test_comonotone_normal_report():
    rep = full_report(BivariateModel(N01, N01, ComonotoneCopula()), 0.95, 0.97)
    assert rep["JMES"] == pytest.approx(es(N01, 0.97), rel=1e-12)


def test_covar_level_definition():
    b = BivariateModel(N01, N01, GumbelCopula(3.0))
    t = covar_level(b, 0.9, 0.95)
    assert b.copula.tail(0.9, t) == pytest.approx(0.1 * 0.05, abs=1e-13)


def test_coes_is_average_of_covar():
    b = gauss(0.6, Gamma(2.0, 1.0))
    a, be = 0.9, 0.8
    ref = integrate.quad(lambda s: covar(b, a, s), be, 1.0, limit=200, epsabs=1e-10)[0] / (1 - be)
    assert coes(b, a, be) == pytest.approx(ref, rel=1e-6)


# --- contribution measures ----------------------------------------------------------------------

def test_delta_forms():
    b = BivariateModel(N01, Gamma(2.0, 2.5), GumbelCopula(3.0))
    assert delta_jmes(b, 0.9, 0.9, 0.8) == 0.0
    assert delta_jmes(b, 0.5, 0.9, 0.8) == pytest.approx(jmes(b, 0.9, 0.8) - jmes(b, 0.5, 0.8), rel=1e-14)
    assert delta_r_jmes(b, 0.5, 0.9, 0.8) == pytest.approx(jmes(b, 0.9, 0.8) / jmes(b, 0.5, 0.8) - 1, rel=1e-12)
    assert delta_jmes_simple(b, 0.9, 0.8) >= 0.0  # RTI copula
    with pytest.raises(DomainError):
        delta_jmes(b, 0.9, 0.5, 0.8)


def test_zero_denominator():
    shift = -float(es(N01, 0.9))
    b = BivariateModel(N01, ShiftScale(N01, shift, 1.0), GaussianCopula(0.4))
    assert abs(es_y(b, 0.9)) <= 1e-12
    with pytest.raises(ZeroDenominator):
        delta_r_jmes_simple(b, 0.9, 0.9)
    rep = full_report(b, 0.9, 0.9)
    assert "drJMES" not in rep.entries
    assert any(f["flag"] == "ZeroDenominator" for f in rep.flags_for("drJMES"))


def test_median_baseline():
    b = gauss(0.75)
    rep = full_report(b, 0.5, 0.95)
    for name in ("dmCoVaR", "dmMES", "dmJMES"):
        assert rep[name] == pytest.approx(0.0, abs=1e-12)
    part = median_baseline_variants(b, 0.95, 0.95)
    assert part["dmJMES"] == pytest.approx(jmes(b, 0.95, 0.95) - jmes(b, 0.5, 0.95), rel=1e-12)


@pytest.mark.slow
def test_median_contribution_against_monte_carlo():
    b = gauss(0.75)
    target = jmes(b, 0.95, 0.95) - jmes(b, 0.5, 0.95)
    hi = mc_jmes(b, 0.95, 0.95, n=10**7, seed=101)
    lo = mc_jmes(b, 0.5, 0.95, n=10**7, seed=102)
    band = 3.0 * math.hypot(hi.std_error, lo.std_error)
    assert abs(hi.value - lo.value - target) <= max(band, 0.01)


@pytest.mark.slow
def test_covar_gumbel_gamma_against_monte_carlo():
    b = BivariateModel(N01, Gamma(2.0, 2.5), GumbelCopula(3.0))
    est = mc_covar(b, 0.95, 0.95, n=10**7, seed=103)
    assert est.within(covar(b, 0.95, 0.95), k=3.0)


# --- flags ---------------------------------------------------------------------------------------

def test_heavy_tail_flags():
    rep = full_report(BivariateModel(N01, StudentT(1.0), GaussianCopula(0.5)), 0.9, 0.9)
    for name in ("ES", "JMES", "E", "MES", "CoES"):
        assert name not in rep.entries
    assert {f["flag"] for f in rep.flags_for("JMES")} == {"NonintegrableTail"}
    assert "VaR" in rep.entries and "CoVaR" in rep.entries


def test_report_serialization():
    rep = full_report(gauss(0.5, Gamma(2.0, 1.0)), 0.9, 0.95)
    d = json.loads(rep.to_json())
    assert set(MEASURE_NAMES) <= set(d)
    assert d["metadata"]["covar_convention"] == "X > VaR_alpha(X)"
    lines = rep.to_csv().splitlines()
    assert lines[0].split(",") == RiskReport.csv_header()
    assert float(lines[1].split(",")[2 + MEASURE_NAMES.index("JMES")]) == rep["JMES"]


def test_level_validation():
    with pytest.raises(DomainError):
        jmes(gauss(0.5), 1.0, 0.5)
    with pytest.raises(DomainError):
        full_report(gauss(0.5), 0.0, 0.5)


# --- invariants ------------------------------------------------------------------------------------

MARGINS = [Gamma(2.0, 2.5), LogNormal(0.0, 0.5), Gamma(3.0, 1.5)]
COPULAS = [GumbelCopula(3.0), GaussianCopula(0.6), StudentTCopula(0.5, 4.0)]


@given(a=st.floats(0.01, 5.0), c=st.floats(-10.0, 10.0), alpha=st.floats(0.0, 0.97), beta=st.floats(0.0, 0.97))
def test_translation_and_homogeneity(a, c, alpha, beta):
    base = BivariateModel(N01, Gamma(2.0, 1.0), GumbelCopula(2.0))
    moved = BivariateModel(N01, ShiftScale(base.y_marginal, c, a), base.copula)
    j = jmes(base, alpha, beta)
    assert jmes(moved, alpha, beta) == pytest.approx(a * j + c, abs=1e-9 * max(1.0, abs(a * j + c)))


@given(c=st.floats(-50.0, 50.0), alpha=st.floats(0.05, 0.97), beta=st.floats(0.05, 0.97))
def test_delta_location_invariance(c, alpha, beta):
    base = BivariateModel(N01, LogNormal(0.0, 0.5), GaussianCopula(0.6))
    moved = BivariateModel(N01, ShiftScale(base.y_marginal, c, 1.0), base.copula)
    assert abs(delta_jmes_simple(moved, alpha, beta) - delta_jmes_simple(base, alpha, beta)) <= 1e-9


@given(c=st.floats(0.01, 100.0), alpha=st.floats(0.05, 0.97), beta=st.floats(0.05, 0.97))
def test_delta_ratio_scale_invariance(c, alpha, beta):
    base = BivariateModel(N01, Gamma(2.0, 2.5), GumbelCopula(3.0))
    moved = BivariateModel(N01, ShiftScale(base.y_marginal, 0.0, c), base.copula)
    assert abs(delta_r_jmes_simple(moved, alpha, beta) - delta_r_jmes_simple(base, alpha, beta)) <= 1e-9


@pytest.mark.parametrize("cop", COPULAS, ids=repr)
def test_comonotone_additivity(cop):
    parts = (Gamma(2.0, 1.0), LogNormal(0.0, 0.5))
    total = BivariateModel(N01, ComonotoneSum(parts), cop)
    for a, b in [(0.5, 0.5), (0.9, 0.95)]:
        pieces = sum(jmes(BivariateModel(N01, p, cop), a, b) for p in parts)
        assert abs(jmes(total, a, b) - pieces) <= 1e-6


@pytest.mark.parametrize("cop", COPULAS + [FGMCopula(-0.7), IndependenceCopula()], ids=repr)
def test_degeneracies(cop):
    y = Gamma(2.0, 2.5)
    b = BivariateModel(N01, y, cop)
    for p in (0.1, 0.5, 0.9):
        assert abs(jmes(b, 0.0, p) - es(y, p)) <= 1e-6
        assert abs(jmes(b, p, 0.0) - mes(b, p)) <= 1e-6


@pytest.mark.parametrize("cop", COPULAS + [FGMCopula(-0.7)], ids=repr)
def test_monotone_in_beta(cop):
    b = BivariateModel(N01, LogNormal(0.0, 0.5), cop)
    betas = np.linspace(0.0, 0.95, 11)
    for a in (0.3, 0.9):
        vals = np.array([jmes(b, a, x) for x in betas])
        assert np.all(np.diff(vals) >= -1e-8)


@pytest.mark.parametrize("cop", [GumbelCopula(3.0), GaussianCopula(0.6), FGMCopula(0.5)], ids=repr)
def test_monotone_in_alpha(cop):
    b = BivariateModel(N01, Gamma(2.0, 2.5), cop)
    alphas = np.linspace(0.0, 0.95, 11)
    for be in (0.2, 0.9):
        vals = np.array([jmes(b, x, be) for x in alphas])
        assert np.all(np.diff(vals) >= -1e-8)


def test_swap_orientation():
    b = BivariateModel(Gamma(3.0, 1.5), Gamma(2.0, 2.5), GumbelCopula(3.0))
    s = b.swap()
    assert s.x_marginal == b.y_marginal and s.y_marginal == b.x_marginal
    # Gumbel is exchangeable, so JMES[X|Y] at (a, b) averages X's quantiles
    ref = brute_jmes(BivariateModel(N01, b.x_marginal, b.copula), 0.9, 0.8)
    assert jmes(s, 0.9, 0.8) == pytest.approx(ref, rel=1e-8)
