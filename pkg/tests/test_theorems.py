"""Comparison theorems as grid properties.

Each test fixes the order relation between the margins (checked with the
orders module first), then asserts the implied ordering of JMES, ΔJMES or
Δ^R JMES on a grid of levels with no violations beyond 1e-8.
"""
import numpy as np
import pytest

from jmesrisk.copulas import FGMCopula, GaussianCopula, GumbelCopula, StudentTCopula
from jmesrisk.distortion import DistortionCurve, compose_convexity_check
from jmesrisk.distributions import Gamma, Normal
from jmesrisk.measures import (
    BivariateModel,
    delta_jmes,
    delta_jmes_simple,
    delta_r_jmes,
    delta_r_jmes_simple,
    jmes,
)
from jmesrisk.orders import check_disp, check_epw, check_icx, check_l_alpha, check_si, check_symmetry

TOL = 1e-8
LEVELS = np.round(np.linspace(0.0, 0.95, 7), 10)
REGION_A = np.round(np.linspace(0.6, 0.8, 5), 10)
REGION_B = (0.82, 0.86, 0.9, 0.94, 0.98, 0.995)

MEASURES = {"JMES": jmes, "dJMES": delta_jmes_simple, "drJMES": delta_r_jmes_simple}

# (X, Y, relation, measure): X below Y in the relation implies measure[X|Y] <= measure[Y|X]
PAIRS = [
    (Gamma(3.0, 1.5), Gamma(2.0, 2.5), check_icx, "JMES"),
    (Gamma(1.5, 2.5), Gamma(2.0, 3.0), check_disp, "dJMES"),
    (Gamma(2.0, 1.5), Gamma(1.0, 1.0), check_epw, "drJMES"),
]


def _violations(lhs, rhs, grid, f):
    bad = []
    for a, b in grid:
        lo, hi = f(lhs, a, b), f(rhs, a, b)
        if lo - hi > TOL * max(1.0, abs(hi)):
            bad.append((a, b, lo, hi))
    return bad


@pytest.mark.parametrize("x, y, relation, measure", PAIRS, ids=[p[3] for p in PAIRS])
def test_paired_risks_surface(x, y, relation, measure):
    assert relation(x, y).holds
    c = GumbelCopula(3.0)
    assert check_si(c).holds and check_symmetry(c).holds
    b = BivariateModel(x, y, c)
    grid = [(a, be) for a in LEVELS for be in LEVELS]
    assert _violations(b.swap(), b, grid, MEASURES[measure]) == []


@pytest.mark.parametrize("x, y, relation, measure", PAIRS, ids=[p[3] for p in PAIRS])
def test_paired_risks_theta_sweep(x, y, relation, measure):
    f = MEASURES[measure]
    for theta in np.linspace(1.0, 5.0, 9):
        b = BivariateModel(x, y, GumbelCopula(float(theta)))
        assert _violations(b.swap(), b, [(0.9, 0.8), (0.5, 0.95)], f) == []


def test_paired_mes_consequence():
    b = BivariateModel(Gamma(3.0, 1.5), Gamma(2.0, 2.5), GumbelCopula(3.0))
    for a in LEVELS:
        assert jmes(b.swap(), a, 0.0) <= jmes(b, a, 0.0) + TOL


def test_paired_two_level_contribution():
    # disp margins with a TP2 tail: two-level ΔJMES ordered for alpha1 <= alpha2
    b = BivariateModel(Gamma(1.5, 2.5), Gamma(2.0, 3.0), GumbelCopula(3.0))
    for a1, a2 in [(0.0, 0.5), (0.3, 0.9), (0.6, 0.8)]:
        for be in (0.0, 0.5, 0.9):
            assert delta_jmes(b.swap(), a1, a2, be) <= delta_jmes(b, a1, a2, be) + TOL


def test_paired_reversal_is_not_implied():
    # swapping the roles breaks the hypothesis; the conclusion fails somewhere on the grid
    x, y = Gamma(2.0, 2.5), Gamma(3.0, 1.5)
    b = BivariateModel(x, y, GumbelCopula(3.0))
    grid = [(a, be) for a in LEVELS for be in LEVELS]
    assert _violations(b.swap(), b, grid, jmes)


# --- two vectors, common copula ---------------------------------------------------------------

@pytest.mark.parametrize("cop", [GumbelCopula(3.0), GaussianCopula(0.6), FGMCopula(0.8)], ids=repr)
@pytest.mark.parametrize("y1, y2, relation, measure", PAIRS, ids=[p[3] for p in PAIRS])
def test_common_copula(cop, y1, y2, relation, measure):
    assert relation(y1, y2).holds
    assert check_si(cop).holds
    b1, b2 = BivariateModel(Normal(), y1, cop), BivariateModel(Normal(), y2, cop)
    grid = [(a, be) for a in LEVELS[::2] for be in LEVELS[::2]]
    assert _violations(b1, b2, grid, MEASURES[measure]) == []


def test_common_copula_two_level_delta():
    cop = GumbelCopula(2.0)
    b1 = BivariateModel(Normal(), Gamma(1.5, 2.5), cop)
    b2 = BivariateModel(Normal(), Gamma(2.0, 3.0), cop)
    for a1, a2 in [(0.0, 0.7), (0.5, 0.95)]:
        for be in (0.2, 0.9):
            assert delta_jmes(b1, a1, a2, be) <= delta_jmes(b2, a1, a2, be) + TOL


def test_common_copula_two_level_ratio_when_convex():
    cop = GumbelCopula(2.0)
    b1 = BivariateModel(Normal(), Gamma(2.0, 1.5), cop)
    b2 = BivariateModel(Normal(), Gamma(1.0, 1.0), cop)
    checked = 0
    for a1, a2 in [(0.0, 0.5), (0.3, 0.8), (0.5, 0.9)]:
        for be in (0.2, 0.6, 0.9):
            conv = compose_convexity_check(DistortionCurve(cop, a2, be), DistortionCurve(cop, a1, be))
            if not conv.holds:
                continue
            checked += 1
            assert delta_r_jmes(b1, a1, a2, be) <= delta_r_jmes(b2, a1, a2, be) + TOL
    assert checked > 0


# --- two vectors, different copulas -------------------------------------------------------------

def test_same_margin_different_copula():
    c1, c2 = GumbelCopula(3.0), GumbelCopula(2.0)
    y = Gamma(2.0, 2.5)
    b1, b2 = BivariateModel(Normal(), y, c1), BivariateModel(Normal(), y, c2)
    for a in REGION_A:
        for be in REGION_B:
            assert check_l_alpha(c1, c2, a, be).holds
            for f in MEASURES.values():
                assert f(b1, a, be) <= f(b2, a, be) + TOL


def test_fgm_pair_same_margin():
    b1 = BivariateModel(Normal(), Gamma(2.0, 1.0), FGMCopula(0.2))
    b2 = BivariateModel(Normal(), Gamma(2.0, 1.0), FGMCopula(0.9))
    for a in (0.1, 0.5, 0.9):
        for be in (0.0, 0.5, 0.9):
            assert check_l_alpha(FGMCopula(0.2), FGMCopula(0.9), a, be).holds
            assert jmes(b1, a, be) <= jmes(b2, a, be) + TOL


@pytest.mark.parametrize("y1, y2, relation, measure", PAIRS, ids=[p[3] for p in PAIRS])
def test_different_copula_and_margin(y1, y2, relation, measure):
    c1, c2 = GumbelCopula(3.0), GumbelCopula(2.0)
    assert relation(y1, y2).holds
    b1, b2 = BivariateModel(Normal(), y1, c1), BivariateModel(Normal(), y2, c2)
    grid = [(a, be) for a in REGION_A for be in REGION_B]
    for a, be in grid:
        assert check_l_alpha(c1, c2, a, be).holds
    assert _violations(b1, b2, grid, MEASURES[measure]) == []


# --- sign of the contribution ----------------------------------------------------------------

@pytest.mark.parametrize("cop, sign", [(GumbelCopula(2.0), 1), (GaussianCopula(0.5), 1), (FGMCopula(0.6), 1),
                                       (GaussianCopula(-0.5), -1), (FGMCopula(-0.6), -1)], ids=repr)
def test_contribution_sign(cop, sign):
    b = BivariateModel(Normal(), Gamma(2.0, 2.5), cop)
    for a in (0.2, 0.6, 0.95):
        for be in (0.1, 0.5, 0.9):
            assert sign * delta_jmes_simple(b, a, be) >= -TOL


def test_t_copula_sign_on_upper_region():
    b = BivariateModel(Normal(), Gamma(2.0, 2.5), StudentTCopula(0.5, 4.0))
    for a in (0.5, 0.8, 0.95):
        for be in (0.5, 0.9):
            assert delta_jmes_simple(b, a, be) > 0
