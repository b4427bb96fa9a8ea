"""
Joint marginal expected shortfall and related conditional tail risk measures.

The main entry points are :class:`BivariateModel` with :func:`full_report`
for measure evaluation, the copula and marginal families, the stochastic
order checkers in :mod:`jmesrisk.orders`, the Monte Carlo oracle in
:mod:`jmesrisk.oracle`, and the peaks-over-threshold margins in
:mod:`jmesrisk.pot`.
"""
from .copulas import (
    ComonotoneCopula,
    Copula,
    FGMCopula,
    GaussianCopula,
    GumbelCopula,
    IndependenceCopula,
    StudentTCopula,
    aic_select,
    fit_mle,
    make_copula,
    pseudo_observations,
)
from .distortion import DistortionCurve, l_alpha
from .distributions import (
    ComonotoneSum,
    Empirical,
    Gamma,
    Gpd,
    LogNormal,
    Marginal,
    Normal,
    PGrid,
    ShiftScale,
    StudentT,
    epw,
    es,
    excess_wealth,
)
from .errors import *  # noqa: F401,F403
from .measures import (
    MEASURE_NAMES,
    BivariateModel,
    RiskReport,
    coes,
    covar,
    delta_jmes,
    delta_jmes_simple,
    delta_r_jmes,
    delta_r_jmes_simple,
    full_report,
    jmes,
    mes,
)
from .oracle import McEstimate, mc_report
from .pot import GpdFit, SemiParametricMarginal, build_semiparametric, fit_gpd, log_losses

__version__ = "0.1.0"
