"""
Monte Carlo estimators for the conditional risk measures.

This path is independent of the quadrature engine: pairs ``(U, V)`` are drawn
from the copula's own sampler, the event ``{U > alpha, V > beta}`` is applied
with the exact uniform thresholds, and ``Y = G^{-1}(V)`` is averaged.

Samples are generated in blocks; block ``i`` uses substream ``i`` of the
seed, so results are reproducible and independent of how many blocks are
drawn at once.  Standard errors of nonlinear estimators (quantiles, ratios)
come from batch means over the blocks.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from ._rng import GENERATOR_NAME, PHILOX_CONSTANTS, make_rng
from .errors import DomainError, InsufficientTailSamples, JmesError
from .measures import MEASURE_NAMES, BivariateModel, full_report

__all__ = [
    "McEstimate",
    "MIN_CONDITIONAL",
    "draw",
    "mc_jmes",
    "mc_mes",
    "mc_covar",
    "mc_coes",
    "mc_report",
    "mc_order_witness",
    "compare_with_quadrature",
    "hash_seed",
]

#: Smallest expected number of samples in the conditioning event.
MIN_CONDITIONAL = 100
_MIN_N = 10_000
_BLOCK = 250_000
_U_HI = 1.0 - 2.0**-53


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_total: int
    n_conditional: int
    seed: int

    def to_dict(self):
        d = asdict(self)
        d["generator"] = GENERATOR_NAME
        d["constants"] = PHILOX_CONSTANTS
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def within(self, target: float, k: float = 3.0) -> bool:
        """True when ``target`` is within ``k`` standard errors."""
        return abs(self.value - target) <= k * self.std_error


def _block_sizes(n, block):
    full, rest = divmod(n, block)
    return [block] * full + ([rest] if rest else [])


def draw(b: BivariateModel, n: int, seed: int = 0, block: int = _BLOCK):
    """Draw ``n`` pairs ``(U, Y)`` in reproducible blocks.

    Returns
    -------
    list of (ndarray, ndarray)
        One ``(u, y)`` pair of arrays per block.
    """
    out = []
    for i, m in enumerate(_block_sizes(int(n), block)):
        u, v = b.copula.sample(m, make_rng(seed, stream=i))
        v = np.clip(v, 2.0**-60, _U_HI)
        out.append((np.asarray(u), np.asarray(b.y_marginal.quantile(v), dtype=float)))
    return out


def _check_n(n, mass, what):
    if n < _MIN_N:
        raise DomainError(f"need n >= {_MIN_N}, got {n}")
    if mass * n < MIN_CONDITIONAL:
        raise InsufficientTailSamples(
            f"expected {mass * n:.1f} samples in {what}; need at least {MIN_CONDITIONAL}"
        )


def _conditional_mean(blocks, keep):
    ys = np.concatenate([y[keep(u, y)] for u, y in blocks])
    k = ys.size
    if k < 2:
        raise InsufficientTailSamples(f"only {k} samples survived the conditioning event")
    return float(ys.mean()), float(ys.std(ddof=1) / math.sqrt(k)), k


def mc_jmes(b: BivariateModel, alpha: float, beta: float, n: int = 10**6, seed: int = 0) -> McEstimate:
    """Conditional-mean estimate of ``E[Y | U > alpha, V > beta]``."""
    _check_n(n, float(b.copula.tail(alpha, beta)), f"{{U > {alpha}, V > {beta}}}")
    y_beta = float(b.y_marginal.quantile(beta)) if beta > 0 else -np.inf
    blocks = draw(b, n, seed)
    # V > beta  <=>  Y > G^{-1}(beta) for continuous strictly increasing G
    val, se, k = _conditional_mean(blocks, lambda u, y: (u > alpha) & (y > y_beta))
    return McEstimate(val, se, int(n), k, int(seed))


def mc_mes(b: BivariateModel, alpha: float, n: int = 10**6, seed: int = 0) -> McEstimate:
    """Conditional-mean estimate of ``E[Y | U > alpha]``."""
    _check_n(n, 1.0 - alpha, f"{{U > {alpha}}}")
    blocks = draw(b, n, seed)
    val, se, k = _conditional_mean(blocks, lambda u, y: u > alpha)
    return McEstimate(val, se, int(n), k, int(seed))


def _type1_quantile(sorted_x, p):
    k = max(int(math.ceil(p * sorted_x.size - 1e-9)), 1)
    return sorted_x[k - 1]


def _batch_se(values):
    values = np.asarray(values, float)
    if values.size < 2:
        return float("nan")
    return float(values.std(ddof=1) / math.sqrt(values.size))


def _covar_stats(ys, beta):
    ys = np.sort(ys)
    q = _type1_quantile(ys, beta)
    tail = ys[ys > q]
    return q, (float(tail.mean()) if tail.size else float("nan"))


def _conditional_quantile_estimates(b, alpha, beta, n, seed, which):
    _check_n(n, (1.0 - alpha) * (1.0 - beta), f"{{U > {alpha}}} above its {beta}-quantile")
    blocks = draw(b, n, seed, block=max(n // 50, 1))
    per_block = [y[u > alpha] for u, y in blocks]
    pooled = np.concatenate(per_block)
    value = _covar_stats(pooled, beta)[which]
    se = _batch_se([_covar_stats(ys, beta)[which] for ys in per_block if ys.size])
    return McEstimate(float(value), se, int(n), int(pooled.size), int(seed))


def mc_covar(b: BivariateModel, alpha: float, beta: float, n: int = 10**6, seed: int = 0) -> McEstimate:
    """Order-statistic estimate of the ``beta``-quantile of ``Y`` given ``U > alpha``.

    The standard error comes from batch means over 50 blocks.
    """
    return _conditional_quantile_estimates(b, alpha, beta, n, seed, 0)


def mc_coes(b: BivariateModel, alpha: float, beta: float, n: int = 10**6, seed: int = 0) -> McEstimate:
    """Mean of ``Y`` above its conditional ``beta``-quantile, given ``U > alpha``."""
    return _conditional_quantile_estimates(b, alpha, beta, n, seed, 1)


def _zoo(u, y, alpha, beta, y_beta):
    """All named measures from one sample; ``y_beta`` is the exact ``G^{-1}(beta)``."""
    ys = np.sort(y)
    out = {"E": float(y.mean())}
    out["VaR"] = float(_type1_quantile(ys, beta))
    v_hi = y > y_beta
    out["ES"] = float(y[v_hi].mean())

    def cond(level):
        sel = y[u > level]
        covar, coes = _covar_stats(sel, beta)
        return covar, coes, float(sel.mean())

    out["CoVaR"], out["CoES"], out["MES"] = cond(alpha)
    out["JMES"] = float(y[(u > alpha) & v_hi].mean())
    covar_m, _, mes_m = cond(0.5)
    jmes_m = float(y[(u > 0.5) & v_hi].mean())
    base = {"VaR": out["VaR"], "CoVaR@0.5": covar_m, "E": out["E"], "MES@0.5": mes_m,
            "ES": out["ES"], "JMES@0.5": jmes_m}
    pairs = {"dCoVaR": ("CoVaR", "VaR"), "dmCoVaR": ("CoVaR", "CoVaR@0.5"),
             "dMES": ("MES", "E"), "dmMES": ("MES", "MES@0.5"),
             "dJMES": ("JMES", "ES"), "dmJMES": ("JMES", "JMES@0.5")}
    for name, (top, ref) in pairs.items():
        diff = out[top] - base[ref]
        out[name] = diff
        out["dr" + name[1:]] = diff / base[ref] if base[ref] != 0 else float("nan")
    return out


def mc_report(b: BivariateModel, alpha: float, beta: float, n: int = 10**6, seed: int = 0,
              batches: int = 50) -> dict:
    """Monte Carlo estimates of every measure in :data:`MEASURE_NAMES`.

    Values use the pooled sample; standard errors are batch means over
    ``batches`` equal blocks.  ES and JMES condition on the exact threshold
    ``Y > G^{-1}(beta)``; VaR, CoVaR and CoES use sample order statistics.

    Returns
    -------
    dict
        Measure name to :class:`McEstimate`.
    """
    if not (0.5 <= alpha < 1.0 and 0.0 < beta < 1.0):
        raise DomainError("mc_report needs alpha in [0.5, 1) and beta in (0, 1)")
    _check_n(n, float(b.copula.tail(alpha, beta)), f"{{U > {alpha}, V > {beta}}}")
    blocks = draw(b, n, seed, block=max(n // batches, 1))
    u = np.concatenate([blk[0] for blk in blocks])
    y = np.concatenate([blk[1] for blk in blocks])
    y_beta = float(b.y_marginal.quantile(beta))
    pooled = _zoo(u, y, alpha, beta, y_beta)
    per = [_zoo(bu, by, alpha, beta, y_beta) for bu, by in blocks]
    k_joint = int(np.sum(u > alpha))
    out = {}
    for name in MEASURE_NAMES:
        vals = [p[name] for p in per]
        out[name] = McEstimate(pooled[name], _batch_se(vals), int(n), k_joint, int(seed))
    return out


_WITNESS_MEASURES = {
    "jmes": "JMES", "mes": "MES", "covar": "CoVaR", "coes": "CoES",
    "delta_jmes": "dJMES", "delta_r_jmes": "drJMES",
}


def mc_order_witness(b1: BivariateModel, b2: BivariateModel, measure: str, grid,
                     n: int = 10**6, seed: int = 0, k: float = 3.0) -> list:
    """Grid points where sampling contradicts ``measure(b1) <= measure(b2)``.

    A point is a witness when the first estimate exceeds the second by more
    than ``k`` combined standard errors.  Points with too few tail samples are
    reported with an ``"error"`` entry instead.

    Parameters
    ----------
    grid : iterable of (alpha, beta)
    measure : str
        One of ``jmes, mes, covar, coes, delta_jmes, delta_r_jmes`` or a
        name from :data:`MEASURE_NAMES`.
    """
    name = _WITNESS_MEASURES.get(measure, measure)
    if name not in MEASURE_NAMES:
        raise DomainError(f"unknown measure {measure!r}")
    witnesses = []
    for idx, (alpha, beta) in enumerate(grid):
        s = [int(seed), idx]
        try:
            e1 = mc_report(b1, alpha, beta, n, seed=hash_seed(s, 1))[name]
            e2 = mc_report(b2, alpha, beta, n, seed=hash_seed(s, 2))[name]
        except JmesError as exc:
            witnesses.append({"alpha": alpha, "beta": beta, "error": str(exc)})
            continue
        gap = e1.value - e2.value
        band = k * math.hypot(e1.std_error, e2.std_error)
        if gap > band:
            witnesses.append({"alpha": alpha, "beta": beta, "lhs": e1.value, "rhs": e2.value,
                              "gap": gap, "band": band})
    return witnesses


def hash_seed(parts, salt: int) -> int:
    """Deterministic 63-bit seed derived from integer parts."""
    ss = np.random.SeedSequence([*map(int, parts), int(salt)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def compare_with_quadrature(b: BivariateModel, alpha: float, beta: float, n: int = 10**6,
                            seed: int = 0, k: float = 3.0) -> list[dict]:
    """Rows ``{measure, quadrature, mc, se, z, ok}`` for every measure both paths produce."""
    rep = full_report(b, alpha, beta)
    mc = mc_report(b, alpha, beta, n, seed)
    rows = []
    for name in MEASURE_NAMES:
        if name not in rep.entries:
            continue
        est = mc[name]
        q = rep.entries[name]
        z = (est.value - q) / est.std_error if est.std_error > 0 else (0.0 if est.value == q else math.inf)
        rows.append({"measure": name, "quadrature": q, "mc": est.value, "se": est.std_error,
                     "z": z, "ok": abs(z) <= k})
    return rows
