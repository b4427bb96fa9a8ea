"""
Grid checks for stochastic orders and positive-dependence properties.

Each check evaluates its defining inequality on a probability grid and
returns an :class:`OrderCheckResult` listing the grid points where the
inequality fails by more than the tolerance.  A ``holds`` verdict certifies
the absence of violations at that resolution only.
"""
from __future__ import annotations

import numpy as np

from ._result import RELATIONS, VERDICTS, OrderCheckResult
from .copulas import Copula
from .distortion import DEGENERATE_MASS
from .distributions import Marginal, PGrid, epw
from .errors import DegenerateConditioning, DensityUnavailable, DomainError, ZeroQuantile

__all__ = [
    "OrderCheckResult",
    "RELATIONS",
    "VERDICTS",
    "copula_grid",
    "check_st",
    "check_icx",
    "check_disp",
    "check_epw",
    "check_lr",
    "check_si",
    "check_rti",
    "check_tp2_tail",
    "check_l_alpha",
    "check_symmetry",
]

ORDER_TOL = 1e-9


def copula_grid() -> PGrid:
    """Default grid for copula checks: 49 points on [0.02, 0.98]."""
    return PGrid.uniform(49, 0.02, 0.98)


def _grid(grid) -> np.ndarray:
    if grid is None:
        grid = PGrid.default()
    if not isinstance(grid, PGrid):
        grid = PGrid(grid)
    return grid.points


def _tol(tol, *scales):
    """Absolute tolerance scaled by the magnitude of the compared values."""
    scale = np.maximum(1.0, np.max(np.abs(np.stack(scales)), axis=0))
    return tol * scale


def _pointwise(relation, p, lhs, rhs, tol, details=None):
    lhs = np.asarray(lhs, float)
    rhs = np.asarray(rhs, float)
    excess = lhs - rhs
    bad = np.flatnonzero(excess > _tol(tol, lhs, rhs))
    witnesses = [
        {"p": float(p[i]), "lhs": float(lhs[i]), "rhs": float(rhs[i]), "excess": float(excess[i])}
        for i in bad
    ]
    return OrderCheckResult.from_witnesses(relation, witnesses, p, tol, details)


def check_st(m1: Marginal, m2: Marginal, grid=None, tol: float = ORDER_TOL) -> OrderCheckResult:
    """``m1 <=_st m2``: ``VaR_p[m1] <= VaR_p[m2]`` on the grid."""
    p = _grid(grid)
    return _pointwise("st", p, m1.quantile(p), m2.quantile(p), tol)


def check_icx(m1: Marginal, m2: Marginal, grid=None, tol: float = ORDER_TOL) -> OrderCheckResult:
    """``m1 <=_icx m2``: ``ES_p[m1] <= ES_p[m2]`` on the grid."""
    p = _grid(grid)
    e1 = np.array([m1.es(q) for q in p])
    e2 = np.array([m2.es(q) for q in p])
    return _pointwise("icx", p, e1, e2, tol)


def check_disp(m1: Marginal, m2: Marginal, grid=None, tol: float = ORDER_TOL) -> OrderCheckResult:
    """``m1 <=_disp m2``: quantile spacings of ``m1`` never exceed those of ``m2``."""
    p = _grid(grid)
    q1 = np.asarray(m1.quantile(p), float)
    q2 = np.asarray(m2.quantile(p), float)
    d1 = q1[None, :] - q1[:, None]
    d2 = q2[None, :] - q2[:, None]
    upper = np.triu(np.ones((p.size, p.size), dtype=bool), k=1)
    excess = np.where(upper, d1 - d2, -np.inf)
    bad = np.argwhere(excess > _tol(tol, d1, d2))
    witnesses = [
        {"u": float(p[i]), "v": float(p[j]), "lhs": float(d1[i, j]), "rhs": float(d2[i, j]),
         "excess": float(excess[i, j])}
        for i, j in bad
    ]
    return OrderCheckResult.from_witnesses("disp", witnesses, p, tol)


def _epw_safe(m, p):
    try:
        return epw(m, p)
    except ZeroQuantile:
        return None


def check_epw(m1: Marginal, m2: Marginal, grid=None, tol: float = ORDER_TOL) -> OrderCheckResult:
    """``m1 <=_epw m2`` on the grid; points where either quantile is zero are skipped."""
    p = _grid(grid)
    keep, e1, e2 = [], [], []
    for q in p:
        a, b = _epw_safe(m1, q), _epw_safe(m2, q)
        if a is None or b is None:
            continue
        keep.append(q)
        e1.append(a)
        e2.append(b)
    skipped = p.size - len(keep)
    if not keep:
        return OrderCheckResult("epw", "inconclusive", grid=p, tolerance=tol,
                                details={"reason": "all quantiles zero"})
    res = _pointwise("epw", np.array(keep), e1, e2, tol, {"skipped_zero_quantiles": skipped})
    res.grid = p
    return res


def check_lr(m1: Marginal, m2: Marginal, grid_x=None, tol: float = ORDER_TOL,
             strict: bool = True) -> OrderCheckResult:
    """``m1 <=_lr m2``: the density ratio ``f2 / f1`` is nondecreasing.

    The default x-grid is the union of both models' quantiles on the default
    probability grid.  Points where either density vanishes are skipped.

    Raises
    ------
    DensityUnavailable
        If a model has no density and ``strict`` is true; otherwise the
        verdict is ``inconclusive``.
    """
    if grid_x is None:
        p = PGrid.default().points
        grid_x = np.union1d(np.asarray(m1.quantile(p)), np.asarray(m2.quantile(p)))
    x = np.sort(np.asarray(grid_x, float))
    try:
        f1 = np.asarray(m1.density(x), float)
        f2 = np.asarray(m2.density(x), float)
    except DensityUnavailable as exc:
        if strict:
            raise
        return OrderCheckResult("lr", "inconclusive", grid=x, tolerance=tol,
                                details={"reason": str(exc)})
    ok = (f1 > 0) & (f2 > 0)
    xs = x[ok]
    logr = np.log(f2[ok]) - np.log(f1[ok])
    drop = logr[:-1] - logr[1:]
    bad = np.flatnonzero(drop > _tol(tol, logr[:-1], logr[1:]))
    witnesses = [
        {"x": [float(xs[i]), float(xs[i + 1])], "log_ratio": [float(logr[i]), float(logr[i + 1])],
         "excess": float(drop[i])}
        for i in bad
    ]
    return OrderCheckResult.from_witnesses("lr", witnesses, x, tol,
                                           {"skipped_zero_density": int((~ok).sum())})


def _monotone_witnesses(mat, u, v, tol, increasing, label):
    """Scan rows of ``mat[i, j]`` (indexed by u_i, v_j) for monotonicity in ``v``."""
    step = mat[:, 1:] - mat[:, :-1]
    excess = -step if increasing else step
    bad = np.argwhere(excess > tol)
    return [
        {"u": float(u[i]), "v": [float(v[j]), float(v[j + 1])],
         "values": [float(mat[i, j]), float(mat[i, j + 1])],
         "excess": float(excess[i, j]), "direction": label}
        for i, j in bad
    ]


def check_si(c: Copula, grid=None, tol: float = ORDER_TOL) -> OrderCheckResult:
    """Stochastic increase: ``P(U > u | V = v)`` nondecreasing in ``v``.

    For exchangeable copulas one direction is checked; otherwise ``V`` given
    ``U`` is checked as well.
    """
    p = _grid(grid if grid is not None else copula_grid())
    uu, vv = np.meshgrid(p, p, indexing="ij")
    w = _monotone_witnesses(np.asarray(c.partial2(uu, vv)), p, p, tol, False, "U|V")
    both = not c.symmetric
    if both:
        # partial1(u, v) = P(V <= v | U = u); rows indexed by v, columns by u
        m = np.asarray(c.partial1(vv.T, uu.T))
        w += _monotone_witnesses(m, p, p, tol, False, "V|U")
    return OrderCheckResult.from_witnesses(
        "SI", w, p, tol, {"directions": ["U|V", "V|U"] if both else ["U|V"]}
    )


def check_rti(c: Copula, grid=None, tol: float = ORDER_TOL) -> OrderCheckResult:
    """Right-tail increase: ``P(U > u | V > v) = C̄(u, v) / (1 - v)`` nondecreasing in ``v``."""
    p = _grid(grid if grid is not None else copula_grid())
    uu, vv = np.meshgrid(p, p, indexing="ij")
    w = _monotone_witnesses(np.asarray(c.tail(uu, vv)) / (1.0 - vv), p, p, tol, True, "U|V")
    both = not c.symmetric
    if both:
        m = np.asarray(c.tail(vv, uu)).T / (1.0 - vv)
        w += _monotone_witnesses(m, p, p, tol, True, "V|U")
    return OrderCheckResult.from_witnesses(
        "RTI", w, p, tol, {"directions": ["U|V", "V|U"] if both else ["U|V"]}
    )


def check_tp2_tail(c: Copula, grid=None, tol: float = ORDER_TOL) -> OrderCheckResult:
    """TP2 of ``C̄``: ``log C̄`` is supermodular on every grid cell.

    Cell-wise log-supermodularity implies it on every grid rectangle, since
    the log cross-ratio of a rectangle is the sum over its cells.
    """
    p = _grid(grid if grid is not None else copula_grid())
    uu, vv = np.meshgrid(p, p, indexing="ij")
    tail = np.asarray(c.tail(uu, vv), float)
    if np.any(tail <= 0):
        raise DegenerateConditioning("C̄ vanishes on the grid; TP2 undefined")
    lt = np.log(tail)
    cross = lt[1:, 1:] + lt[:-1, :-1] - lt[:-1, 1:] - lt[1:, :-1]
    bad = np.argwhere(-cross > tol)
    witnesses = [
        {"u": [float(p[i]), float(p[i + 1])], "v": [float(p[j]), float(p[j + 1])],
         "log_cross_ratio": float(cross[i, j]), "excess": float(-cross[i, j])}
        for i, j in bad
    ]
    return OrderCheckResult.from_witnesses("TP2_tail", witnesses, p, tol)


def _l_alpha_grid(beta: float, n: int = 201) -> np.ndarray:
    lin = beta + (1.0 - beta) * np.linspace(0.0, 1.0, n)[:-1]
    edge = 1.0 - (1.0 - beta) * np.logspace(-6.0, -2.0, 20)
    return np.unique(np.concatenate([lin, edge]))


def check_l_alpha(c1: Copula, c2: Copula, alpha: float, beta: float, grid=None,
                  tol: float = ORDER_TOL) -> OrderCheckResult:
    """Floor condition ``l(t) >= l(beta)`` on ``[beta, 1)`` for ``l = C̄_2(alpha, .) / C̄_1(alpha, .)``.

    ``details["monotone"]`` reports whether ``l`` is also nondecreasing on the
    grid, the stronger sufficient condition.
    """
    if not (0.0 <= alpha < 1.0 and 0.0 <= beta < 1.0):
        raise DomainError("alpha and beta must lie in [0, 1)")
    t = _l_alpha_grid(beta) if grid is None else np.asarray(grid, float)
    if grid is not None and (np.any(t < beta) or np.any(t >= 1.0)):
        raise DomainError("l_alpha grid must lie in [beta, 1)")
    t = np.unique(np.concatenate([[beta], t]))
    t1 = np.asarray(c1.tail(alpha, t), float)
    t2 = np.asarray(c2.tail(alpha, t), float)
    if t1[0] < DEGENERATE_MASS or t2[0] < DEGENERATE_MASS:
        raise DegenerateConditioning(f"a copula puts no mass on U > {alpha}, V > {beta}")
    ok = t1 > 0
    l = np.full_like(t, np.nan)
    l[ok] = t2[ok] / t1[ok]
    floor = l[0]
    excess = floor - l
    bad = np.flatnonzero(ok & (excess > _tol(tol, l, floor * np.ones_like(l))))
    witnesses = [
        {"t": float(t[i]), "l": float(l[i]), "l_beta": float(floor), "excess": float(excess[i])}
        for i in bad
    ]
    steps = np.diff(l[ok])
    details = {
        "alpha": alpha,
        "beta": beta,
        "monotone": bool(np.all(steps >= -tol)),
        "min_increment": float(steps.min()) if steps.size else 0.0,
    }
    return OrderCheckResult.from_witnesses("l_alpha_ratio", witnesses, t, tol, details)


def check_symmetry(c: Copula, grid=None, tol: float = 1e-12) -> OrderCheckResult:
    """Exchangeability ``C(u, v) = C(v, u)`` on the grid."""
    p = _grid(grid if grid is not None else copula_grid())
    uu, vv = np.meshgrid(p, p, indexing="ij")
    a = np.asarray(c.cdf(uu, vv), float)
    diff = np.abs(a - a.T)
    bad = np.argwhere(np.triu(diff > tol, k=1))
    witnesses = [
        {"u": float(p[i]), "v": float(p[j]), "C_uv": float(a[i, j]), "C_vu": float(a[j, i]),
         "excess": float(diff[i, j])}
        for i, j in bad
    ]
    return OrderCheckResult.from_witnesses("symmetry", witnesses, p, tol,
                                           {"max_abs_diff": float(diff.max())})
