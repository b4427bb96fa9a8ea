"""
End-to-end workflow: price or loss files, semiparametric margins, AIC copula
selection, measure reports with rank columns, and plot-ready figure data.

Outputs are deterministic: floats are written with ``repr`` and JSON keys are
sorted, so identical configuration and inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ._rng import GENERATOR_NAME, make_rng
from .copulas import Copula, GumbelCopula, aic_table, pseudo_observations
from .distortion import l_alpha
from .distributions import QUAD_SETTINGS, Gamma, Marginal, Normal, ShiftScale, StudentT
from .errors import DomainError, JmesError, UnknownFigure
from .measures import (
    MEASURE_NAMES,
    BivariateModel,
    delta_jmes_simple,
    delta_r_jmes_simple,
    full_report,
    jmes,
)
from .pot import SemiParametricMarginal, build_semiparametric, log_losses

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "PairSpec",
    "PipelineConfig",
    "load_config",
    "Series",
    "read_series",
    "write_price_csv",
    "write_loss_csv",
    "align_pair",
    "synthetic_prices",
    "PairResult",
    "run_pair",
    "run_pipeline",
    "rank_rows",
    "write_report",
    "FigureData",
    "FIGURE_IDS",
    "figure_data",
    "emit_figures",
]

MIN_ALIGNED = 500
PSEUDO_MODES = ("ranks", "fitted")
DEFAULT_CANDIDATES = ("gaussian", "student_t", "gumbel", "fgm", "independence")
# ratio measures ranked on absolute value, as the tables do for the MES ratio
_ABS_RANKED = ("drMES",)


# --- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class PairSpec:
    """One market pair: ``x`` is the stressed (conditioning) series, ``y`` the target."""

    name: str
    x: str
    y: str
    lag_x: int = 0

    def __post_init__(self):
        if self.lag_x not in (0, 1):
            raise DomainError(f"pair {self.name!r}: lag_x must be 0 or 1, got {self.lag_x!r}")
        if not self.name:
            raise DomainError("pair name must be non-empty")


def _probs(name, values):
    out = tuple(float(v) for v in values)
    if not out:
        raise DomainError(f"{name} must be a non-empty list")
    for v in out:
        if not 0.0 < v < 1.0:
            raise DomainError(f"{name} entries must lie in (0, 1), got {v!r}")
    return out


@dataclass(frozen=True)
class PipelineConfig:
    pairs: tuple = ()
    alphas: tuple = (0.95,)
    betas: tuple = (0.95,)
    tail_frac: float = 0.1
    copula_candidates: tuple = DEFAULT_CANDIDATES
    mc_n: int = 1_000_000
    seed: int = 0
    output_dir: str = "out"
    pseudo_obs: str = "ranks"

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(
            p if isinstance(p, PairSpec) else PairSpec(**p) for p in self.pairs))
        object.__setattr__(self, "alphas", _probs("alphas", self.alphas))
        object.__setattr__(self, "betas", _probs("betas", self.betas))
        object.__setattr__(self, "copula_candidates", tuple(c.lower() for c in self.copula_candidates))
        if not 0.0 < self.tail_frac < 0.5:
            raise DomainError("tail_frac must lie in (0, 0.5)")
        if self.pseudo_obs not in PSEUDO_MODES:
            raise DomainError(f"pseudo_obs must be one of {PSEUDO_MODES}")
        if int(self.mc_n) <= 0:
            raise DomainError("mc_n must be positive")
        names = [p.name for p in self.pairs]
        if len(set(names)) != len(names):
            raise DomainError("pair names must be unique")

    def replace(self, **changes) -> PipelineConfig:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update({k: v for k, v in changes.items() if v is not None})
        return PipelineConfig(**d)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["pairs"] = [asdict(p) for p in self.pairs]
        for k in ("alphas", "betas", "copula_candidates"):
            d[k] = list(d[k])
        return d


def load_config(path) -> PipelineConfig:
    """Read a TOML configuration; relative pair paths resolve against its folder."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise DomainError(f"{path}: {exc}") from None
    known = set(PipelineConfig.__dataclass_fields__)
    extra = set(raw) - known
    if extra:
        raise DomainError(f"{path}: unknown keys {sorted(extra)}")
    base = path.parent
    pairs = []
    for p in raw.get("pairs", []):
        p = dict(p)
        for k in ("x", "y"):
            if k in p and not os.path.isabs(p[k]):
                p[k] = str(base / p[k])
        try:
            pairs.append(PairSpec(**p))
        except TypeError as exc:
            raise DomainError(f"{path}: bad pair entry {p!r}: {exc}") from None
    raw["pairs"] = pairs
    if "output_dir" in raw and not os.path.isabs(raw["output_dir"]):
        raw["output_dir"] = str(base / raw["output_dir"])
    return PipelineConfig(**raw)


# --- ingestion -----------------------------------------------------------------


@dataclass(frozen=True)
class Series:
    """A parsed input file: prices with dates, or bare losses."""

    kind: str  # "prices" or "losses"
    values: np.ndarray
    dates: tuple | None = None


def _parse_date(text, where):
    try:
        if len(text) != 10:
            raise ValueError
        return _dt.date.fromisoformat(text)
    except ValueError:
        raise DomainError(f"{where}: invalid ISO date {text!r}") from None


def _parse_float(text, where):
    try:
        x = float(text)
    except ValueError:
        raise DomainError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(x):
        raise DomainError(f"{where}: non-finite value {text!r}")
    return x


def read_series(path) -> Series:
    """Read a ``date,close`` price CSV or a single-column loss CSV.

    Dates must be strict ``YYYY-MM-DD`` and strictly increasing.  A loss file
    may carry a one-word header.
    """
    path = str(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DomainError(f"{path}: empty file")
    head = [c.strip().lower() for c in rows[0]]
    if len(head) == 2:
        if head != ["date", "close"]:
            raise DomainError(f"{path}: expected header 'date,close', got {rows[0]!r}")
        dates, vals = [], []
        for i, r in enumerate(rows[1:], start=2):
            if len(r) != 2:
                raise DomainError(f"{path}:{i}: expected 2 fields")
            dates.append(_parse_date(r[0].strip(), f"{path}:{i}"))
            vals.append(_parse_float(r[1].strip(), f"{path}:{i}"))
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise DomainError(f"{path}: dates must be strictly increasing")
        return Series("prices", np.array(vals, float), tuple(dates))
    if any(len(r) != 1 for r in rows):
        raise DomainError(f"{path}: expected one column of losses or 'date,close'")
    body = rows
    try:
        float(rows[0][0])
    except ValueError:
        body = rows[1:]
    vals = [_parse_float(r[0].strip(), f"{path}:{i}") for i, r in enumerate(body, start=len(rows) - len(body) + 1)]
    return Series("losses", np.array(vals, float))


def write_price_csv(path, dates, prices):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "close"])
        for d, p in zip(dates, prices):
            w.writerow([d.isoformat(), repr(float(p))])


def write_loss_csv(path, losses):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["loss"])
        for x in losses:
            w.writerow([repr(float(x))])


def align_pair(xs: Series, ys: Series, lag_x: int = 0):
    """Paired losses ``(L^X_{t-lag}, L^Y_t)`` on common trading days.

    Price series are first restricted to the dates both markets traded; losses
    are computed on that common calendar.  Loss files are aligned by position.

    Returns
    -------
    x, y : ndarray
    info : dict
        ``n_aligned``, ``dropped_x``, ``dropped_y`` (rows present in only one
        input) and ``lag_x``.
    """
    if xs.kind != ys.kind:
        raise DomainError("cannot pair a price file with a loss file")
    if xs.kind == "prices":
        common = sorted(set(xs.dates) & set(ys.dates))
        dropped_x = len(xs.dates) - len(common)
        dropped_y = len(ys.dates) - len(common)
        ix = {d: i for i, d in enumerate(xs.dates)}
        iy = {d: i for i, d in enumerate(ys.dates)}
        px = xs.values[[ix[d] for d in common]]
        py = ys.values[[iy[d] for d in common]]
        if len(common) < 2:
            raise DomainError("fewer than two common trading days")
        lx, ly = log_losses(px), log_losses(py)
    else:
        n = min(xs.values.size, ys.values.size)
        dropped_x, dropped_y = xs.values.size - n, ys.values.size - n
        lx, ly = xs.values[:n], ys.values[:n]
    if lag_x:
        lx, ly = lx[:-lag_x], ly[lag_x:]
    info = {"n_aligned": int(lx.size), "dropped_x": int(dropped_x), "dropped_y": int(dropped_y),
            "lag_x": int(lag_x)}
    return lx, ly, info


def _business_days(start: _dt.date, n: int):
    out, d = [], start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += _dt.timedelta(days=1)
    return out


def synthetic_prices(copula: Copula, n: int, seed: int = 0, x_marginal: Marginal | None = None,
                     y_marginal: Marginal | None = None, lag_x: int = 0,
                     start: str = "2010-01-04", p0: float = 100.0):
    """Synthetic price paths whose daily losses follow ``copula`` and the margins.

    ``(L^X_{t-lag_x}, L^Y_t)`` is drawn from the copula for each day, so a pair
    configured with the same ``lag_x`` recovers the dependence.  Default
    margins are unit-scale Student t with 4 degrees of freedom.

    Returns
    -------
    dates : list of datetime.date
    x_prices, y_prices : ndarray
        ``n + lag_x + 1`` prices each, losses ``-100 log(p_t / p_{t-1})``.
    """
    if n < 1:
        raise DomainError("n must be positive")
    xm = x_marginal or ShiftScale(StudentT(4.0), 0.0, 1.0)
    ym = y_marginal or ShiftScale(StudentT(4.0), 0.0, 1.0)
    u, v = copula.sample(n, make_rng(seed, stream=0))
    lx = np.asarray(xm.quantile(u), float)
    ly = np.asarray(ym.quantile(v), float)
    if lag_x:
        # x leads: x loss on day t-1 pairs with y loss on day t
        pad = np.asarray(xm.quantile(make_rng(seed, stream=1).random(lag_x)), float)
        lx = np.concatenate([lx, pad])
        ly = np.concatenate([np.asarray(ym.quantile(make_rng(seed, stream=2).random(lag_x)), float), ly])
    dates = _business_days(_dt.date.fromisoformat(start), lx.size + 1)

    def path(losses):
        return p0 * np.exp(-np.concatenate([[0.0], np.cumsum(losses)]) / 100.0)

    return dates, path(lx), path(ly)


# --- per-pair workflow -----------------------------------------------------------


@dataclass
class PairResult:
    name: str
    reports: list = field(default_factory=list)
    alignment: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    copula: Copula | None = None
    aic: list = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _marginal_summary(m: SemiParametricMarginal) -> dict:
    return {
        "u_lower": m.u_l, "u_upper": m.u_r, "n": m.n, "n_lower": m.n_l, "n_upper": m.n_r,
        "lower": {"xi": m.lower.xi, "scale": m.lower.scale, "loglik": m.lower.loglik},
        "upper": {"xi": m.upper.xi, "scale": m.upper.scale, "loglik": m.upper.loglik},
    }


def _pseudo(cfg, lx, ly, mx, my):
    if cfg.pseudo_obs == "ranks":
        return pseudo_observations(lx, ly)
    lo, hi = 1e-10, 1.0 - 1e-10
    return (np.clip(np.asarray(mx.cdf(lx), float), lo, hi),
            np.clip(np.asarray(my.cdf(ly), float), lo, hi))


def run_pair(cfg: PipelineConfig, pair: PairSpec) -> PairResult:
    """Fit one pair and report every measure at each ``(alpha, beta)``.

    Failures are recorded on the result instead of raised so a batch run can
    continue with the remaining pairs.
    """
    res = PairResult(pair.name)
    try:
        lx, ly, info = align_pair(read_series(pair.x), read_series(pair.y), pair.lag_x)
        res.alignment = info
        if info["n_aligned"] < MIN_ALIGNED:
            warnings.warn(f"pair {pair.name!r}: only {info['n_aligned']} aligned observations",
                          RuntimeWarning, stacklevel=2)
        mx = build_semiparametric(lx, cfg.tail_frac)
        my = build_semiparametric(ly, cfg.tail_frac)
        res.fits = {"x": _marginal_summary(mx), "y": _marginal_summary(my)}
        u, v = _pseudo(cfg, lx, ly, mx, my)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rows = aic_table(cfg.copula_candidates, u, v)
        if not rows:
            raise DomainError("no candidate copula could be fitted")
        res.aic = [{k: r[k] for k in ("family", "loglik", "k", "aic")} | {"params": list(r["copula"].params)}
                   for r in rows]
        res.copula = rows[0]["copula"]
        model = BivariateModel(mx, my, res.copula)
        for a in cfg.alphas:
            for b in cfg.betas:
                res.reports.append(full_report(model, a, b))
    except (JmesError, OSError, ArithmeticError, ValueError) as exc:
        res.error = f"{type(exc).__name__}: {exc}"
    return res


def _rank(values: dict, absolute=False) -> dict:
    """Ascending ranks (1 = smallest), ties broken by name."""
    keyed = sorted((abs(v) if absolute else v, name) for name, v in values.items())
    return {name: i + 1 for i, (_, name) in enumerate(keyed)}


def rank_rows(named_reports) -> list[dict]:
    """Table rows ``pair, alpha, beta, <measures>, rank_<measure>, flags``.

    ``named_reports`` is an iterable of ``(name, RiskReport)``.  Ranks are
    taken within each ``(alpha, beta)`` over pairs that have the measure.
    """
    rows = []
    for name, rep in named_reports:
        row = {"pair": name, **rep.csv_row()}
        row["_report"] = rep
        rows.append(row)
    groups = {}
    for row in rows:
        groups.setdefault((row["_report"].alpha, row["_report"].beta), []).append(row)
    for group in groups.values():
        for m in MEASURE_NAMES:
            vals = {r["pair"]: r["_report"].entries[m] for r in group if m in r["_report"].entries}
            ranks = _rank(vals, absolute=m in _ABS_RANKED)
            for r in group:
                r["rank_" + m] = ranks.get(r["pair"], "")
    for r in rows:
        del r["_report"]
    rows.sort(key=lambda r: (float(r["alpha"]), float(r["beta"]), r["pair"]))
    return rows


def table_header() -> list[str]:
    return ["pair", "alpha", "beta", *MEASURE_NAMES, *("rank_" + m for m in MEASURE_NAMES), "flags"]


def run_pipeline(cfg: PipelineConfig) -> list[PairResult]:
    return [run_pair(cfg, p) for p in cfg.pairs]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def write_report(cfg: PipelineConfig, results, out_dir=None, stem: str = "report"):
    """Write ``<stem>.csv`` and the ``<stem>.json`` provenance sidecar.

    Returns the two paths.
    """
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = rank_rows((r.name, rep) for r in results if r.ok for rep in r.reports)
    csv_path = out / f"{stem}.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=table_header(), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    side = {
        "config": cfg.to_dict(),
        "settings": {"quadrature": dict(QUAD_SETTINGS), "generator": GENERATOR_NAME,
                     "min_aligned": MIN_ALIGNED, "rank_order": "ascending, ties by pair name",
                     "abs_ranked": list(_ABS_RANKED)},
        "pairs": [
            {"name": r.name, "error": r.error, "alignment": r.alignment, "marginals": r.fits,
             "copula": None if r.copula is None else {"family": r.copula.family,
                                                      "params": list(r.copula.params)},
             "aic": r.aic,
             "flags": [{"alpha": rep.alpha, "beta": rep.beta, **f} for rep in r.reports for f in rep.flags]}
            for r in results
        ],
    }
    json_path = out / f"{stem}.json"
    with open(json_path, "w") as fh:
        json.dump(_jsonable(side), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


# --- figure data -----------------------------------------------------------------


@dataclass(frozen=True)
class FigureData:
    figure_id: str
    columns: dict

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise DomainError(f"{self.figure_id}: column lengths differ")

    def __len__(self):
        return len(next(iter(self.columns.values()), []))

    def write_csv(self, path):
        names = list(self.columns)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for row in zip(*(self.columns[k] for k in names)):
                w.writerow([repr(float(x)) for x in row])


FIGURE_IDS = ("fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d")

# (X margin, Y margin, measure) for the paired-risk figures
_PAIRED = {
    "1": (Gamma(3.0, 1.5), Gamma(2.0, 2.5), "JMES"),
    "2": (Gamma(1.5, 2.5), Gamma(2.0, 3.0), "dJMES"),
    "3": (Gamma(2.0, 1.5), Gamma(1.0, 1.0), "drJMES"),
}
# (Y_1 margin, Y_2 margin, measure) for the two-vector figures; C_1 = Gumbel(3), C_2 = Gumbel(2)
_TWO_VECTOR = {
    "fig4b": (Gamma(3.0, 1.5), Gamma(2.0, 2.5), "JMES"),
    "fig4c": (Gamma(1.5, 2.5), Gamma(2.0, 3.0), "dJMES"),
    "fig4d": (Gamma(2.0, 1.5), Gamma(1.0, 1.0), "drJMES"),
}
THETA_GRID = np.round(np.linspace(1.0, 5.0, 41), 10)
THETA_SURFACE = 3.0
FIG1A_LEVELS = ((0.9, 0.8), (0.95, 0.9), (0.5, 0.9), (0.9, 0.5))
SURFACE_LEVELS = np.round(np.linspace(0.0, 0.95, 20), 10)
FIG4_ALPHAS = np.round(np.linspace(0.6, 0.8, 11), 10)
FIG4_BETAS = np.round(np.linspace(0.82, 0.99, 18), 10)
FIG4_T = np.round(np.linspace(0.82, 0.999, 180), 10)


def _measure(b: BivariateModel, name, a, be):
    if name == "JMES":
        return jmes(b, a, be)
    if name == "dJMES":
        return delta_jmes_simple(b, a, be)
    return delta_r_jmes_simple(b, a, be)


def _paired_theta(key, levels):
    xm, ym, name = _PAIRED[key]
    cols = {"theta": [], "alpha": [], "beta": [], "x_given_y": [], "y_given_x": []}
    for a, be in levels:
        for th in THETA_GRID:
            b = BivariateModel(xm, ym, GumbelCopula(float(th)))
            cols["theta"].append(th)
            cols["alpha"].append(a)
            cols["beta"].append(be)
            cols["x_given_y"].append(_measure(b.swap(), name, a, be))
            cols["y_given_x"].append(_measure(b, name, a, be))
    return cols


def _paired_surface(key):
    xm, ym, name = _PAIRED[key]
    b = BivariateModel(xm, ym, GumbelCopula(THETA_SURFACE))
    cols = {"alpha": [], "beta": [], "x_given_y": [], "y_given_x": []}
    for a in SURFACE_LEVELS:
        for be in SURFACE_LEVELS:
            cols["alpha"].append(a)
            cols["beta"].append(be)
            cols["x_given_y"].append(_measure(b.swap(), name, a, be))
            cols["y_given_x"].append(_measure(b, name, a, be))
    return cols


def l_alpha_derivative(c1: Copula, c2: Copula, alpha: float, t):
    """``d/dt`` of ``C̄_2(alpha, t) / C̄_1(alpha, t)`` from the conditional cdfs."""
    t = np.asarray(t, float)
    t1 = np.asarray(c1.tail(alpha, t), float)
    t2 = np.asarray(c2.tail(alpha, t), float)
    d1 = np.asarray(c1.partial2(alpha, t), float) - 1.0
    d2 = np.asarray(c2.partial2(alpha, t), float) - 1.0
    return (d2 * t1 - t2 * d1) / t1**2


def _fig4a():
    c1, c2 = GumbelCopula(3.0), GumbelCopula(2.0)
    cols = {"alpha": [], "t": [], "l_alpha": [], "dl_alpha": []}
    for a in FIG4_ALPHAS:
        cols["alpha"].extend([a] * FIG4_T.size)
        cols["t"].extend(FIG4_T)
        cols["l_alpha"].extend(np.asarray(l_alpha(c1, c2, a, FIG4_T), float))
        cols["dl_alpha"].extend(l_alpha_derivative(c1, c2, a, FIG4_T))
    return cols


def _two_vector(fid):
    y1, y2, name = _TWO_VECTOR[fid]
    b1 = BivariateModel(Normal(), y1, GumbelCopula(3.0))
    b2 = BivariateModel(Normal(), y2, GumbelCopula(2.0))
    cols = {"alpha": [], "beta": [], "first": [], "second": []}
    for a in FIG4_ALPHAS:
        for be in FIG4_BETAS:
            cols["alpha"].append(a)
            cols["beta"].append(be)
            cols["first"].append(_measure(b1, name, a, be))
            cols["second"].append(_measure(b2, name, a, be))
    return cols


def figure_data(fid: str) -> FigureData:
    """Compute the data behind one figure id.

    Paired-risk figures use Gumbel copulas on gamma margins: ``a`` panels sweep
    ``theta`` over [1, 5], ``b`` panels sweep ``(alpha, beta)`` at ``theta = 3``.
    ``fig4a`` tabulates ``l_alpha`` and its derivative for Gumbel(3) against
    Gumbel(2); ``fig4b-d`` compare two vectors on ``[0.6, 0.8] x [0.82, 0.99]``.
    """
    if fid not in FIGURE_IDS:
        raise UnknownFigure(fid)
    if fid == "fig1a":
        cols = _paired_theta("1", FIG1A_LEVELS)
    elif fid in ("fig2a", "fig3a"):
        cols = _paired_theta(fid[3], ((0.9, 0.8),))
    elif fid.endswith("b") and fid[3] in _PAIRED:
        cols = _paired_surface(fid[3])
    elif fid == "fig4a":
        cols = _fig4a()
    else:
        cols = _two_vector(fid)
    return FigureData(fid, {k: [float(x) for x in v] for k, v in cols.items()})


def emit_figures(ids, out_dir) -> dict:
    """Write ``<id>.csv`` for each requested figure; returns id to path."""
    ids = list(ids)
    for fid in ids:
        if fid not in FIGURE_IDS:
            raise UnknownFigure(fid)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for fid in ids:
        path = out / f"{fid}.csv"
        figure_data(fid).write_csv(path)
        paths[fid] = path
    return paths
