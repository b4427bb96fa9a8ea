"""Result record shared by the order, dependence and convexity checks."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

RELATIONS = (
    "st", "icx", "disp", "epw", "lr",
    "SI", "RTI", "TP2_tail", "l_alpha_ratio", "symmetry", "convexity",
)
VERDICTS = ("holds", "violated", "inconclusive")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


@dataclass
class OrderCheckResult:
    """Verdict of a grid check, with the points that violate it.

    Attributes
    ----------
    relation : str
        One of :data:`RELATIONS`.
    verdict : str
        ``"holds"``, ``"violated"`` or ``"inconclusive"``.
    witnesses : list of dict
        Grid locations where the relation fails by more than ``tolerance``,
        with the offending values.
    grid : array
        Evaluation grid (probabilities or x values).
    tolerance : float
    details : dict
        Check-specific extras, e.g. the SI direction used.
    """

    relation: str
    verdict: str
    witnesses: list = field(default_factory=list)
    grid: np.ndarray = field(default_factory=lambda: np.empty(0))
    tolerance: float = 0.0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "violated" and not self.witnesses:
            raise ValueError("a violated verdict needs at least one witness")
        if self.verdict == "holds" and self.witnesses:
            raise ValueError("a holding verdict cannot carry witnesses")

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return _jsonable({
            "relation": self.relation,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "grid": np.asarray(self.grid, dtype=float),
            "witnesses": self.witnesses,
            "details": self.details,
        })

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_witnesses(cls, relation, witnesses, grid, tolerance, details=None, max_witnesses=50):
        """Build a result; keeps the ``max_witnesses`` worst violations."""
        witnesses = sorted(witnesses, key=lambda w: -w.get("excess", 0.0))
        details = dict(details or {})
        details["n_violations"] = len(witnesses)
        return cls(
            relation=relation,
            verdict="violated" if witnesses else "holds",
            witnesses=witnesses[:max_witnesses],
            grid=np.asarray(grid, dtype=float),
            tolerance=tolerance,
            details=details,
        )
