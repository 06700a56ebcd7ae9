"""
Manipulation deterrence: gain G(f, Q), mobilisation cost C(f) and the
critical faction size f*.

Curves are evaluated with numpy on a uniform grid over [0, 1]; the first and
last sign changes of C - G are refined by bisection.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np
from scipy import optimize

from ..errors import DomainViolation, EmptyQList
from ..utils.file_ops import setup_logging

logger = setup_logging(__name__)

GainFn = Callable[[np.ndarray, float], np.ndarray]
CostFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GameParams:
    g_max: float = 0.80
    k: float = 6.0
    c1: float = 0.55
    c2: float = 0.08
    grid_step: float = 1e-4
    tolerance: float = 1e-9

    def __post_init__(self):
        for name in ("g_max", "k", "c1", "c2", "grid_step", "tolerance"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise DomainViolation(f"{name} must be strictly positive", detail=value)
        if self.grid_step >= 1:
            raise DomainViolation("grid_step must be below 1", detail=self.grid_step)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GameParams":
        known = {k: float(v) for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, int(round(1.0 / self.grid_step)) + 1)


def _check_f(f: float) -> None:
    if not 0.0 <= f <= 1.0:
        raise DomainViolation("faction size must lie in [0, 1]", detail=f)


def _check_q(q: float) -> None:
    if not 0.0 < q < 1.0:
        raise DomainViolation("quorum must lie in (0, 1)", detail=q)


def gain_curve(f: np.ndarray, q: float, p: GameParams) -> np.ndarray:
    excess = np.maximum(np.asarray(f, dtype=float) - q, 0.0)
    return -p.g_max * np.expm1(-p.k * excess)


def cost_curve(f: np.ndarray, p: GameParams) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    return p.c1 * f * f + p.c2 * f


def gain(f: float, q: float, p: GameParams) -> float:
    """G(f, Q) = g_max (1 - exp(-k max(f - Q, 0))).

    Raises:
        DomainViolation: If f is outside [0, 1] or q outside (0, 1)
    """
    _check_f(f)
    _check_q(q)
    return -p.g_max * math.expm1(-p.k * max(f - q, 0.0))


def cost(f: float, p: GameParams) -> float:
    """C(f) = c1 f^2 + c2 f.

    Raises:
        DomainViolation: If f is outside [0, 1]
    """
    _check_f(f)
    return p.c1 * f * f + p.c2 * f


@dataclass(frozen=True)
class FStarResult:
    """Critical faction size for one quorum.

    ``f_star`` is sup{f : C(f) >= G(f, q)} over [0, 1]. ``first_crossing`` ends
    the first interval on which C >= G; the two differ only when C >= G
    re-enters after the first crossing (``reentry``).
    """

    q: float
    f_star: float
    first_crossing: float
    reentry: bool = False
    no_profitable_manipulation: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "f_star": self.f_star,
            "first_crossing": self.first_crossing,
            "reentry": self.reentry,
            "no_profitable_manipulation": self.no_profitable_manipulation,
        }


def _refine(h: Callable[[float], float], lo: float, hi: float, tolerance: float) -> float:
    """Root of h on [lo, hi] with h(lo) >= 0 > h(hi)."""
    h_lo = h(lo)
    if h_lo == 0.0:
        return lo
    return float(optimize.bisect(h, lo, hi, xtol=tolerance))


def solve_critical_faction(
    q: float,
    p: GameParams,
    gain_fn: Optional[GainFn] = None,
    cost_fn: Optional[CostFn] = None,
) -> FStarResult:
    """Grid scan of C - G at ``grid_step`` followed by bisection.

    Any gain that is zero on [0, q] and any cost with C(f) > 0 for f > 0 may
    be substituted through ``gain_fn`` / ``cost_fn``.

    Raises:
        DomainViolation: If q is outside (0, 1)
    """
    _check_q(q)
    g = gain_fn or (lambda f, qq: gain_curve(f, qq, p))
    c = cost_fn or (lambda f: cost_curve(f, p))

    def h(f: float) -> float:
        arr = np.asarray([f], dtype=float)
        return float(c(arr)[0] - g(arr, q)[0])

    xs = p.grid()
    hs = np.asarray(c(xs), dtype=float) - np.asarray(g(xs, q), dtype=float)
    negative = np.flatnonzero(hs < 0.0)

    if negative.size == 0:
        logger.warning(f"No profitable manipulation for q={q}: C >= G on all of [0, 1]")
        return FStarResult(q=q, f_star=1.0, first_crossing=1.0, no_profitable_manipulation=True)

    first = int(negative[0])
    first_crossing = (
        _refine(h, float(xs[first - 1]), float(xs[first]), p.tolerance) if first > 0 else 0.0
    )

    non_negative = np.flatnonzero(hs >= 0.0)
    last = int(non_negative[-1]) if non_negative.size else 0
    reentry = last > first
    if not reentry:
        supremum = first_crossing
    elif last == len(xs) - 1:
        supremum = 1.0
    else:
        # h(xs[last]) >= 0 > h(xs[last + 1])
        supremum = _refine(h, float(xs[last]), float(xs[last + 1]), p.tolerance)

    if reentry:
        logger.info(f"C >= G re-enters for q={q}: first crossing {first_crossing:.6f}, f* {supremum:.6f}")
    logger.debug(f"f*({q}) = {supremum:.9f}, first crossing = {first_crossing:.9f}")
    return FStarResult(q=q, f_star=supremum, first_crossing=first_crossing, reentry=reentry)


def critical_faction(q: float, p: GameParams) -> float:
    """f* = sup{f : C(f) >= G(f, q)}; 1.0 if manipulation never pays."""
    return solve_critical_faction(q, p).f_star


@dataclass
class DeterrenceReport:
    params: GameParams
    results: List[FStarResult]
    f_grid: np.ndarray
    cost_samples: np.ndarray
    gain_samples: Dict[float, np.ndarray] = field(default_factory=dict)

    def summary_rows(self) -> List[Dict[str, Any]]:
        return [r.to_dict() for r in self.results]

    def curve_fieldnames(self) -> List[str]:
        return ["f", "cost"] + [f"gain_q{q:g}" for q in self.gain_samples]

    def curve_rows(self) -> List[Dict[str, Any]]:
        names = self.curve_fieldnames()[2:]
        rows = []
        for i, f in enumerate(self.f_grid):
            row: Dict[str, Any] = {"f": float(f), "cost": float(self.cost_samples[i])}
            for name, samples in zip(names, self.gain_samples.values()):
                row[name] = float(samples[i])
            rows.append(row)
        return rows


def deterrence_report(q_values: Sequence[float], p: GameParams) -> DeterrenceReport:
    """f* per quorum plus the gain and cost curves sampled at ``grid_step``.

    Raises:
        EmptyQList: If no quorum value is given
    """
    if not q_values:
        raise EmptyQList("deterrence report needs at least one quorum value")
    xs = p.grid()
    results = [solve_critical_faction(float(q), p) for q in q_values]
    gains = {float(q): gain_curve(xs, float(q), p) for q in q_values}
    for r in results:
        logger.info(f"q={r.q:g}: f*={r.f_star:.6f}")
    return DeterrenceReport(
        params=p, results=results, f_grid=xs, cost_samples=cost_curve(xs, p), gain_samples=gains
    )
