"""Re-identification risk, utility, and risk-utility sweeps.

Risk is measured by the attack the rest of the toolkit exists to study: a
nearest-neighbor linkage from each released row back to the original rows,
on standardized columns.  Utility is the complement of a two-term moment
loss.  A sweep evaluates both along a parameter grid of one method.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .methods import STATS, microaggregate, perturb
from .tables import Microtable


@dataclass(frozen=True)
class RUPoint:
    """One sample of the risk-utility curve."""

    param: float
    risk: float
    utility: float

    def __post_init__(self):
        for name, v in (("param", self.param), ("risk", self.risk), ("utility", self.utility)):
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        for name, v in (("risk", self.risk), ("utility", self.utility)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {v}")


@dataclass(frozen=True)
class ReleasePlan:
    """Exactly one disclosure-limitation method with its parameters."""

    method: str  # "microaggregate" | "noise"
    k: int = 0
    stat: str = "mean"
    lam: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.method == "microaggregate":
            if self.k < 2:
                raise ValueError("microaggregate needs k >= 2")
            if self.stat not in STATS:
                raise ValueError(f"stat must be one of {STATS}")
        elif self.method == "noise":
            if self.lam < 0:
                raise ValueError("noise needs lam >= 0")
        else:
            raise ValueError(f"unknown method {self.method!r}")

    @classmethod
    def microaggregation(cls, k: int, stat: str = "mean") -> "ReleasePlan":
        return cls(method="microaggregate", k=k, stat=stat)

    @classmethod
    def noise(cls, lam: float, seed: int = 0) -> "ReleasePlan":
        return cls(method="noise", lam=lam, seed=seed)

    @classmethod
    def identity(cls) -> "ReleasePlan":
        """Release the data unchanged (noise with lam = 0)."""
        return cls(method="noise", lam=0.0)

    @property
    def param(self) -> float:
        return float(self.k) if self.method == "microaggregate" else self.lam

    def apply(self, t: Microtable) -> Microtable:
        if self.method == "microaggregate":
            released, _ = microaggregate(t, self.k, self.stat)
            return released
        return perturb(t, self.lam, self.seed)


def _standardize(values: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Z-score against the reference table's moments; constant columns are
    centered only."""
    mean = ref.mean(axis=0)
    sd = ref.std(axis=0, ddof=1) if ref.shape[0] > 1 else np.ones(ref.shape[1])
    sd = np.where(sd > 0, sd, 1.0)
    return (values - mean) / sd


def reident_risk(
    original: Microtable, released: Microtable, link_cfg: dict | None = None
) -> float:
    """Fraction of released rows whose unique nearest original is their source.

    The attack sees released values only; ids are used solely to score a
    claimed link as right or wrong.  A released row whose minimum distance
    is attained by more than one original row counts as a failure.
    """
    if original.columns != released.columns:
        raise ValueError(
            f"column mismatch: {original.columns} vs {released.columns}"
        )
    if set(original.ids) != set(released.ids):
        raise ValueError("released table must carry the same ids for scoring")
    if original.n_rows == 0:
        raise ValueError("cannot measure risk on an empty table")
    standardize = True if link_cfg is None else link_cfg.get("standardize", True)
    if standardize:
        orig = _standardize(original.values, original.values)
        rel = _standardize(released.values, original.values)
    else:
        orig, rel = original.values, released.values

    true_row = {rid: i for i, rid in enumerate(original.ids)}
    hits = 0
    chunk = 256
    for start in range(0, released.n_rows, chunk):
        block = rel[start : start + chunk]
        # (b, n) distance matrix for this block of released rows
        d = np.linalg.norm(block[:, None, :] - orig[None, :, :], axis=2)
        mins = d.min(axis=1)
        for i, row in enumerate(d):
            winners = np.flatnonzero(row == mins[i])
            if len(winners) == 1 and winners[0] == true_row[released.ids[start + i]]:
                hits += 1
    return hits / released.n_rows


def utility_loss_complement(original: Microtable, released: Microtable) -> float:
    """1 - mean per-column moment loss, each term clamped to [0,1].

    Per column the loss averages a location term |mean shift| / sd and a
    scale term |sd ratio - 1|.  A zero-variance column contributes only the
    location term, scored 0 when the mean is preserved and 1 otherwise.
    """
    if original.columns != released.columns:
        raise ValueError("column mismatch")
    if original.values.shape != released.values.shape:
        raise ValueError("shape mismatch")
    n = original.n_rows
    losses = []
    for c in range(len(original.columns)):
        o, r = original.values[:, c], released.values[:, c]
        sd_o = o.std(ddof=1) if n > 1 else 0.0
        shift = abs(r.mean() - o.mean())
        if sd_o == 0.0:
            losses.append(0.0 if shift == 0.0 else 1.0)
            continue
        t_loc = min(1.0, shift / sd_o)
        sd_r = r.std(ddof=1)
        t_scale = min(1.0, abs(sd_r / sd_o - 1.0))
        losses.append((t_loc + t_scale) / 2.0)
    return 1.0 - float(np.mean(losses))


def ru_sweep(
    t: Microtable,
    method: str,
    grid: list,
    stat: str = "mean",
    seed: int = 0,
) -> list[RUPoint]:
    """One RUPoint per grid value, in grid order."""
    if not grid:
        raise ValueError("parameter grid must be nonempty")
    points = []
    for value in grid:
        if method == "microaggregate":
            plan = ReleasePlan.microaggregation(int(value), stat)
        elif method == "noise":
            plan = ReleasePlan.noise(float(value), seed)
        else:
            raise ValueError(f"unknown method {method!r}")
        released = plan.apply(t)
        points.append(
            RUPoint(
                param=float(value),
                risk=reident_risk(t, released),
                utility=utility_loss_complement(t, released),
            )
        )
    return points
