"""Disclosure-limitation methods: microaggregation and noise perturbation."""
from __future__ import annotations

import numpy as np

from .tables import Microtable

STATS = ("mean", "sum")


def microaggregate(
    t: Microtable, k: int, stat: str = "mean"
) -> tuple[Microtable, dict[str, int]]:
    """Replace each row by its group's aggregate, groups of size k to 2k-1.

    Grouping walks from the outside in: take the remaining record farthest
    from the centroid of what is left, group it with its k-1 nearest
    remaining neighbors, repeat; when fewer than k records remain they join
    the group formed last.  Distances are Euclidean on the raw values; ties
    resolve to the lowest row index so the grouping is deterministic.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if stat not in STATS:
        raise ValueError(f"stat must be one of {STATS}, got {stat!r}")
    if t.n_rows < k:
        raise ValueError(f"table has {t.n_rows} rows, fewer than k={k}")

    remaining = list(range(t.n_rows))
    group_of = np.full(t.n_rows, -1, dtype=int)
    n_groups = 0
    while len(remaining) >= k:
        pool = t.values[remaining]
        centroid = pool.mean(axis=0)
        d_centroid = np.linalg.norm(pool - centroid, axis=1)
        far_pos = int(np.argmax(d_centroid))  # argmax takes the first maximum
        d_far = np.linalg.norm(pool - pool[far_pos], axis=1)
        order = np.lexsort((np.arange(len(remaining)), d_far))
        member_pos = {int(pos) for pos in order[:k]}  # the far record is at distance 0
        for pos in member_pos:
            group_of[remaining[pos]] = n_groups
        remaining = [r for i, r in enumerate(remaining) if i not in member_pos]
        n_groups += 1
    for r in remaining:  # fewer than k left over; they join the last group
        group_of[r] = n_groups - 1

    released = np.empty_like(t.values)
    for g in range(n_groups):
        members = np.flatnonzero(group_of == g)
        agg = t.values[members].mean(axis=0) if stat == "mean" else t.values[members].sum(axis=0)
        released[members] = agg

    groups = {rid: int(group_of[i]) for i, rid in enumerate(t.ids)}
    return (
        Microtable(columns=t.columns, ids=t.ids, values=released),
        groups,
    )


def perturb(t: Microtable, lam: float, seed: int) -> Microtable:
    """Add zero-mean Gaussian noise, sd = lam times each column's sample sd.

    lam = 0 returns the values unchanged; a constant column has sample sd 0
    and so is never perturbed.  Deterministic per seed.
    """
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    if lam == 0 or t.n_rows == 0:
        return Microtable(columns=t.columns, ids=t.ids, values=t.values.copy())
    sd = t.values.std(axis=0, ddof=1) if t.n_rows > 1 else np.zeros(len(t.columns))
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, 1.0, size=t.values.shape) * (lam * sd)
    return Microtable(columns=t.columns, ids=t.ids, values=t.values + noise)
