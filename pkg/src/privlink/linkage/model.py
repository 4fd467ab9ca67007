"""Match/non-match mixture model: weights, thresholds, EM estimation.

Candidate pairs are scored by the log likelihood ratio of their comparison
vector under a two-class mixture (match M vs non-match U) with conditional
independence across features.  Scores above the upper threshold are links,
below the lower threshold non-links, and everything between (boundaries
included) is a possible link routed to neither side.
"""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from itertools import product

from ..errors import CapacityError
from .schema import ComparisonVector

DEFAULT_FLOOR = 1e-4
ENUMERATION_CAP = 1_000_000

# slack for cumulative-mass comparisons so float products such as 0.1*0.1
# do not fall on the wrong side of an exact rate bound
_MASS_TOL = 1e-9
_WEIGHT_TIE_TOL = 1e-9


class Classification(enum.Enum):
    LINK = "link"
    POSSIBLE = "possible"
    NONLINK = "nonlink"


@dataclass(frozen=True)
class Thresholds:
    """Upper/lower score cutoffs; scores in [t_lambda, t_mu] stay possible."""

    t_mu: float
    t_lambda: float

    def __post_init__(self):
        if self.t_lambda > self.t_mu:
            raise ValueError(f"t_lambda {self.t_lambda} exceeds t_mu {self.t_mu}")


@dataclass(frozen=True)
class LinkageModel:
    """Per-feature, per-level outcome probabilities plus the match prior.

    m[f][l] = P(level l | match) and u[f][l] = P(level l | non-match).
    Every probability is kept inside [floor, 1 - floor] so no weight is
    ever infinite.
    """

    m: tuple[tuple[float, ...], ...]
    u: tuple[tuple[float, ...], ...]
    p: float
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if len(self.m) != len(self.u):
            raise ValueError("m and u must cover the same features")
        for f, (mrow, urow) in enumerate(zip(self.m, self.u)):
            if len(mrow) != len(urow) or len(mrow) < 2:
                raise ValueError(f"feature {f}: m and u need matching arity >= 2")
            for row, name in ((mrow, "m"), (urow, "u")):
                if abs(sum(row) - 1.0) > 1e-9:
                    raise ValueError(f"feature {f}: {name} rows must sum to 1")
                if any(x < self.floor or x > 1.0 - self.floor for x in row):
                    raise ValueError(
                        f"feature {f}: {name} entries must lie in [floor, 1-floor]"
                    )
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"match prior must be in (0,1), got {self.p}")

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.m)


def default_init(
    arities: tuple[int, ...], p: float = 0.05, floor: float = DEFAULT_FLOOR
) -> LinkageModel:
    """Starting point for EM: top (most-similar) level gets 0.9 under M and
    0.1 under U, the remainder spread evenly over the lower levels."""
    m_rows, u_rows = [], []
    for k in arities:
        m_rows.append(tuple([0.1 / (k - 1)] * (k - 1) + [0.9]))
        u_rows.append(tuple([0.9 / (k - 1)] * (k - 1) + [0.1]))
    return LinkageModel(m=tuple(m_rows), u=tuple(u_rows), p=p, floor=floor)


def agreement_weight(gamma: ComparisonVector, model: LinkageModel) -> float:
    """Sum of per-feature log(m/u); features flagged missing contribute 0."""
    gamma.check_arities(model.arities)
    total = 0.0
    for f, (level, masked) in enumerate(zip(gamma.levels, gamma.missing_mask)):
        if not masked:
            total += math.log(model.m[f][level] / model.u[f][level])
    return total


def classify(score: float, th: Thresholds) -> Classification:
    if score > th.t_mu:
        return Classification.LINK
    if score < th.t_lambda:
        return Classification.NONLINK
    return Classification.POSSIBLE


def _pair_likelihoods(
    levels: tuple[int, ...], mask: tuple[bool, ...], model: LinkageModel
) -> tuple[float, float]:
    """(P(gamma|M), P(gamma|U)) with masked features contributing factor 1."""
    pm = pu = 1.0
    for f, (level, masked) in enumerate(zip(levels, mask)):
        if not masked:
            pm *= model.m[f][level]
            pu *= model.u[f][level]
    return pm, pu


def mixture_log_likelihood(gammas: list[ComparisonVector], model: LinkageModel) -> float:
    """Log-likelihood of the observed vectors under the two-class mixture."""
    total = 0.0
    for (levels, mask), count in _aggregate(gammas).items():
        pm, pu = _pair_likelihoods(levels, mask, model)
        total += count * math.log(model.p * pm + (1.0 - model.p) * pu)
    return total


def _aggregate(gammas: list[ComparisonVector]) -> Counter:
    """Collapse the pair list to unique (levels, mask) configurations."""
    return Counter((g.levels, g.missing_mask) for g in gammas)


def _floor_simplex(weights: list[float], floor: float) -> tuple[float, ...]:
    """Project weighted counts onto the probability simplex with a floor.

    Returns the maximizer of sum w_l * log(t_l) subject to sum t = 1 and
    t_l >= floor: entries whose proportional share falls below the floor are
    pinned there and the rest rescaled, repeated until stable.  With arity k
    the implied upper bound t_l <= 1 - (k-1)*floor holds automatically.
    """
    k = len(weights)
    if k * floor >= 1.0:
        raise ValueError(f"floor {floor} infeasible for arity {k}")
    out = [0.0] * k
    free = set(range(k))
    pinned_mass = 0.0
    while True:
        total = sum(weights[l] for l in free)
        if total <= 0.0:
            share = (1.0 - pinned_mass) / len(free)
            for l in free:
                out[l] = share
            break
        # divide by total first: weights may be subnormal, and a huge scale
        # factor would overflow to inf and poison the products
        remaining = 1.0 - pinned_mass
        below = [l for l in free if (weights[l] / total) * remaining < floor]
        if not below:
            for l in free:
                out[l] = (weights[l] / total) * remaining
            break
        for l in below:
            out[l] = floor
            pinned_mass += floor
            free.remove(l)
    # absorb rounding into the largest entry so the row sums to 1 exactly
    # and never breaches 1 - floor by an ulp when everything else is pinned
    top = max(range(k), key=out.__getitem__)
    out[top] = 1.0 - math.fsum(out[l] for l in range(k) if l != top)
    return tuple(out)


def fit_em(
    gammas: list[ComparisonVector],
    init: LinkageModel,
    max_iter: int = 200,
    tol: float = 1e-6,
    floor: float = DEFAULT_FLOOR,
    loglik_trace: list[float] | None = None,
) -> LinkageModel:
    """Estimate (m, u, p) by EM over the observed comparison vectors.

    The E-step computes each pair's posterior match probability; the M-step
    re-estimates level frequencies weighted by those posteriors, projected
    onto the floored simplex.  Stops when the largest absolute parameter
    change drops below tol or after max_iter iterations.  Deterministic.

    When loglik_trace is supplied it receives the mixture log-likelihood of
    every visited parameter set, the initial one included.
    """
    if not gammas:
        raise ValueError("cannot fit a model to an empty list of comparison vectors")
    for g in gammas:
        g.check_arities(init.arities)

    counts = _aggregate(gammas)
    n_pairs = len(gammas)
    arities = init.arities
    n_feat = len(arities)
    model = init
    if loglik_trace is not None:
        loglik_trace.append(mixture_log_likelihood(gammas, model))

    for _ in range(max_iter):
        # E-step: posterior match weight per unique configuration
        post = {}
        for key in counts:
            levels, mask = key
            pm, pu = _pair_likelihoods(levels, mask, model)
            num = model.p * pm
            post[key] = num / (num + (1.0 - model.p) * pu)

        # M-step: posterior-weighted level frequencies per feature
        m_acc = [[0.0] * k for k in arities]
        u_acc = [[0.0] * k for k in arities]
        p_acc = 0.0
        for (levels, mask), count in counts.items():
            w = post[(levels, mask)]
            p_acc += count * w
            for f in range(n_feat):
                if not mask[f]:
                    m_acc[f][levels[f]] += count * w
                    u_acc[f][levels[f]] += count * (1.0 - w)

        new_m, new_u = [], []
        for f in range(n_feat):
            # a feature observed on no pair keeps its current distribution
            if sum(m_acc[f]) > 0.0:
                new_m.append(_floor_simplex(m_acc[f], floor))
            else:
                new_m.append(model.m[f])
            if sum(u_acc[f]) > 0.0:
                new_u.append(_floor_simplex(u_acc[f], floor))
            else:
                new_u.append(model.u[f])
        new_p = min(max(p_acc / n_pairs, floor), 1.0 - floor)

        delta = abs(new_p - model.p)
        for f in range(n_feat):
            for old_row, new_row in ((model.m[f], new_m[f]), (model.u[f], new_u[f])):
                for a, b in zip(old_row, new_row):
                    delta = max(delta, abs(a - b))

        model = LinkageModel(m=tuple(new_m), u=tuple(new_u), p=new_p, floor=floor)
        if loglik_trace is not None:
            loglik_trace.append(mixture_log_likelihood(gammas, model))
        if delta < tol:
            break
    return model


def choose_thresholds(
    model: LinkageModel,
    mu: float,
    lam: float,
    cap: int = ENUMERATION_CAP,
) -> Thresholds:
    """Pick score cutoffs bounding the two error masses.

    All level configurations are enumerated and sorted by weight.  The link
    region is the largest top segment whose total U-mass stays within mu;
    the non-link region the largest bottom segment whose M-mass stays within
    lam.  Cutoffs are placed midway between adjacent distinct weights, so
    equal-weight configurations always land on the same side.  A rate of 0
    yields an infinite sentinel; if the two regions would overlap, the lower
    cutoff is raised to the upper one, leaving an empty possible region.
    """
    if not 0.0 <= mu < 1.0 or not 0.0 <= lam < 1.0:
        raise ValueError("error rates must lie in [0, 1)")
    arities = model.arities
    n_configs = math.prod(arities)
    if n_configs > cap:
        raise CapacityError(
            f"{n_configs} level configurations exceed the cap of {cap}; coarsen bins"
        )

    scored = []
    for levels in product(*(range(k) for k in arities)):
        w = sum(math.log(model.m[f][l] / model.u[f][l]) for f, l in enumerate(levels))
        pm = math.prod(model.m[f][l] for f, l in enumerate(levels))
        pu = math.prod(model.u[f][l] for f, l in enumerate(levels))
        scored.append((w, pm, pu))
    scored.sort(key=lambda t: -t[0])

    # merge configurations whose weights coincide up to rounding: a cutoff
    # can never separate them
    groups: list[list[float]] = []  # [weight, m-mass, u-mass]
    for w, pm, pu in scored:
        if groups and groups[-1][0] - w <= _WEIGHT_TIE_TOL:
            groups[-1][1] += pm
            groups[-1][2] += pu
        else:
            groups.append([w, pm, pu])

    n_link = 0
    acc_u = 0.0
    for g in groups:
        if acc_u + g[2] <= mu + _MASS_TOL:
            acc_u += g[2]
            n_link += 1
        else:
            break

    n_nonlink = 0
    acc_m = 0.0
    for g in reversed(groups):
        if acc_m + g[1] <= lam + _MASS_TOL:
            acc_m += g[1]
            n_nonlink += 1
        else:
            break

    if n_link == 0:
        t_mu = math.inf
    elif n_link == len(groups):
        t_mu = groups[-1][0] - 1.0
    else:
        t_mu = (groups[n_link - 1][0] + groups[n_link][0]) / 2.0

    if n_nonlink == 0:
        t_lambda = -math.inf
    elif n_nonlink == len(groups):
        t_lambda = groups[0][0] + 1.0
    else:
        cut = len(groups) - n_nonlink
        t_lambda = (groups[cut - 1][0] + groups[cut][0]) / 2.0

    if t_lambda > t_mu:
        t_lambda = t_mu
    return Thresholds(t_mu=t_mu, t_lambda=t_lambda)
