"""End-to-end linkage of two record files."""
from __future__ import annotations

from dataclasses import dataclass, field

from .blocking import candidate_pairs
from .compare import compare_fields
from .model import (
    Classification,
    LinkageModel,
    Thresholds,
    agreement_weight,
    choose_thresholds,
    classify,
    default_init,
    fit_em,
)
from .schema import FeatureSpec, Record, Schema


@dataclass(frozen=True)
class LinkConfig:
    """Everything link() needs besides the two files."""

    specs: tuple[FeatureSpec, ...]
    mu: float = 0.01
    lam: float = 0.01
    model: LinkageModel | None = None  # fit by EM when absent
    block_field: str | None = None
    schema: Schema | None = None
    em_max_iter: int = 200
    em_tol: float = 1e-6
    floor: float = 1e-4


@dataclass
class LinkageResult:
    """Classified pairs plus bookkeeping; the three lists partition all
    compared pairs."""

    links: list[tuple[str, str, float]]
    possibles: list[tuple[str, str, float]]
    nonlinks: list[tuple[str, str, float]]
    candidate_count: int
    blocked_out_count: int
    model: LinkageModel = field(repr=False, default=None)
    thresholds: Thresholds = None


def link(file_a: list[Record], file_b: list[Record], config: LinkConfig) -> LinkageResult:
    """Compare candidate pairs, fit the model if needed, classify every pair.

    Deterministic: candidate order follows file order, EM is deterministic,
    and thresholds depend only on the model and the requested error rates.
    """
    if config.schema is not None:
        for rec in file_a:
            rec.check_against(config.schema)
        for rec in file_b:
            rec.check_against(config.schema)

    pairs = candidate_pairs(file_a, file_b, config.block_field)
    candidate_count = len(pairs)
    blocked_out = len(file_a) * len(file_b) - candidate_count

    specs = list(config.specs)
    gammas = [compare_fields(a, b, specs, config.schema) for a, b in pairs]

    model = config.model
    if model is None:
        if not gammas:
            model = default_init(
                tuple(s.arity for s in specs), floor=config.floor
            )
        else:
            init = default_init(tuple(s.arity for s in specs), floor=config.floor)
            model = fit_em(
                gammas,
                init,
                max_iter=config.em_max_iter,
                tol=config.em_tol,
                floor=config.floor,
            )
    thresholds = choose_thresholds(model, config.mu, config.lam)

    links, possibles, nonlinks = [], [], []
    buckets = {
        Classification.LINK: links,
        Classification.POSSIBLE: possibles,
        Classification.NONLINK: nonlinks,
    }
    for (a, b), gamma in zip(pairs, gammas):
        score = agreement_weight(gamma, model)
        buckets[classify(score, thresholds)].append((a.id, b.id, score))

    return LinkageResult(
        links=links,
        possibles=possibles,
        nonlinks=nonlinks,
        candidate_count=candidate_count,
        blocked_out_count=blocked_out,
        model=model,
        thresholds=thresholds,
    )
