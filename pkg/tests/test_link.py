"""End-to-end linkage on synthetic file pairs."""
import pytest

from privlink.corpus.synth import DEFAULT_SCHEMA, ErrorProfile, generate_pairs
from privlink.linkage.engine import LinkConfig, link
from privlink.linkage.model import Classification, LinkageModel
from privlink.linkage.schema import FeatureSpec
from privlink.report import link_scores

# two name features alone leave the mixture weakly identified: with a small
# name pool, distinct people sharing a first name exist, and EM can settle
# on a model that treats those pairs as matches; birth year pins it down
NAME_SPECS = (
    FeatureSpec(
        name="first_name",
        source_field="first_name",
        kind="edit-distance-similarity",
        bins=(0.5, 0.8),
    ),
    FeatureSpec(
        name="last_name",
        source_field="last_name",
        kind="edit-distance-similarity",
        bins=(0.5, 0.8),
    ),
    FeatureSpec(name="birth_year", source_field="birth_year", kind="boolean-equality"),
)

# mu budgets the expected false-match mass; 1e-6 admits only the config
# where both names sit in the top band, which distinct identities cannot
# reach (name pairs are unique and pool names are at least two edits apart)
CLEAN_CONFIG = LinkConfig(
    specs=NAME_SPECS, mu=1e-6, lam=1e-3, block_field="city", schema=DEFAULT_SCHEMA
)


def synth(n, overlap, error_rate, seed, missing_rate=0.0):
    profile = ErrorProfile(field_error_rate=error_rate, missing_rate=missing_rate)
    return generate_pairs(n, overlap, profile, seed)


def scores(result, truth):
    return link_scores(result, set(truth.pairs))


def test_clean_copy_perfect():
    file_a, file_b, truth = synth(300, 1.0, 0.0, seed=1)
    result = link(file_a, file_b, CLEAN_CONFIG)
    precision, recall, _ = scores(result, truth)
    assert precision == 1.0
    assert recall == 1.0


def test_partial_overlap_clean():
    file_a, file_b, truth = synth(200, 0.5, 0.0, seed=2)
    result = link(file_a, file_b, CLEAN_CONFIG)
    precision, recall, _ = scores(result, truth)
    assert precision == 1.0
    assert recall == 1.0
    assert len(truth.pairs) == 100


def test_empty_file_b():
    file_a, _, _ = synth(10, 1.0, 0.0, seed=3)
    result = link(file_a, [], CLEAN_CONFIG)
    assert result.candidate_count == 0
    assert result.links == [] and result.possibles == [] and result.nonlinks == []


def test_partition_invariant():
    file_a, file_b, _ = synth(80, 0.9, 0.1, seed=4)
    result = link(file_a, file_b, CLEAN_CONFIG)
    total = len(result.links) + len(result.possibles) + len(result.nonlinks)
    assert total == result.candidate_count
    assert result.candidate_count + result.blocked_out_count == len(file_a) * len(file_b)
    seen = set()
    for bucket in (result.links, result.possibles, result.nonlinks):
        for a, b, _ in bucket:
            assert (a, b) not in seen
            seen.add((a, b))


def test_blocking_reduces_candidates():
    file_a, file_b, _ = synth(100, 1.0, 0.0, seed=5)
    blocked = link(file_a, file_b, CLEAN_CONFIG)
    assert blocked.candidate_count < len(file_a) * len(file_b)
    assert blocked.blocked_out_count > 0


def test_supplied_model_skips_em():
    file_a, file_b, truth = synth(100, 1.0, 0.0, seed=6)
    model = LinkageModel(
        m=((1e-4, 0.0999, 0.9), (1e-4, 0.0999, 0.9), (0.0001, 0.9999)),
        u=((0.85, 0.1499, 1e-4), (0.85, 0.1499, 1e-4), (0.99, 0.01)),
        p=0.1,
    )
    config = LinkConfig(
        specs=NAME_SPECS,
        mu=1e-4,
        lam=1e-3,
        model=model,
        block_field="city",
        schema=DEFAULT_SCHEMA,
    )
    result = link(file_a, file_b, config)
    assert result.model is model
    precision, recall, _ = scores(result, truth)
    assert precision == 1.0 and recall == 1.0


def test_degrades_with_error():
    f1_by_rate = {}
    for rate in (0.0, 0.2, 0.4):
        file_a, file_b, truth = synth(400, 1.0, rate, seed=7)
        result = link(file_a, file_b, CLEAN_CONFIG)
        _, _, f1_by_rate[rate] = scores(result, truth)
    assert f1_by_rate[0.0] > f1_by_rate[0.2] > f1_by_rate[0.4]


def test_scores_match_weights():
    file_a, file_b, _ = synth(50, 1.0, 0.0, seed=8)
    result = link(file_a, file_b, CLEAN_CONFIG)
    for a, b, score in result.links:
        assert score > result.thresholds.t_mu
    for a, b, score in result.nonlinks:
        assert score < result.thresholds.t_lambda
    for a, b, score in result.possibles:
        assert result.thresholds.t_lambda <= score <= result.thresholds.t_mu


def test_classification_enum_values():
    assert Classification.LINK.value == "link"
    assert Classification.POSSIBLE.value == "possible"
    assert Classification.NONLINK.value == "nonlink"
