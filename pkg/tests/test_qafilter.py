"""The four-way answering filter: softmax normalization, argmax choice,
permutation handling, and accuracy aggregation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcqforge.backends import MockScorer, OptionMapScorer
from mcqforge.errors import BackendError, ValidationError
from mcqforge.qafilter import (
    OptionScores,
    QaVerdict,
    accuracy_of_verdicts,
    classify,
    filter_item,
    qa_accuracy,
    render_accuracy_table,
    score_options,
    softmax_normalize,
)


def test_softmax_fixture():
    # exp(ln 3) = 3 against three exp(0) = 1 gives (1/6, 1/2, 1/6, 1/6)
    probs = softmax_normalize(OptionScores((0.0, math.log(3), 0.0, 0.0)))
    assert probs == pytest.approx([1 / 6, 1 / 2, 1 / 6, 1 / 6], abs=1e-12)


def test_softmax_uniform_on_ties():
    probs = softmax_normalize(OptionScores((2.0, 2.0, 2.0, 2.0)))
    assert probs.tolist() == [0.25, 0.25, 0.25, 0.25]


def test_softmax_shift_invariant():
    a = softmax_normalize(OptionScores((1.0, 2.0, 3.0, 4.0)))
    b = softmax_normalize(OptionScores((101.0, 102.0, 103.0, 104.0)))
    assert np.allclose(a, b, atol=1e-12)


def test_softmax_handles_large_scores():
    probs = softmax_normalize(OptionScores((1000.0, 999.0, 998.0, 997.0)))
    assert np.isfinite(probs).all()
    assert probs.sum() == pytest.approx(1.0)


@settings(max_examples=200, deadline=None)
@given(st.tuples(*[st.floats(-50, 50, allow_nan=False)] * 4))
def test_softmax_always_a_distribution(scores):
    probs = softmax_normalize(OptionScores(scores))
    assert abs(float(probs.sum()) - 1.0) <= 1e-9
    assert (probs >= 0).all()
    # softmax is monotone, so the chosen index carries maximal mass
    # (score gaps below float precision can leave exact ties here)
    assert probs[classify(OptionScores(scores))] == probs.max()


def test_classify_fixture_and_tie_break():
    assert classify(OptionScores((0.0, 2.0, 2.0, 0.0))) == 1
    assert classify(OptionScores((1.0, 1.0, 1.0, 1.0))) == 0
    assert classify(OptionScores((-1.0, -3.0, -2.0, -5.0))) == 0


def test_classify_equivariant_under_permutation():
    base = (0.1, 3.0, -1.0, 0.5)
    perm = (2, 0, 3, 1)  # shown[i] = base[perm[i]]
    shown = tuple(base[j] for j in perm)
    assert perm[classify(OptionScores(shown, order=perm))] == classify(
        OptionScores(base))


def test_option_scores_validation():
    with pytest.raises(ValidationError):
        OptionScores((1.0, 2.0, 3.0))
    with pytest.raises(ValidationError):
        OptionScores((1.0, 2.0, float("nan"), 3.0))
    with pytest.raises(ValidationError):
        OptionScores((1.0, 2.0, 3.0, 4.0), order=(0, 1, 2, 2))


def test_score_options_requires_four(tok):
    with pytest.raises(ValidationError):
        score_options(MockScorer(), tok, "c", "q", ["a", "b", "c"])
    with pytest.raises(ValidationError):
        score_options(MockScorer(), tok, "c", "q", ["a", "b", " ", "d"])


def test_score_options_wraps_backend_failure(tok):
    class Broken:
        def score(self, ids):
            raise RuntimeError("gpu fell over")

    with pytest.raises(BackendError, match="option 0"):
        score_options(Broken(), tok, "c", "q", ["a", "b", "c", "d"])


def test_filter_accepts_when_gold_scores_highest(tok, mcq_items):
    item = mcq_items[0]
    scorer = OptionMapScorer(tok, {item.answer: 5.0}, default=0.0)
    verdict = filter_item(scorer, tok, item, shuffle_seed=3)
    assert verdict.accepted
    assert verdict.chosen_index == verdict.gold_index
    assert verdict.item_id == item.id


def test_filter_rejects_when_distractor_wins(tok, mcq_items):
    item = mcq_items[0]
    scorer = OptionMapScorer(tok, {item.distractors[1]: 5.0}, default=0.0)
    verdict = filter_item(scorer, tok, item, shuffle_seed=3)
    assert not verdict.accepted
    assert verdict.chosen_index != verdict.gold_index


def test_filter_probabilities_sum_to_one(tok, mcq_items):
    verdict = filter_item(MockScorer(seed=5), tok, mcq_items[1], shuffle_seed=0)
    assert sum(verdict.probabilities) == pytest.approx(1.0, abs=1e-9)


def test_filter_deterministic_for_seed(tok, mcq_items):
    a = [filter_item(MockScorer(seed=1), tok, item, shuffle_seed=7)
         for item in mcq_items]
    b = [filter_item(MockScorer(seed=1), tok, item, shuffle_seed=7)
         for item in mcq_items]
    assert [v.as_dict() for v in a] == [v.as_dict() for v in b]


def test_filter_shuffles_gold_position(tok, mcq_items):
    # across many items the answer must not always sit in slot 0
    scorer = OptionMapScorer(tok, {i.answer: 5.0 for i in mcq_items}, default=0.0)
    positions = {filter_item(scorer, tok, item, shuffle_seed=0).gold_index
                 for item in mcq_items}
    assert len(positions) > 1


def test_filter_permutation_depends_on_seed(tok, mcq_items):
    def golds(seed):
        scorer = OptionMapScorer(tok, {i.answer: 5.0 for i in mcq_items},
                                 default=0.0)
        return [filter_item(scorer, tok, item, seed).gold_index
                for item in mcq_items]

    assert golds(0) != golds(1)


def test_qa_accuracy_three_of_five(tok, mcq_items):
    items = mcq_items[:5]
    maps = []
    for k, item in enumerate(items):
        winner = item.answer if k < 3 else item.distractors[0]
        maps.append({winner: 5.0})
    scorer = OptionMapScorer(tok, maps, default=0.0)
    assert qa_accuracy(scorer, tok, items, shuffle_seed=2) == 0.6


def test_qa_accuracy_rejects_empty(tok):
    with pytest.raises(ValidationError):
        qa_accuracy(MockScorer(), tok, [])


def _verdict(accepted, item_id="x"):
    chosen = 0
    gold = 0 if accepted else 1
    return QaVerdict(item_id, (0.7, 0.1, 0.1, 0.1), chosen, gold, accepted)


def test_accuracy_of_verdicts():
    verdicts = [_verdict(True), _verdict(True), _verdict(True),
                _verdict(False), _verdict(False)]
    assert accuracy_of_verdicts(verdicts) == 0.6
    with pytest.raises(ValidationError):
        accuracy_of_verdicts([])


def test_verdict_round_trip():
    verdict = _verdict(False, "item-9")
    assert QaVerdict.from_dict(verdict.as_dict()) == verdict
    with pytest.raises(ValidationError, match="gold"):
        QaVerdict.from_dict({"id": "x", "probabilities": [1, 0, 0, 0],
                             "chosen": 0, "accepted": True})


def test_verdict_validation():
    with pytest.raises(ValidationError):
        QaVerdict("x", (0.5, 0.2, 0.2, 0.2), 0, 0, True)  # sums to 1.1
    with pytest.raises(ValidationError):
        QaVerdict("x", (0.25, 0.25, 0.25, 0.25), 0, 1, True)  # contradiction
    with pytest.raises(ValidationError):
        QaVerdict("x", (0.25, 0.25, 0.25, 0.25), 4, 0, False)


def test_render_accuracy_table():
    text = render_accuracy_table({"all": 0.5, "source=generated": 1.0})
    lines = text.splitlines()
    assert lines[0].endswith("Accuracy")
    assert " 50.00%" in lines[1]
    assert "100.00%" in lines[2]
    with pytest.raises(ValidationError):
        render_accuracy_table({})
