import pytest
from hypothesis import given, strategies as st

from dova.errors import ProviderError
from dova.self_eval import (
    STOPWORDS,
    ComponentScores,
    EvalConfig,
    FormatSpec,
    component_scores,
    evaluate_and_refine,
    format_score,
    keywords,
    length_score,
    refusal_score,
    relevance_score,
    score,
)


class TestLengthScore:
    def test_hand_computed_midpoint(self):
        # 150 chars against tau 200 lands at exactly 0.75
        assert length_score("x" * 150) == pytest.approx(0.75)

    def test_clips_low(self):
        assert length_score("") == pytest.approx(0.2)
        assert length_score("x" * 10) == pytest.approx(0.2)

    def test_clips_high(self):
        assert length_score("x" * 200) == pytest.approx(1.0)
        assert length_score("x" * 5000) == pytest.approx(1.0)

    @given(st.integers(min_value=0, max_value=2000))
    def test_always_in_band(self, n):
        assert 0.2 <= length_score("x" * n) <= 1.0

    @given(st.integers(min_value=0, max_value=1999))
    def test_monotone_nondecreasing(self, n):
        assert length_score("x" * n) <= length_score("x" * (n + 1))


class TestRefusalScore:
    def test_clean_response_scores_one(self):
        assert refusal_score("The answer is 42.") == 1.0

    def test_refusal_substring_scores_penalty(self):
        assert refusal_score("I cannot help with that.") == pytest.approx(0.3)
        assert refusal_score("Sorry, I'm unable to comply.") == pytest.approx(0.3)
        assert refusal_score("As an AI, I lack opinions.") == pytest.approx(0.3)

    def test_case_insensitive(self):
        assert refusal_score("i CANNOT do this") == pytest.approx(0.3)


class TestFormatScore:
    def test_no_spec_scores_one(self):
        assert format_score("anything", None) == 1.0

    def test_must_contain_fraction(self):
        spec = FormatSpec(must_contain=("alpha", "beta"))
        assert format_score("has alpha only", spec) == pytest.approx(0.5)
        assert format_score("alpha and beta", spec) == pytest.approx(1.0)

    def test_parse_as_json(self):
        spec = FormatSpec(parse_as="json")
        assert format_score('{"a": 1}', spec) == pytest.approx(1.0)
        assert format_score("not json", spec) == pytest.approx(0.0)

    def test_parse_as_number(self):
        spec = FormatSpec(parse_as="number")
        assert format_score("42.5", spec) == pytest.approx(1.0)
        assert format_score("forty-two", spec) == pytest.approx(0.0)

    def test_parse_as_list_accepts_bullets(self):
        spec = FormatSpec(parse_as="list")
        assert format_score("- one\n- two", spec) == pytest.approx(1.0)
        assert format_score("1. one\n2. two", spec) == pytest.approx(1.0)
        assert format_score('["a", "b"]', spec) == pytest.approx(1.0)
        assert format_score("just prose", spec) == pytest.approx(0.0)

    def test_length_bounds_combine(self):
        spec = FormatSpec(min_length=5, max_length=10, must_contain=("ok",))
        # two of three checks pass: contains ok, within min, over max
        assert format_score("ok too long here", spec) == pytest.approx(2 / 3)


class TestRelevanceScore:
    def test_empty_prompt_keywords_score_one(self):
        assert relevance_score("whatever", "the and of") == 1.0

    def test_hand_computed_two_of_four(self):
        prompt = "compare quicksort mergesort complexity tradeoffs"
        assert len(keywords(prompt)) == 5
        prompt = "quicksort mergesort complexity tradeoffs"
        assert len(keywords(prompt)) == 4
        # 2 of 4 covered: 2 / (0.3 * 4) = 1.667 capped at 1.0
        response = "quicksort beats mergesort here"
        assert relevance_score(response, prompt) == pytest.approx(1.0)

    def test_hand_computed_one_of_four(self):
        prompt = "quicksort mergesort complexity tradeoffs"
        response = "quicksort is fine"
        # 1 / (0.3 * 4) = 0.8333...
        assert relevance_score(response, prompt) == pytest.approx(1 / 1.2)

    def test_zero_overlap(self):
        prompt = "quicksort mergesort complexity tradeoffs"
        assert relevance_score("nothing related", prompt) == pytest.approx(0.0)


class TestStopwords:
    def test_exactly_fifty(self):
        assert len(STOPWORDS) == 50

    def test_keywords_drop_stopwords_and_short_tokens(self):
        assert keywords("the cat sat on a mat") == {"cat", "sat", "mat"}


class TestScore:
    def test_weighted_mean_hand_example(self):
        # components 0.2, 1.0, 1.0, 1.0 at equal weights -> 0.8
        report = score("x" * 10, "the and of")
        assert report.components.length == pytest.approx(0.2)
        assert report.components.refusal == pytest.approx(1.0)
        assert report.components.format == pytest.approx(1.0)
        assert report.components.relevance == pytest.approx(1.0)
        assert report.overall == pytest.approx(0.8)
        assert report.acceptable

    def test_below_threshold_not_acceptable(self):
        config = EvalConfig(weights={"length": 1.0, "refusal": 5.0, "format": 0.0, "relevance": 0.0})
        report = score("I cannot answer that question at all, sorry about it.", "the and", config=config)
        assert not report.acceptable

    def test_custom_weights_shift_overall(self):
        config = EvalConfig(weights={"length": 0.0, "refusal": 0.0, "format": 0.0, "relevance": 1.0})
        report = score("zebra", "quicksort mergesort complexity tradeoffs", config=config)
        assert report.overall == pytest.approx(0.0)

    def test_zero_weight_sum_rejected(self):
        with pytest.raises(ValueError):
            EvalConfig(weights={"length": 0.0, "refusal": 0.0, "format": 0.0, "relevance": 0.0})

    @given(st.text(max_size=300), st.text(max_size=120))
    def test_overall_bounded(self, response, prompt):
        report = score(response, prompt)
        assert 0.0 <= report.overall <= 1.0


class TestWeakest:
    def test_orders_by_value_then_fixed_order(self):
        scores = ComponentScores(length=0.2, refusal=0.2, format=1.0, relevance=1.0)
        assert scores.weakest() == "length"
        scores = ComponentScores(length=1.0, refusal=0.5, format=0.3, relevance=0.3)
        assert scores.weakest() == "format"


class TestEvaluateAndRefine:
    def test_good_answer_skips_refinement(self):
        calls = []
        result = evaluate_and_refine(
            "A thorough comparison of quicksort and mergesort covering complexity and tradeoffs "
            "with concrete numbers for both average and worst cases spelled out in full detail.",
            "quicksort mergesort complexity tradeoffs",
            calls.append,
        )
        assert result.rounds_used == 0
        assert calls == []
        assert not result.degraded

    def test_refines_up_to_max_and_keeps_best(self):
        attempts = []

        def regenerate(prompt):
            attempts.append(prompt)
            return "still short"

        result = evaluate_and_refine("bad", "quicksort mergesort complexity tradeoffs", regenerate)
        assert result.rounds_used == 2
        assert len(attempts) == 2
        # candidate scored no better, so the original stays
        assert result.response in ("bad", "still short")
        best = max(
            score("bad", "quicksort mergesort complexity tradeoffs").overall,
            score("still short", "quicksort mergesort complexity tradeoffs").overall,
        )
        assert result.report.overall == pytest.approx(best)

    def test_adopts_strictly_better_candidate(self):
        better = (
            "quicksort and mergesort: a full complexity and tradeoffs discussion with "
            "enough length to clear the bar and every keyword from the prompt present."
        )

        def regenerate(prompt):
            return better

        result = evaluate_and_refine("bad", "quicksort mergesort complexity tradeoffs", regenerate)
        assert result.response == better
        assert result.rounds_used >= 1

    def test_feedback_names_weakest_component(self):
        prompts = []

        def regenerate(prompt):
            prompts.append(prompt)
            return "x"

        evaluate_and_refine("I cannot help.", "quicksort mergesort complexity tradeoffs", regenerate)
        assert prompts, "refinement should have run"
        assert "previous answer" in prompts[0].lower()

    def test_provider_error_sets_degraded(self):
        def regenerate(prompt):
            raise ProviderError("backend down")

        result = evaluate_and_refine("bad", "quicksort mergesort complexity tradeoffs", regenerate)
        assert result.degraded
        assert result.response == "bad"
