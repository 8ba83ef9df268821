"""EM/F1 scoring, candidate attribution, and awareness metrics."""

from random import Random

import pytest

from tcqa.generator import (
    Candidate,
    CandidateLabel,
    TcseSample,
    generate_dataset,
)
from tcqa.scoring import (
    AwarenessReport,
    DuplicatePrediction,
    MissingPrediction,
    Prediction,
    UnknownSampleId,
    attribute,
    awareness,
    exact_match,
    f1_score,
    normalize_answer,
    per_specifier_report,
    prediction_from_dict,
    prediction_to_dict,
    score_qa,
)
from tcqa.temporal import QuestionTime, TimeSpecifier
from tcqa.templates import load_names

from conftest import make_templates

POOL = load_names()


def tiny_sample(sample_id: str, spec=TimeSpecifier.IN) -> TcseSample:
    """Hand-built minimal sample: passage "Aa Bb Cc Dd" with 4 candidates."""
    labels = [CandidateLabel.BC, CandidateLabel.TC, CandidateLabel.CC, CandidateLabel.BI]
    texts = ["Aa", "Bb", "Cc", "Dd"]
    years = [1500, 1500, 1600, 1600]
    candidates = []
    for i, (label, text, year) in enumerate(zip(labels, texts, years)):
        start = 3 * i
        candidates.append(Candidate(
            text=text, label=label, year=year, name=text,
            passage_span=(start, start + 2),
            answer_span=(start, start + 2) if label is CandidateLabel.BC else None,
        ))
    return TcseSample(
        id=sample_id, question="Who did it in 1550?",
        question_time=QuestionTime(spec, 1550),
        candidates=tuple(candidates), passage="Aa Bb Cc Dd",
        answer_text="Aa", template_id="t", negative_template_id="u",
    )


def pred_for(sample: TcseSample, label) -> Prediction:
    """Prediction hitting the given candidate's name span (None = no answer)."""
    if label is None:
        return Prediction(sample.id, "", is_unanswerable=True)
    c = sample.candidate(label)
    if c.answer_span is not None:
        lo, hi = c.answer_span
    else:
        at = c.text.index(c.name)
        lo = c.passage_span[0] + at
        hi = lo + len(c.name)
    return Prediction(sample.id, sample.passage[lo:hi], lo, hi)


class TestNormalization:
    def test_articles_and_case(self):
        assert normalize_answer("The Governor of Arkansas Territory") == \
            "governor of arkansas territory"

    def test_punctuation_and_whitespace(self):
        assert normalize_answer("  Harry,  Jr. ") == "harry jr"


class TestExactMatch:
    def test_identity(self):
        assert exact_match("Harry", ["Harry"]) == 1

    def test_article_stripping(self):
        assert exact_match("the Governor of Arkansas Territory",
                           ["Governor of Arkansas Territory"]) == 1

    def test_wrong_entity(self):
        assert exact_match("Katie", ["Harry"]) == 0

    def test_unanswerable_encoding(self):
        assert exact_match("", [""]) == 1
        assert exact_match("Harry", [""]) == 0
        assert exact_match("", ["Harry"]) == 0


class TestF1:
    def test_identical(self):
        assert f1_score("Kentucky Senate", ["Kentucky Senate"]) == 1.0

    def test_disjoint(self):
        assert f1_score("Marquette University", ["Kentucky Senate"]) == 0.0

    def test_partial_overlap(self):
        # pred tokens {kentucky, senate}, gold {member, of, kentucky, senate}:
        # P = 1, R = 1/2 -> F1 = 2/3 ("of" is not an article and is kept)
        assert f1_score("Kentucky Senate", ["member of Kentucky Senate"]) == \
            pytest.approx(2 / 3)

    def test_max_over_golds(self):
        assert f1_score("Harry", ["Katie", "Harry"]) == 1.0

    def test_empty_cases(self):
        assert f1_score("", [""]) == 1.0
        assert f1_score("", ["Harry"]) == 0.0
        assert f1_score("Harry", [""]) == 0.0


class TestAttribute:
    def test_containment(self):
        s = tiny_sample("s1")
        assert attribute(pred_for(s, CandidateLabel.BC), s) is CandidateLabel.BC
        assert attribute(pred_for(s, CandidateLabel.CC), s) is CandidateLabel.CC

    def test_boundary_overlap_majority_wins(self):
        # candidates at [0,2) [3,5) [6,8) [9,11); span [3,7) has 2 chars in
        # the 2nd candidate, 1 in the 3rd
        s = tiny_sample("s2")
        p = Prediction("s2", s.passage[3:7], 3, 7)
        assert attribute(p, s) is s.candidates[1].label

    def test_tie_goes_to_earlier_candidate(self):
        s = tiny_sample("s3")
        p = Prediction("s3", s.passage[4:7], 4, 7)  # 1 char in each of 2nd/3rd
        assert attribute(p, s) is s.candidates[1].label

    def test_overlap_equals_brute_force(self):
        s = tiny_sample("s4")
        rng = Random(0)
        for _ in range(500):
            lo = rng.randrange(0, len(s.passage))
            hi = rng.randrange(lo + 1, len(s.passage) + 1)
            got = attribute(Prediction("s4", s.passage[lo:hi], lo, hi), s)
            best, best_n = None, 0
            for c in s.candidates:
                n = len(set(range(lo, hi)) & set(range(*c.passage_span)))
                if n > best_n:
                    best, best_n = c.label, n
            assert got is best

    def test_zero_overlap_unattributed(self):
        s = tiny_sample("s5")
        p = Prediction("s5", " ", 2, 3)  # the joining space
        assert attribute(p, s) is None

    def test_unanswerable_unattributed(self):
        s = tiny_sample("s6")
        assert attribute(Prediction("s6", "", is_unanswerable=True), s) is None

    def test_unknown_sample_id(self):
        s = tiny_sample("s7")
        with pytest.raises(UnknownSampleId):
            attribute(Prediction("other", "Aa", 0, 2), s)


class TestAwareness:
    def build(self, n, n_bc, n_tc, n_cc, n_bi):
        dataset = [tiny_sample(f"s{i}") for i in range(n)]
        preds = []
        route = ([CandidateLabel.BC] * n_bc + [CandidateLabel.TC] * n_tc
                 + [CandidateLabel.CC] * n_cc + [CandidateLabel.BI] * n_bi)
        route += [None] * (n - len(route))
        for s, label in zip(dataset, route):
            if label is not None:
                preds.append(pred_for(s, label))
        return preds, dataset

    def test_timeqa_row(self):
        # counts scaled so TA = 0.6796 and CA = 0.7932
        preds, dataset = self.build(5000, 3000, 398, 966, 636)
        r = awareness(preds, dataset)
        assert r.ta == pytest.approx(0.6796)
        assert r.ca == pytest.approx(0.7932)
        assert r.tc_score == pytest.approx(0.7321, abs=5e-4)

    def test_nq_row(self):
        preds, dataset = self.build(5000, 2500, 74, 1939, 487)
        r = awareness(preds, dataset)
        assert r.ta == pytest.approx(0.5148)
        assert r.ca == pytest.approx(0.8878)
        assert r.tc_score == pytest.approx(0.6516, abs=5e-4)

    def test_perfect_oracle(self):
        preds, dataset = self.build(40, 40, 0, 0, 0)
        r = awareness(preds, dataset)
        assert (r.ta, r.ca, r.tc_score) == (1.0, 1.0, 1.0)

    def test_all_zero(self):
        preds, dataset = self.build(10, 0, 0, 0, 10)
        r = awareness(preds, dataset)
        assert (r.ta, r.ca, r.tc_score) == (0.0, 0.0, 0.0)

    def test_counts_sum(self):
        preds, dataset = self.build(50, 10, 5, 8, 7)
        r = awareness(preds, dataset)
        total = (r.count_bc + r.count_tc + r.count_cc + r.count_bi
                 + r.count_unattributed)
        assert total == r.n_questions == 50
        assert r.count_unattributed == 20

    def test_order_invariance(self):
        preds, dataset = self.build(60, 20, 10, 15, 5)
        a = awareness(preds, dataset)
        b = awareness(list(reversed(preds)), list(reversed(dataset)))
        assert a.to_dict()["counts"] == b.to_dict()["counts"]
        assert (a.ta, a.ca, a.tc_score) == (b.ta, b.ca, b.tc_score)

    def test_harmonic_mean_bounds(self):
        for args in [(100, 30, 20, 25, 10), (100, 0, 50, 0, 50), (100, 90, 0, 0, 0)]:
            preds, dataset = self.build(*args)
            r = awareness(preds, dataset)
            assert r.tc_score <= 2 * min(r.ta, r.ca) + 1e-12
            assert r.tc_score <= (r.ta + r.ca) / 2 + 1e-12
            if r.ta == r.ca:
                assert r.tc_score == pytest.approx(r.ta)

    def test_duplicate_prediction(self):
        preds, dataset = self.build(5, 5, 0, 0, 0)
        with pytest.raises(DuplicatePrediction):
            awareness(preds + [preds[0]], dataset)

    def test_unknown_prediction_id(self):
        _, dataset = self.build(5, 0, 0, 0, 0)
        with pytest.raises(UnknownSampleId):
            awareness([Prediction("ghost", "x", 0, 1)], dataset)

    def test_generated_dataset_oracles(self):
        ts = make_templates(20)
        dataset = list(generate_dataset(ts, POOL, 10, seed=13))
        bc_preds = [pred_for(s, CandidateLabel.BC) for s in dataset]
        r = awareness(bc_preds, dataset)
        assert (r.ta, r.ca, r.tc_score) == (1.0, 1.0, 1.0)
        tc_preds = [pred_for(s, CandidateLabel.TC) for s in dataset]
        r = awareness(tc_preds, dataset)
        assert (r.ta, r.ca, r.tc_score) == (1.0, 0.0, 0.0)


class TestQaScores:
    GOLD = [
        ("Who was mayor in 1994?", ["Harry"]),
        ("Who was loaned to Wolves before 2013?", ["Matthew"]),
        ("Who led the squad between 1831 and 1833?", ["Rita"]),
        ("Who wrote the gazette?", ["Jane"]),  # no time constraint -> other
    ]

    def preds(self, texts):
        return [Prediction(f"q{i}", t, 0, max(len(t), 1)) if t else
                Prediction(f"q{i}", "", is_unanswerable=True)
                for i, t in enumerate(texts)]

    def test_score_qa_perfect(self):
        em, f1 = score_qa(self.preds(["Harry"]), self.GOLD[:1])
        assert (em, f1) == (100.0, 100.0)

    def test_score_qa_half(self):
        em, f1 = score_qa(self.preds(["Harry", "Nobody Else"]), self.GOLD[:2])
        assert (em, f1) == (50.0, 50.0)

    def test_score_qa_matches_per_item_sum(self):
        texts = ["Harry", "Matthew Senior", "Betty", "Jane"]
        em, f1 = score_qa(self.preds(texts), self.GOLD)
        from tcqa.scoring import exact_match as em_fn, f1_score as f1_fn
        em_oracle = sum(em_fn(t, g[1]) for t, g in zip(texts, self.GOLD)) / 4 * 100
        f1_oracle = sum(f1_fn(t, g[1]) for t, g in zip(texts, self.GOLD)) / 4 * 100
        assert em == pytest.approx(em_oracle)
        assert f1 == pytest.approx(f1_oracle)

    def test_missing_prediction(self):
        with pytest.raises(MissingPrediction):
            score_qa(self.preds(["Harry"]), self.GOLD)

    def test_per_specifier_grouping(self):
        report = per_specifier_report(
            self.preds(["Harry", "Matthew", "Wrong", "Jane"]), self.GOLD)
        assert report["in"] == (1.0, 1.0, 1)
        assert report["before"] == (1.0, 1.0, 1)
        assert report["between"] == (0.0, 0.0, 1)
        assert report["other"] == (1.0, 1.0, 1)

    def test_per_specifier_all_in(self):
        gold = [("Who was mayor in 1994?", ["Harry"])] * 3
        preds = [Prediction(f"p{i}", "Harry", 0, 5) for i in range(3)]
        assert per_specifier_report(preds, gold) == {"in": (1.0, 1.0, 3)}

    def test_per_specifier_means_equal_bruteforce(self):
        texts = ["Harry", "Matthew Senior", "Rita", "Nope"]
        report = per_specifier_report(self.preds(texts), self.GOLD)
        total_n = sum(n for _, _, n in report.values())
        assert total_n == len(self.GOLD)
        em_total = sum(em * n for em, _, n in report.values())
        from tcqa.scoring import exact_match as em_fn
        assert em_total == pytest.approx(
            sum(em_fn(t, g[1]) for t, g in zip(texts, self.GOLD)))


class TestWire:
    def test_round_trip(self):
        p = Prediction("s", "Harry", 3, 8, False, 1.25)
        assert prediction_from_dict(prediction_to_dict(p)) == p

    def test_unanswerable_round_trip(self):
        p = Prediction("s", "", is_unanswerable=True)
        assert prediction_from_dict(prediction_to_dict(p)) == p

    def test_report_dict(self):
        r = AwarenessReport(4, 1, 1, 1, 1, 0, 0.5, 0.5, 0.5)
        d = r.to_dict()
        assert d["counts"] == {"bc": 1, "tc": 1, "cc": 1, "bi": 1, "unattributed": 0}
        assert d["n_questions"] == 4
