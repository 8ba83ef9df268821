"""Prediction scoring: EM/F1, candidate attribution, and awareness metrics.

Time awareness (TA) is the fraction of questions answered from a
time-correct candidate (BC or TC), context awareness (CA) from a
context-correct one (BC or CC); the TC-score is their harmonic mean.
Unattributed and missing predictions stay in the denominator.
"""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import TcqaError
from .generator import CandidateLabel, TcseSample
from .temporal import NoSpecifierFound, MalformedYears, InvalidRange, parse_time_expression


class DuplicatePrediction(TcqaError):
    """More than one prediction for the same sample id."""


class UnknownSampleId(TcqaError):
    """A prediction references a sample that is not in the dataset."""


class MissingPrediction(TcqaError):
    """Prediction list does not line up one-to-one with the gold questions."""


@dataclass(frozen=True)
class Prediction:
    """A model's answer span for one sample; offsets are character-based."""

    sample_id: str
    text: str
    char_start: int = 0
    char_end: int = 0
    is_unanswerable: bool = False
    logit: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.is_unanswerable and self.char_start >= self.char_end:
            raise TcqaError(
                f"{self.sample_id}: empty span [{self.char_start}, {self.char_end})"
            )


@dataclass(frozen=True)
class AwarenessReport:
    n_questions: int
    count_bc: int
    count_tc: int
    count_cc: int
    count_bi: int
    count_unattributed: int
    ta: float
    ca: float
    tc_score: float

    def to_dict(self) -> dict:
        return {
            "n_questions": self.n_questions,
            "counts": {
                "bc": self.count_bc,
                "tc": self.count_tc,
                "cc": self.count_cc,
                "bi": self.count_bi,
                "unattributed": self.count_unattributed,
            },
            "ta": self.ta,
            "ca": self.ca,
            "tc_score": self.tc_score,
        }


@dataclass(frozen=True)
class SpanScore:
    em: int
    f1: float


_ARTICLES = frozenset({"a", "an", "the"})
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def normalize_answer(text: str) -> str:
    """Lowercase, drop punctuation and articles, collapse whitespace."""
    text = text.lower().translate(_PUNCT_TABLE)
    return " ".join(w for w in text.split() if w not in _ARTICLES)


def _pred_text(p: Prediction) -> str:
    return "" if p.is_unanswerable else p.text


def exact_match(pred_text: str, gold_texts: Sequence[str]) -> int:
    """1 iff the normalized prediction equals any normalized gold answer."""
    if not gold_texts:
        raise TcqaError("gold_texts must be non-empty")
    pred = normalize_answer(pred_text)
    return int(any(pred == normalize_answer(g) for g in gold_texts))


def _token_f1(pred_tokens: list[str], gold_tokens: list[str]) -> float:
    if not pred_tokens or not gold_tokens:
        # empty string encodes unanswerable: both empty -> 1, one empty -> 0
        return float(pred_tokens == gold_tokens)
    common = Counter(pred_tokens) & Counter(gold_tokens)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def f1_score(pred_text: str, gold_texts: Sequence[str]) -> float:
    """Max over golds of the token-level F1 on normalized tokens."""
    if not gold_texts:
        raise TcqaError("gold_texts must be non-empty")
    pred_tokens = normalize_answer(pred_text).split()
    return max(_token_f1(pred_tokens, normalize_answer(g).split()) for g in gold_texts)


def span_score(pred_text: str, gold_texts: Sequence[str]) -> SpanScore:
    return SpanScore(exact_match(pred_text, gold_texts), f1_score(pred_text, gold_texts))


def attribute(pred: Prediction, sample: TcseSample) -> Optional[CandidateLabel]:
    """Map a predicted span to the candidate it overlaps the most.

    Ties go to the earlier candidate in the passage; zero overlap and
    unanswerable predictions return None (unattributed).
    """
    if pred.sample_id != sample.id:
        raise UnknownSampleId(f"prediction for {pred.sample_id!r}, sample {sample.id!r}")
    if pred.is_unanswerable:
        return None
    best: Optional[CandidateLabel] = None
    best_overlap = 0
    for c in sample.candidates:
        lo = max(pred.char_start, c.passage_span[0])
        hi = min(pred.char_end, c.passage_span[1])
        if hi - lo > best_overlap:
            best_overlap = hi - lo
            best = c.label
    return best


def awareness(
    preds: Iterable[Prediction], dataset: Sequence[TcseSample]
) -> AwarenessReport:
    """Count per-label attributions over a dataset and derive TA/CA/TC-score.

    Samples without a prediction count as unattributed; the denominator is
    always the number of questions.
    """
    if not dataset:
        raise TcqaError("dataset is empty")
    sample_ids = {s.id for s in dataset}
    if len(sample_ids) != len(dataset):
        raise TcqaError("dataset contains duplicate sample ids")
    by_id: dict[str, Prediction] = {}
    for p in preds:
        if p.sample_id in by_id:
            raise DuplicatePrediction(p.sample_id)
        if p.sample_id not in sample_ids:
            raise UnknownSampleId(p.sample_id)
        by_id[p.sample_id] = p

    counts = {label: 0 for label in CandidateLabel}
    unattributed = 0
    for s in dataset:
        p = by_id.get(s.id)
        label = attribute(p, s) if p is not None else None
        if label is None:
            unattributed += 1
        else:
            counts[label] += 1

    n = len(dataset)
    ta = (counts[CandidateLabel.BC] + counts[CandidateLabel.TC]) / n
    ca = (counts[CandidateLabel.BC] + counts[CandidateLabel.CC]) / n
    tc_score = 2 * ta * ca / (ta + ca) if ta + ca > 0 else 0.0
    return AwarenessReport(
        n_questions=n,
        count_bc=counts[CandidateLabel.BC],
        count_tc=counts[CandidateLabel.TC],
        count_cc=counts[CandidateLabel.CC],
        count_bi=counts[CandidateLabel.BI],
        count_unattributed=unattributed,
        ta=ta,
        ca=ca,
        tc_score=tc_score,
    )


def per_specifier_report(
    preds: Sequence[Prediction],
    gold_qa: Sequence[tuple[str, Sequence[str]]],
) -> dict[str, tuple[float, float, int]]:
    """Mean EM/F1 per time specifier of the question; unparseable -> "other"."""
    if len(preds) != len(gold_qa):
        raise MissingPrediction(f"{len(preds)} predictions for {len(gold_qa)} questions")
    sums: dict[str, list[float]] = {}
    for p, (question, golds) in zip(preds, gold_qa):
        try:
            key = parse_time_expression(question).specifier.value
        except (NoSpecifierFound, MalformedYears, InvalidRange):
            key = "other"
        em = exact_match(_pred_text(p), golds)
        f1 = f1_score(_pred_text(p), golds)
        bucket = sums.setdefault(key, [0.0, 0.0, 0.0])
        bucket[0] += em
        bucket[1] += f1
        bucket[2] += 1
    return {
        key: (em_sum / n, f1_sum / n, int(n))
        for key, (em_sum, f1_sum, n) in sorted(sums.items())
    }


def score_qa(
    preds: Sequence[Prediction],
    gold_qa: Sequence[tuple[str, Sequence[str]]],
) -> tuple[float, float]:
    """Mean EM and F1 over questions, scaled to [0, 100]."""
    if len(preds) != len(gold_qa):
        raise MissingPrediction(f"{len(preds)} predictions for {len(gold_qa)} questions")
    if not gold_qa:
        raise TcqaError("gold_qa is empty")
    em_sum = 0.0
    f1_sum = 0.0
    for p, (_, golds) in zip(preds, gold_qa):
        em_sum += exact_match(_pred_text(p), golds)
        f1_sum += f1_score(_pred_text(p), golds)
    n = len(gold_qa)
    return 100.0 * em_sum / n, 100.0 * f1_sum / n


def prediction_to_dict(p: Prediction) -> dict:
    row = {
        "sample_id": p.sample_id,
        "text": p.text,
        "char_start": p.char_start,
        "char_end": p.char_end,
        "is_unanswerable": p.is_unanswerable,
    }
    if p.logit is not None:
        row["logit"] = p.logit
    return row


def prediction_from_dict(d: dict) -> Prediction:
    return Prediction(
        sample_id=d["sample_id"],
        text=d.get("text", ""),
        char_start=d.get("char_start", 0),
        char_end=d.get("char_end", 0),
        is_unanswerable=d.get("is_unanswerable", False),
        logit=d.get("logit"),
    )
