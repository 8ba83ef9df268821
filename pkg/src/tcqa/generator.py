"""TCSE sample assembly: four labeled candidate sentences per question.

Each sample pairs a time-constrained question with a passage built from
four candidate sentences: BC (correct time and context, holds the gold
span), CC (correct context, wrong time), TC (correct time, wrong
context) and BI (wrong on both). The gold answer is the person name
substituted into BC.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from random import Random
from typing import Iterable, Iterator, Optional

from .errors import TcqaError
from .temporal import (
    QuestionTime,
    SamplerConfig,
    TimeSpecifier,
    matches,
    random_question_time,
    render_question_time,
    sample_negative,
    sample_positive,
)
from .templates import NamePool, Template, substitute_context, substitute_question


class PoolTooSmall(TcqaError):
    """Fewer than four names available for one sample."""


class TooFewTemplates(TcqaError):
    """Dataset generation needs at least two templates."""


class CandidateLabel(Enum):
    BC = "BC"  # correct time and context
    TC = "TC"  # correct time only
    CC = "CC"  # correct context only
    BI = "BI"  # incorrect on both

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Candidate:
    """One candidate sentence placed inside the assembled passage."""

    text: str
    label: CandidateLabel
    year: int
    name: str
    passage_span: tuple[int, int]
    answer_span: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if (self.answer_span is not None) != (self.label is CandidateLabel.BC):
            raise TcqaError("answer_span present iff label is BC")


@dataclass(frozen=True)
class TcseSample:
    id: str
    question: str
    question_time: QuestionTime
    candidates: tuple[Candidate, ...]
    passage: str
    answer_text: str
    template_id: str
    negative_template_id: str

    def candidate(self, label: CandidateLabel) -> Candidate:
        for c in self.candidates:
            if c.label is label:
                return c
        raise KeyError(label)


def derive_rng(seed: int, *parts: object) -> Random:
    """Deterministic per-sample random source, independent of platform hashing."""
    key = ":".join([str(seed)] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return Random(int.from_bytes(digest[:8], "big"))


def generate_sample(
    t: Template,
    neg: Template,
    pool: NamePool,
    rng: Random,
    cfg: SamplerConfig = SamplerConfig(),
    sample_id: Optional[str] = None,
) -> TcseSample:
    """Build one TCSE sample from a template and a negative-context template.

    Draws the question time, a positive and a negative year, and four
    distinct names; shuffles the four candidates; recomputes all character
    spans against the concatenated passage.
    """
    if neg.id == t.id:
        raise TcqaError("negative template must differ from the question template")
    if len(pool) < 4:
        raise PoolTooSmall(f"need 4 distinct names, pool has {len(pool)}")

    q_time = random_question_time(rng, cfg)
    y_pos = sample_positive(q_time, rng, cfg)
    y_neg = sample_negative(q_time, rng, cfg)
    question = substitute_question(t, render_question_time(q_time)).text

    # Nested names ("Ann" inside "Annette") or a name occurring in the
    # template prose would make the gold string ambiguous; redraw names
    # until the answer occurs exactly once in the passage.
    for _ in range(100):
        names = rng.sample(pool.names, 4)
        parts = [
            (CandidateLabel.BC, names[0], substitute_context(t, names[0], y_pos)),
            (CandidateLabel.CC, names[1], substitute_context(t, names[1], y_neg)),
            (CandidateLabel.TC, names[2], substitute_context(neg, names[2], y_pos)),
            (CandidateLabel.BI, names[3], substitute_context(neg, names[3], y_neg)),
        ]
        rng.shuffle(parts)
        passage = " ".join(rendered.text for _, _, rendered in parts)
        if passage.count(names[0]) == 1:
            break
    else:
        raise PoolTooSmall(
            f"could not draw names giving a unique answer string for {t.id!r}"
        )

    candidates = []
    cursor = 0
    for label, name, rendered in parts:
        start = cursor
        end = start + len(rendered.text)
        answer_span = None
        if label is CandidateLabel.BC:
            ns, ne = rendered.name_span
            answer_span = (start + ns, start + ne)
        candidates.append(Candidate(
            text=rendered.text,
            label=label,
            year=rendered.year,
            name=name,
            passage_span=(start, end),
            answer_span=answer_span,
        ))
        cursor = end + 1  # single joining space

    return TcseSample(
        id=sample_id if sample_id is not None else f"{t.id}#0",
        question=question,
        question_time=q_time,
        candidates=tuple(candidates),
        passage=passage,
        answer_text=names[0],
        template_id=t.id,
        negative_template_id=neg.id,
    )


def generate_dataset(
    templates: list[Template],
    pool: NamePool,
    per_template: int = 12,
    seed: int = 0,
    cfg: SamplerConfig = SamplerConfig(),
    workers: int = 1,
) -> Iterator[TcseSample]:
    """Yield per_template samples per template, in (template, k) order.

    Each sample's random source is derived from (seed, template_id, k), so
    the output is identical regardless of worker count; the negative
    template is drawn uniformly from the other templates.
    """
    if len(templates) < 2:
        raise TooFewTemplates("need at least 2 templates for negative contexts")
    if per_template < 0:
        raise TcqaError("per_template must be >= 0")

    def build(spec: tuple[int, int]) -> TcseSample:
        i, k = spec
        t = templates[i]
        rng = derive_rng(seed, t.id, k)
        others = templates[:i] + templates[i + 1:]
        neg = others[rng.randrange(len(others))]
        return generate_sample(t, neg, pool, rng, cfg, sample_id=f"{t.id}#{k}")

    specs = [(i, k) for i in range(len(templates)) for k in range(per_template)]
    if workers <= 1:
        return (build(s) for s in specs)

    def parallel() -> Iterator[TcseSample]:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            yield from ex.map(build, specs)

    return parallel()


def audit_sample(
    sample: TcseSample,
    template_by_id: Optional[dict[str, Template]] = None,
) -> list[str]:
    """Re-check every labeling and offset claim of a sample from scratch.

    Returns a list of violations (empty means the sample is sound). With
    the originating templates supplied, also verifies that each candidate
    is byte-identical to re-substituting its template.
    """
    problems: list[str] = []
    q = sample.question_time

    labels = [c.label for c in sample.candidates]
    if sorted(l.value for l in labels) != ["BC", "BI", "CC", "TC"]:
        problems.append(f"labels not one-of-each: {labels}")
        return problems

    expected_match = {
        CandidateLabel.BC: True,
        CandidateLabel.TC: True,
        CandidateLabel.CC: False,
        CandidateLabel.BI: False,
    }
    for c in sample.candidates:
        if matches(q, c.year) != expected_match[c.label]:
            problems.append(f"{c.label}: year {c.year} vs {render_question_time(q)}")
        if sample.passage[slice(*c.passage_span)] != c.text:
            problems.append(f"{c.label}: passage_span does not slice to text")

    if sample.passage != " ".join(c.text for c in sample.candidates):
        problems.append("passage is not the space-joined candidate texts")

    bc = sample.candidate(CandidateLabel.BC)
    if sample.passage[slice(*bc.answer_span)] != sample.answer_text:
        problems.append("answer_span does not slice to answer_text")
    if bc.name != sample.answer_text:
        problems.append("answer_text differs from BC name")

    names = [c.name for c in sample.candidates]
    if len(set(names)) != 4:
        problems.append(f"names not pairwise distinct: {names}")
    if sample.passage.count(sample.answer_text) != 1:
        problems.append("answer_text does not occur exactly once in passage")

    if template_by_id is not None:
        own = template_by_id.get(sample.template_id)
        other = template_by_id.get(sample.negative_template_id)
        if own is None or other is None:
            problems.append("template ids not found")
        else:
            by_label = {
                CandidateLabel.BC: own, CandidateLabel.CC: own,
                CandidateLabel.TC: other, CandidateLabel.BI: other,
            }
            for c in sample.candidates:
                redone = substitute_context(by_label[c.label], c.name, c.year)
                if redone.text != c.text:
                    problems.append(f"{c.label}: text not from expected template")
            requestion = substitute_question(own, render_question_time(q)).text
            if requestion != sample.question:
                problems.append("question not from expected template")
    return problems


def dataset_stats(
    samples: Iterable[TcseSample],
    template_by_id: Optional[dict[str, Template]] = None,
) -> dict:
    """Summarize a dataset: specifier mix, label-audit tally, passage lengths."""
    by_specifier = {s.value: 0 for s in TimeSpecifier}
    candidate_counts: dict[int, int] = {}
    passage_lengths: dict[int, int] = {}
    n = 0
    audit_passed = 0
    audit_failed = 0
    for sample in samples:
        n += 1
        by_specifier[sample.question_time.specifier.value] += 1
        k = len(sample.candidates)
        candidate_counts[k] = candidate_counts.get(k, 0) + 1
        bucket = (len(sample.passage) // 100) * 100
        passage_lengths[bucket] = passage_lengths.get(bucket, 0) + 1
        if audit_sample(sample, template_by_id):
            audit_failed += 1
        else:
            audit_passed += 1
    return {
        "n_samples": n,
        "by_specifier": by_specifier,
        "candidate_count_histogram": candidate_counts,
        "passage_length_histogram": dict(sorted(passage_lengths.items())),
        "label_audit": {"passed": audit_passed, "failed": audit_failed},
    }


def sample_to_dict(s: TcseSample) -> dict:
    """Wire form of one sample; offsets are Unicode-scalar character offsets."""
    years = [s.question_time.start]
    if s.question_time.end is not None:
        years.append(s.question_time.end)
    candidates = []
    for c in s.candidates:
        row = {
            "label": c.label.value,
            "text": c.text,
            "year": c.year,
            "name": c.name,
            "passage_start": c.passage_span[0],
            "passage_end": c.passage_span[1],
        }
        if c.answer_span is not None:
            row["answer_start"], row["answer_end"] = c.answer_span
        candidates.append(row)
    return {
        "id": s.id,
        "question": s.question,
        "specifier": s.question_time.specifier.value,
        "question_years": years,
        "passage": s.passage,
        "answer_text": s.answer_text,
        "candidates": candidates,
        "template_id": s.template_id,
        "negative_template_id": s.negative_template_id,
    }


def sample_from_dict(d: dict) -> TcseSample:
    years = d["question_years"]
    q_time = QuestionTime(
        TimeSpecifier(d["specifier"]),
        years[0],
        years[1] if len(years) > 1 else None,
    )
    candidates = []
    for row in d["candidates"]:
        answer_span = None
        if "answer_start" in row:
            answer_span = (row["answer_start"], row["answer_end"])
        candidates.append(Candidate(
            text=row["text"],
            label=CandidateLabel(row["label"]),
            year=row["year"],
            name=row["name"],
            passage_span=(row["passage_start"], row["passage_end"]),
            answer_span=answer_span,
        ))
    return TcseSample(
        id=d["id"],
        question=d["question"],
        question_time=q_time,
        candidates=tuple(candidates),
        passage=d["passage"],
        answer_text=d["answer_text"],
        template_id=d["template_id"],
        negative_template_id=d["negative_template_id"],
    )
