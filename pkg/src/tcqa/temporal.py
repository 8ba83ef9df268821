"""Time-specifier semantics: parsing, rendering, year matching, and sampling.

Questions carry one of seven time specifiers {in, after, since, before,
until, between, from} anchored to one or two years. Context sentences
always use "in {year}". Events are treated as persisting indefinitely,
so "in 1481" is satisfied by any context year <= 1481.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from random import Random
from typing import Optional

from .errors import TcqaError

YEAR_MIN = 1
YEAR_MAX = 9999


class NoSpecifierFound(TcqaError):
    """No recognized time specifier in the text."""


class MalformedYears(TcqaError):
    """Wrong number of year anchors, or a year token is not a valid year."""


class InvalidRange(TcqaError):
    """Two-anchor expression with start >= end."""


class EmptySampleRegion(TcqaError):
    """Sampling region is empty after clipping to the valid year range."""


class TimeSpecifier(Enum):
    IN = "in"
    AFTER = "after"
    SINCE = "since"
    BEFORE = "before"
    UNTIL = "until"
    BETWEEN = "between"
    FROM = "from"

    def __str__(self) -> str:
        return self.value


# Specifiers taking two year anchors.
TWO_ANCHOR = frozenset({TimeSpecifier.BETWEEN, TimeSpecifier.FROM})


def _check_year(value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise MalformedYears(f"year must be an int, got {value!r}")
    if not YEAR_MIN <= value <= YEAR_MAX:
        raise MalformedYears(f"year {value} outside [{YEAR_MIN}, {YEAR_MAX}]")
    return value


@dataclass(frozen=True)
class QuestionTime:
    """A question's time constraint: specifier plus one or two year anchors."""

    specifier: TimeSpecifier
    start: int
    end: Optional[int] = None

    def __post_init__(self) -> None:
        _check_year(self.start)
        if self.specifier in TWO_ANCHOR:
            if self.end is None:
                raise MalformedYears(f"{self.specifier} requires two year anchors")
            _check_year(self.end)
            if self.start >= self.end:
                raise InvalidRange(f"start {self.start} >= end {self.end}")
        elif self.end is not None:
            raise MalformedYears(f"{self.specifier} takes a single year anchor")


@dataclass(frozen=True)
class ContextTime:
    """A context sentence's time, always rendered as "in {year}"."""

    year: int

    def __post_init__(self) -> None:
        _check_year(self.year)


@dataclass(frozen=True)
class SamplerConfig:
    """Year-sampling parameters for question anchors and positive/negative years."""

    base_year_min: int = 1000
    base_year_max: int = 2020
    max_offset: int = 30
    between_max_gap: int = 10

    def __post_init__(self) -> None:
        _check_year(self.base_year_min)
        _check_year(self.base_year_max)
        if self.base_year_min >= self.base_year_max:
            raise TcqaError("base_year_min must be < base_year_max")
        if self.max_offset < 1:
            raise TcqaError("max_offset must be >= 1")
        if self.between_max_gap < 1:
            raise TcqaError("between_max_gap must be >= 1")


def matches(q: QuestionTime, year: int) -> bool:
    """True iff an event starting in `year` satisfies the time constraint `q`.

    Under the persistence assumption an event starting in y is ongoing for
    all later years, so In/Until accept y <= anchor, Since accepts y >= anchor,
    Before/After are strict, and Between/From accept anchors inclusively.
    """
    s = q.specifier
    if s is TimeSpecifier.IN or s is TimeSpecifier.UNTIL:
        return year <= q.start
    if s is TimeSpecifier.BEFORE:
        return year < q.start
    if s is TimeSpecifier.AFTER:
        return year > q.start
    if s is TimeSpecifier.SINCE:
        return year >= q.start
    return q.start <= year <= q.end  # between / from


def _positive_region(q: QuestionTime, cfg: SamplerConfig) -> tuple[int, int]:
    s = q.specifier
    if s is TimeSpecifier.IN or s is TimeSpecifier.UNTIL:
        return q.start - cfg.max_offset, q.start
    if s is TimeSpecifier.BEFORE:
        return q.start - cfg.max_offset, q.start - 1
    if s is TimeSpecifier.AFTER:
        return q.start + 1, q.start + cfg.max_offset
    if s is TimeSpecifier.SINCE:
        return q.start, q.start + cfg.max_offset
    return q.start, q.end


def _negative_region(q: QuestionTime, cfg: SamplerConfig) -> tuple[int, int]:
    s = q.specifier
    if s in (TimeSpecifier.IN, TimeSpecifier.BEFORE, TimeSpecifier.UNTIL):
        return q.start + 1, q.start + cfg.max_offset
    if s in (TimeSpecifier.AFTER, TimeSpecifier.SINCE):
        return q.start - cfg.max_offset, q.start - 1
    # Between/From: only years above the upper anchor; years below the lower
    # anchor would be positive under the persistence assumption.
    return q.end + 1, q.end + cfg.max_offset


def _sample_region(lo: int, hi: int, rng: Random) -> int:
    lo = max(lo, YEAR_MIN)
    hi = min(hi, YEAR_MAX)
    if lo > hi:
        raise EmptySampleRegion(f"no valid years in [{lo}, {hi}]")
    return rng.randint(lo, hi)


def sample_positive(q: QuestionTime, rng: Random, cfg: SamplerConfig) -> int:
    """Uniformly sample a year that satisfies `q`."""
    lo, hi = _positive_region(q, cfg)
    return _sample_region(lo, hi, rng)


def sample_negative(q: QuestionTime, rng: Random, cfg: SamplerConfig) -> int:
    """Uniformly sample a year that does not satisfy `q`."""
    lo, hi = _negative_region(q, cfg)
    return _sample_region(lo, hi, rng)


def random_question_time(rng: Random, cfg: SamplerConfig) -> QuestionTime:
    """Draw a specifier uniformly and anchor(s) within the configured base range."""
    spec = rng.choice(list(TimeSpecifier))
    start = rng.randint(cfg.base_year_min, cfg.base_year_max)
    if spec in TWO_ANCHOR:
        start = min(start, YEAR_MAX - 1)
        end = min(start + rng.randint(1, cfg.between_max_gap), YEAR_MAX)
        return QuestionTime(spec, start, end)
    return QuestionTime(spec, start)


def render_question_time(q: QuestionTime) -> str:
    """Surface form of a question time, e.g. "between 1566 and 1569"."""
    if q.specifier is TimeSpecifier.BETWEEN:
        return f"between {q.start} and {q.end}"
    if q.specifier is TimeSpecifier.FROM:
        return f"from {q.start} to {q.end}"
    return f"{q.specifier.value} {q.start}"


def render_context_time(c: ContextTime) -> str:
    """Surface form of a context time, always "in {year}"."""
    return f"in {c.year}"


_MONTH = (
    r"(?:jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|jun(?:e)?|"
    r"jul(?:y)?|aug(?:ust)?|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|"
    r"dec(?:ember)?)\.?"
)
_SPECIFIER_RE = re.compile(
    r"\b(in|after|since|before|until|between|from)\b", re.IGNORECASE
)
# Optional month token (ignored; granularity is year-only), then a year.
_FIRST_YEAR_RE = re.compile(rf"\s+(?:the\s+year\s+)?(?:{_MONTH}\s+)?(\d{{1,4}})\b", re.IGNORECASE)
_SECOND_YEAR_RE = re.compile(rf"\s+(?:and|to)\s+(?:{_MONTH}\s+)?(\d{{1,4}})\b", re.IGNORECASE)


def parse_time_expression(text: str) -> QuestionTime:
    """Parse the time constraint out of a question or time phrase.

    Accepts the seven specifier forms with one or two year anchors; month
    names between the specifier and the year are ignored. Raises
    NoSpecifierFound when no specifier word occurs, MalformedYears when the
    anchor years are missing or invalid, InvalidRange when a two-anchor
    expression is not increasing.
    """
    spec_matches = list(_SPECIFIER_RE.finditer(text))
    if not spec_matches:
        raise NoSpecifierFound(f"no time specifier in {text!r}")

    # The time constraint is the (unique) specifier directly followed by a
    # year; other occurrences ("in charge", "from Boston") are prose.
    for m in spec_matches:
        year_m = _FIRST_YEAR_RE.match(text, m.end())
        if year_m is None:
            continue
        spec = TimeSpecifier(m.group(1).lower())
        start = _check_year(int(year_m.group(1)))
        if spec not in TWO_ANCHOR:
            return QuestionTime(spec, start)
        second_m = _SECOND_YEAR_RE.match(text, year_m.end())
        if second_m is None:
            raise MalformedYears(f"{spec} needs a second year anchor in {text!r}")
        end = _check_year(int(second_m.group(1)))
        if start >= end:
            raise InvalidRange(f"{start} >= {end} in {text!r}")
        return QuestionTime(spec, start, end)

    raise MalformedYears(f"no year anchor after a specifier in {text!r}")
