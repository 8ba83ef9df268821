"""Long-passage windowing and per-window prediction aggregation.

Passages longer than a model's input limit are split into consecutive
token windows; training uses the window containing the answer span (or
the first window when unanswerable), and inference keeps the span with
the maximum logit across windows.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import TcqaError

Token = tuple[str, int, int]  # (text, char_start, char_end)


class EmptyPassage(TcqaError):
    """Cannot window a passage with no tokens."""


class AnswerOutOfRange(TcqaError):
    """Answer span outside the passage, or too long for one window."""


class EmptyInput(TcqaError):
    """No per-window predictions to aggregate."""


@dataclass(frozen=True)
class TokenizedPassage:
    """Tokens with exact character offsets into the source text."""

    tokens: tuple[Token, ...]
    source_text: str

    def __post_init__(self) -> None:
        prev_end = 0
        for text, start, end in self.tokens:
            if not (0 <= start < end <= len(self.source_text)):
                raise TcqaError(f"token offsets ({start}, {end}) out of bounds")
            if start < prev_end:
                raise TcqaError(f"token at {start} overlaps the previous one")
            if self.source_text[start:end] != text:
                raise TcqaError(f"token {text!r} does not match its slice")
            prev_end = end


@dataclass(frozen=True)
class Window:
    """Half-open token range and the derived character bounds."""

    token_start: int
    token_end: int
    char_start: int
    char_end: int

    def __len__(self) -> int:
        return self.token_end - self.token_start


_TOKEN_RE = re.compile(r"\S+")


def whitespace_tokenize(text: str) -> TokenizedPassage:
    """Offset-exact whitespace tokenizer for standalone use."""
    tokens = tuple((m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text))
    return TokenizedPassage(tokens, text)


def _make_window(p: TokenizedPassage, token_start: int, token_end: int) -> Window:
    return Window(
        token_start=token_start,
        token_end=token_end,
        char_start=p.tokens[token_start][1],
        char_end=p.tokens[token_end - 1][2],
    )


def split_windows(
    p: TokenizedPassage, max_len: int, stride: Optional[int] = None
) -> list[Window]:
    """Cut the passage into token windows of at most max_len tokens.

    The default stride equals max_len, giving consecutive non-overlapping
    windows that partition the tokens; a smaller stride overlaps windows.
    """
    if max_len < 1:
        raise TcqaError(f"max_len must be >= 1, got {max_len}")
    if stride is None:
        stride = max_len
    if not 1 <= stride <= max_len:
        raise TcqaError(f"stride must be in [1, {max_len}], got {stride}")
    n = len(p.tokens)
    if n == 0:
        raise EmptyPassage("passage has no tokens")
    windows = []
    for start in range(0, n, stride):
        windows.append(_make_window(p, start, min(start + max_len, n)))
        if start + max_len >= n:
            break
    return windows


def select_training_window(
    p: TokenizedPassage,
    windows: Sequence[Window],
    answer: Optional[tuple[int, int]],
) -> Window:
    """Pick the window to train on for this passage.

    No answer: the first window. Answer inside one window: that window.
    Answer straddling a boundary: a fresh max_len window re-cut around the
    answer, clipped to the passage ends.
    """
    if not windows:
        raise TcqaError("windows must be non-empty")
    if answer is None:
        return windows[0]
    ans_start, ans_end = answer
    if not (0 <= ans_start < ans_end <= len(p.source_text)):
        raise AnswerOutOfRange(f"answer ({ans_start}, {ans_end}) outside passage")

    for w in windows:
        if w.char_start <= ans_start and ans_end <= w.char_end:
            return w

    # straddling: find the tokens the answer touches and re-cut around them
    touched = [
        i for i, (_, t_start, t_end) in enumerate(p.tokens)
        if t_end > ans_start and t_start < ans_end
    ]
    if not touched:
        raise AnswerOutOfRange(f"answer ({ans_start}, {ans_end}) covers no token")
    first, last = touched[0], touched[-1]
    max_len = max(len(w) for w in windows)
    needed = last - first + 1
    if needed > max_len:
        raise AnswerOutOfRange(
            f"answer spans {needed} tokens, more than max_len {max_len}"
        )
    n = len(p.tokens)
    start = first - (max_len - needed) // 2
    start = max(0, min(start, n - max_len))
    return _make_window(p, start, start + max_len)


def aggregate_predictions(
    per_window: Sequence[tuple[tuple[int, int], float]],
) -> tuple[tuple[int, int], float]:
    """Keep the (span, logit) entry with the maximum logit; ties keep the
    earliest window. Spans are global passage offsets."""
    if not per_window:
        raise EmptyInput("no per-window predictions")
    for _, logit in per_window:
        if not math.isfinite(logit):
            raise TcqaError(f"non-finite logit {logit}")
    best_span, best_logit = per_window[0]
    for span, logit in per_window[1:]:
        if logit > best_logit:
            best_span, best_logit = span, logit
    return best_span, best_logit
