"""Question-context templates and the random-name pool.

A template pairs a question with its time constraint masked as "[TIME]"
and a context sentence with the person entity and time masked as
"[NAME]" and "[TIME]". Substitution tracks exact character offsets of
the inserted name so gold spans can be labeled downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import TcqaError
from .temporal import ContextTime, render_context_time

NAME_TOKEN = "[NAME]"
TIME_TOKEN = "[TIME]"


class SchemaError(TcqaError):
    """A template line is not a JSON object with the required keys."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TokenCountError(TcqaError):
    """A template has the wrong number of [NAME]/[TIME] tokens."""

    def __init__(self, template_id: str, message: str):
        super().__init__(f"template {template_id!r}: {message}")
        self.template_id = template_id


class DuplicateId(TcqaError):
    """Two templates share the same id."""


class EmptyPool(TcqaError):
    """The name pool has no usable names."""


@dataclass(frozen=True)
class Template:
    """A question/context sentence pair with [NAME] and [TIME] slots."""

    id: str
    question_template: str
    context_template: str
    source: Optional[str] = None

    def __post_init__(self) -> None:
        if self.question_template.count(TIME_TOKEN) != 1:
            raise TokenCountError(self.id, "question_template needs exactly one [TIME]")
        if NAME_TOKEN in self.question_template:
            raise TokenCountError(self.id, "question_template must not contain [NAME]")
        if self.context_template.count(TIME_TOKEN) != 1:
            raise TokenCountError(self.id, "context_template needs exactly one [TIME]")
        if self.context_template.count(NAME_TOKEN) != 1:
            raise TokenCountError(self.id, "context_template needs exactly one [NAME]")
        if not self.question_template.replace(TIME_TOKEN, "").strip():
            raise TokenCountError(self.id, "question_template is empty besides tokens")
        stripped = self.context_template.replace(TIME_TOKEN, "").replace(NAME_TOKEN, "")
        if not stripped.strip():
            raise TokenCountError(self.id, "context_template is empty besides tokens")


@dataclass(frozen=True)
class NamePool:
    """Unique person names; none may contain brackets or digits."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise EmptyPool("name pool is empty")
        seen = set()
        for n in self.names:
            if n in seen:
                raise TcqaError(f"duplicate name {n!r}")
            seen.add(n)
            if any(ch.isdigit() or ch in "[]" for ch in n):
                raise TcqaError(f"invalid name {n!r}")

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class RenderedSentence:
    """A template with its slots filled; name_span is half-open char offsets."""

    text: str
    name_span: Optional[tuple[int, int]] = None
    year: Optional[int] = None

    def __post_init__(self) -> None:
        if self.name_span is not None:
            lo, hi = self.name_span
            if not (0 <= lo < hi <= len(self.text)):
                raise TcqaError(f"name_span {self.name_span} out of bounds")


def load_templates(path: str | Path) -> list[Template]:
    """Load and validate templates from a JSONL file (one object per line)."""
    templates: list[Template] = []
    ids: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(line_no, f"invalid JSON: {e}") from e
            if not isinstance(obj, dict):
                raise SchemaError(line_no, "expected a JSON object")
            if "_meta" in obj:
                continue
            missing = {"id", "question_template", "context_template"} - obj.keys()
            if missing:
                raise SchemaError(line_no, f"missing keys: {sorted(missing)}")
            for key in ("id", "question_template", "context_template"):
                if not isinstance(obj[key], str):
                    raise SchemaError(line_no, f"{key} must be a string")
            t = Template(
                id=obj["id"],
                question_template=obj["question_template"],
                context_template=obj["context_template"],
                source=obj.get("source"),
            )
            if t.id in ids:
                raise DuplicateId(f"duplicate template id {t.id!r} at line {line_no}")
            ids.add(t.id)
            templates.append(t)
    return templates


def load_names(path: Optional[str | Path] = None) -> NamePool:
    """Load the name pool from a file (one name per line) or the bundled list.

    Lines are deduplicated; blank lines and names containing digits or
    brackets are dropped.
    """
    if path is None:
        text = (
            resources.files("tcqa").joinpath("resources/names.txt").read_text("utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    names: list[str] = []
    seen: set[str] = set()
    for raw in text.splitlines():
        name = raw.strip()
        if not name or name in seen:
            continue
        if any(ch.isdigit() or ch in "[]" for ch in name):
            continue
        seen.add(name)
        names.append(name)
    if not names:
        raise EmptyPool("no usable names")
    return NamePool(tuple(names))


def substitute_question(t: Template, time_text: str) -> RenderedSentence:
    """Fill the question's [TIME] slot with a rendered time expression."""
    if not time_text:
        raise TcqaError("time_text must be non-empty")
    return RenderedSentence(text=t.question_template.replace(TIME_TOKEN, time_text))


def substitute_context(t: Template, name: str, year: int) -> RenderedSentence:
    """Fill the context's [NAME] and [TIME] slots, tracking the name's offsets."""
    time_text = render_context_time(ContextTime(year))
    template = t.context_template
    name_at = template.index(NAME_TOKEN)
    time_at = template.index(TIME_TOKEN)
    if name_at < time_at:
        start = name_at
        text = (
            template[:name_at]
            + name
            + template[name_at + len(NAME_TOKEN): time_at]
            + time_text
            + template[time_at + len(TIME_TOKEN):]
        )
    else:
        start = name_at + len(time_text) - len(TIME_TOKEN)
        text = (
            template[:time_at]
            + time_text
            + template[time_at + len(TIME_TOKEN): name_at]
            + name
            + template[name_at + len(NAME_TOKEN):]
        )
    return RenderedSentence(text=text, name_span=(start, start + len(name)), year=year)
