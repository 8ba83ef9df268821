import json

import pytest

from tcqa.templates import Template

FRAMES = [
    ("Who was elected mayor of {w} [TIME]?",
     "[NAME] was elected mayor of {w} [TIME]."),
    ("Who served as governor of {w} [TIME]?",
     "Until stepping down, [NAME] served as governor of {w} [TIME]."),
    ("Who was General Counsel at {w} [TIME]?",
     "[TIME], [NAME] became General Counsel and a managing director at {w}."),
    ("Who played in the {w} finals [TIME]?",
     "[TIME], [NAME] participated with the team in the finals of the {w}."),
    ("Who was loaned to {w} [TIME]?",
     "[NAME] had a second loan spell at {w}, arriving [TIME]."),
    ("Who chaired the {w} committee [TIME]?",
     "The {w} committee was chaired by [NAME] [TIME]."),
    ("Who taught history at {w} [TIME]?",
     "[NAME] taught history at {w} after joining the faculty [TIME]."),
    ("Who directed the {w} observatory [TIME]?",
     "The {w} observatory appointed [NAME] as director [TIME]."),
    ("Who ran the ferry service to {w} [TIME]?",
     "The ferry service to {w} was run by [NAME], starting [TIME]."),
    ("Who edited the {w} gazette [TIME]?",
     "[NAME] edited the {w} gazette, taking the desk [TIME]."),
    ("Who captained the {w} squad [TIME]?",
     "[TIME], the {w} squad named [NAME] as captain."),
    ("Who curated the {w} archive [TIME]?",
     "[NAME] curated the {w} archive beginning [TIME]."),
]

WORDS = [
    "Boston", "Ohio", "Wolves", "Asian Cup", "Harbor District", "Riverside",
    "Lakeside", "Granite Valley", "Northfield", "Westbrook", "Cedar County",
    "Côte d'Or",  # non-ASCII on purpose: offsets must be character-based
]


def make_templates(n: int) -> list[Template]:
    out = []
    for w in WORDS:
        for qf, cf in FRAMES:
            if len(out) == n:
                return out
            out.append(Template(
                id=f"t{len(out):04d}",
                question_template=qf.format(w=w),
                context_template=cf.format(w=w),
            ))
    raise ValueError(f"can only build {len(out)} templates, asked for {n}")


def write_templates(path, templates):
    with open(path, "w", encoding="utf-8") as f:
        for t in templates:
            row = {
                "id": t.id,
                "question_template": t.question_template,
                "context_template": t.context_template,
            }
            f.write(json.dumps(row) + "\n")


@pytest.fixture
def template_file(tmp_path):
    p = tmp_path / "templates.jsonl"
    write_templates(p, make_templates(100))
    return p
