import csv
import json

import pytest

from careerkit import data
from careerkit.numerics import SeededRng

# taxonomy-consistent skills per master field, enough for 6 docs per class
FIELD_SKILLS = {
    "Web Development": ["WD", "DD", "PSA", "API Knowledge", "Cloud Computing"],
    "Cybersecurity": ["CS", "NS", "Cryptography", "Network Topologies", "DAV"],
    "Machine Learning": ["AI and ML", "Feature Engineering", "Robotics Knowledge",
                         "Statistical Analysis", "IoT"],
    "Software Development and Engineering": ["WD", "OSN", "BDT",
                                             "Project Management", "SD"],
    "Graphic Design": ["GD", "UI / UX Knowledge", "VEA",
                       "Working with Technology and New Idea Generate"],
    "Data Science": ["DAV", "Big Data Technologies", "Statistical Analysis",
                     "Data Engineering", "Communication"],
}


def write_mini_survey(path, docs_per_class=6, seed=99):
    """Small, fully mappable survey with one row block per master field."""
    rng = SeededRng(seed)
    rows = []
    for field, skills in FIELD_SKILLS.items():
        for i in range(docs_per_class):
            take = 3 + rng.below(len(skills) - 2)
            pool = list(skills)
            chosen = [pool.pop(rng.below(len(pool))) for _ in range(take)]
            rows.append([str(1 + rng.below(12)), field, "", "",
                         "Data Structure", ", ".join(chosen), "Yes", ""])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["semester", "interest_field", "research_field",
                         "higher_study_field", "core_courses", "skills",
                         "engaged", "contribution_field"])
        writer.writerows(rows)
    return path


FAST_MODELS = {
    "svm": {"epochs": 150},
    "lr": {"max_iters": 300},
    "mlp": {"training": {"epochs": 3, "batch_size": 4},
            "model": {"hidden": [16, 12, 8, 6]}},
    "cnn": {"training": {"epochs": 3, "batch_size": 4},
            "model": {"filters": 4, "dense": 8}},
    "lstm": {"training": {"epochs": 3, "batch_size": 4},
             "model": {"hidden": 8, "dense": 6, "frame_width": 8}},
}


@pytest.fixture
def mini_config_path(tmp_path):
    """Config file over a small survey; neural models shrunk for speed."""
    survey = write_mini_survey(tmp_path / "survey.csv")
    config = {
        "dataset": str(survey),
        "taxonomy": str(data.path("taxonomy.txt")),
        "aliases": str(data.path("skill_aliases.txt")),
        "stopwords": str(data.path("stopwords.txt")),
        "split_ratio": 0.8,
        "split_seed": 10,
        "models": FAST_MODELS,
        "artifacts_dir": "artifacts",
        "reports_dir": "reports",
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config, indent=1), encoding="utf-8")
    return path
