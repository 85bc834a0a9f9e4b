"""Generate the bundled survey snapshot (src/careerkit/data/snapshot.csv).

Synthesizes a questionnaire export with the same shape and noise profile as a
real student survey: mixed abbreviation/full-name skill rendering, case noise,
cross-field skill contamination, optional free-text fields, out-of-range
semesters, garbage rows (skills disjoint from the chosen field) and a few
unmappable career fields. Fully deterministic from SEED.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from careerkit.numerics import SeededRng  # noqa: E402

SEED = 20240517
N_ROWS = 240
OUT = Path(__file__).resolve().parents[1] / "src/careerkit/data/snapshot.csv"

# (abbreviation, full name) pairs; full names match the bundled alias file.
SKILLS = {
    "WD": "Web Development", "MAD": "Mobile App Development",
    "VGD": "Video Game Development", "DD": "Database Development",
    "PSA": "Problem-Solving and Analysis", "CT": "Critical Thinking",
    "ADP": "Adaptability", "CC": "Cloud Computing", "PM": "Project Management",
    "COM": "Communication", "IS": "Interpersonal Skills",
    "NS": "Network Security", "SD": "System Design", "AK": "API Knowledge",
    "CS": "CyberSecurity", "DAV": "Data Analysis and Visualization",
    "NT": "Network Topologies", "OSN": "Operating Systems and Networking",
    "CYP": "Cryptography", "DE": "Data Engineering",
    "BDT": "Big Data Technologies", "FE": "Feature Engineering",
    "SA": "Statistical Analysis", "RK": "Robotics Knowledge",
    "IoT": "Internet of Things", "AI and ML": "AI and ML",
    "GD": "Graphic Design", "VEA": "Video Editing and Animation",
    "UI / UX Knowledge": "UI / UX Knowledge",
    "WTNIG": "Working with Technology and New Idea Generate",
}

MASTERS = {
    "DEV": {
        "weight": 24,
        "fields": [("MAD", "Mobile App Development"),
                   ("VGD", "Video Game Development"),
                   ("WD", "Web Development")],
        "skills": ["WD", "MAD", "VGD", "DD", "PSA", "CT", "ADP", "CC", "PM",
                   "COM", "IS", "NS", "SD", "AK"],
    },
    "SEC": {
        "weight": 15,
        "fields": [("CS", "Cybersecurity"),
                   ("ISA", "Information Security Analysts"),
                   ("CCD", "Cloud computing and DevOps"),
                   ("TPA", "Tech Policy and Advocacy")],
        "skills": ["CS", "DAV", "NS", "CT", "AI and ML", "CC", "NT", "ADP",
                   "PSA", "OSN", "CYP", "DE", "SD", "COM", "IS"],
    },
    "AI": {
        "weight": 14,
        "fields": [("AI", "Artificial Intelligence"),
                   ("RA", "Robotics and Automation"),
                   ("IoT", "Internet of Things"),
                   ("ML", "Machine Learning")],
        "skills": ["PSA", "DE", "AI and ML", "DAV", "CT", "DD", "BDT", "FE",
                   "SA", "SD", "CC", "RK", "PM", "IoT", "COM", "IS", "ADP"],
    },
    "SDE": {
        "weight": 20,
        "fields": [("SDE", "Software Development and Engineering"),
                   ("PMG", "Project Manager"),
                   ("CIM", "Consulting and IT Management"),
                   ("SysA", "System Analyst")],
        "skills": ["WD", "MAD", "AI and ML", "PSA", "CS", "OSN", "BDT", "PM",
                   "DD", "DAV", "DE", "SD", "CC", "COM", "IS", "ADP", "CT"],
    },
    "UI / UX": {
        "weight": 13,
        "fields": [("UI / UX", "UI / UX"), ("GD", "Graphic Design"),
                   ("VE", "Video Editing")],
        "skills": ["UI / UX Knowledge", "GD", "WTNIG", "VEA"],
    },
    "DS": {
        "weight": 14,
        "fields": [("DS", "Data Science")],
        "skills": ["PSA", "DE", "AI and ML", "DAV", "CT", "DD", "COM", "BDT",
                   "FE", "SA", "SD", "CC", "IS", "ADP"],
    },
}

COURSES = ["Programming and Problem Solving", "Data Structure",
           "Database Management System", "Algorithms", "Operating Systems",
           "Computer Networks", "Software Engineering", "Discrete Mathematics"]

RESEARCH = {
    "DEV": ["Human Computer Interaction", "Software Architecture"],
    "SEC": ["Network Security", "Cryptography", "Digital Forensics"],
    "AI": ["Artificial Intelligence", "Natural Language Processing",
           "Computer Vision"],
    "SDE": ["Software Engineering", "Distributed Systems"],
    "UI / UX": ["Human Computer Interaction", "Design Systems"],
    "DS": ["Data Science", "Big Data Analytics", "Statistics"],
}

HIGHER = {
    "DEV": ["Software Engineering", "Computer Science"],
    "SEC": ["Cybersecurity", "Information Security"],
    "AI": ["Artificial Intelligence", "Machine Learning"],
    "SDE": ["Software Engineering", "Engineering Management"],
    "UI / UX": ["Human Computer Interaction", "Interaction Design"],
    "DS": ["Data Science and Analytics", "Applied Statistics"],
}

CONTRIB = {
    "DEV": ["Built web apps for a student club", "Freelance app development"],
    "SEC": ["Capture the flag competitions", "Security audits for a lab"],
    "AI": ["Research on Artificial Intelligence and Machine learning",
           "Kaggle competitions"],
    "SDE": ["Open source contribution", "Internship as a software engineer"],
    "UI / UX": ["Designed posters and interfaces", "Freelance graphic design"],
    "DS": ["Research on data analytics", "Built dashboards for a startup"],
}

GARBAGE_SKILLS = ["Cooking", "Photography", "Singing", "Gardening",
                  "Football", "Painting", "Chess"]
FILLER_SKILLS = ["Teamwork", "Leadership", "Time Management", "English",
                 "Presentation", "Git", "Linux", "MS Office", "Typing",
                 "Public Speaking"]
P_FILLER = 0.45       # rows that list 1-2 generic extra skills
UNMAPPED_FIELDS = ["Astrology", "Underwater Basket Weaving", "Culinary Arts"]

# Noise profile (calibrated against the accuracy bands):
P_ABBREV = 0.3        # render a skill as its abbreviation
P_GARBAGE = 0.06      # rows whose skills are junk -> dropped by cleaning
P_UNMAPPED = 0.03     # rows with an unknown career field -> dropped
P_BAD_SEMESTER = 0.04
N_OWN = (3, 8)        # own-field skills per row (inclusive range)
FOREIGN_WEIGHTS = [(0, 30), (1, 28), (2, 22), (3, 14), (4, 6)]
P_RESEARCH, P_HIGHER, P_CONTRIB = 0.30, 0.30, 0.25
P_OFF_TOPIC = 0.35    # optional fields sometimes name another field's topic


def weighted_choice(rng: SeededRng, pairs):
    total = sum(w for _, w in pairs)
    pick = rng.below(total)
    acc = 0
    for value, w in pairs:
        acc += w
        if pick < acc:
            return value
    return pairs[-1][0]


def sample(rng: SeededRng, items, n):
    pool = list(items)
    chosen = []
    for _ in range(min(n, len(pool))):
        chosen.append(pool.pop(rng.below(len(pool))))
    return chosen


def case_noise(rng: SeededRng, text: str) -> str:
    roll = rng.below(10)
    if roll == 0:
        return text.lower()
    if roll == 1:
        return text.upper()
    return text


AIML_VARIANTS = ["AI and ML", "Machine Learning", "Artificial Intelligence",
                 "Artificial Intelligence and Machine Learning"]


def render_skill(rng: SeededRng, key: str) -> str:
    if key == "AI and ML":
        return case_noise(rng, AIML_VARIANTS[rng.below(len(AIML_VARIANTS))])
    full = SKILLS[key]
    if key != full and rng.random() < P_ABBREV:
        return case_noise(rng, key)
    return case_noise(rng, full)


def make_row(rng: SeededRng) -> list[str]:
    master_pairs = [(m, spec["weight"]) for m, spec in MASTERS.items()]
    master = weighted_choice(rng, master_pairs)
    spec = MASTERS[master]

    roll = rng.random()
    if roll < P_UNMAPPED:
        interest = UNMAPPED_FIELDS[rng.below(len(UNMAPPED_FIELDS))]
        skills = sample(rng, spec["skills"], 4)
        skills = [render_skill(rng, k) for k in skills]
    elif roll < P_UNMAPPED + P_GARBAGE:
        abbr, full = spec["fields"][rng.below(len(spec["fields"]))]
        interest = case_noise(rng, abbr if rng.random() < P_ABBREV else full)
        skills = sample(rng, GARBAGE_SKILLS, 3 + rng.below(3))
    else:
        abbr, full = spec["fields"][rng.below(len(spec["fields"]))]
        interest = case_noise(rng, abbr if rng.random() < P_ABBREV else full)
        n_own = N_OWN[0] + rng.below(N_OWN[1] - N_OWN[0] + 1)
        own = sample(rng, spec["skills"], n_own)
        n_foreign = weighted_choice(rng, FOREIGN_WEIGHTS)
        foreign_pool = sorted({k for m, s in MASTERS.items() if m != master
                               for k in s["skills"] if k not in own})
        foreign = sample(rng, foreign_pool, n_foreign)
        skills = [render_skill(rng, k) for k in own + foreign]
        if rng.random() < P_FILLER:
            skills.extend(sample(rng, FILLER_SKILLS, 1 + rng.below(2)))

    if rng.random() < P_BAD_SEMESTER:
        semester = ["15", "0", "n/a"][rng.below(3)]
    else:
        semester = str(1 + rng.below(12))

    def topic(pool) -> str:
        owner = master
        if rng.random() < P_OFF_TOPIC:
            owner = sorted(MASTERS)[rng.below(len(MASTERS))]
        return pool[owner][rng.below(len(pool[owner]))]

    research = topic(RESEARCH) if rng.random() < P_RESEARCH else ""
    higher = topic(HIGHER) if rng.random() < P_HIGHER else ""
    contrib = topic(CONTRIB) if rng.random() < P_CONTRIB else ""
    courses = "; ".join(sample(rng, COURSES, 2 + rng.below(3)))
    engaged = "Yes" if contrib or rng.random() < 0.3 else "No"
    return [semester, interest, research, higher, courses,
            ", ".join(skills), engaged, contrib]


def main() -> None:
    rng = SeededRng(SEED)
    rows = [make_row(rng) for _ in range(N_ROWS)]
    with open(OUT, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["semester", "interest_field", "research_field",
                         "higher_study_field", "core_courses", "skills",
                         "engaged", "contribution_field"])
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {OUT}")


if __name__ == "__main__":
    main()
