"""Survey ingestion, career-field taxonomy, and dataset cleaning.

The raw input is a delimited text export of the questionnaire, one row per
student. Cleaning consolidates each student's suggested field into one of the
six master career fields, scores how well their listed skills agree with that
field's required-skill inventory (Jaccard overlap), drops rows that
extensively mismatch, and merges the remaining free-text fields into a single
labeled document. Every ingested row gets exactly one provenance entry.
"""

from __future__ import annotations

import csv
import re
import warnings
from dataclasses import dataclass, field

from .errors import (
    EmptyDatasetError,
    EmptyInputError,
    SchemaError,
    UnmappedFieldError,
)
from .textprep import MASTER_FIELDS, _canonical_label

__all__ = [
    "CleanDataset",
    "IngestIssue",
    "LabeledDocument",
    "MasterFieldTaxonomy",
    "ProvenanceEntry",
    "SurveyRecord",
    "apply_taxonomy",
    "clean",
    "label_frequencies",
    "load_survey",
    "load_taxonomy",
    "mismatch_score",
    "save_clean_dataset",
]

# Canonical column names of the questionnaire export; a config may rename them.
SURVEY_COLUMNS = (
    "semester",
    "interest_field",
    "research_field",
    "higher_study_field",
    "core_courses",
    "skills",
    "engaged",
    "contribution_field",
)

_LIST_SPLIT_RE = re.compile(r"[;,]")
_INT_RE = re.compile(r"\d+")
_TRUTHY = {"yes", "y", "true", "1"}
_FALSY = {"no", "n", "false", "0"}


@dataclass(frozen=True)
class SurveyRecord:
    """One student's questionnaire answers, lightly parsed."""

    semester: int | None
    interest_field: str
    research_field: str | None
    higher_study_field: str | None
    core_courses: list[str]
    skills: list[str]
    engaged: bool | None
    contribution_field: str | None


@dataclass(frozen=True)
class IngestIssue:
    row: int
    column: str
    value: str
    reason: str


def _normalize_term(raw: str) -> str:
    """Lowercase with collapsed whitespace; the matching key for names."""
    return " ".join(str(raw).split()).lower()


def _split_list_cell(cell: str) -> list[str]:
    return [part.strip() for part in _LIST_SPLIT_RE.split(cell) if part.strip()]


def load_survey(path, delimiter: str = ",",
                columns: dict[str, str] | None = None,
                ) -> tuple[list[SurveyRecord], list[IngestIssue]]:
    """Read the survey export into records, recording unparseable cells.

    ``columns`` maps canonical names to the file's actual header names.
    Returns (records, issues); issues never drop a row by themselves.
    """
    rename = dict(columns or {})
    actual = {name: rename.get(name, name) for name in SURVEY_COLUMNS}

    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        positions: dict[str, int] = {}
        for name, col in actual.items():
            if col not in header:
                raise SchemaError(f"missing required column {col!r}", column=col)
            positions[name] = header.index(col)

        records: list[SurveyRecord] = []
        issues: list[IngestIssue] = []
        for row_idx, row in enumerate(reader):
            def cell(name: str) -> str:
                pos = positions[name]
                return row[pos].strip() if pos < len(row) else ""

            semester: int | None = None
            raw_sem = cell("semester")
            if raw_sem:
                match = _INT_RE.search(raw_sem)
                if match is None:
                    issues.append(IngestIssue(row_idx, "semester", raw_sem,
                                              "not a number"))
                else:
                    value = int(match.group())
                    if 1 <= value <= 12:
                        semester = value
                    else:
                        issues.append(IngestIssue(row_idx, "semester", raw_sem,
                                                  "out of range 1-12"))

            skills = _split_list_cell(cell("skills"))
            if not skills:
                issues.append(IngestIssue(row_idx, "skills", cell("skills"),
                                          "no skills listed"))

            engaged: bool | None = None
            raw_engaged = cell("engaged").lower()
            if raw_engaged:
                if raw_engaged in _TRUTHY:
                    engaged = True
                elif raw_engaged in _FALSY:
                    engaged = False
                else:
                    issues.append(IngestIssue(row_idx, "engaged", cell("engaged"),
                                              "not a yes/no value"))

            records.append(SurveyRecord(
                semester=semester,
                interest_field=cell("interest_field"),
                research_field=cell("research_field") or None,
                higher_study_field=cell("higher_study_field") or None,
                core_courses=_split_list_cell(cell("core_courses")),
                skills=skills,
                engaged=engaged,
                contribution_field=cell("contribution_field") or None,
            ))

    if not records:
        warnings.warn(f"{path}: header only, no data rows", stacklevel=2)
    return records, issues


class MasterFieldTaxonomy:
    """Maps student-suggested fields to the six master fields and holds each
    master field's required-skill inventory.

    Name matching is case-insensitive with whitespace collapse; an alias table
    (abbreviation -> full name) resolves the survey's shorthand both for
    suggested fields and for skills.
    """

    def __init__(self, field_to_master: dict[str, str],
                 master_to_skills: dict[str, set[str]],
                 aliases: dict[str, str] | None = None):
        self.aliases = dict(aliases or {})
        self.field_to_master: dict[str, str] = {}
        for raw_field, master in field_to_master.items():
            self._register_field(raw_field, master)
        self.master_to_skills = {
            master: {self.resolve_skill(s) for s in skills}
            for master, skills in master_to_skills.items()
        }
        masters = set(self.master_to_skills)
        if masters != set(MASTER_FIELDS):
            raise SchemaError(
                f"master fields must be exactly {sorted(MASTER_FIELDS)}, "
                f"got {sorted(masters)}")
        for master, skills in self.master_to_skills.items():
            if not skills:
                raise SchemaError(f"master field {master} has no required skills")

    def _register_field(self, raw_field: str, master: str) -> None:
        canonical_master = _canonical_label(master)
        if canonical_master is None:
            raise SchemaError(f"unknown master field {master!r}")
        norm = _normalize_term(raw_field)
        for key in {norm, self.aliases.get(norm, norm)}:
            existing = self.field_to_master.get(key)
            if existing is not None and existing != canonical_master:
                raise SchemaError(
                    f"field {key!r} maps to both {existing} and {canonical_master}")
            self.field_to_master[key] = canonical_master

    def resolve_skill(self, raw: str) -> str:
        norm = _normalize_term(raw)
        return self.aliases.get(norm, norm)

    def resolve_field(self, raw: str) -> str:
        norm = _normalize_term(raw)
        master = self.field_to_master.get(norm)
        if master is None:
            master = self.field_to_master.get(self.aliases.get(norm, norm))
        if master is None:
            raise UnmappedFieldError(f"no master field for {raw!r}", field=str(raw))
        return master


def _parse_name_list(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def load_aliases(path) -> dict[str, str]:
    """Alias file: one ``short form = full name`` per line, # comments allowed."""
    aliases: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SchemaError(f"{path}:{lineno}: expected 'short = full'")
            short, full = line.split("=", 1)
            aliases[_normalize_term(short)] = _normalize_term(full)
    return aliases


def load_taxonomy(path, alias_path=None) -> MasterFieldTaxonomy:
    """Taxonomy file: one ``[MASTER]`` section per master field with
    ``name:``, ``fields:`` and ``skills:`` entries (comma-separated lists)."""
    aliases = load_aliases(alias_path) if alias_path else {}
    field_to_master: dict[str, str] = {}
    master_to_skills: dict[str, set[str]] = {}
    current: str | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                master = _canonical_label(line[1:-1])
                if master is None:
                    raise SchemaError(f"{path}:{lineno}: unknown master field "
                                      f"{line[1:-1]!r}")
                current = master
                master_to_skills.setdefault(master, set())
                field_to_master[master] = master
                continue
            if current is None or ":" not in line:
                raise SchemaError(f"{path}:{lineno}: entry outside a section")
            key, value = (part.strip() for part in line.split(":", 1))
            if key == "name":
                field_to_master[value] = current
            elif key == "fields":
                for name in _parse_name_list(value):
                    field_to_master[name] = current
            elif key == "skills":
                master_to_skills[current].update(_parse_name_list(value))
            else:
                raise SchemaError(f"{path}:{lineno}: unknown key {key!r}")
    return MasterFieldTaxonomy(field_to_master, master_to_skills, aliases)


def apply_taxonomy(record: SurveyRecord, taxonomy: MasterFieldTaxonomy) -> str:
    """Master field owning the student's suggested field."""
    if not record.interest_field.strip():
        raise UnmappedFieldError("record has an empty interest field", field="")
    return taxonomy.resolve_field(record.interest_field)


def mismatch_score(record: SurveyRecord, taxonomy: MasterFieldTaxonomy) -> float:
    """Jaccard overlap between the record's skills and the master field's
    required skills; 0 means total mismatch."""
    master = apply_taxonomy(record, taxonomy)
    required = taxonomy.master_to_skills[master]
    recorded = {taxonomy.resolve_skill(s) for s in record.skills}
    recorded.discard("")
    if not recorded:
        return 0.0
    union = recorded | required
    return len(recorded & required) / len(union)


@dataclass(frozen=True)
class LabeledDocument:
    text: str
    label: str


@dataclass(frozen=True)
class ProvenanceEntry:
    row: int
    action: str  # kept | adjusted | dropped
    reason: str
    score: float | None = None
    label: str | None = None


@dataclass(frozen=True)
class CleanDataset:
    documents: list[LabeledDocument]
    provenance: list[ProvenanceEntry]

    @property
    def kept_rows(self) -> list[int]:
        return [p.row for p in self.provenance if p.action == "kept"]


def _merged_text(record: SurveyRecord) -> str:
    # Courses and semester are deliberately left out of the document text.
    parts = list(record.skills)
    parts.append(record.interest_field)
    for optional in (record.research_field, record.higher_study_field,
                     record.contribution_field):
        if optional:
            parts.append(optional)
    return " ".join(" ".join(parts).split())


def clean(records: list[SurveyRecord], taxonomy: MasterFieldTaxonomy,
          drop_threshold: float = 0.05) -> CleanDataset:
    """Label every mappable row, drop extensive mismatches, merge text fields.

    Rows are never edited, only kept or dropped; |documents| + |dropped| equals
    the number of input records.
    """
    if not 0.0 <= drop_threshold <= 1.0:
        raise ValueError(f"drop_threshold must be in [0, 1], got {drop_threshold}")
    documents: list[LabeledDocument] = []
    provenance: list[ProvenanceEntry] = []
    for row, record in enumerate(records):
        try:
            master = apply_taxonomy(record, taxonomy)
        except UnmappedFieldError as exc:
            provenance.append(ProvenanceEntry(
                row, "dropped", f"unmapped field: {exc.context.get('field', '')!r}"))
            continue
        score = mismatch_score(record, taxonomy)
        if score < drop_threshold:
            provenance.append(ProvenanceEntry(
                row, "dropped", "extensive mismatch", score=score, label=master))
            continue
        text = _merged_text(record)
        if not text:
            provenance.append(ProvenanceEntry(
                row, "dropped", "empty text after merge", score=score, label=master))
            continue
        documents.append(LabeledDocument(text, master))
        provenance.append(ProvenanceEntry(row, "kept", "", score=score, label=master))
    if not documents:
        raise EmptyDatasetError("all rows were dropped during cleaning")
    return CleanDataset(documents, provenance)


def label_frequencies(dataset: CleanDataset) -> dict[str, tuple[int, float]]:
    """Per-label document count and fraction; fractions sum to 1."""
    if not dataset.documents:
        raise EmptyDatasetError("dataset has no documents")
    counts: dict[str, int] = {}
    for doc in dataset.documents:
        counts[doc.label] = counts.get(doc.label, 0) + 1
    total = len(dataset.documents)
    return {label: (count, count / total)
            for label, count in sorted(counts.items())}


def save_clean_dataset(dataset: CleanDataset, documents_path,
                       provenance_path=None) -> None:
    """Documents as ``label<TAB>text`` lines plus an optional provenance log."""
    with open(documents_path, "w", encoding="utf-8") as fh:
        for doc in dataset.documents:
            fh.write(f"{doc.label}\t{doc.text}\n")
    if provenance_path is not None:
        with open(provenance_path, "w", encoding="utf-8") as fh:
            fh.write("row\taction\treason\tscore\tlabel\n")
            for entry in dataset.provenance:
                score = "" if entry.score is None else f"{entry.score:.6f}"
                fh.write(f"{entry.row}\t{entry.action}\t{entry.reason}\t"
                         f"{score}\t{entry.label or ''}\n")


def load_documents(path) -> list[LabeledDocument]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            label, text = line.split("\t", 1)
            docs.append(LabeledDocument(text, label))
    return docs
