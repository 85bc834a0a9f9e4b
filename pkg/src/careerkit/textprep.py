"""Text preprocessing: tokens, vocabulary, count vectors, labels, splits.

Everything here is deterministic by construction: vocabulary indices are
assigned in lexicographic token order (not first-seen), shuffling runs on the
package's own seeded PRNG, and the stratified split follows a fixed
round-half-up rule, so the same inputs produce byte-identical outputs on any
platform.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyVocabularyError, LabelCodingError, StratificationError
from .numerics import SeededRng

__all__ = [
    "MASTER_FIELDS",
    "CountVector",
    "DatasetSplit",
    "LabelEncoder",
    "StopWordList",
    "Vocabulary",
    "build_vocabulary",
    "normalize",
    "shuffle",
    "stratified_split",
    "vectorize",
]

# Career labels in code order: AI=0, DS=1, DEV=2, SEC=3, SDE=4, UI / UX=5.
MASTER_FIELDS = ("AI", "DS", "DEV", "SEC", "SDE", "UI / UX")

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class StopWordList:
    words: frozenset[str]

    def __post_init__(self):
        bad = [w for w in self.words if w != w.lower() or any(c.isspace() for c in w)]
        if bad:
            raise ValueError(f"stop words must be lowercase single tokens: {bad[:5]}")

    @classmethod
    def from_file(cls, path) -> "StopWordList":
        """One lowercase word per line; blank lines and # comments ignored."""
        words = set()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                word = line.strip()
                if word and not word.startswith("#"):
                    words.add(word.lower())
        return cls(frozenset(words))

    def __contains__(self, token: str) -> bool:
        return token in self.words


def normalize(text: str, stops: StopWordList | None = None) -> list[str]:
    """Lowercase, split on non-alphanumeric boundaries, drop stop words."""
    tokens = _TOKEN_RE.findall(text.lower())
    if stops is None:
        return tokens
    return [t for t in tokens if t not in stops]


@dataclass(frozen=True)
class Vocabulary:
    """Token -> contiguous index map, lexicographic by token."""

    token_to_index: dict[str, int]
    document_frequency: dict[str, int]

    def __len__(self) -> int:
        return len(self.token_to_index)

    @property
    def tokens(self) -> list[str]:
        return sorted(self.token_to_index)

    def export_lines(self) -> list[str]:
        """(token, index, document_frequency) triples, byte-stable order."""
        return [f"{t}\t{self.token_to_index[t]}\t{self.document_frequency[t]}"
                for t in self.tokens]


def build_vocabulary(corpus: list[list[str]]) -> Vocabulary:
    """Distinct tokens across the corpus; df counts documents, not occurrences."""
    df: dict[str, int] = {}
    for tokens in corpus:
        for token in set(tokens):
            df[token] = df.get(token, 0) + 1
    if not df:
        raise EmptyVocabularyError("no tokens in any document")
    token_to_index = {token: i for i, token in enumerate(sorted(df))}
    return Vocabulary(token_to_index, df)


@dataclass(frozen=True)
class CountVector:
    """Sparse token counts in a fixed vocabulary space."""

    entries: dict[int, int]
    dimension: int

    def __post_init__(self):
        for idx, count in self.entries.items():
            if not 0 <= idx < self.dimension:
                raise ValueError(f"index {idx} outside dimension {self.dimension}")
            if count < 1:
                raise ValueError(f"sparse count must be >= 1, got {count}")

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension, dtype=np.float64)
        for idx, count in self.entries.items():
            dense[idx] = count
        return dense

    def total(self) -> int:
        return sum(self.entries.values())


def vectorize(tokens: list[str], vocab: Vocabulary) -> CountVector:
    """Count in-vocabulary tokens; out-of-vocabulary tokens are ignored."""
    entries: dict[int, int] = {}
    t2i = vocab.token_to_index
    for token in tokens:
        idx = t2i.get(token)
        if idx is not None:
            entries[idx] = entries.get(idx, 0) + 1
    return CountVector(entries, len(vocab))


def _canonical_label(raw: str) -> str | None:
    squeezed = "".join(str(raw).split()).upper()
    for label in MASTER_FIELDS:
        if squeezed == label.replace(" ", ""):
            return label
    return None


@dataclass(frozen=True)
class LabelEncoder:
    """The fixed career-label coding; accepts spacing/case variants on input."""

    label_to_code: dict[str, int] = field(
        default_factory=lambda: {label: i for i, label in enumerate(MASTER_FIELDS)})

    def encode(self, label: str) -> int:
        canonical = _canonical_label(label)
        if canonical is None:
            raise LabelCodingError(f"unknown label {label!r}", label=str(label))
        return self.label_to_code[canonical]

    def decode(self, code: int) -> str:
        if not isinstance(code, (int, np.integer)) or not 0 <= code < len(MASTER_FIELDS):
            raise LabelCodingError(f"unknown label code {code!r}", code=code)
        return MASTER_FIELDS[code]

    @property
    def code_to_label(self) -> dict[int, str]:
        return {i: label for i, label in enumerate(MASTER_FIELDS)}

    def __len__(self) -> int:
        return len(MASTER_FIELDS)


def shuffle(n: int, seed: int) -> list[int]:
    """Seeded Fisher-Yates permutation of 0..n-1; identical on every platform."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return SeededRng(seed).permutation(n)


@dataclass(frozen=True)
class DatasetSplit:
    train_indices: list[int]
    test_indices: list[int]
    seed: int
    ratio: float


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def stratified_split(labels, ratio: float, seed: int) -> DatasetSplit:
    """Per-class split: round-half-up(ratio * class size) members go to train.

    Within-class assignment order comes from the seeded shuffle; classes are
    processed in ascending code order on a single PRNG stream, then each side
    gets one final shuffle, so the result is a pure function of
    (labels, ratio, seed).
    """
    labels = [int(c) for c in labels]
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    by_class: dict[int, list[int]] = {}
    for idx, code in enumerate(labels):
        by_class.setdefault(code, []).append(idx)
    for code, members in sorted(by_class.items()):
        if len(members) < 2:
            raise StratificationError(
                f"class {code} has {len(members)} member(s); need at least 2",
                class_code=code)

    rng = SeededRng(seed)
    train: list[int] = []
    test: list[int] = []
    for code in sorted(by_class):
        members = by_class[code]
        perm = rng.permutation(len(members))
        n_train = _round_half_up(ratio * len(members))
        shuffled = [members[p] for p in perm]
        train.extend(shuffled[:n_train])
        test.extend(shuffled[n_train:])
    train = [train[p] for p in rng.permutation(len(train))]
    test = [test[p] for p in rng.permutation(len(test))]
    return DatasetSplit(train, test, seed, ratio)
