"""Dataset handling: loading, synthesis, splitting, and the simulated oracle.

A pool is an ordered, immutable collection of samples. Selection indices
elsewhere in the package always refer to this order.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import FormatError, OracleUnavailableError, ValidationError

TRAIN = "train"
TEST = "test"


@dataclass(frozen=True)
class Sample:
    """One patch pair: a feature vector plus optional ground truth and imagery."""

    id: str
    features: tuple[float, ...]
    truth_label: Optional[int] = None
    image_refs: Optional[tuple[str, str]] = None


@dataclass(frozen=True)
class DataPool:
    """Ordered sample collection with an optional train/test partition."""

    samples: tuple[Sample, ...]
    split: Optional[tuple[str, ...]] = None
    _index_of: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        _validate_samples(self.samples)
        if self.split is not None:
            if len(self.split) != len(self.samples):
                raise ValidationError("split tags must cover every sample")
            bad = set(self.split) - {TRAIN, TEST}
            if bad:
                raise ValidationError(f"unknown split tags: {sorted(bad)}")
        self._index_of.update({s.id: i for i, s in enumerate(self.samples)})

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def feature_dim(self) -> int:
        return len(self.samples[0].features)

    def index_of(self, sample_id: str) -> int:
        try:
            return self._index_of[sample_id]
        except KeyError:
            raise ValidationError(f"unknown sample id {sample_id!r}") from None

    def feature_matrix(self, indices: Optional[Sequence[int]] = None) -> np.ndarray:
        rows = self.samples if indices is None else [self.samples[i] for i in indices]
        return np.asarray([s.features for s in rows], dtype=float)

    def indices_with_tag(self, tag: str) -> list[int]:
        if self.split is None:
            raise ValidationError("pool has no train/test split")
        return [i for i, t in enumerate(self.split) if t == tag]

    @property
    def train_indices(self) -> list[int]:
        return self.indices_with_tag(TRAIN)

    @property
    def test_indices(self) -> list[int]:
        return self.indices_with_tag(TEST)

    def has_labels(self, indices: Optional[Iterable[int]] = None) -> bool:
        rows = self.samples if indices is None else (self.samples[i] for i in indices)
        return all(s.truth_label is not None for s in rows)


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a desk-scale synthetic pool with per-class Gaussian modes."""

    n_samples: int
    positive_fraction: float
    n_modes_per_class: int = 3
    feature_dim: int = 8
    mode_spread: float = 6.0
    within_mode_noise: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValidationError("n_samples must be at least 2")
        if not 0.0 < self.positive_fraction < 1.0:
            raise ValidationError("positive_fraction must lie in (0, 1)")
        if self.n_modes_per_class < 1 or self.feature_dim < 1:
            raise ValidationError("n_modes_per_class and feature_dim must be positive")
        if self.mode_spread <= 0 or self.within_mode_noise <= 0:
            raise ValidationError("mode_spread and within_mode_noise must be positive")
        if self.positive_fraction * self.n_samples < self.n_modes_per_class:
            raise ValidationError(
                "infeasible spec: expected positive count "
                f"{self.positive_fraction * self.n_samples:.1f} cannot populate "
                f"{self.n_modes_per_class} modes"
            )


def _validate_samples(samples: Sequence[Sample]) -> None:
    if not samples:
        raise ValidationError("pool must contain at least one sample")
    dim = len(samples[0].features)
    seen: set[str] = set()
    for row, s in enumerate(samples):
        if len(s.features) != dim:
            raise FormatError(
                f"ragged feature row for sample {s.id!r} (row {row}): "
                f"got {len(s.features)} values, expected {dim}"
            )
        if s.id in seen:
            raise ValidationError(f"duplicate sample id {s.id!r}")
        seen.add(s.id)
        if not all(math.isfinite(v) for v in s.features):
            raise ValidationError(f"non-finite feature value in sample {s.id!r}")
        if s.truth_label is not None and s.truth_label not in (0, 1):
            raise ValidationError(f"label for sample {s.id!r} must be 0 or 1")


def load_pool(path: str | Path, format: Optional[str] = None) -> DataPool:
    """Load a pool from a csv or jsonl file, preserving row order.

    ``format`` defaults to the file extension. csv columns are
    ``id[,label],f0..f{d-1}``; jsonl rows are objects with ``id``,
    ``features`` and optional ``label`` / ``image_refs``.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    fmt = format or path.suffix.lstrip(".").lower()
    if fmt == "csv":
        samples = _read_csv(path)
    elif fmt == "jsonl":
        samples = _read_jsonl(path)
    else:
        raise FormatError(f"unsupported dataset format {fmt!r} (use csv or jsonl)")
    return DataPool(samples=tuple(samples))


def _read_csv(path: Path) -> list[Sample]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        if not header or header[0] != "id":
            raise FormatError(f"{path}: first csv column must be 'id'")
        has_label = len(header) > 1 and header[1] == "label"
        n_cols = len(header)
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n_cols:
                raise FormatError(
                    f"{path}: ragged row at line {lineno} "
                    f"({len(row)} columns, header has {n_cols})"
                )
            label_cell = row[1] if has_label else ""
            feat_cells = row[2:] if has_label else row[1:]
            try:
                features = tuple(float(v) for v in feat_cells)
            except ValueError as exc:
                raise FormatError(f"{path}: bad feature value at line {lineno}: {exc}")
            label = int(label_cell) if label_cell != "" else None
            samples.append(Sample(id=row[0], features=features, truth_label=label))
    return samples


def _read_jsonl(path: Path) -> list[Sample]:
    samples = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: invalid json at line {lineno}: {exc}")
            if "id" not in obj or "features" not in obj:
                raise FormatError(f"{path}: line {lineno} needs 'id' and 'features'")
            refs = obj.get("image_refs")
            samples.append(
                Sample(
                    id=str(obj["id"]),
                    features=tuple(float(v) for v in obj["features"]),
                    truth_label=obj.get("label"),
                    image_refs=tuple(refs) if refs else None,
                )
            )
    return samples


def write_pool(pool: DataPool, path: str | Path, format: Optional[str] = None) -> None:
    """Write a pool back to disk; float features use repr so values round-trip."""
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            dim = pool.feature_dim
            writer.writerow(["id", "label"] + [f"f{i}" for i in range(dim)])
            for s in pool.samples:
                label = "" if s.truth_label is None else s.truth_label
                writer.writerow([s.id, label] + [repr(float(v)) for v in s.features])
    elif fmt == "jsonl":
        with open(path, "w") as fh:
            for s in pool.samples:
                obj: dict = {"id": s.id, "features": list(s.features)}
                if s.truth_label is not None:
                    obj["label"] = s.truth_label
                if s.image_refs is not None:
                    obj["image_refs"] = list(s.image_refs)
                fh.write(json.dumps(obj) + "\n")
    else:
        raise FormatError(f"unsupported dataset format {fmt!r} (use csv or jsonl)")


def generate_synthetic(spec: SyntheticSpec) -> DataPool:
    """Build a labeled pool from per-class Gaussian modes.

    Mode centers sit on a sphere of radius ``mode_spread``; samples add
    isotropic noise around a cyclically assigned mode. Pure function of the
    spec: the same spec always yields an identical pool.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n_samples
    n_pos = int(round(spec.positive_fraction * n))
    n_neg = n - n_pos

    def mode_centers() -> np.ndarray:
        raw = rng.standard_normal((spec.n_modes_per_class, spec.feature_dim))
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
        return spec.mode_spread * raw / norms

    def draw_class(count: int, centers: np.ndarray) -> np.ndarray:
        modes = np.arange(count) % spec.n_modes_per_class
        noise = spec.within_mode_noise * rng.standard_normal((count, spec.feature_dim))
        return centers[modes] + noise

    neg = draw_class(n_neg, mode_centers())
    pos = draw_class(n_pos, mode_centers())
    features = np.vstack([neg, pos])
    labels = np.concatenate([np.zeros(n_neg, dtype=int), np.ones(n_pos, dtype=int)])

    order = rng.permutation(n)
    width = max(4, len(str(n - 1)))
    samples = tuple(
        Sample(
            id=f"s{i:0{width}d}",
            features=tuple(float(v) for v in features[j]),
            truth_label=int(labels[j]),
        )
        for i, j in enumerate(order)
    )
    return DataPool(samples=samples)


def split_pool(pool: DataPool, train_fraction: float, seed: int) -> DataPool:
    """Return a copy of the pool with a random train/test partition."""
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError("train_fraction must lie in (0, 1)")
    n = len(pool)
    n_train = int(round(train_fraction * n))
    if n_train < 1 or n_train > n - 1:
        raise ValidationError(
            f"degenerate split: {n_train} train of {n} samples leaves one side empty"
        )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    tags = [TEST] * n
    for i in perm[:n_train]:
        tags[i] = TRAIN
    return DataPool(samples=pool.samples, split=tuple(tags))


def simulated_oracle(pool: DataPool, ids: Sequence[str]) -> list[tuple[str, int]]:
    """Answer a labeling request from stored ground truth.

    Raises OracleUnavailableError when any requested sample carries no
    truth label (a human oracle is then the only option).
    """
    out = []
    for sample_id in ids:
        s = pool.samples[pool.index_of(sample_id)]
        if s.truth_label is None:
            raise OracleUnavailableError(
                f"sample {sample_id!r} has no ground-truth label"
            )
        out.append((sample_id, s.truth_label))
    return out
