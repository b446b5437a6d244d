"""Subject tables and the construction of similarity and correlation networks.

A subject is a demographic record plus one gray-matter volume per region.
Individual networks use the similarity kernel 1 / ((v_i - v_j)^2 + 1) on a
single subject's volumes; group networks use Pearson correlation of region
volumes across the subjects of a cohort.
"""

from __future__ import annotations

import csv
import math
import types
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateDesignError, ValidationError
from .graphs import WeightedNetwork, default_labels

CLINICAL_FIELDS = ("updrs_off", "updrs_on", "hy_stage", "age_at_onset")
REQUIRED_COLUMNS = ("id", "age", "gender", "group")
DEFAULT_BIN_EDGES = (32.0, 42.0, 52.0, 62.0)


@dataclass(frozen=True, eq=False)
class SubjectRecord:
    """One subject: identity, demographics, optional clinical scores, volumes."""

    id: str
    age: float
    gender: str
    group: str
    volumes: np.ndarray
    clinical: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError("subject id must be a non-empty string")
        age = float(self.age)
        if not math.isfinite(age) or age <= 0:
            raise ValidationError(f"subject {self.id}: age must be a positive number, got {self.age}")
        v = np.array(self.volumes, dtype=np.float64, copy=True)
        if v.ndim != 1:
            raise ValidationError(f"subject {self.id}: volumes must be a flat vector")
        if not np.all(np.isfinite(v)):
            raise ValidationError(f"subject {self.id}: non-finite volume value")
        v.setflags(write=False)
        clinical = {str(k): float(x) for k, x in dict(self.clinical).items()}
        if any(not math.isfinite(x) for x in clinical.values()):
            raise ValidationError(f"subject {self.id}: non-finite clinical value")
        object.__setattr__(self, "age", age)
        object.__setattr__(self, "gender", str(self.gender))
        object.__setattr__(self, "group", str(self.group))
        object.__setattr__(self, "volumes", v)
        object.__setattr__(self, "clinical", types.MappingProxyType(clinical))


@dataclass(frozen=True, eq=False)
class CohortTable:
    """A set of subjects sharing one region-label list."""

    cohort_id: str
    region_labels: tuple[str, ...]
    subjects: tuple[SubjectRecord, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.region_labels)
        if len(labels) < 2:
            raise ValidationError("a cohort needs at least 2 region labels")
        if len(set(labels)) != len(labels):
            raise ValidationError("region labels must be unique")
        subjects = tuple(self.subjects)
        for s in subjects:
            if s.volumes.shape[0] != len(labels):
                raise ValidationError(
                    f"subject {s.id}: {s.volumes.shape[0]} volumes for {len(labels)} regions"
                )
        object.__setattr__(self, "cohort_id", str(self.cohort_id))
        object.__setattr__(self, "region_labels", labels)
        object.__setattr__(self, "subjects", subjects)

    def __len__(self):
        return len(self.subjects)

    def volume_matrix(self) -> np.ndarray:
        """Subjects-by-regions volume matrix."""
        return np.stack([s.volumes for s in self.subjects])

    def replace_subjects(self, subjects) -> "CohortTable":
        return CohortTable(self.cohort_id, self.region_labels, tuple(subjects))


def _covariate_values(table: CohortTable, covariate: str) -> list:
    if covariate in ("gender", "group"):
        return [getattr(s, covariate) for s in table.subjects]
    if covariate == "age":
        return [s.age for s in table.subjects]
    if covariate in CLINICAL_FIELDS:
        missing = [s.id for s in table.subjects if covariate not in s.clinical]
        if missing:
            raise ValidationError(
                f"covariate {covariate!r} missing for subjects: {', '.join(missing)}"
            )
        return [s.clinical[covariate] for s in table.subjects]
    raise ValidationError(f"unknown covariate {covariate!r}")


def residualize_covariate(table: CohortTable, covariate: str) -> CohortTable:
    """Remove a categorical covariate's effect from every region volume.

    Fits ordinary least squares of each region's volumes on an intercept plus
    dummy-coded covariate levels, and replaces each volume by its residual
    plus the region's grand mean, preserving the natural volume scale. A
    single-level covariate leaves the table unchanged.
    """
    values = _covariate_values(table, covariate)
    levels = sorted(set(values), key=str)
    if len(levels) < 2:
        return table
    n_subjects = len(table)
    if n_subjects < 3:
        raise DegenerateDesignError(f"residualization needs >= 3 subjects, got {n_subjects}")
    if n_subjects < len(levels):
        raise DegenerateDesignError(
            f"{n_subjects} subjects cannot fit {len(levels)} covariate levels plus intercept"
        )
    design = np.column_stack(
        [np.ones(n_subjects)] + [np.asarray([v == lvl for v in values], float) for lvl in levels[1:]]
    )
    y = table.volume_matrix()
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    adjusted = y - design @ beta + y.mean(axis=0)
    new_subjects = [
        SubjectRecord(s.id, s.age, s.gender, s.group, adjusted[i], dict(s.clinical))
        for i, s in enumerate(table.subjects)
    ]
    return table.replace_subjects(new_subjects)


def individual_network(subject, region_labels=None) -> WeightedNetwork:
    """Similarity network of one subject's regional volumes.

    weight(i, j) = 1 / ((v_i - v_j)^2 + 1), a value in (0, 1] that is 1
    exactly when the two volumes are equal.
    """
    volumes = subject.volumes if isinstance(subject, SubjectRecord) else np.asarray(subject, float)
    if volumes.ndim != 1 or volumes.shape[0] < 2:
        raise ValidationError("need a flat vector of at least 2 volumes")
    if not np.all(np.isfinite(volumes)):
        raise ValidationError("non-finite volume value")
    diff = volumes[:, None] - volumes[None, :]
    w = 1.0 / (diff * diff + 1.0)
    np.fill_diagonal(w, 0.0)
    labels = tuple(region_labels) if region_labels is not None else default_labels(len(volumes))
    return WeightedNetwork(w, labels)


def _pearson_network(volume_matrix: np.ndarray, labels) -> WeightedNetwork:
    if volume_matrix.shape[0] < 3:
        raise DegenerateDesignError(
            f"association matrix needs >= 3 subjects, got {volume_matrix.shape[0]}"
        )
    spans = volume_matrix.max(axis=0) - volume_matrix.min(axis=0)
    flat = np.flatnonzero(spans == 0)
    if flat.size:
        names = ", ".join(labels[i] for i in flat)
        raise DegenerateDesignError(f"zero-variance regions: {names}")
    corr = np.corrcoef(volume_matrix, rowvar=False)
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 0.0)
    return WeightedNetwork(corr, labels)


def group_association_matrix(table: CohortTable) -> WeightedNetwork:
    """Pearson correlation between every pair of regions across subjects."""
    return _pearson_network(table.volume_matrix(), table.region_labels)


def age_binning(table: CohortTable, edges: Sequence[float] = DEFAULT_BIN_EDGES) -> list[CohortTable]:
    """Partition subjects into age cohorts A, B, ... by ascending year cutoffs.

    Cohort A takes ages up to and including the first edge, each middle cohort
    the half-open interval (previous edge, next edge], and the final cohort
    everything above the last edge. Empty cohorts are kept.
    """
    edges = [float(x) for x in edges]
    if not edges or any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValidationError("bin edges must be non-empty and strictly ascending")
    if len(edges) + 1 > 26:
        raise ValidationError("at most 25 bin edges supported")
    buckets: list[list[SubjectRecord]] = [[] for _ in range(len(edges) + 1)]
    for s in table.subjects:
        buckets[bisect_left(edges, s.age)].append(s)
    return [
        CohortTable(chr(ord("A") + i), table.region_labels, tuple(bucket))
        for i, bucket in enumerate(buckets)
    ]


# ---------------------------------------------------------------------------
# Subjects CSV: header id,age,gender,group[,<clinical...>],<region labels...>
# with one row per subject. A separate demographics CSV (id plus demographic
# and clinical columns) can be joined onto a volumes-only file (id,<regions>).
# ---------------------------------------------------------------------------

def _read_csv_rows(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValidationError(f"{path}: empty file")
    header = [cell.strip() for cell in rows[0]]
    return header, rows[1:]


def _split_header(path, header) -> tuple[list[str], list[str]]:
    """Return (clinical columns, region columns) of a combined subjects header."""
    if tuple(header[:4]) != REQUIRED_COLUMNS:
        raise ValidationError(
            f"{path}: header must start with {','.join(REQUIRED_COLUMNS)}, "
            f"got {','.join(header[:4])}"
        )
    rest = header[4:]
    n_clinical = 0
    while n_clinical < len(rest) and rest[n_clinical] in CLINICAL_FIELDS:
        n_clinical += 1
    clinical, regions = rest[:n_clinical], rest[n_clinical:]
    if len(set(clinical)) != len(clinical):
        raise ValidationError(f"{path}: duplicate clinical column")
    stray = [c for c in regions if c in CLINICAL_FIELDS + REQUIRED_COLUMNS]
    if stray:
        raise ValidationError(
            f"{path}: column {stray[0]!r} appears after region columns began; "
            "clinical and demographic columns must precede regions"
        )
    if len(regions) < 2:
        raise ValidationError(f"{path}: need at least 2 region columns, got {len(regions)}")
    return clinical, regions


def _parse_float(cell: str, what: str, errors: list, row_id: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        errors.append(f"{row_id}: invalid {what} {cell!r}")
        return None
    if not math.isfinite(v):
        errors.append(f"{row_id}: non-finite {what}")
        return None
    return v


def load_subjects_csv(path, demographics_path=None) -> CohortTable:
    """Load subjects from CSV, optionally joining a separate demographics file.

    Every malformed row is reported; the load fails as a whole if any row is
    invalid, so a successfully loaded table is always complete.
    """
    header, body = _read_csv_rows(path)
    if demographics_path is None:
        return _load_combined(path, header, body)
    if header[:1] != ["id"] or any(c in CLINICAL_FIELDS + REQUIRED_COLUMNS for c in header[1:]):
        raise ValidationError(
            f"{path}: with a demographics file, the input must contain only "
            "an id column followed by region columns"
        )
    regions = header[1:]
    if len(regions) < 2:
        raise ValidationError(f"{path}: need at least 2 region columns")
    if len(set(regions)) != len(regions):
        raise ValidationError(f"{path}: duplicate region column")
    demo = _load_demographics(demographics_path)
    errors: list[str] = []
    subjects = []
    for r, row in enumerate(body, start=2):
        row_id = f"{path}: row {r}"
        if len(row) != len(header):
            errors.append(f"{row_id}: expected {len(header)} cells, got {len(row)}")
            continue
        sid = row[0].strip()
        if not sid:
            errors.append(f"{row_id}: empty subject id")
            continue
        if sid not in demo:
            errors.append(f"{row_id}: subject {sid!r} missing from demographics file")
            continue
        age, gender, group, clinical = demo[sid]
        volumes = [_parse_float(c, "volume", errors, f"{row_id} ({sid})") for c in row[1:]]
        if any(v is None for v in volumes):
            continue
        try:
            subjects.append(SubjectRecord(sid, age, gender, group, np.array(volumes), clinical))
        except ValidationError as exc:
            errors.append(f"{row_id}: {exc}")
    if errors:
        raise ValidationError("invalid subject rows:\n  " + "\n  ".join(errors))
    return CohortTable("all", tuple(regions), tuple(subjects))


def _load_combined(path, header, body) -> CohortTable:
    clinical_cols, regions = _split_header(path, header)
    errors: list[str] = []
    subjects = []
    for r, row in enumerate(body, start=2):
        row_id = f"{path}: row {r}"
        if len(row) != len(header):
            errors.append(f"{row_id}: expected {len(header)} cells, got {len(row)}")
            continue
        sid = row[0].strip()
        if not sid:
            errors.append(f"{row_id}: empty subject id")
            continue
        age = _parse_float(row[1], "age", errors, f"{row_id} ({sid})")
        if age is None:
            continue
        gender, group = row[2].strip(), row[3].strip()
        clinical = {}
        bad = False
        for k, cell in zip(clinical_cols, row[4:4 + len(clinical_cols)]):
            if cell.strip() == "":
                continue
            v = _parse_float(cell, k, errors, f"{row_id} ({sid})")
            if v is None:
                bad = True
                break
            clinical[k] = v
        if bad:
            continue
        volumes = [
            _parse_float(c, "volume", errors, f"{row_id} ({sid})")
            for c in row[4 + len(clinical_cols):]
        ]
        if any(v is None for v in volumes):
            continue
        try:
            subjects.append(SubjectRecord(sid, age, gender, group, np.array(volumes), clinical))
        except ValidationError as exc:
            errors.append(f"{row_id}: {exc}")
    if errors:
        raise ValidationError("invalid subject rows:\n  " + "\n  ".join(errors))
    return CohortTable("all", tuple(regions), tuple(subjects))


def _load_demographics(path) -> dict:
    header, body = _read_csv_rows(path)
    if header[:1] != ["id"]:
        raise ValidationError(f"{path}: demographics header must start with 'id'")
    known = ("age", "gender", "group") + CLINICAL_FIELDS
    unknown = [c for c in header[1:] if c not in known]
    if unknown:
        raise ValidationError(f"{path}: unknown demographics column {unknown[0]!r}")
    for col in ("age", "gender", "group"):
        if col not in header:
            raise ValidationError(f"{path}: demographics file must contain {col!r}")
    idx = {c: header.index(c) for c in header}
    errors: list[str] = []
    out: dict[str, tuple] = {}
    for r, row in enumerate(body, start=2):
        row_id = f"{path}: row {r}"
        if len(row) != len(header):
            errors.append(f"{row_id}: expected {len(header)} cells, got {len(row)}")
            continue
        sid = row[idx["id"]].strip()
        if not sid:
            errors.append(f"{row_id}: empty subject id")
            continue
        if sid in out:
            errors.append(f"{row_id}: duplicate subject id {sid!r}")
            continue
        age = _parse_float(row[idx["age"]], "age", errors, f"{row_id} ({sid})")
        if age is None:
            continue
        clinical = {}
        bad = False
        for k in CLINICAL_FIELDS:
            if k in idx and row[idx[k]].strip() != "":
                v = _parse_float(row[idx[k]], k, errors, f"{row_id} ({sid})")
                if v is None:
                    bad = True
                    break
                clinical[k] = v
        if bad:
            continue
        out[sid] = (age, row[idx["gender"]].strip(), row[idx["group"]].strip(), clinical)
    if errors:
        raise ValidationError("invalid demographics rows:\n  " + "\n  ".join(errors))
    return out
