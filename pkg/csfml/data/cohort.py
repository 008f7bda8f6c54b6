"""
Cohort ingestion and staging.
Reads the biomarker / assessment csv files, merges them per patient, stages
patients by MMSE or CDR and builds the labeled datasets the classifiers see.
Only the four CSF derived features ever enter a feature matrix.
"""

import csv
import enum
import io
import math
import os
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd

from csfml.utils.errors import (CohortError, DuplicateIdError, ParseError,
                                StagingError, TaskError)

BIOMARKER_HEADER = ('id', 'age', 'csf_abeta42', 'csf_ttau', 'csf_ptau')
ASSESSMENT_HEADER = ('id', 'mmse', 'cdr_global')
STAGED_HEADER = ('id', 'abeta42', 'ttau', 'ptau', 'ratio', 'label')
FEATURE_NAMES = ('abeta42', 'ttau', 'ptau', 'ratio')
MISSING_TOKENS = ('', 'NA')
CDR_VALUES = (0.0, 0.5, 1.0, 2.0, 3.0)
MMSE_RANGE = (0, 30)


class Stage(str, enum.Enum):
    NC = 'NC'
    MCI = 'MCI'
    MOD = 'MOD'
    SD = 'SD'


class Scheme(str, enum.Enum):
    MMSE = 'mmse'
    CDR = 'cdr'


class Task(str, enum.Enum):
    BINARY = 'binary'
    MULTI = 'multi'


TASK_CLASSES = {
    Task.BINARY: ('NC', 'AD'),
    Task.MULTI: ('NC', 'MCI', 'SD'),
}


# ===============================================================================
# Records
# ===============================================================================

@dataclass(frozen=True)
class BiomarkerPanel:
    abeta42: float
    ttau: float
    ptau: float
    ratio: float = field(init=False)

    def __post_init__(self):
        for name in ('abeta42', 'ttau', 'ptau'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise CohortError("%s must be a positive concentration, got %r" % (name, value))
        object.__setattr__(self, 'ratio', self.abeta42 / self.ptau)

    def as_features(self):
        return [self.abeta42, self.ttau, self.ptau, self.ratio]


@dataclass(frozen=True)
class AssessmentRecord:
    mmse: Optional[int] = None
    cdr_global: Optional[float] = None

    def __post_init__(self):
        if self.mmse is not None and not (MMSE_RANGE[0] <= self.mmse <= MMSE_RANGE[1]):
            raise CohortError("mmse %r outside [0, 30]" % self.mmse)
        if self.cdr_global is not None and self.cdr_global not in CDR_VALUES:
            raise CohortError("cdr_global %r not one of %s" % (self.cdr_global, CDR_VALUES))


@dataclass(frozen=True)
class PatientRecord:
    id: str
    age: float
    panel: BiomarkerPanel
    assessment: AssessmentRecord


class BiomarkerEntry(NamedTuple):
    id: str
    age: float
    panel: BiomarkerPanel


class AssessmentEntry(NamedTuple):
    id: str
    assessment: AssessmentRecord


@dataclass(frozen=True)
class ParseResult:
    """
    entries:    parsed rows, file order
    skipped:    rows dropped for missing / nonpositive values
    rejected:   (line_number, reason) for malformed rows; the header is line 1
    """
    entries: tuple
    skipped: int = 0
    rejected: tuple = ()


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    class_names: Tuple[str, ...]
    scheme: Scheme
    task: Task
    ids: Tuple[str, ...] = ()
    dropped: int = 0

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float).reshape(-1, len(FEATURE_NAMES))
        labels = np.asarray(self.labels, dtype=int)
        assert features.shape[0] == labels.shape[0]
        assert len(self.ids) in (0, labels.shape[0])
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.class_names)):
            raise TaskError("labels must index into %s" % (self.class_names,))
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'labels', labels)

    @property
    def n_samples(self):
        return self.labels.shape[0]

    @property
    def n_classes(self):
        return len(self.class_names)

    def subset(self, indices):
        indices = np.asarray(indices, dtype=int)
        ids = tuple(self.ids[i] for i in indices) if self.ids else ()
        return LabeledDataset(features=self.features[indices], labels=self.labels[indices],
                              class_names=self.class_names, scheme=self.scheme, task=self.task,
                              ids=ids, dropped=self.dropped)


# ===============================================================================
# Parsing
# ===============================================================================

def _text_stream(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, 'rb') as f:
            raw = f.read()
    else:
        if hasattr(source, 'seek'):
            source.seek(0)
        raw = source.read()
    if isinstance(raw, bytes):
        try:
            raw = raw.decode('utf-8')
        except UnicodeDecodeError as e:
            raise ParseError("malformed csv: %s" % e)
    return io.StringIO(raw.lstrip('\ufeff'), newline='')


def _read_rows(source, header):
    """
    (line_number, cells, problem) for every non-blank data row, the header
    being line 1. A row with the wrong field count comes back with cells None
    and the problem text; only a missing or malformed header fails the file.
    """
    reader = csv.reader(_text_stream(source))
    try:
        columns = [c.strip() for c in next(reader)]
    except StopIteration:
        raise ParseError("empty file, expected header '%s'" % ','.join(header))
    except csv.Error as e:
        raise ParseError("malformed csv: %s" % e)
    if columns != list(header):
        raise ParseError("malformed header '%s', expected '%s'" % (','.join(columns), ','.join(header)))
    rows = []
    while True:
        try:
            cells = next(reader)
        except StopIteration:
            break
        except csv.Error as e:
            rows.append((reader.line_num, None, str(e)))
            continue
        if not cells:
            continue
        cells = [c.strip() for c in cells]
        if len(cells) != len(header):
            rows.append((reader.line_num, None, "expected %i fields, saw %i" % (len(header), len(cells))))
            continue
        rows.append((reader.line_num, cells, None))
    return rows


def _parse_number(text, name):
    # None for a missing cell, ValueError for anything non-numeric
    if text in MISSING_TOKENS:
        return None
    try:
        value = float(text)
    except ValueError:
        raise ValueError("non-numeric %s '%s'" % (name, text))
    if not math.isfinite(value):
        raise ValueError("non-numeric %s '%s'" % (name, text))
    return value


def parse_biomarker_csv(source):
    """
    :param source:  path or byte / text stream with header id,age,csf_abeta42,csf_ttau,csf_ptau
    :return:        ParseResult of BiomarkerEntry(id, age, panel)
    """
    entries, rejected = [], []
    skipped = 0
    for line_number, cells, problem in _read_rows(source, BIOMARKER_HEADER):
        if problem is not None:
            rejected.append((line_number, problem))
            continue
        patient_id = cells[0]
        if patient_id == '':
            rejected.append((line_number, 'empty id'))
            continue
        try:
            values = [_parse_number(text, name) for text, name in zip(cells[1:], BIOMARKER_HEADER[1:])]
        except ValueError as e:
            rejected.append((line_number, str(e)))
            continue
        if any(v is None or v <= 0 for v in values):
            skipped += 1
            continue
        age, abeta42, ttau, ptau = values
        entries.append(BiomarkerEntry(patient_id, age, BiomarkerPanel(abeta42, ttau, ptau)))
    return ParseResult(entries=tuple(entries), skipped=skipped, rejected=tuple(rejected))


def parse_assessment_csv(source):
    """
    :param source:  path or byte / text stream with header id,mmse,cdr_global
    :return:        ParseResult of AssessmentEntry(id, assessment)
    """
    entries, rejected = [], []
    for line_number, cells, problem in _read_rows(source, ASSESSMENT_HEADER):
        if problem is not None:
            rejected.append((line_number, problem))
            continue
        patient_id, mmse_text, cdr_text = cells
        if patient_id == '':
            rejected.append((line_number, 'empty id'))
            continue
        try:
            mmse = _parse_number(mmse_text, 'mmse')
            cdr = _parse_number(cdr_text, 'cdr_global')
        except ValueError as e:
            rejected.append((line_number, str(e)))
            continue
        if mmse is not None:
            if mmse != int(mmse) or not (MMSE_RANGE[0] <= mmse <= MMSE_RANGE[1]):
                rejected.append((line_number, "mmse %s outside integer range [0, 30]" % mmse_text))
                continue
            mmse = int(mmse)
        if cdr is not None and cdr not in CDR_VALUES:
            rejected.append((line_number, "cdr_global %s not one of 0, 0.5, 1, 2, 3" % cdr_text))
            continue
        entries.append(AssessmentEntry(patient_id, AssessmentRecord(mmse=mmse, cdr_global=cdr)))
    return ParseResult(entries=tuple(entries), skipped=0, rejected=tuple(rejected))


def _index_by_id(entries, source):
    index = {}
    for entry in entries:
        if entry.id in index:
            raise DuplicateIdError(entry.id, source)
        index[entry.id] = entry
    return index


def merge_cohort(biomarkers, assessments):
    """
    Inner join on patient id. Patients missing from either source are dropped.
    Output is sorted by id.
    """
    if isinstance(biomarkers, ParseResult):
        biomarkers = biomarkers.entries
    if isinstance(assessments, ParseResult):
        assessments = assessments.entries
    panels = _index_by_id(biomarkers, 'biomarkers')
    scores = _index_by_id(assessments, 'assessments')
    records = []
    for patient_id in sorted(panels.keys() & scores.keys()):
        b = panels[patient_id]
        records.append(PatientRecord(id=patient_id, age=b.age, panel=b.panel,
                                     assessment=scores[patient_id].assessment))
    return records


# ===============================================================================
# Staging
# ===============================================================================

def stage_mmse(score):
    # NC [26,30], MCI [20,25], MOD [10,19], SD [0,9]
    if score is None or score != int(score) or not (MMSE_RANGE[0] <= score <= MMSE_RANGE[1]):
        raise StagingError("mmse score %r outside integer range [0, 30]" % (score,))
    if score >= 26:
        return Stage.NC
    if score >= 20:
        return Stage.MCI
    if score >= 10:
        return Stage.MOD
    return Stage.SD


_CDR_STAGES = {0.0: Stage.NC, 0.5: Stage.MCI, 1.0: Stage.MOD, 2.0: Stage.MOD, 3.0: Stage.SD}
# inverse map, used when synthesizing assessments from a stage
STAGE_TO_CDR = {Stage.NC: 0.0, Stage.MCI: 0.5, Stage.MOD: 1.0, Stage.SD: 3.0}


def stage_cdr(score):
    try:
        return _CDR_STAGES[float(score)]
    except (KeyError, TypeError, ValueError):
        raise StagingError("cdr rating %r not one of 0, 0.5, 1, 2, 3" % (score,))


def four_way_stage(record, scheme):
    """Stage of a record under scheme, or None when the scheme's score is absent."""
    scheme = Scheme(scheme)
    if scheme == Scheme.MMSE:
        score = record.assessment.mmse
        return None if score is None else stage_mmse(score)
    score = record.assessment.cdr_global
    return None if score is None else stage_cdr(score)


def task_label(stage, task):
    if Task(task) == Task.BINARY:
        return 'NC' if stage == Stage.NC else 'AD'
    if stage in (Stage.MOD, Stage.SD):
        return 'SD'
    return stage.value


def feature_matrix(records):
    return np.array([r.panel.as_features() for r in records], dtype=float).reshape(-1, len(FEATURE_NAMES))


def make_task(records, scheme, task):
    """
    :param records: merged PatientRecords
    :param scheme:  Scheme (or 'mmse' / 'cdr') used for staging
    :param task:    Task (or 'binary' / 'multi')
    :return:        LabeledDataset; records without the scheme's score are counted in .dropped
    """
    scheme, task = Scheme(scheme), Task(task)
    class_names = TASK_CLASSES[task]
    kept, labels = [], []
    dropped = 0
    for record in records:
        stage = four_way_stage(record, scheme)
        if stage is None:
            dropped += 1
            continue
        kept.append(record)
        labels.append(class_names.index(task_label(stage, task)))

    if len(set(labels)) < 2:
        raise TaskError("%s %s task needs at least 2 classes, found %i" %
                        (scheme.value, task.value, len(set(labels))))
    return LabeledDataset(features=feature_matrix(kept), labels=np.array(labels, dtype=int),
                          class_names=class_names, scheme=scheme, task=task,
                          ids=tuple(r.id for r in kept), dropped=dropped)


def class_counts(data):
    counts = np.bincount(data.labels, minlength=data.n_classes)
    return {name: int(c) for name, c in zip(data.class_names, counts)}


def undersample(data, seed):
    """
    Random undersampling: every class is reduced (uniformly, without replacement)
    to the size of the smallest class. Retained rows keep their input order.
    """
    counts = np.bincount(data.labels, minlength=data.n_classes)
    if counts.min() < 1:
        raise TaskError("cannot undersample: class %s has no samples" %
                        data.class_names[int(np.argmin(counts))])
    target = counts.min()
    rng = np.random.default_rng(seed)
    keep = [rng.choice(np.flatnonzero(data.labels == c), size=target, replace=False)
            for c in range(data.n_classes)]
    return data.subset(np.sort(np.concatenate(keep)))


def write_staged_csv(data, path):
    frame = pd.DataFrame(data.features, columns=FEATURE_NAMES)
    frame.insert(0, 'id', list(data.ids) if data.ids else [str(i) for i in range(data.n_samples)])
    frame['label'] = [data.class_names[i] for i in data.labels]
    frame.to_csv(path, index=False, lineterminator='\n')
    return path
