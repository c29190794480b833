"""
Results / ground truth files and the evaluation reports built from them.

A results file is a JSON array with one element per query image (sorted by file name); each element is an array with
one ranking (an array of labels) per painting found in that image.

A ground truth file is a JSON object whose ``queries`` array has one object per query image::

    {"image": "00000.png", "labels": [3, -1], "mask": "00000.mask.png", "boxes": "00000.boxes.txt",
     "angle": "00000.angle.txt"}

The ``mask``, ``boxes``, and ``angle`` keys are optional and refer to files in the ``query_dir`` directory (relative to
the ground truth file; default: the directory containing it).

:author: Doug Skrypa
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

from .exceptions import EvaluationBelowThreshold, MalformedResults
from .imgproc.raster import read_mask, write_mask
from .metrics import UNKNOWN_LABEL, Box, RankedRetrieval, map_at_k, mask_prf, match_boxes, mean_angular_error
from .metrics import mean_iou

if TYPE_CHECKING:
    from .engine.query import QueryOutcome
    from .typing import PathLike

__all__ = [
    'Results',
    'GroundTruthQuery',
    'GroundTruth',
    'validate_results',
    'read_results',
    'write_results',
    'read_boxes',
    'write_boxes',
    'read_angle',
    'write_artifacts',
    'retrieval_report',
    'mask_report',
    'textbox_report',
    'angle_report',
    'check_thresholds',
]
log = logging.getLogger(__name__)

Results = list[list[list[int]]]
MAX_PAINTINGS = 3


# region Results


def _validate_ranking(ranking: Any, where: str) -> list[int]:
    if not isinstance(ranking, list) or not all(type(v) is int for v in ranking):
        raise MalformedResults(f'Invalid ranking at {where} - expected an array of integer labels')
    if UNKNOWN_LABEL in ranking and ranking != [UNKNOWN_LABEL]:
        raise MalformedResults(f'Invalid ranking at {where} - {UNKNOWN_LABEL} may only appear alone')
    if any(v < UNKNOWN_LABEL for v in ranking) or len(set(ranking)) != len(ranking):
        raise MalformedResults(f'Invalid ranking at {where} - labels must be distinct and >= 0')
    return ranking


def validate_results(data: Any) -> Results:
    if not isinstance(data, list):
        raise MalformedResults('Invalid results - expected an array with one element per query image')
    for i, image in enumerate(data):
        if not isinstance(image, list):
            raise MalformedResults(f'Invalid results for query {i} - expected an array of rankings')
        for j, ranking in enumerate(image):
            _validate_ranking(ranking, f'query {i}, painting {j}')
    return data


def read_results(path: PathLike) -> Results:
    path = Path(path)
    try:
        data = json.loads(path.read_text('utf-8'))
    except (OSError, ValueError) as e:
        raise MalformedResults(f'Unable to read results from {path.as_posix()}: {e}') from e
    return validate_results(data)


def write_results(outcomes: Iterable[QueryOutcome], path: PathLike) -> Results:
    results = [outcome.labels for outcome in outcomes]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(results, separators=(',', ':')) + '\n', encoding='utf-8')
    return results


# endregion

# region Sidecars


def read_boxes(path: PathLike) -> list[Box]:
    """Read one ``x1 y1 x2 y2`` box per line."""
    path = Path(path)
    boxes = []
    try:
        for line_no, line in enumerate(path.read_text('utf-8').splitlines(), 1):
            if not line.strip():
                continue
            try:
                boxes.append(Box(*map(int, line.split())))
            except (TypeError, ValueError) as e:
                raise MalformedResults(f'Invalid box on line {line_no} in {path.name}: {e}') from e
    except OSError as e:
        raise MalformedResults(f'Unable to read boxes from {path.as_posix()}: {e}') from e
    return boxes


def write_boxes(boxes: Iterable[Box], path: PathLike):
    Path(path).write_text(''.join(' '.join(map(str, box)) + '\n' for box in boxes), encoding='utf-8')


def read_angle(path: PathLike) -> float:
    path = Path(path)
    try:
        return float(path.read_text('utf-8').strip())
    except (OSError, ValueError) as e:
        raise MalformedResults(f'Unable to read an angle from {path.as_posix()}: {e}') from e


def write_artifacts(outcome: QueryOutcome, out_dir: PathLike):
    """Write the painting mask, text boxes, and rotation found in a query image, in the ground truth formats."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = outcome.source.stem
    report = outcome.report
    if report.mask is not None:
        write_mask(report.mask, out_dir.joinpath(f'{stem}.png'))
    write_boxes(report.text_boxes, out_dir.joinpath(f'{stem}.boxes.txt'))
    out_dir.joinpath(f'{stem}.angle.txt').write_text(f'{report.angle}\n', encoding='utf-8')


# endregion

# region Ground Truth


class GroundTruthQuery(NamedTuple):
    image: str
    labels: tuple[int, ...]
    mask: Optional[Path] = None
    boxes: Optional[Path] = None
    angle: Optional[Path] = None

    @property
    def stem(self) -> str:
        return Path(self.image).stem


class GroundTruth:
    """The expected labels, and optional mask / text box / angle sidecars, for every query image in a dataset."""

    __slots__ = ('queries', 'query_dir')

    def __init__(self, queries: Sequence[GroundTruthQuery], query_dir: Path):
        self.queries = tuple(sorted(queries, key=lambda q: q.image))
        self.query_dir = query_dir

    @classmethod
    def load(cls, path: PathLike) -> GroundTruth:
        path = Path(path)
        try:
            data = json.loads(path.read_text('utf-8'))
            query_dir = path.parent.joinpath(data.get('query_dir', '.'))
            queries = [cls._parse_query(raw, query_dir) for raw in data['queries']]
        except (OSError, ValueError, KeyError, TypeError, AttributeError) as e:
            raise MalformedResults(f'Invalid ground truth file {path.as_posix()}: {e}') from e
        return cls(queries, query_dir)

    @classmethod
    def _parse_query(cls, raw: Mapping[str, Any], query_dir: Path) -> GroundTruthQuery:
        image, labels = raw['image'], raw['labels']
        if not isinstance(labels, list) or not 1 <= len(labels) <= MAX_PAINTINGS:
            raise MalformedResults(f'Invalid labels for {image} - expected 1 to {MAX_PAINTINGS} labels')
        if not all(type(v) is int and v >= UNKNOWN_LABEL for v in labels):
            raise MalformedResults(f'Invalid labels for {image} - expected integers >= {UNKNOWN_LABEL}')
        paths = {key: query_dir.joinpath(raw[key]) if raw.get(key) else None for key in ('mask', 'boxes', 'angle')}
        return GroundTruthQuery(image, tuple(labels), **paths)

    def __len__(self) -> int:
        return len(self.queries)

    def __iter__(self) -> Iterator[GroundTruthQuery]:
        return iter(self.queries)


def _with_sidecar(gt: GroundTruth, key: str) -> Iterator[GroundTruthQuery]:
    for query in gt:
        if (path := getattr(query, key)) is None:
            log.debug(f'Skipping {query.image}: no {key} ground truth')
        elif not path.exists():
            raise MalformedResults(f'Missing ground truth file: {path.as_posix()}')
        else:
            yield query


def _prediction(pred_dir: Path, name: str) -> Path:
    path = pred_dir.joinpath(name)
    if not path.exists():
        raise MalformedResults(f'Missing prediction file: {path.as_posix()}')
    return path


# endregion

# region Reports


def retrieval_report(results: Results, gt: GroundTruth, k: int) -> dict[str, Any]:
    """
    mAP@K over every ground truth painting.  Paintings are matched to rankings by position; a painting with no
    corresponding ranking is scored with an empty ranking.
    """
    if len(results) != len(gt):
        raise MalformedResults(f'Results contain {len(results)} query images, but the ground truth has {len(gt)}')
    retrievals = []
    for rankings, query in zip(results, gt):
        for i, label in enumerate(query.labels):
            ranking = rankings[i][:k] if i < len(rankings) else []
            retrievals.append(RankedRetrieval(ranking, label, k))
    value = map_at_k(retrievals)
    log.debug(f'mAP@{k}={value:.4f} over {len(retrievals)} paintings')
    return {'k': k, 'queries': len(gt), 'paintings': len(retrievals), f'map@{k}': value}


def mask_report(pred_dir: PathLike, gt: GroundTruth) -> dict[str, Any]:
    """Mean pixel precision, recall, and F1 of the predicted ``<stem>.png`` masks"""
    pred_dir = Path(pred_dir)
    scores = [
        mask_prf(read_mask(_prediction(pred_dir, f'{query.stem}.png')), read_mask(query.mask))
        for query in _with_sidecar(gt, 'mask')
    ]
    if not scores:
        raise MalformedResults('The ground truth does not contain any masks')
    count = len(scores)
    precision, recall, f1 = (sum(values) / count for values in zip(*scores))
    return {'queries': count, 'precision': precision, 'recall': recall, 'f1': f1}


def textbox_report(pred_dir: PathLike, gt: GroundTruth) -> dict[str, Any]:
    """Mean IoU between ground truth text boxes and the predicted ``<stem>.boxes.txt`` boxes they are paired with"""
    pred_dir = Path(pred_dir)
    pairs = []
    for query in _with_sidecar(gt, 'boxes'):
        if expected := read_boxes(query.boxes):
            pairs.extend(match_boxes(read_boxes(_prediction(pred_dir, f'{query.stem}.boxes.txt')), expected))
    if not pairs:
        raise MalformedResults('The ground truth does not contain any text boxes')
    return {'boxes': len(pairs), 'miou': mean_iou(pairs)}


def angle_report(pred_dir: PathLike, gt: GroundTruth) -> dict[str, Any]:
    """Mean angular error of the predicted ``<stem>.angle.txt`` rotations, in degrees"""
    pred_dir = Path(pred_dir)
    predicted, expected = [], []
    for query in _with_sidecar(gt, 'angle'):
        expected.append(read_angle(query.angle))
        predicted.append(read_angle(_prediction(pred_dir, f'{query.stem}.angle.txt')))
    if not expected:
        raise MalformedResults('The ground truth does not contain any angles')
    return {'queries': len(expected), 'mae': mean_angular_error(predicted, expected)}


def check_thresholds(report: Mapping[str, Any], thresholds: Mapping[str, float]):
    """
    :raises: :class:`EvaluationBelowThreshold` if any reported value is below its threshold (``mae`` is an error, so
      it fails when it is above its threshold)
    """
    failed = []
    for name, threshold in thresholds.items():
        value = report[name]
        if (value > threshold) if name == 'mae' else (value < threshold):
            failed.append((name, value, threshold))
    if failed:
        raise EvaluationBelowThreshold(failed)


# endregion
