"""
The ``painting-retrieval`` command line interface.

Exit codes: 0 on success, 1 when an evaluation falls below an ``--assert`` threshold, and 2 for any fatal error.

:author: Doug Skrypa
"""

from __future__ import annotations

import json
import logging
from abc import ABC, abstractmethod
from functools import cached_property
from pathlib import Path
from typing import Any, Optional

from cli_command_parser import Command, Counter, Flag, Option, ParamGroup, SubCommand
from cli_command_parser.inputs import NumRange
from cli_command_parser.inputs import Path as IPath

from .config import Profile, QueryMode, RunConfig
from .error_handling import retrieval_error_handler
from .evaluation import GroundTruth, angle_report, check_thresholds, mask_report, read_results, retrieval_report
from .evaluation import textbox_report, write_artifacts, write_results

__all__ = ['PaintingRetrieval', 'main']
log = logging.getLogger(__name__)

DIR = IPath(type='dir', exists=True)
FILE = IPath(type='file', exists=True)


class PaintingRetrieval(
    Command, description='Query-by-example painting retrieval', error_handler=retrieval_error_handler
):
    sub_cmd = SubCommand(help='The command to run')
    config_path = Option('--config', '-c', metavar='PATH', type=FILE, help='A TOML config file')
    jobs = Option('-j', type=NumRange(int, min=1), help='Number of images to process in parallel')
    with ParamGroup('Common'):
        verbose = Counter('-v', help='Increase logging verbosity (can specify multiple times)')

    def _init_command_(self):
        log_fmt = '%(asctime)s %(levelname)s %(name)s %(lineno)d %(message)s' if self.verbose > 1 else '%(message)s'
        logging.basicConfig(level=logging.DEBUG if self.verbose else logging.INFO, format=log_fmt)

    def _config_overrides(self) -> dict[str, Any]:
        return {'jobs': self.jobs} if self.jobs is not None else {}

    @cached_property
    def run_config(self) -> RunConfig:
        overrides = self._config_overrides()
        if self.config_path:
            return RunConfig.load(self.config_path, **overrides)
        return RunConfig(**overrides)


def _write_json(data: Any, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + '\n', encoding='utf-8')


# region Index Lifecycle


class Index(PaintingRetrieval, choice='index', help='Build an index from a directory of museum images'):
    museum = Option('-m', metavar='DIR', type=DIR, required=True, help='Directory containing museum images')
    catalog = Option(
        metavar='FILE', type=FILE, help='The label / author / title catalog (default: catalog.tsv in the museum dir)'
    )
    out = Option('-o', metavar='PATH', type=IPath(type='file'), required=True, help='Index output path')

    def main(self):
        from .engine import build_index, save_index

        index = build_index(self.museum, self.run_config, self.catalog)
        save_index(index, self.out)
        print(f'indexed {len(index)} paintings')


class Query(PaintingRetrieval, choice='query', help='Rank the museum for every painting in each query image'):
    index = Option('-i', metavar='PATH', type=FILE, required=True, help='An index file')
    queries = Option('-q', metavar='DIR', type=DIR, required=True, help='Directory containing query images')
    k = Option('-k', type=NumRange(int, min=1), default=10, help='The number of labels in each ranking')
    mode = Option('-M', type=QueryMode, default=QueryMode.FEATURE, help='How the museum is ranked')
    out = Option('-o', metavar='PATH', type=IPath(type='file'), required=True, help='Results JSON output path')
    emit_artifacts = Option(
        '-e', metavar='DIR', type=IPath(type='dir'), help='Write the masks, text boxes, and angles found in each image'
    )
    force = Flag('-F', help='Load the index even if it was built with different descriptor settings')

    def main(self):
        from .engine import load_index, query_paths
        from .utils import iter_image_paths

        index = load_index(self.index, self.run_config, self.force)
        outcomes = query_paths(index, iter_image_paths(self.queries), self.k, self.mode, self.run_config)
        results = write_results(outcomes, self.out)
        if self.emit_artifacts:
            for outcome in outcomes:
                write_artifacts(outcome, self.emit_artifacts)
        log.info(f'Wrote results for {len(results)} query images to {self.out.as_posix()}')


# endregion

# region Evaluation


class Evaluation(PaintingRetrieval, ABC):
    #: The report value that ``--assert`` applies to
    assert_key: str = None

    gt = Option('-g', metavar='FILE', type=FILE, required=True, help='The ground truth file')
    threshold = Option('--assert', '-a', type=float, help='Exit with code 1 if the reported value is worse than this')
    report_path = Option('--out', '-o', metavar='PATH', type=IPath(type='file'), help='Also write the report as JSON')

    def main(self):
        report = self.build_report(GroundTruth.load(self.gt))
        for key, value in report.items():
            print(f'{key}: {value:.4f}' if isinstance(value, float) else f'{key}: {value}')
        if self.report_path:
            _write_json(report, self.report_path)
        if self.threshold is not None:
            check_thresholds(report, {self.assert_key: self.threshold})

    @abstractmethod
    def build_report(self, gt: GroundTruth) -> dict[str, Any]:
        raise NotImplementedError


class Eval(Evaluation, choice='eval', help='Compute mAP@K for a results file'):
    results = Option('-r', metavar='FILE', type=FILE, required=True, help='A results JSON file')
    k = Option('-k', type=NumRange(int, min=1), default=10, help='The rank cutoff')

    @property
    def assert_key(self) -> str:
        return f'map@{self.k}'

    def build_report(self, gt: GroundTruth) -> dict[str, Any]:
        return retrieval_report(read_results(self.results), gt, self.k)


class MaskEval(Evaluation, choice='mask-eval', help='Compare predicted painting masks with the ground truth'):
    assert_key = 'f1'
    pred = Option('-p', metavar='DIR', type=DIR, required=True, help='Directory containing predicted masks')

    def build_report(self, gt: GroundTruth) -> dict[str, Any]:
        return mask_report(self.pred, gt)


class TextboxEval(Evaluation, choice='textbox-eval', help='Compare predicted text boxes with the ground truth'):
    assert_key = 'miou'
    pred = Option('-p', metavar='DIR', type=DIR, required=True, help='Directory containing predicted text boxes')

    def build_report(self, gt: GroundTruth) -> dict[str, Any]:
        return textbox_report(self.pred, gt)


class AngleEval(Evaluation, choice='angle-eval', help='Compare predicted rotation angles with the ground truth'):
    assert_key = 'mae'
    pred = Option('-p', metavar='DIR', type=DIR, required=True, help='Directory containing predicted angles')

    def build_report(self, gt: GroundTruth) -> dict[str, Any]:
        return angle_report(self.pred, gt)


# endregion

# region Clustering & Synthetic Data


class Cluster(PaintingRetrieval, choice='cluster', help='Group the museum by brightness, then by texture'):
    index = Option('-i', metavar='PATH', type=FILE, required=True, help='An index file')
    out = Option('-o', metavar='PATH', type=IPath(type='file'), required=True, help='Cluster JSON output path')
    seed = Option('-s', type=NumRange(int, min=0), help='Seed for K-means initialization')
    force = Flag('-F', help='Load the index even if it was built with different descriptor settings')

    def _config_overrides(self) -> dict[str, Any]:
        overrides = super()._config_overrides()
        if self.seed is not None:
            overrides['seed'] = self.seed
        return overrides

    def main(self):
        from .engine import kmeans_cluster, load_index

        config = self.run_config
        index = load_index(self.index, config, self.force)
        clusters = kmeans_cluster(index, config.k_bright, config.k_texture, config.seed, config.kmeans_max_iter)
        members = {}
        for label, cluster_id in sorted(clusters.items()):
            members.setdefault(str(cluster_id), []).append(label)
        _write_json({'clusters': {str(k): v for k, v in clusters.items()}, 'members': members}, self.out)
        print(f'clustered {len(clusters)} paintings into {len(members)} groups')


class Synth(PaintingRetrieval, choice='synth', help='Generate a synthetic museum and query dataset'):
    out = Option('-o', metavar='DIR', type=IPath(type='dir'), required=True, help='Output directory')
    profile = Option('-p', type=Profile, default=Profile.DS1, help='The kind of query scenes to generate')
    seed = Option('-s', type=NumRange(int, min=0), default=0, help='Seed for the random generator')
    museum_size = Option('-n', type=NumRange(int, min=1), default=20, help='The number of museum paintings')
    query_count = Option('--queries', '-Q', type=NumRange(int, min=0), default=30, help='The number of query scenes')

    def main(self):
        from .synthetic import DatasetGenerator

        generator = DatasetGenerator(self.profile, self.seed, self.museum_size, self.query_count)
        dataset = generator.write(self.out)
        print(f'generated {dataset.museum_size} paintings and {dataset.query_count} queries in {self.out.as_posix()}')


# endregion


def main(argv: Optional[list[str]] = None):
    PaintingRetrieval.parse_and_run(argv)
