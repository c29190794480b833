#!/usr/bin/env python

import json
from pathlib import Path
from unittest import main

from painting_retrieval.cli import main as cli_main
from painting_retrieval.evaluation import read_results
from painting_retrieval.testing import RedirectStreams, RetrievalTestCase, TemporaryDir

CONFIG_TOML = """
[preprocess]
rotation = false
denoise = false

[descriptors]
analysis_size = 64

[engine]
k_bright = 2
k_texture = 2
"""


class CliTest(RetrievalTestCase):
    @classmethod
    def setUpClass(cls):
        cls._tmp_dir = TemporaryDir()
        cls.root = root = Path(cls._tmp_dir.name)
        cls.config = root.joinpath('config.toml')
        cls.config.write_text(CONFIG_TOML, encoding='utf-8')
        cls.data = root.joinpath('data')
        cls.index = root.joinpath('museum.idx')
        cls.results = root.joinpath('results.json')
        cls.artifacts = root.joinpath('artifacts')
        cls.gt = cls.data.joinpath('ground_truth.json')
        cls.synth_out = cls.run_cli('synth', '-o', cls.data, '-n', '6', '-Q', '3', '-s', '1')
        cls.index_out = cls.run_cli('index', '-m', cls.data.joinpath('museum'), '-o', cls.index)
        queries = cls.data.joinpath('queries')
        cls.run_cli('query', '-i', cls.index, '-q', queries, '-k', '4', '-o', cls.results, '-e', cls.artifacts)

    @classmethod
    def tearDownClass(cls):
        cls._tmp_dir.cleanup()

    @classmethod
    def argv(cls, *args, config: bool = True) -> list[str]:
        argv = [arg.as_posix() if isinstance(arg, Path) else arg for arg in args]
        if config:
            argv += ['-c', cls.config.as_posix()]
        return argv

    @classmethod
    def run_cli(cls, *args, config: bool = True) -> str:
        with RedirectStreams() as streams:
            cli_main(cls.argv(*args, config=config))
        return streams.stdout

    def assert_exit_code(self, code: int, *args, config: bool = True) -> str:
        with RedirectStreams() as streams, self.assertRaises(SystemExit) as ctx:
            cli_main(self.argv(*args, config=config))
        self.assertEqual(code, ctx.exception.code)
        return streams.stderr

    def test_synth_output(self):
        self.assertTrue(self.synth_out.startswith('generated 6 paintings and 3 queries in '))
        self.assertTrue(self.gt.exists())
        self.assertTrue(self.data.joinpath('museum', 'catalog.tsv').exists())

    def test_index_output(self):
        self.assertEqual('indexed 6 paintings\n', self.index_out)
        self.assertTrue(self.index.exists())

    def test_query_results(self):
        results = read_results(self.results)
        self.assertEqual(3, len(results))
        for rankings in results:
            self.assertLessEqual(len(rankings), 3)
            for ranking in rankings:
                self.assertLessEqual(len(ranking), 4)

    def test_query_artifacts(self):
        for stem in ('00000', '00001', '00002'):
            with self.subTest(stem=stem):
                self.assertTrue(self.artifacts.joinpath(f'{stem}.png').exists())
                self.assertTrue(self.artifacts.joinpath(f'{stem}.boxes.txt').exists())
                self.assertEqual('0.0\n', self.artifacts.joinpath(f'{stem}.angle.txt').read_text('utf-8'))

    def test_eval(self):
        report_path = self.root.joinpath('report.json')
        stdout = self.run_cli('eval', '-g', self.gt, '-r', self.results, '-k', '4', '--out', report_path)
        lines = stdout.splitlines()
        self.assertEqual(['k: 4', 'queries: 3', 'paintings: 3'], lines[:3])
        self.assertTrue(lines[3].startswith('map@4: '))
        report = json.loads(report_path.read_text('utf-8'))
        self.assertEqual({'k', 'queries', 'paintings', 'map@4'}, set(report))
        self.assertTrue(0 <= report['map@4'] <= 1)

    def test_eval_assert_passes(self):
        self.run_cli('eval', '-g', self.gt, '-r', self.results, '-k', '4', '--assert', '0')

    def test_eval_assert_fails(self):
        stderr = self.assert_exit_code(1, 'eval', '-g', self.gt, '-r', self.results, '-k', '4', '-a', '1.01')
        self.assertIn('Evaluation below threshold: map@4=', stderr)

    def test_mask_eval(self):
        stdout = self.run_cli('mask-eval', '-g', self.gt, '-p', self.artifacts)
        lines = stdout.splitlines()
        self.assertEqual('queries: 3', lines[0])
        self.assertEqual(['precision', 'recall', 'f1'], [line.split(': ')[0] for line in lines[1:]])

    def test_angle_eval(self):
        stdout = self.run_cli('angle-eval', '-g', self.gt, '-p', self.artifacts, '--assert', '0.5')
        self.assertEqual('queries: 3\nmae: 0.0000\n', stdout)

    def test_textbox_eval_without_boxes(self):
        stderr = self.assert_exit_code(2, 'textbox-eval', '-g', self.gt, '-p', self.artifacts)
        self.assertIn('does not contain any text boxes', stderr)

    def test_cluster(self):
        out_path = self.root.joinpath('clusters.json')
        stdout = self.run_cli('cluster', '-i', self.index, '-o', out_path, '-s', '3')
        self.assertTrue(stdout.startswith('clustered 6 paintings into '))
        data = json.loads(out_path.read_text('utf-8'))
        self.assertEqual({str(label) for label in range(6)}, set(data['clusters']))
        members = sorted(label for labels in data['members'].values() for label in labels)
        self.assertEqual(list(range(6)), members)

    def test_fingerprint_mismatch(self):
        out_path = self.root.joinpath('mismatch.json')
        stderr = self.assert_exit_code(2, 'cluster', '-i', self.index, '-o', out_path, config=False)
        self.assertIn('different descriptor configuration', stderr)
        self.assertFalse(out_path.exists())

    def test_missing_museum_dir(self):
        self.assert_exit_code(2, 'index', '-m', self.root.joinpath('missing'), '-o', self.root.joinpath('x.idx'))

    def test_missing_sub_command(self):
        self.assert_exit_code(2)

    def test_invalid_config(self):
        bad_config = self.root.joinpath('bad.toml')
        bad_config.write_text('[preprocess]\nblock_bins = 16\n', encoding='utf-8')
        args = ('index', '-m', self.data.joinpath('museum'), '-o', self.root.joinpath('bad.idx'), '-c', bad_config)
        stderr = self.assert_exit_code(2, *args, config=False)
        self.assertIn('invalid config preprocess.block_bins: expected in [descriptors]', stderr)


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
