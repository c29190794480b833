#!/usr/bin/env python

from pathlib import Path
from unittest import TestCase, main
from unittest.mock import patch

from cli_command_parser.exceptions import ParamsMissing

from painting_retrieval.error_handling import FATAL_CODE, retrieval_error_handler
from painting_retrieval.exceptions import EvaluationBelowThreshold, FingerprintMismatch, InvalidArgument, InvalidConfig
from painting_retrieval.exceptions import NoPaintingFound, RetrievalError, UnreadableImage, VersionMismatch
from painting_retrieval.imgproc.morphology import StructuringElement
from painting_retrieval.testing import RedirectStreams


class ErrorHandlerTest(TestCase):
    def assert_exits_with(self, code: int, exc: BaseException) -> str:
        with RedirectStreams() as streams, self.assertRaises(SystemExit) as ctx:
            with retrieval_error_handler:
                raise exc
        self.assertEqual(code, ctx.exception.code)
        return streams.stderr

    def test_fatal_errors_exit_2(self):
        cases = [
            (InvalidConfig('seed', 'bad'), 'invalid config seed: bad\n'),
            (VersionMismatch(3, 1), 'Unsupported index format version=3 (expected 1)\n'),
            (UnreadableImage(Path('a/b.png'), 'truncated'), 'Unable to read image: a/b.png - truncated\n'),
            (NoPaintingFound(), 'No painting was found in the image\n'),
        ]
        for exc, expected in cases:
            with self.subTest(exc=exc):
                self.assertEqual(expected, self.assert_exits_with(FATAL_CODE, exc))

    def test_invalid_arguments_exit_2(self):
        with RedirectStreams() as streams, self.assertRaises(SystemExit) as ctx:
            with retrieval_error_handler:
                StructuringElement(4, 3)
        self.assertEqual(FATAL_CODE, ctx.exception.code)
        self.assertIn('Invalid structuring element width=4', streams.stderr)

    def test_threshold_failure_exits_1(self):
        stderr = self.assert_exits_with(1, EvaluationBelowThreshold([('f1', 0.25, 0.5), ('mae', 3.0, 1.0)]))
        self.assertEqual('Evaluation below threshold: f1=0.2500 (threshold=0.5), mae=3.0000 (threshold=1.0)\n', stderr)

    def test_usage_error_exits_2(self):
        with patch.object(ParamsMissing, 'show') as show:
            self.assert_exits_with(FATAL_CODE, ParamsMissing([]))
        show.assert_called_once()

    def test_other_errors_propagate(self):
        with self.assertRaises(KeyError):
            with retrieval_error_handler:
                raise KeyError('x')

    def test_handler_is_a_copy(self):
        from cli_command_parser.error_handling import extended_error_handler

        self.assertIn(RetrievalError, retrieval_error_handler.exc_handler_map)
        self.assertNotIn(RetrievalError, extended_error_handler.exc_handler_map)


class RetrievalErrorTest(TestCase):
    def test_default_code_and_message(self):
        exc = RetrievalError()
        self.assertEqual(2, exc.code)
        self.assertEqual('', str(exc))

    def test_show_without_message(self):
        with RedirectStreams() as streams:
            self.assertTrue(RetrievalError().show())
        self.assertEqual('', streams.stderr)

    def test_exit(self):
        with RedirectStreams() as streams, self.assertRaises(SystemExit) as ctx:
            FingerprintMismatch('a' * 64, 'b' * 64).exit()
        self.assertEqual(2, ctx.exception.code)
        self.assertIn('index=aaaaaaaaaaaa, active=bbbbbbbbbbbb', streams.stderr)

    def test_subclasses_keep_builtin_bases(self):
        self.assertIsInstance(InvalidConfig(None, 'x'), ValueError)
        self.assertIsInstance(InvalidArgument('x'), ValueError)
        self.assertIsInstance(InvalidArgument('x'), RetrievalError)
        self.assertIsInstance(UnreadableImage(Path('x.png')), OSError)
        self.assertEqual('Unable to read image: x.png', str(UnreadableImage(Path('x.png'))))


if __name__ == '__main__':
    try:
        main(verbosity=2, exit=False)
    except KeyboardInterrupt:
        print()
