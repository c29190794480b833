"""
Error handling for the ``painting-retrieval`` CLI.

Exceptions from this package and usage errors from the argument parser are printed to stderr and converted into the
exit code documented for the CLI: 2 for fatal errors, 1 when an evaluation falls below an asserted threshold.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging

from cli_command_parser.error_handling import ErrorHandler, extended_error_handler
from cli_command_parser.exceptions import CommandParserException

from .exceptions import RetrievalError

__all__ = ['retrieval_error_handler', 'FATAL_CODE']
log = logging.getLogger(__name__)

FATAL_CODE = 2

#: The :class:`ErrorHandler` used by the CLI (extends the parser's default handler)
retrieval_error_handler: ErrorHandler = extended_error_handler.copy()


@retrieval_error_handler(RetrievalError)
def handle_retrieval_error(exc: RetrievalError) -> int:
    log.debug('Fatal error:', exc_info=True)
    exc.show()
    return exc.code


@retrieval_error_handler(CommandParserException)
def handle_usage_error(exc: CommandParserException) -> int:
    exc.show()
    return FATAL_CODE
