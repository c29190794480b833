__title__ = 'painting_retrieval'
__description__ = 'Query-by-example painting retrieval'
__url__ = 'https://github.com/dskrypa/painting_retrieval'
__version__ = '2026.10.18'
__author__ = 'Doug Skrypa'
__author_email__ = 'dskrypa@gmail.com'
__license__ = 'Apache 2.0'
__copyright__ = 'Copyright 2026 Doug Skrypa'
