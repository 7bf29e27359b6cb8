"""
Tokenizer shared by every text scorer in the package.

Lowercases, splits on Unicode word characters and (by default) drops a fixed
English stopword list. The list ships with the package and is versioned so
stored indexes can tell when it changed. The " [SEP] " marker that
evidence_text places between title and abstract is a field boundary, not a
term, and never becomes a token.
"""

import re
from typing import List

STOPWORDS_VERSION = 1

STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because been
    before being below between both but by can could did do does doing down during
    each few for from further had has have having he her here hers herself him
    himself his how i if in into is it its itself just me more most my myself no
    nor not now of off on once only or other our ours ourselves out over own same
    she should so some such than that the their theirs them themselves then there
    these they this those through to too under until up very was we were what when
    where which while who whom why will with would you your yours yourself
    yourselves
    """.split()
)

_WORD = re.compile(r"\w+", re.UNICODE)
_SEP_MARKER = "[SEP]"


def tokenize(text: str, remove_stopwords: bool = True) -> List[str]:
    """
    Split text into lowercase word tokens.

    Args:
        text: Any text; empty text gives an empty list
        remove_stopwords: Drop tokens found in STOPWORDS

    Returns:
        List[str]: e.g. "COVID-19 Vaccines" -> ["covid", "19", "vaccines"]
    """
    if not text:
        return []
    tokens = _WORD.findall(text.replace(_SEP_MARKER, " ").lower())
    if remove_stopwords:
        return [token for token in tokens if token not in STOPWORDS]
    return tokens


def analyzer(remove_stopwords: bool = True):
    """Return a one-argument tokenize callable for scikit-learn vectorizers."""

    def analyze(text: str) -> List[str]:
        return tokenize(text, remove_stopwords=remove_stopwords)

    return analyze
